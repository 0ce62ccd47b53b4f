//! Green kernels of killed walks computed from resistance data, and Monte
//! Carlo estimators for the same quantities.
//!
//! For the walk killed on hitting `x`, the expected local time at `z` started
//! from `y` is `g_x(y,z) = (R(x,y) + R(x,z) - R(y,z)) / 2`. Killing on a set
//! `A` replaces the point resistances by resistances to `A` and `R(y,z)` by
//! the resistance with `A` shorted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, ResistanceMatrix, Vertex, VertexMeasure};
use crate::rng::{replicate, RandomSeed};
use crate::walk::WalkKernel;

pub use crate::stats::McEstimate;

/// Jump budget per killed-walk run.
pub const MAX_JUMPS: u64 = 1_000_000;

/// `g_x(y, z)`: expected local time at `z` before hitting `x`, from `y`.
pub fn resolvent_kernel(r: &ResistanceMatrix, x: Vertex, y: Vertex, z: Vertex) -> f64 {
    (r.get(x, y) + r.get(x, z) - r.get(y, z)) / 2.0
}

/// Green kernel of the walk killed on a set, from shorted resistances.
#[derive(Debug, Clone)]
pub struct ShortedKernel {
    in_set: Vec<bool>,
    image: Vec<Vertex>,
    contracted: Vertex,
    shorted: ResistanceMatrix,
}

impl ShortedKernel {
    pub fn new(net: &Network, set: &[Vertex]) -> Result<Self> {
        let shorted = net.short(set)?;
        let mut in_set = vec![false; net.len()];
        for &a in set {
            in_set[a] = true;
        }
        Ok(ShortedKernel {
            in_set,
            image: (0..net.len()).map(|v| shorted.image(v)).collect(),
            contracted: shorted.contracted(),
            shorted: shorted.network().resistance_matrix(),
        })
    }

    /// `R(y, A)`.
    pub fn resistance_to_set(&self, y: Vertex) -> f64 {
        self.shorted.get(self.image[y], self.contracted)
    }

    /// `R_A(y, z)`.
    pub fn shorted_resistance(&self, y: Vertex, z: Vertex) -> f64 {
        self.shorted.get(self.image[y], self.image[z])
    }

    /// `g_A(y, z) = (R(y,A) + R(z,A) - R_A(y,z)) / 2`, exactly zero on `A`.
    pub fn get(&self, y: Vertex, z: Vertex) -> f64 {
        if self.in_set[y] || self.in_set[z] {
            return 0.0;
        }
        (self.resistance_to_set(y) + self.resistance_to_set(z) - self.shorted_resistance(y, z))
            / 2.0
    }
}

/// `g_A(y, z)` for a single query.
pub fn shorted_kernel(net: &Network, set: &[Vertex], y: Vertex, z: Vertex) -> Result<f64> {
    net.check_vertex(y)?;
    net.check_vertex(z)?;
    Ok(ShortedKernel::new(net, set)?.get(y, z))
}

/// `G_x f(y) = Σ_z g_x(y, z) f(z) μ(z)`.
pub fn resolvent_apply(
    r: &ResistanceMatrix,
    mu: &VertexMeasure,
    x: Vertex,
    f: &[f64],
    y: Vertex,
) -> Result<f64> {
    let n = r.len();
    if f.len() != n || mu.len() != n {
        return Err(Error::domain(format!(
            "function ({}) and measure ({}) must have {n} values",
            f.len(),
            mu.len()
        )));
    }
    if x >= n || y >= n {
        return Err(Error::domain("vertex out of range"));
    }
    Ok((0..n)
        .map(|z| resolvent_kernel(r, x, y, z) * f[z] * mu.weight(z))
        .sum())
}

fn killed_mask(net: &Network, set: &[Vertex]) -> Result<Vec<bool>> {
    if set.is_empty() {
        return Err(Error::domain("killing set must be nonempty"));
    }
    let mut mask = vec![false; net.len()];
    for &a in set {
        net.check_vertex(a)?;
        mask[a] = true;
    }
    Ok(mask)
}

fn estimate(samples: Vec<Option<f64>>) -> Result<McEstimate> {
    let total = samples.len();
    let kept: Vec<f64> = samples.into_iter().flatten().collect();
    let aborted = total - kept.len();
    if kept.is_empty() {
        return Err(Error::McBudget { aborted, total });
    }
    let mut est = McEstimate::from_samples(&kept);
    est.aborted = aborted;
    Ok(est)
}

/// Monte Carlo estimate of `E_y ∫_0^{σ_x} f(X_s) ds` over `n` runs.
///
/// Runs exceeding [`MAX_JUMPS`] are dropped and counted in `aborted`.
pub fn mc_resolvent(
    net: &Network,
    mu: &VertexMeasure,
    x: Vertex,
    f: &[f64],
    y: Vertex,
    n: usize,
    seed: RandomSeed,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    net.check_function(f, "f")?;
    net.check_vertex(y)?;
    let killed = killed_mask(net, &[x])?;
    let kernel = WalkKernel::new(net, mu)?;
    let samples = replicate(n, seed, |_, rng| {
        let mut integral = 0.0;
        kernel
            .run_killed(y, &killed, MAX_JUMPS, rng, |v, dt| integral += f[v] * dt)
            .then_some(integral)
    });
    estimate(samples)
}

/// Monte Carlo estimate of `E_y L_{σ_A}(z)` over `n` runs.
pub fn mc_local_time(
    net: &Network,
    mu: &VertexMeasure,
    set: &[Vertex],
    y: Vertex,
    z: Vertex,
    n: usize,
    seed: RandomSeed,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    net.check_vertex(y)?;
    net.check_vertex(z)?;
    let killed = killed_mask(net, set)?;
    let kernel = WalkKernel::new(net, mu)?;
    let mz = mu.weight(z);
    let samples = replicate(n, seed, |_, rng| {
        let mut occupation = 0.0;
        kernel
            .run_killed(y, &killed, MAX_JUMPS, rng, |v, dt| {
                if v == z {
                    occupation += dt
                }
            })
            .then_some(occupation / mz)
    });
    estimate(samples)
}

/// Exact value against a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub exact: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub n: usize,
    pub z_score: f64,
}

impl Comparison {
    pub fn new(exact: f64, est: &McEstimate) -> Self {
        Comparison {
            exact,
            mc_mean: est.mean,
            mc_se: est.std_error,
            n: est.n_samples,
            z_score: est.z_score(exact),
        }
    }

    pub fn agrees(&self, k: f64) -> bool {
        (self.mc_mean - self.exact).abs() <= k * self.mc_se + 1e-12 * self.exact.abs()
    }
}
