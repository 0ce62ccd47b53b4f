//! Double-double arithmetic and refined dense inverses.
//!
//! Conductances spread over many orders of magnitude make the map from
//! resistances back to conductances ill-conditioned, so the resistance
//! matrix keeps a low-order correction to each entry and the inverses on
//! both sides of the correspondence are refined with residuals evaluated in
//! double-double precision.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact product of two doubles.
    pub fn prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    pub fn scale(self, k: f64) -> Self {
        let (p, e) = two_prod(self.hi, k);
        let (hi, lo) = quick_two_sum(p, e + self.lo * k);
        Dd { hi, lo }
    }
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, rhs: f64) -> Dd {
        let (s, e) = two_sum(self.hi, rhs);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

/// A dense matrix held as `hi + lo` entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct DdMatrix {
    pub hi: DMatrix<f64>,
    pub lo: DMatrix<f64>,
}

impl DdMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Dd) -> Self {
        let mut hi = DMatrix::zeros(n, n);
        let mut lo = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let v = f(i, j);
                hi[(i, j)] = v.hi;
                lo[(i, j)] = v.lo;
            }
        }
        DdMatrix { hi, lo }
    }

    pub fn get(&self, i: usize, j: usize) -> Dd {
        Dd {
            hi: self.hi[(i, j)],
            lo: self.lo[(i, j)],
        }
    }

    pub fn nrows(&self) -> usize {
        self.hi.nrows()
    }

    /// Adds a small f64 correction entrywise, renormalizing each entry.
    fn add_correction(&mut self, corr: &DMatrix<f64>) {
        for j in 0..self.hi.ncols() {
            for i in 0..self.hi.nrows() {
                let v = self.get(i, j) + corr[(i, j)];
                self.hi[(i, j)] = v.hi;
                self.lo[(i, j)] = v.lo;
            }
        }
    }
}

/// Refines an approximate inverse `x ≈ a⁻¹` in place.
///
/// `residual(x)` must return `I - a·x` evaluated in double-double and
/// rounded to f64. Each step applies `x <- x + x·(I - a·x)`.
pub fn refine_inverse(
    x: &mut DdMatrix,
    steps: usize,
    mut residual: impl FnMut(&DdMatrix) -> DMatrix<f64>,
) {
    for _ in 0..steps {
        let r = residual(x);
        let corr = &x.hi * r;
        x.add_correction(&corr);
    }
}

/// `I - a·x` for a sparse symmetric `a` given by rows of `(column, value)`
/// plus a diagonal, with every product formed exactly.
pub fn sparse_residual(
    diag: &[Dd],
    rows: &[Vec<(usize, f64)>],
    x: &DdMatrix,
) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let xij = x.get(i, j);
        let mut acc = diag[i] * xij;
        for &(k, v) in &rows[i] {
            acc = acc + x.get(k, j).scale(v);
        }
        let id = if i == j { 1.0 } else { 0.0 };
        (Dd::from(id) - acc).to_f64()
    })
}

/// `I - a·x` for dense double-double operands.
pub fn dense_residual(a: &DdMatrix, x: &DdMatrix) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let mut acc = Dd::from(if i == j { 1.0 } else { 0.0 });
            for k in 0..n {
                acc = acc - a.get(i, k) * x.get(k, j);
            }
            out[(i, j)] = acc.to_f64();
        }
    }
    out
}
