//! Text formats.
//!
//! Networks are edge lists with one `u v c` record per line; a line with a
//! single token declares an isolated-so-far vertex so that label order can
//! be fixed explicitly. Measures are `v m` records. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;
use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder, ResistanceMatrix, VertexMeasure};
use crate::spaces::GasketGraph;
use crate::walk::Trajectory;

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#'))
            .then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("`{tok}` is not a number"),
    })
}

pub fn parse_network(text: &str) -> Result<Network> {
    let mut b = NetworkBuilder::new();
    for (line, toks) in records(text) {
        match toks.as_slice() {
            [v] => {
                b.vertex(v);
            }
            [u, v, c] => {
                let c = parse_f64(c, line)?;
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("conductance {c} must be positive"),
                    });
                }
                if u == v {
                    return Err(Error::Parse {
                        line,
                        msg: "self-loop".into(),
                    });
                }
                b.edge(u, v, c);
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: "expected `u v c`".into(),
                })
            }
        }
    }
    b.build()
}

pub fn read_network(mut r: impl Read) -> Result<Network> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    parse_network(&s)
}

/// Edge list in canonical order; floats use the shortest round-tripping form.
pub fn format_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} vertices, {} edges", net.len(), net.edges().len());
    for label in net.labels() {
        let _ = writeln!(out, "{label}");
    }
    for e in net.edges() {
        let _ = writeln!(out, "{} {} {}", net.label(e.u), net.label(e.v), e.conductance);
    }
    out
}

pub fn write_network(net: &Network, mut w: impl Write) -> Result<()> {
    w.write_all(format_network(net).as_bytes())?;
    Ok(())
}

/// Reads `v m` records; every vertex of `net` must appear exactly once.
pub fn parse_measure(text: &str, net: &Network) -> Result<VertexMeasure> {
    let mut weights = vec![f64::NAN; net.len()];
    for (line, toks) in records(text) {
        let [v, m] = toks.as_slice() else {
            return Err(Error::Parse {
                line,
                msg: "expected `v m`".into(),
            });
        };
        let idx = net.vertex(v).ok_or_else(|| Error::Parse {
            line,
            msg: format!("unknown vertex `{v}`"),
        })?;
        if !weights[idx].is_nan() {
            return Err(Error::Parse {
                line,
                msg: format!("vertex `{v}` listed twice"),
            });
        }
        weights[idx] = parse_f64(m, line)?;
    }
    if let Some(i) = weights.iter().position(|w| w.is_nan()) {
        return Err(Error::domain(format!("no mass given for vertex `{}`", net.label(i))));
    }
    VertexMeasure::new(weights)
}

pub fn format_measure(net: &Network, mu: &VertexMeasure) -> String {
    let mut out = String::new();
    for (label, w) in net.labels().iter().zip(mu.weights()) {
        let _ = writeln!(out, "{label} {w}");
    }
    out
}

/// CSV with a header row of labels followed by one row per vertex.
pub fn write_resistance_csv(r: &ResistanceMatrix, w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(r.labels())?;
    for i in 0..r.len() {
        wr.write_record((0..r.len()).map(|j| r.get(i, j).to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_resistance_csv(r: impl Read) -> Result<ResistanceMatrix> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let labels: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    let n = labels.len();
    let mut values = DMatrix::zeros(n, n);
    let mut rows = 0;
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if i >= n || rec.len() != n {
            return Err(Error::Parse {
                line,
                msg: format!("expected a {n}x{n} matrix"),
            });
        }
        for (j, tok) in rec.iter().enumerate() {
            values[(i, j)] = parse_f64(tok, line)?;
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse {
            line: rows + 1,
            msg: format!("expected {n} rows, found {rows}"),
        });
    }
    ResistanceMatrix::new(labels, values)
}

/// `time,vertex` rows: one per jump, then the frozen state at the end time.
pub fn write_trajectory_csv(net: &Network, traj: &Trajectory, w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["time", "vertex"])?;
    for (t, &x) in traj.jump_times.iter().zip(&traj.states) {
        wr.write_record([t.to_string(), net.label(x).to_owned()])?;
    }
    let last = *traj.states.last().expect("trajectories are nonempty");
    wr.write_record([traj.end_time().to_string(), net.label(last).to_owned()])?;
    wr.flush()?;
    Ok(())
}

/// `label,x,y` rows of planar coordinates.
pub fn write_gasket_coords_csv(g: &GasketGraph, w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["vertex", "x", "y"])?;
    for (v, (x, y)) in g.coords.iter().enumerate() {
        wr.write_record([g.net.label(v).to_owned(), x.to_string(), y.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSeed;
    use crate::spaces::gasket_graph;
    use crate::walk::simulate;

    #[test]
    fn network_round_trip() {
        let text = "# a triangle\nb\na b 2\nb c 0.5\n\nc a 1e-3\n";
        let net = parse_network(text).unwrap();
        assert_eq!(net.labels(), &["b", "a", "c"]);
        let again = parse_network(&format_network(&net)).unwrap();
        assert_eq!(again, net);
    }

    #[test]
    fn network_parse_errors() {
        for (text, line) in [("a b\n", 1), ("a b 1\n# x\na c -1\n", 3), ("a b x\n", 1), ("a a 1\n", 1)] {
            match parse_network(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse_network("a b 1\nc d 1\n"), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn measure_round_trip() {
        let net = parse_network("x y 1\ny z 1\n").unwrap();
        let mu = parse_measure("z 3\nx 1\ny 2\n", &net).unwrap();
        assert_eq!(mu.weights(), &[1.0, 2.0, 3.0]);
        assert_eq!(parse_measure(&format_measure(&net, &mu), &net).unwrap(), mu);
        assert!(parse_measure("x 1\ny 2\n", &net).is_err());
        assert!(parse_measure("x 1\nx 1\ny 1\nz 1\n", &net).is_err());
        assert!(parse_measure("x 1\nq 1\n", &net).is_err());
    }

    #[test]
    fn resistance_csv_round_trip() {
        let g = gasket_graph(1).unwrap();
        let r = g.net.resistance_matrix();
        let mut buf = Vec::new();
        write_resistance_csv(&r, &mut buf).unwrap();
        let back = read_resistance_csv(buf.as_slice()).unwrap();
        assert_eq!(back.labels(), r.labels());
        assert_eq!(back.matrix(), r.matrix());
        let header = String::from_utf8(buf).unwrap();
        assert!(header.starts_with("0_0,"));
    }

    #[test]
    fn trajectory_csv() {
        let net = parse_network("a b 1\n").unwrap();
        let mu = VertexMeasure::vsrw(&net);
        let traj = simulate(&net, &mu, 0, 2.0, None, RandomSeed(1)).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&net, &traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time,vertex"));
        assert_eq!(lines.next(), Some("0,a"));
        assert_eq!(text.lines().count(), traj.states.len() + 2);
        assert!(text.trim_end().ends_with(",a") || text.trim_end().ends_with(",b"));
    }
}
