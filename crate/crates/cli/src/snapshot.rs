//! Plain-text snapshot files.
//!
//! 1-D files are CSV with `# key = value` metadata lines before the
//! `x,rho,u,p,E` header. 2-D files start with a `# nx ny x_lo y_lo dx dy t
//! gamma scheme` names line and a matching `# values ...` line, optional
//! `# key = value` lines, then `x,y,rho,u,v,p,E` rows with `x` fastest.
//! Floats are written with 17 significant digits, so every written value
//! reads back bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ldcu::{Field1D, Field2D, GasModel, SchemeFlavor};

use crate::CliError;

const HEADER_1D: &str = "x,rho,u,p,E";
const HEADER_2D: &str = "x,y,rho,u,v,p,E";
const NAMES_2D: &str = "nx ny x_lo y_lo dx dy t gamma scheme";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Identification written into every snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMeta {
    pub problem: String,
    pub scheme: SchemeFlavor,
    pub t: f64,
    pub gamma: f64,
    /// Extra `key = value` pairs (CFL, limiter parameter, ...).
    pub extra: BTreeMap<String, String>,
}

/// A 1-D snapshot in primitive form, one row `[x, ρ, u, p, E]` per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot1D {
    pub meta: SnapshotMeta,
    pub n: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub rows: Vec<[f64; 5]>,
}

/// A 2-D snapshot, one row `[x, y, ρ, u, v, p, E]` per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot2D {
    pub meta: SnapshotMeta,
    pub nx: usize,
    pub ny: usize,
    pub x_lo: f64,
    pub y_lo: f64,
    pub dx: f64,
    pub dy: f64,
    pub rows: Vec<[f64; 7]>,
}

impl Snapshot1D {
    pub fn from_field(field: &Field1D, gas: &GasModel, meta: SnapshotMeta) -> Result<Self, CliError> {
        let g = field.grid;
        let rows = field
            .interior()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let w = s.to_primitive(gas).map_err(|e| CliError::Solver(ldcu::SolverError::Inadmissible {
                    location: ldcu::Location::Cell1D(j),
                    source: e,
                }))?;
                Ok([g.center(j), w.rho, w.u, w.p, s.ener])
            })
            .collect::<Result<_, CliError>>()?;
        Ok(Self { meta, n: g.n, x_lo: g.x_lo, x_hi: g.x_hi, rows })
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut s = String::new();
        let _ = writeln!(s, "# problem = {}", m.problem);
        let _ = writeln!(s, "# scheme = {}", m.scheme);
        let _ = writeln!(s, "# t = {}", num(m.t));
        let _ = writeln!(s, "# n = {}", self.n);
        let _ = writeln!(s, "# x_lo = {}", num(self.x_lo));
        let _ = writeln!(s, "# x_hi = {}", num(self.x_hi));
        let _ = writeln!(s, "# gamma = {}", num(m.gamma));
        for (k, v) in &m.extra {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s.push_str(HEADER_1D);
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&v| num(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        let mut kv = BTreeMap::new();
        loop {
            let line = lines.next().ok_or_else(|| parse_err("missing header"))?;
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| parse_err(format!("bad metadata line {line:?}")))?;
                kv.insert(k.trim().to_string(), v.trim().to_string());
            } else if line.trim() == HEADER_1D {
                break;
            } else {
                return Err(parse_err(format!("expected {HEADER_1D:?}, got {line:?}")));
            }
        }
        let rows = parse_rows::<5>(lines)?;
        let mut take = |k: &str| kv.remove(k).ok_or_else(|| parse_err(format!("missing metadata {k}")));
        let problem = take("problem")?;
        let scheme = parse_scheme(&take("scheme")?)?;
        let t = parse_f64(&take("t")?)?;
        let n = parse_usize(&take("n")?)?;
        let x_lo = parse_f64(&take("x_lo")?)?;
        let x_hi = parse_f64(&take("x_hi")?)?;
        let gamma = parse_f64(&take("gamma")?)?;
        if rows.len() != n {
            return Err(parse_err(format!("expected {n} rows, found {}", rows.len())));
        }
        Ok(Self {
            meta: SnapshotMeta { problem, scheme, t, gamma, extra: kv },
            n,
            x_lo,
            x_hi,
            rows,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_text()).map_err(CliError::io(path))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&fs::read_to_string(path).map_err(CliError::io(path))?)
    }
}

impl Snapshot2D {
    pub fn from_field(field: &Field2D, gas: &GasModel, meta: SnapshotMeta) -> Result<Self, CliError> {
        let g = field.grid;
        let mut rows = Vec::with_capacity(g.nx * g.ny);
        for k in 0..g.ny {
            for j in 0..g.nx {
                let s = field.get(j, k);
                let w = s.to_primitive(gas).map_err(|e| CliError::Solver(ldcu::SolverError::Inadmissible {
                    location: ldcu::Location::Cell2D(j, k),
                    source: e,
                }))?;
                let x = g.x_lo + (j as f64 + 0.5) * g.dx;
                let y = g.y_lo + (k as f64 + 0.5) * g.dy;
                rows.push([x, y, w.rho, w.u, w.v, w.p, s.ener]);
            }
        }
        Ok(Self {
            meta,
            nx: g.nx,
            ny: g.ny,
            x_lo: g.x_lo,
            y_lo: g.y_lo,
            dx: g.dx,
            dy: g.dy,
            rows,
        })
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut s = String::new();
        let _ = writeln!(s, "# {NAMES_2D}");
        let _ = writeln!(
            s,
            "# values {} {} {} {} {} {} {} {} {}",
            self.nx,
            self.ny,
            num(self.x_lo),
            num(self.y_lo),
            num(self.dx),
            num(self.dy),
            num(m.t),
            num(m.gamma),
            m.scheme
        );
        let _ = writeln!(s, "# problem = {}", m.problem);
        for (k, v) in &m.extra {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s.push_str(HEADER_2D);
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&v| num(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(&format!("# {NAMES_2D}")[..]) {
            return Err(parse_err("missing 2-D names line"));
        }
        let values: Vec<&str> = lines
            .next()
            .and_then(|l| l.strip_prefix("# values "))
            .ok_or_else(|| parse_err("missing values line"))?
            .split_whitespace()
            .collect();
        if values.len() != 9 {
            return Err(parse_err(format!("values line has {} fields, expected 9", values.len())));
        }
        let mut kv = BTreeMap::new();
        loop {
            let line = lines.next().ok_or_else(|| parse_err("missing header"))?;
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| parse_err(format!("bad metadata line {line:?}")))?;
                kv.insert(k.trim().to_string(), v.trim().to_string());
            } else if line.trim() == HEADER_2D {
                break;
            } else {
                return Err(parse_err(format!("expected {HEADER_2D:?}, got {line:?}")));
            }
        }
        let rows = parse_rows::<7>(lines)?;
        let (nx, ny) = (parse_usize(values[0])?, parse_usize(values[1])?);
        if rows.len() != nx * ny {
            return Err(parse_err(format!("expected {} rows, found {}", nx * ny, rows.len())));
        }
        let problem = kv.remove("problem").ok_or_else(|| parse_err("missing metadata problem"))?;
        Ok(Self {
            meta: SnapshotMeta {
                problem,
                scheme: parse_scheme(values[8])?,
                t: parse_f64(values[6])?,
                gamma: parse_f64(values[7])?,
                extra: kv,
            },
            nx,
            ny,
            x_lo: parse_f64(values[2])?,
            y_lo: parse_f64(values[3])?,
            dx: parse_f64(values[4])?,
            dy: parse_f64(values[5])?,
            rows,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_text()).map_err(CliError::io(path))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&fs::read_to_string(path).map_err(CliError::io(path))?)
    }
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Snapshot(msg.into())
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| parse_err(format!("bad number {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize, CliError> {
    s.trim().parse().map_err(|_| parse_err(format!("bad integer {s:?}")))
}

fn parse_scheme(s: &str) -> Result<SchemeFlavor, CliError> {
    s.trim().parse().map_err(|_| parse_err(format!("bad scheme {s:?}")))
}

fn parse_rows<'a, const N: usize>(lines: impl Iterator<Item = &'a str>) -> Result<Vec<[f64; N]>, CliError> {
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut row = [0.0; N];
            let mut fields = line.split(',');
            for v in row.iter_mut() {
                *v = parse_f64(fields.next().ok_or_else(|| parse_err(format!("short row {line:?}")))?)?;
            }
            if fields.next().is_some() {
                return Err(parse_err(format!("long row {line:?}")));
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ldcu::{ConservedState1D, ConservedState2D, Grid1D, Grid2D, Primitive1D, Primitive2D};

    fn meta(t: f64) -> SnapshotMeta {
        SnapshotMeta {
            problem: "test".into(),
            scheme: SchemeFlavor::New,
            t,
            gamma: 1.4,
            extra: [("cfl".to_string(), "0.475".to_string())].into_iter().collect(),
        }
    }

    #[test]
    fn one_d_round_trip_is_bit_exact() {
        let gas = GasModel::default();
        let g = Grid1D::new(37, -1.0, 2.0).unwrap();
        let f = Field1D::from_fn(g, |x| {
            ConservedState1D::from_primitive(Primitive1D { rho: 1.0 + 0.3 * (7.0 * x).sin(), u: x / 3.0, p: 0.1 + x * x }, &gas)
        });
        let snap = Snapshot1D::from_field(&f, &gas, meta(0.123456789)).unwrap();
        let text = snap.to_text();
        assert!(text.contains("\nx,rho,u,p,E\n"));
        let back = Snapshot1D::parse(&text).unwrap();
        assert_eq!(back, snap);
        assert_eq!(back.meta.t, 0.123456789);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn constant_field_round_trip() {
        let gas = GasModel::default();
        let g = Grid1D::new(5, 0.0, 1.0).unwrap();
        let c = ConservedState1D::from_primitive(Primitive1D { rho: 0.7, u: -0.1, p: 3.0 }, &gas);
        let snap = Snapshot1D::from_field(&Field1D::from_fn(g, |_| c), &gas, meta(0.0)).unwrap();
        let back = Snapshot1D::parse(&snap.to_text()).unwrap();
        for r in &back.rows {
            assert_eq!(r[1..], snap.rows[0][1..]);
        }
    }

    #[test]
    fn two_d_round_trip_is_bit_exact() {
        let gas = GasModel::default();
        let g = Grid2D::new(7, 5, (0.0, 1.0), (-0.5, 0.5)).unwrap();
        let f = Field2D::from_fn(g, |x, y| {
            ConservedState2D::from_primitive(Primitive2D { rho: 1.0 + x * y, u: x, v: -y, p: 1.0 / 3.0 + x }, &gas)
        });
        let snap = Snapshot2D::from_field(&f, &gas, meta(2.5)).unwrap();
        let text = snap.to_text();
        assert!(text.starts_with("# nx ny x_lo y_lo dx dy t gamma scheme\n# values 7 5 "));
        let back = Snapshot2D::parse(&text).unwrap();
        assert_eq!(back, snap);
        assert_eq!(back.rows[8][0], g.x_lo + 1.5 * g.dx);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(Snapshot1D::parse("x,rho,u,p,E\n1,2,3\n").is_err());
        assert!(Snapshot1D::parse("# problem = a\nnonsense\n").is_err());
        assert!(Snapshot2D::parse("x,y,rho,u,v,p,E\n").is_err());
    }
}
