//! Piecewise-linear control loops.
//!
//! A [`ControlPath`] stores the `2n` field values at the `ν + 2` integer-time
//! control points `t = 0, 1, …, ν + 1`. The first and last rows sit at the
//! degeneracy point (all fields zero), so loops can be concatenated freely.
//! Each row is laid out as `B_z^1 … B_z^n, B_x^1 … B_x^n`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::hamiltonian::ControlSample;

/// Default optimizer box `|value| ≤ 5`.
pub const DEFAULT_AMPLITUDE_BOUND: f64 = 5.0;

/// Decimal places of the table format.
pub const TABLE_DECIMALS: usize = 5;

/// Whether `2·n·ν ≥ 4^n − 1`, i.e. the loop has at least as many free
/// parameters as `SU(2^n)` has generators.
pub fn validate_dof(n: usize, nu: usize) -> bool {
    let (have, need) = dof_counts(n, nu);
    have >= need
}

pub fn check_dof(n: usize, nu: usize) -> Result<()> {
    let (have, need) = dof_counts(n, nu);
    if have >= need {
        Ok(())
    } else {
        Err(Error::Dof { n, nu, have, need })
    }
}

fn dof_counts(n: usize, nu: usize) -> (usize, usize) {
    (2 * n * nu, (1usize << (2 * n)) - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlPath {
    n: usize,
    nu: usize,
    values: Vec<f64>,
}

impl ControlPath {
    /// Builds a path from all `(ν + 2) × 2n` row-major values.
    pub fn new(n: usize, nu: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || nu == 0 {
            return Err(Error::Path(format!(
                "need n >= 1 and nu >= 1 (got n = {n}, nu = {nu})"
            )));
        }
        let expected = (nu + 2) * 2 * n;
        if values.len() != expected {
            return Err(Error::Path(format!(
                "expected {expected} values for n = {n}, nu = {nu}, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Path(format!("non-finite value at flat index {i}")));
        }
        let path = Self { n, nu, values };
        for r in [0, nu + 1] {
            if path.row(r).iter().any(|&v| v != 0.0) {
                return Err(Error::Path(format!(
                    "endpoint row at t = {r} must be the degeneracy point (all zero)"
                )));
            }
        }
        Ok(path)
    }

    pub fn zeros(n: usize, nu: usize) -> Self {
        Self::new(n, nu, vec![0.0; (nu + 2) * 2 * n]).expect("zero path is valid")
    }

    /// Builds a path from the flattened interior rows `1..=ν`.
    pub fn from_interior(n: usize, nu: usize, interior: &[f64]) -> Result<Self> {
        let width = 2 * n;
        if interior.len() != nu * width {
            return Err(Error::Path(format!(
                "expected {} interior values, got {}",
                nu * width,
                interior.len()
            )));
        }
        let mut values = vec![0.0; (nu + 2) * width];
        values[width..(nu + 1) * width].copy_from_slice(interior);
        Self::new(n, nu, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Number of fields per control point (`2n`).
    pub fn width(&self) -> usize {
        2 * self.n
    }

    /// Total traversal time `ν + 1`.
    pub fn duration(&self) -> f64 {
        (self.nu + 1) as f64
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.width())
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.width();
        &self.values[r * w..(r + 1) * w]
    }

    /// Value at control point `row` (0-based, `t = row`) and field column `col`.
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.row(row)[col]
    }

    /// Flattened interior parameters `X_γ` (length `2·n·ν`).
    pub fn interior(&self) -> &[f64] {
        let w = self.width();
        &self.values[w..(self.nu + 1) * w]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sample(&self, t: f64) -> Result<ControlSample> {
        let mut s = ControlSample::zeros(self.n);
        self.sample_into(t, &mut s.bz, &mut s.bx)?;
        Ok(s)
    }

    /// Linear interpolation between the two control points bracketing `t`.
    pub fn sample_into(&self, t: f64, bz: &mut [f64], bx: &mut [f64]) -> Result<()> {
        let end = self.duration();
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeRange { t, end });
        }
        let r = (t.floor() as usize).min(self.nu);
        let frac = t - r as f64;
        let (lo, hi) = (self.row(r), self.row(r + 1));
        let n = self.n;
        for i in 0..n {
            bz[i] = lerp(lo[i], hi[i], frac);
            bx[i] = lerp(lo[n + i], hi[n + i], frac);
        }
        Ok(())
    }

    /// This loop followed by `next`. The shared degeneracy point becomes an
    /// interior control point with zero fields.
    pub fn concat(&self, next: &ControlPath) -> Result<ControlPath> {
        if self.n != next.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: next.n,
            });
        }
        let w = self.width();
        let mut values = self.values.clone();
        values.extend_from_slice(&next.values[w..]);
        ControlPath::new(self.n, self.nu + next.nu + 1, values)
    }

    /// The same loop traversed backwards in time.
    pub fn reversed(&self) -> ControlPath {
        let values = self
            .values
            .chunks_exact(self.width())
            .rev()
            .flatten()
            .copied()
            .collect();
        ControlPath {
            n: self.n,
            nu: self.nu,
            values,
        }
    }

    /// Rounds every value to the table precision, exactly as a write/read
    /// cycle through [`ControlPath::to_table`] would.
    pub fn quantized(&self) -> ControlPath {
        let values = self
            .values
            .iter()
            .map(|&v| {
                format_fixed(v)
                    .parse()
                    .expect("fixed-point output always parses")
            })
            .collect();
        ControlPath {
            n: self.n,
            nu: self.nu,
            values,
        }
    }

    /// Serialises to the comma-delimited table format.
    pub fn to_table(&self) -> String {
        let mut out = String::from("time");
        for i in 1..=self.n {
            let _ = write!(out, ",Bz{i}");
        }
        for i in 1..=self.n {
            let _ = write!(out, ",Bx{i}");
        }
        out.push('\n');
        for (r, row) in self.rows().enumerate() {
            let _ = write!(out, "{}", r + 1);
            for &v in row {
                out.push(',');
                out.push_str(&format_fixed(v));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the table format. Fields may be separated by commas and/or
    /// whitespace; blank lines and `#` comments are skipped; a leading header
    /// line is recognised by a non-numeric first field.
    pub fn from_table(text: &str) -> Result<ControlPath> {
        let mut header_cols: Option<(usize, usize)> = None;
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            if rows.is_empty() && header_cols.is_none() && fields[0].parse::<f64>().is_err() {
                header_cols = Some((line_no, fields.len()));
                continue;
            }
            let mut parsed = Vec::with_capacity(fields.len());
            for (c, f) in fields.iter().enumerate() {
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    column: c + 1,
                    message: format!("'{f}' is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        column: c + 1,
                        message: format!("'{f}' is not finite"),
                    });
                }
                parsed.push(v);
            }
            rows.push((line_no, parsed));
        }

        let Some((first_line, first)) = rows.first() else {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                column: 1,
                message: "table has no data rows".into(),
            });
        };
        let cols = first.len();
        if cols < 3 || cols % 2 == 0 {
            return Err(Error::Parse {
                line: *first_line,
                column: cols,
                message: format!("expected 1 + 2n columns with n >= 1, found {cols}"),
            });
        }
        if let Some((line, hc)) = header_cols {
            if hc != cols {
                return Err(Error::Parse {
                    line,
                    column: hc.min(cols) + 1,
                    message: format!("header has {hc} columns but data rows have {cols}"),
                });
            }
        }
        let n = (cols - 1) / 2;
        for (line, row) in &rows {
            if row.len() != cols {
                return Err(Error::Parse {
                    line: *line,
                    column: row.len().min(cols) + 1,
                    message: format!("expected {cols} columns, found {}", row.len()),
                });
            }
        }
        if rows.len() < 3 {
            let (line, _) = rows.last().expect("non-empty");
            return Err(Error::Parse {
                line: *line,
                column: 1,
                message: format!(
                    "need at least 3 control points (two endpoints and one interior), found {}",
                    rows.len()
                ),
            });
        }
        for (k, (line, row)) in rows.iter().enumerate() {
            if row[0] != (k + 1) as f64 {
                return Err(Error::Parse {
                    line: *line,
                    column: 1,
                    message: format!("time label {} where {} was expected", row[0], k + 1),
                });
            }
        }
        for (line, row) in [rows.first().unwrap(), rows.last().unwrap()] {
            if let Some(c) = row[1..].iter().position(|&v| v != 0.0) {
                return Err(Error::Parse {
                    line: *line,
                    column: c + 2,
                    message: "endpoint rows must be all zero (degeneracy point)".into(),
                });
            }
        }
        let nu = rows.len() - 2;
        let values = rows
            .iter()
            .flat_map(|(_, row)| row[1..].iter().copied())
            .collect();
        ControlPath::new(n, nu, values)
    }

    /// Uniform interior values in `[−bound, bound]`, zero endpoints.
    pub fn random(n: usize, nu: usize, amplitude_bound: f64, seed: u64) -> Result<ControlPath> {
        check_dof(n, nu)?;
        if !(amplitude_bound.is_finite() && amplitude_bound >= 0.0) {
            return Err(Error::Argument(format!(
                "amplitude bound must be finite and non-negative, got {amplitude_bound}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interior: Vec<f64> = (0..nu * 2 * n)
            .map(|_| rng.random_range(-amplitude_bound..=amplitude_bound))
            .collect();
        ControlPath::from_interior(n, nu, &interior)
    }

    /// Adds independent `N(0, rms²)` noise to every interior value.
    pub fn perturb_gaussian(&self, rms: f64, seed: u64) -> Result<ControlPath> {
        if !(rms.is_finite() && rms >= 0.0) {
            return Err(Error::Argument(format!(
                "noise rms must be finite and non-negative, got {rms}"
            )));
        }
        if rms == 0.0 {
            return Ok(self.clone());
        }
        let normal = Normal::new(0.0, rms).map_err(|e| Error::Argument(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interior: Vec<f64> = self
            .interior()
            .iter()
            .map(|&v| v + normal.sample(&mut rng))
            .collect();
        ControlPath::from_interior(self.n, self.nu, &interior)
    }
}

/// Seeded random path; see [`ControlPath::random`].
pub fn random_path(n: usize, nu: usize, amplitude_bound: f64, seed: u64) -> Result<ControlPath> {
    ControlPath::random(n, nu, amplitude_bound, seed)
}

#[inline]
fn lerp(a: f64, b: f64, frac: f64) -> f64 {
    if frac == 0.0 {
        a
    } else {
        (1.0 - frac) * a + frac * b
    }
}

fn format_fixed(v: f64) -> String {
    let s = format!("{v:.prec$}", prec = TABLE_DECIMALS);
    // Keep tiny negatives from printing as "-0.00000".
    if s.bytes().skip(1).all(|b| b == b'0' || b == b'.') && s.starts_with('-') {
        s[1..].to_string()
    } else {
        s
    }
}
