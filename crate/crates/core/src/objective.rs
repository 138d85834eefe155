//! Target gates and the Frobenius gate-error functional.
//!
//! Basis index `b = b₁b₂…bₙ` with qubit 1 as the most significant bit.
//! A traceless Hamiltonian only reaches `SU(2^n)`, so every target carries
//! its `2^n` unit-determinant representatives `e^{iφ_j} Û`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{SquareMatrix, ONE, ZERO};
use crate::controlpath::ControlPath;
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingConvention;
use crate::propagator::{Propagator, PropagatorConfig};

/// Library gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateName {
    Fredkin,
    Toffoli,
    Qft3,
    Cnot,
    Swap,
    /// Controlled-`√σ_x`.
    Cv,
    Identity(usize),
}

impl GateName {
    pub fn qubits(self) -> usize {
        match self {
            GateName::Fredkin | GateName::Toffoli | GateName::Qft3 => 3,
            GateName::Cnot | GateName::Swap | GateName::Cv => 2,
            GateName::Identity(n) => n,
        }
    }
}

impl std::fmt::Display for GateName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GateName::Fredkin => f.write_str("fredkin"),
            GateName::Toffoli => f.write_str("toffoli"),
            GateName::Qft3 => f.write_str("qft3"),
            GateName::Cnot => f.write_str("cnot"),
            GateName::Swap => f.write_str("swap"),
            GateName::Cv => f.write_str("cv"),
            GateName::Identity(n) => write!(f, "identity-{n}"),
        }
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "fredkin" | "cswap" => GateName::Fredkin,
            "toffoli" | "ccnot" => GateName::Toffoli,
            "qft3" | "qft" => GateName::Qft3,
            "cnot" | "cx" => GateName::Cnot,
            "swap" => GateName::Swap,
            "cv" => GateName::Cv,
            other => {
                let n = other
                    .strip_prefix("identity")
                    .map(|r| r.trim_start_matches(['-', '_']))
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| Error::Argument(format!("unknown gate '{s}'")))?;
                if !(1..=6).contains(&n) {
                    return Err(Error::Argument(format!("identity width {n} outside 1..=6")));
                }
                GateName::Identity(n)
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct GateTarget {
    pub name: String,
    pub n: usize,
    pub matrix: SquareMatrix,
    pub su_representatives: Vec<SquareMatrix>,
}

impl GateTarget {
    /// Wraps an arbitrary unitary of dimension `2^n`.
    pub fn new(name: impl Into<String>, matrix: SquareMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Argument(format!(
                "target dimension {dim} is not a power of two"
            )));
        }
        let su_representatives = phase_align(&matrix)?;
        Ok(Self {
            name: name.into(),
            n: dim.trailing_zeros() as usize,
            matrix,
            su_representatives,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Builds a library target by name.
pub fn target_gate(name: &str) -> Result<GateTarget> {
    let gate: GateName = name.parse()?;
    GateTarget::new(gate.to_string(), gate_matrix(gate))
}

pub fn gate_matrix(gate: GateName) -> SquareMatrix {
    match gate {
        GateName::Fredkin => permutation(8, &[(5, 6)]),
        GateName::Toffoli => permutation(8, &[(6, 7)]),
        GateName::Cnot => permutation(4, &[(2, 3)]),
        GateName::Swap => permutation(4, &[(1, 2)]),
        GateName::Identity(n) => SquareMatrix::identity(1 << n),
        GateName::Cv => {
            let p = Complex64::new(0.5, 0.5);
            let m = Complex64::new(0.5, -0.5);
            let mut u = SquareMatrix::identity(4);
            u[(2, 2)] = p;
            u[(2, 3)] = m;
            u[(3, 2)] = m;
            u[(3, 3)] = p;
            u
        }
        GateName::Qft3 => {
            let norm = FRAC_1_SQRT_2 / 2.0;
            SquareMatrix::from_fn(8, |j, k| {
                Complex64::from_polar(norm, 2.0 * PI * ((j * k) % 8) as f64 / 8.0)
            })
        }
    }
}

fn permutation(dim: usize, swaps: &[(usize, usize)]) -> SquareMatrix {
    let mut image: Vec<usize> = (0..dim).collect();
    for &(a, b) in swaps {
        image.swap(a, b);
    }
    SquareMatrix::from_fn(dim, |r, c| if image[c] == r { ONE } else { ZERO })
}

/// The `dim` matrices `e^{i(−θ + 2πj)/dim} u` with `det(u) = e^{iθ}`, all of
/// unit determinant.
pub fn phase_align(u: &SquareMatrix) -> Result<Vec<SquareMatrix>> {
    if !u.is_unitary() {
        return Err(Error::Argument(format!(
            "phase alignment needs a unitary (residual {:.3e})",
            u.unitarity_residual()
        )));
    }
    let dim = u.dim();
    let theta = u.determinant().arg();
    Ok((0..dim)
        .map(|j| {
            let phi = (-theta + 2.0 * PI * j as f64) / dim as f64;
            u.scale(Complex64::from_polar(1.0, phi))
        })
        .collect())
}

/// Which global phase of the target the error is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMode {
    /// The `j`-th unit-determinant representative.
    Fixed(usize),
    /// Minimum over all unit-determinant representatives.
    #[default]
    BestRepresentative,
    /// Minimum over a continuous global phase.
    PhaseFree,
}

impl ErrorMode {
    pub fn label(&self) -> String {
        match self {
            ErrorMode::Fixed(j) => format!("fixed-{j}"),
            ErrorMode::BestRepresentative => "best-representative".into(),
            ErrorMode::PhaseFree => "phase-free".into(),
        }
    }
}

impl FromStr for ErrorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best" | "best-representative" => Ok(ErrorMode::BestRepresentative),
            "phase-free" | "free" => Ok(ErrorMode::PhaseFree),
            other => other
                .strip_prefix("fixed")
                .map(|r| r.trim_start_matches(['-', ':', '_']))
                .and_then(|r| r.parse().ok())
                .map(ErrorMode::Fixed)
                .ok_or_else(|| Error::Argument(format!("unknown error mode '{s}'"))),
        }
    }
}

/// Error of an already-propagated unitary against `target`.
pub fn unitary_error(u: &SquareMatrix, target: &GateTarget, mode: ErrorMode) -> Result<f64> {
    if u.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: u.dim(),
        });
    }
    match mode {
        ErrorMode::Fixed(j) => target
            .su_representatives
            .get(j)
            .map(|rep| rep.distance(u))
            .ok_or_else(|| {
                Error::Argument(format!(
                    "representative index {j} outside 0..{}",
                    target.su_representatives.len()
                ))
            }),
        ErrorMode::BestRepresentative => Ok(target
            .su_representatives
            .iter()
            .map(|rep| rep.distance(u))
            .fold(f64::INFINITY, f64::min)),
        ErrorMode::PhaseFree => {
            // ‖e^{iφ}Û − U‖² = ‖Û‖² + ‖U‖² − 2 Re(e^{−iφ} Tr(Û†U)) is minimal
            // at φ = arg Tr(Û†U), giving √(2·dim − 2|Tr(Û†U)|) for unitary U.
            // The distance is taken directly to avoid cancellation near zero.
            let m = &target.matrix;
            let overlap: Complex64 = m
                .as_slice()
                .iter()
                .zip(u.as_slice())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let phase = if overlap == ZERO {
                ONE
            } else {
                overlap / overlap.norm()
            };
            Ok(m.as_slice()
                .iter()
                .zip(u.as_slice())
                .map(|(a, b)| (a * phase - b).norm_sqr())
                .sum::<f64>()
                .sqrt())
        }
    }
}

/// `f(X_γ) = ‖Û − U_{X_γ}‖_F` under the chosen phase convention.
pub fn gate_error(
    path: &ControlPath,
    target: &GateTarget,
    conv: &CouplingConvention,
    cfg: &PropagatorConfig,
    mode: ErrorMode,
) -> Result<f64> {
    GateObjective::new(target.clone(), *conv, *cfg, mode)?.error(path)
}

/// Gate-error functional bound to one target, convention and propagator.
#[derive(Debug, Clone)]
pub struct GateObjective {
    propagator: Propagator,
    target: GateTarget,
    mode: ErrorMode,
}

impl GateObjective {
    pub fn new(
        target: GateTarget,
        conv: CouplingConvention,
        cfg: PropagatorConfig,
        mode: ErrorMode,
    ) -> Result<Self> {
        Ok(Self {
            propagator: Propagator::new(target.n, conv, cfg)?,
            target,
            mode,
        })
    }

    pub fn target(&self) -> &GateTarget {
        &self.target
    }

    pub fn mode(&self) -> ErrorMode {
        self.mode
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn with_mode(&self, mode: ErrorMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn error(&self, path: &ControlPath) -> Result<f64> {
        if path.n() != self.target.n {
            return Err(Error::DimensionMismatch {
                expected: self.target.n,
                found: path.n(),
            });
        }
        let u = self.propagator.evolve(path)?;
        unitary_error(&u, &self.target, self.mode)
    }
}

/// Error values on a planar cut through parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    /// Offsets along each direction, shared by rows and columns.
    pub offsets: Vec<f64>,
    /// `values[a][b]` is `f(center + offsets[a]·dir1 + offsets[b]·dir2)`.
    pub values: Vec<Vec<f64>>,
}

impl SurfaceGrid {
    pub fn center_value(&self) -> f64 {
        let c = self.offsets.len() / 2;
        self.values[c][c]
    }

    /// Position and value of the smallest cell.
    pub fn argmin(&self) -> ((usize, usize), f64) {
        let mut best = ((0, 0), f64::INFINITY);
        for (a, row) in self.values.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v < best.1 {
                    best = ((a, b), v);
                }
            }
        }
        best
    }

    /// One row per line, space-delimited.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.values {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Evaluates the objective on `center + s·dir1 + t·dir2` over a uniform
/// `grid × grid` lattice with `s, t ∈ [−half_width, half_width]`. `grid` must
/// be odd so that the middle cell is the center.
pub fn surface_scan(
    center: &ControlPath,
    dir1: &[f64],
    dir2: &[f64],
    half_width: f64,
    grid: usize,
    objective: &GateObjective,
) -> Result<SurfaceGrid> {
    let d = center.interior().len();
    if dir1.len() != d || dir2.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if dir1.len() != d {
                dir1.len()
            } else {
                dir2.len()
            },
        });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let tol = 1e-9;
    if (dot(dir1, dir1) - 1.0).abs() > tol
        || (dot(dir2, dir2) - 1.0).abs() > tol
        || dot(dir1, dir2).abs() > tol
    {
        return Err(Error::Argument(
            "scan directions must be orthonormal".into(),
        ));
    }
    if grid.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "scan grid size must be odd, got {grid}"
        )));
    }
    if !(half_width.is_finite() && half_width >= 0.0) {
        return Err(Error::Argument(format!("invalid half width {half_width}")));
    }
    let mid = grid / 2;
    let offsets: Vec<f64> = (0..grid)
        .map(|i| {
            if mid == 0 {
                0.0
            } else {
                half_width * (i as f64 - mid as f64) / mid as f64
            }
        })
        .collect();
    let base = center.interior();
    let cells: Vec<(usize, usize)> = (0..grid)
        .flat_map(|a| (0..grid).map(move |b| (a, b)))
        .collect();
    let flat = cells
        .par_iter()
        .map(|&(a, b)| {
            let (s, t) = (offsets[a], offsets[b]);
            let x: Vec<f64> = base
                .iter()
                .zip(dir1.iter().zip(dir2))
                .map(|(&c, (&u, &v))| c + s * u + t * v)
                .collect();
            let p = ControlPath::from_interior(center.n(), center.nu(), &x)?;
            objective.error(&p)
        })
        .collect::<Result<Vec<f64>>>()?;
    let values = flat.chunks_exact(grid).map(<[f64]>::to_vec).collect();
    Ok(SurfaceGrid { offsets, values })
}

/// Two seeded random orthonormal directions in a `d`-dimensional space.
pub fn random_orthonormal_directions(d: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if d < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 dimensions for a plane, got {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<f64> { (0..d).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let normalize = |v: &mut Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
    };
    let mut a = draw();
    normalize(&mut a);
    let mut b = draw();
    let proj: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    b.iter_mut().zip(&a).for_each(|(y, x)| *y -= proj * x);
    normalize(&mut b);
    Ok((a, b))
}
