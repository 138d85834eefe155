//! Time-ordered propagation along a control loop.
//!
//! The loop `[0, ν + 1]` is cut into `m = steps_per_segment · (ν + 1)` equal
//! intervals. The fields are sampled at each interval midpoint and the
//! short-time factors are multiplied with later times on the left:
//!
//! ```text
//! U ≈ exp(−i H(γ_m) Δt) ⋯ exp(−i H(γ_1) Δt)
//! ```
//!
//! The step sequence can be cut into contiguous chunks whose partial products
//! are formed concurrently and then reduced in time order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{SquareMatrix, TaylorWorkspace, DEFAULT_TAYLOR_ORDER, TAYLOR_ORDERS, ZERO};
use crate::controlpath::ControlPath;
use crate::error::{Error, Result};
use crate::hamiltonian::{CouplingConvention, RegisterOperators};

/// Default midpoint-rule subintervals per unit segment (`Δt = 0.01`).
pub const DEFAULT_STEPS_PER_SEGMENT: usize = 100;

/// How each short-time factor `exp(−iHΔt)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpmBackend {
    /// Truncated Taylor series of the given order (guarded by `‖HΔt‖_F ≤ 1`).
    Taylor { order: usize },
    /// Exact exponential through the Hermitian eigendecomposition.
    Spectral,
}

impl ExpmBackend {
    pub fn taylor() -> Self {
        ExpmBackend::Taylor {
            order: DEFAULT_TAYLOR_ORDER,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ExpmBackend::Taylor { order } => format!("taylor{order}"),
            ExpmBackend::Spectral => "spectral".into(),
        }
    }
}

impl std::str::FromStr for ExpmBackend {
    type Err = Error;

    /// Accepts `spectral`, `taylor` (order 6) or `taylorN`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "spectral" {
            return Ok(ExpmBackend::Spectral);
        }
        if let Some(rest) = s.strip_prefix("taylor") {
            let order = if rest.is_empty() {
                DEFAULT_TAYLOR_ORDER
            } else {
                rest.trim_start_matches(':')
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad Taylor order in '{s}'")))?
            };
            if !TAYLOR_ORDERS.contains(&order) {
                return Err(Error::Argument(format!(
                    "Taylor order {order} outside 3..=12"
                )));
            }
            return Ok(ExpmBackend::Taylor { order });
        }
        Err(Error::Argument(format!(
            "unknown exponential backend '{s}'"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagatorConfig {
    pub steps_per_segment: usize,
    pub backend: ExpmBackend,
    /// Number of contiguous sub-products evaluated independently.
    pub parallel_chunking: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            steps_per_segment: DEFAULT_STEPS_PER_SEGMENT,
            backend: ExpmBackend::Spectral,
            parallel_chunking: 1,
        }
    }
}

impl PropagatorConfig {
    pub fn with_steps(mut self, steps_per_segment: usize) -> Self {
        self.steps_per_segment = steps_per_segment;
        self
    }

    pub fn with_backend(mut self, backend: ExpmBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_chunking(mut self, parallel_chunking: usize) -> Self {
        self.parallel_chunking = parallel_chunking;
        self
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.steps_per_segment as f64
    }

    fn validate(&self) -> Result<()> {
        if self.steps_per_segment == 0 {
            return Err(Error::Argument("steps_per_segment must be >= 1".into()));
        }
        if self.parallel_chunking == 0 {
            return Err(Error::Argument("parallel_chunking must be >= 1".into()));
        }
        if let ExpmBackend::Taylor { order } = self.backend {
            if !TAYLOR_ORDERS.contains(&order) {
                return Err(Error::Argument(format!(
                    "Taylor order {order} outside 3..=12"
                )));
            }
        }
        Ok(())
    }
}

/// Reusable propagator for one register size, coupling convention and config.
#[derive(Debug, Clone)]
pub struct Propagator {
    ops: RegisterOperators,
    conv: CouplingConvention,
    cfg: PropagatorConfig,
}

impl Propagator {
    pub fn new(n: usize, conv: CouplingConvention, cfg: PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            ops: RegisterOperators::new(n)?,
            conv,
            cfg,
        })
    }

    pub fn n(&self) -> usize {
        self.ops.n()
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.cfg
    }

    pub fn convention(&self) -> &CouplingConvention {
        &self.conv
    }

    pub fn evolve(&self, path: &ControlPath) -> Result<SquareMatrix> {
        if path.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: path.n(),
            });
        }
        let total = self.cfg.steps_per_segment * (path.nu() + 1);
        let chunks = self.cfg.parallel_chunking.min(total);
        if chunks == 1 {
            return self.partial_product(path, 0..total);
        }
        let bounds: Vec<_> = (0..chunks)
            .map(|c| (c * total / chunks)..((c + 1) * total / chunks))
            .collect();
        let partials = bounds
            .into_par_iter()
            .map(|range| self.partial_product(path, range))
            .collect::<Result<Vec<_>>>()?;
        let mut iter = partials.into_iter();
        let mut u = iter.next().expect("at least one chunk");
        for p in iter {
            u = p.matmul(&u);
        }
        Ok(u)
    }

    /// Ordered product of the step factors with indices in `steps`.
    fn partial_product(
        &self,
        path: &ControlPath,
        steps: std::ops::Range<usize>,
    ) -> Result<SquareMatrix> {
        let n = self.n();
        let dim = self.ops.dim();
        let spp = self.cfg.steps_per_segment as f64;
        let dt = 1.0 / spp;
        let mut bz = vec![0.0; n];
        let mut bx = vec![0.0; n];
        let mut h = vec![0.0; dim * dim];
        let mut u = SquareMatrix::identity(dim);
        let mut step = SquareMatrix::zeros(dim);
        let mut next = SquareMatrix::zeros(dim);
        let mut taylor = TaylorWorkspace::new(dim);
        let mut a = SquareMatrix::zeros(dim);
        for s in steps {
            let t = (s as f64 + 0.5) / spp;
            path.sample_into(t, &mut bz, &mut bx)?;
            if bz.iter().chain(&bx).all(|&v| v == 0.0) {
                continue;
            }
            self.ops.fill_real(&bz, &bx, &self.conv, &mut h);
            match self.cfg.backend {
                ExpmBackend::Spectral => real_symmetric_step(&h, dim, dt, &mut step),
                ExpmBackend::Taylor { order } => {
                    for (dst, &v) in a.as_mut_slice().iter_mut().zip(&h) {
                        *dst = Complex64::new(0.0, -v * dt);
                    }
                    taylor.expm_into(&a, order, &mut step)?;
                }
            }
            step.mul_into(&u, &mut next);
            std::mem::swap(&mut u, &mut next);
        }
        Ok(u)
    }
}

/// `exp(−i h dt)` for a real symmetric `h` via `h = V Λ Vᵀ`.
fn real_symmetric_step(h: &[f64], dim: usize, dt: f64, out: &mut SquareMatrix) {
    let eig = DMatrix::from_row_slice(dim, dim, h).symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -l * dt))
        .collect();
    let data = out.as_mut_slice();
    data.fill(ZERO);
    for r in 0..dim {
        for c in r..dim {
            let mut acc = ZERO;
            for (k, &ph) in phases.iter().enumerate() {
                acc += ph * (v[(r, k)] * v[(c, k)]);
            }
            data[r * dim + c] = acc;
            data[c * dim + r] = acc;
        }
    }
}

/// One-shot propagation of `path`.
pub fn evolve(
    path: &ControlPath,
    conv: &CouplingConvention,
    cfg: &PropagatorConfig,
) -> Result<SquareMatrix> {
    Propagator::new(path.n(), *conv, *cfg)?.evolve(path)
}

/// One refinement level of a [`convergence_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel {
    pub steps_per_segment: usize,
    pub dt: f64,
    /// `‖U(Δt) − U(Δt_finest)‖_F`.
    pub deviation: f64,
    /// `‖U(Δt) − U(Δt/2)‖_F`; zero at the finest level.
    pub increment: f64,
}

/// Evaluates the propagator at `steps · 2^j`, `j = 0..=refinements`, and
/// reports each result's distance from the finest one.
pub fn convergence_report(
    path: &ControlPath,
    conv: &CouplingConvention,
    cfg: &PropagatorConfig,
    refinements: usize,
) -> Result<Vec<ConvergenceLevel>> {
    if refinements < 2 {
        return Err(Error::Argument(format!(
            "convergence report needs at least 2 refinements, got {refinements}"
        )));
    }
    let unitaries = (0..=refinements)
        .map(|j| {
            let c = cfg.with_steps(cfg.steps_per_segment << j);
            evolve(path, conv, &c).map(|u| (c, u))
        })
        .collect::<Result<Vec<_>>>()?;
    let finest = &unitaries.last().expect("non-empty").1;
    Ok(unitaries
        .iter()
        .enumerate()
        .map(|(j, (c, u))| ConvergenceLevel {
            steps_per_segment: c.steps_per_segment,
            dt: c.dt(),
            deviation: u.distance(finest),
            increment: unitaries
                .get(j + 1)
                .map_or(0.0, |(_, next)| u.distance(next)),
        })
        .collect())
}

/// Ratios `e_j / e_{j+1}` of successive increments; a second-order scheme
/// gives 4 once the step is in the asymptotic regime.
pub fn deviation_ratios(levels: &[ConvergenceLevel]) -> Vec<f64> {
    let coarse = &levels[..levels.len().saturating_sub(1)];
    coarse
        .windows(2)
        .map(|w| w[0].increment / w[1].increment)
        .collect()
}
