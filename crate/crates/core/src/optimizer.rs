//! Derivative-free gate synthesis.
//!
//! [`polytope_minimize`] is a plain Nelder–Mead search. [`synthesize_gate`]
//! wraps it in the restart loop used for control synthesis: each restart
//! draws a seeded random loop and repeatedly re-runs the polytope search
//! from its own best vertex with a fresh simplex until progress stalls.
//! [`sensitivity_analysis`] measures how the gate error of a loop responds to
//! Gaussian noise on its control values.

use std::cell::Cell;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::controlpath::{check_dof, ControlPath, DEFAULT_AMPLITUDE_BOUND};
use crate::error::{Error, Result};
use crate::objective::GateObjective;

/// Nelder–Mead coefficients and stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytopeOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_evaluations: usize,
    /// Terminate once both the simplex diameter (max-norm from the best
    /// vertex) and the spread of vertex values fall below this.
    pub stall_tolerance: f64,
    /// Axis step used to build the initial simplex around `x0`.
    pub initial_simplex_scale: f64,
}

impl Default for PolytopeOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_evaluations: 20_000,
            stall_tolerance: 1e-10,
            initial_simplex_scale: 0.5,
        }
    }
}

impl PolytopeOptions {
    /// Dimension-dependent coefficients (Gao & Han) that hold up better than
    /// the classical ones in many dimensions.
    pub fn adaptive(d: usize) -> Self {
        let d = d.max(2) as f64;
        Self {
            reflection: 1.0,
            expansion: 1.0 + 2.0 / d,
            contraction: 0.75 - 0.5 / d,
            shrink: 1.0 - 1.0 / d,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.reflection > 0.0
            && self.expansion > 1.0
            && self.expansion > self.reflection
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.stall_tolerance >= 0.0
            && self.initial_simplex_scale > 0.0
            && self.max_evaluations >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "invalid polytope options {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// `false` when the evaluation budget ran out before the stall test passed.
    pub converged: bool,
}

/// Minimizes `objective` from `x0`. NaN values are treated as `+∞`.
pub fn polytope_minimize<F>(
    mut objective: F,
    x0: &[f64],
    opts: &PolytopeOptions,
) -> Result<PolytopeResult>
where
    F: FnMut(&[f64]) -> f64,
{
    opts.validate()?;
    let d = x0.len();
    if d == 0 {
        return Err(Error::Argument(
            "polytope search needs at least one dimension".into(),
        ));
    }
    let evaluations = Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(d + 1);
    verts.push(x0.to_vec());
    vals.push(eval(x0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += opts.initial_simplex_scale;
        vals.push(eval(&x));
        verts.push(x);
    }

    let mut order: Vec<usize> = (0..=d).collect();
    let mut centroid = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut trial2 = vec![0.0; d];
    let mut converged = false;
    loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        let (best, worst, second) = (order[0], order[d], order[d - 1]);

        let spread = vals[worst] - vals[best];
        let diameter = verts
            .iter()
            .flat_map(|v| v.iter().zip(&verts[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= opts.stall_tolerance && diameter <= opts.stall_tolerance {
            converged = true;
            break;
        }
        if evaluations.get() >= opts.max_evaluations {
            break;
        }

        centroid.fill(0.0);
        for &i in &order[..d] {
            for (c, &x) in centroid.iter_mut().zip(&verts[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= d as f64);

        let along = |coef: f64, from: &[f64], out: &mut Vec<f64>| {
            // out = centroid + coef·(centroid − from)
            for ((o, &c), &f) in out.iter_mut().zip(&centroid).zip(from) {
                *o = c + coef * (c - f);
            }
        };

        along(opts.reflection, &verts[worst], &mut trial);
        let fr = eval(&trial);
        if fr < vals[best] {
            along(opts.reflection * opts.expansion, &verts[worst], &mut trial2);
            let fe = eval(&trial2);
            if fe < fr {
                verts[worst].copy_from_slice(&trial2);
                vals[worst] = fe;
            } else {
                verts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            verts[worst].copy_from_slice(&trial);
            vals[worst] = fr;
            continue;
        }
        if fr < vals[worst] {
            along(
                opts.reflection * opts.contraction,
                &verts[worst],
                &mut trial2,
            );
            let fc = eval(&trial2);
            if fc <= fr {
                verts[worst].copy_from_slice(&trial2);
                vals[worst] = fc;
                continue;
            }
        } else {
            along(-opts.contraction, &verts[worst], &mut trial2);
            let fc = eval(&trial2);
            if fc < vals[worst] {
                verts[worst].copy_from_slice(&trial2);
                vals[worst] = fc;
                continue;
            }
        }
        let anchor = verts[best].clone();
        for &i in &order[1..] {
            for (x, &b) in verts[i].iter_mut().zip(&anchor) {
                *x = b + opts.shrink * (*x - b);
            }
            vals[i] = eval(&verts[i]);
        }
    }

    let best = (0..=d)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)))
        .expect("non-empty simplex");
    Ok(PolytopeResult {
        x: verts.swap_remove(best),
        f: vals[best],
        evaluations: evaluations.get(),
        converged,
    })
}

/// Mixes a master seed with a stream counter (SplitMix64 finalizer).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Restart-loop configuration for [`synthesize_gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub polytope: PolytopeOptions,
    /// Stop once a restart reaches an error below this.
    pub threshold: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Box `|x| ≤ amplitude_bound` on every control value, enforced by a
    /// quadratic penalty on the violation.
    pub amplitude_bound: f64,
    /// Half-width of the uniform distribution of random starts.
    pub start_amplitude: f64,
    /// Evaluation budget of one restart, shared by its polytope rounds.
    pub restart_evaluations: usize,
    /// A restart keeps re-running the polytope search from its best vertex
    /// while a round lowers the error by at least this fraction.
    pub min_round_improvement: f64,
    /// No new restart is started once this many evaluations have been spent.
    pub evaluation_budget: Option<usize>,
    /// Number of restarts evaluated concurrently per batch.
    pub workers: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            polytope: PolytopeOptions::default(),
            threshold: 1e-4,
            max_restarts: 50,
            seed: 0,
            amplitude_bound: DEFAULT_AMPLITUDE_BOUND,
            start_amplitude: 2.0,
            restart_evaluations: 100_000,
            min_round_improvement: 1e-3,
            evaluation_budget: None,
            workers: 1,
        }
    }
}

/// Budget presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunMode {
    /// Threshold 1e-3, at most 50 restarts of 10⁵ evaluations each.
    #[default]
    Quick,
    /// Threshold 1e-4 with a total budget of 10⁶ evaluations.
    Full,
}

impl std::str::FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(RunMode::Quick),
            "full" => Ok(RunMode::Full),
            other => Err(Error::Argument(format!("unknown run mode '{other}'"))),
        }
    }
}

/// Nelder–Mead coefficient family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    /// `(1, 2, ½, ½)`.
    Classical,
    /// Dimension-dependent, see [`PolytopeOptions::adaptive`].
    Adaptive,
}

impl Coefficients {
    /// Classical up to two qubits, adaptive beyond (≥ 72 parameters for three
    /// qubits, where the classical moves stall).
    pub fn auto(n: usize) -> Self {
        if n <= 2 {
            Coefficients::Classical
        } else {
            Coefficients::Adaptive
        }
    }

    pub fn options(self, d: usize) -> PolytopeOptions {
        match self {
            Coefficients::Classical => PolytopeOptions::default(),
            Coefficients::Adaptive => PolytopeOptions::adaptive(d),
        }
    }
}

impl std::str::FromStr for Coefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Coefficients::Classical),
            "adaptive" => Ok(Coefficients::Adaptive),
            other => Err(Error::Argument(format!(
                "unknown coefficient family '{other}'"
            ))),
        }
    }
}

impl SynthesisOptions {
    /// Preset for an `n`-qubit loop with `nu` interior control points.
    pub fn preset(mode: RunMode, n: usize, nu: usize) -> Self {
        let polytope = Coefficients::auto(n).options(2 * n * nu);
        match mode {
            RunMode::Quick => Self {
                polytope,
                threshold: 1e-3,
                max_restarts: 50,
                restart_evaluations: 100_000,
                ..Self::default()
            },
            RunMode::Full => Self {
                polytope,
                threshold: 1e-4,
                max_restarts: 1000,
                restart_evaluations: 250_000,
                evaluation_budget: Some(1_000_000),
                ..Self::default()
            },
        }
    }
}

/// One restart of the synthesis loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub index: usize,
    pub seed: u64,
    pub start_error: f64,
    /// Error of the restart's best loop after rounding to table precision.
    pub final_error: f64,
    pub evaluations: usize,
    pub rounds: usize,
}

#[derive(Debug, Clone)]
pub struct OptimizationRun {
    pub target: String,
    pub n: usize,
    pub nu: usize,
    pub mode: String,
    pub threshold: f64,
    pub best_path: ControlPath,
    pub best_error: f64,
    pub evaluations: usize,
    pub restarts: Vec<RestartRecord>,
    pub converged: bool,
    pub wall_seconds: f64,
}

impl OptimizationRun {
    /// Running minimum of `final_error` over the restart log.
    pub fn running_minimum(&self) -> Vec<f64> {
        self.restarts
            .iter()
            .scan(f64::INFINITY, |m, r| {
                *m = m.min(r.final_error);
                Some(*m)
            })
            .collect()
    }

    /// Human-readable summary and restart log. Wall-clock time is left out so
    /// that reruns with the same seed produce identical text.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target            {}", self.target);
        let _ = writeln!(s, "qubits            {}", self.n);
        let _ = writeln!(s, "control points    {}", self.nu);
        let _ = writeln!(s, "error mode        {}", self.mode);
        let _ = writeln!(s, "threshold         {:e}", self.threshold);
        let _ = writeln!(s, "best error        {:.15e}", self.best_error);
        let _ = writeln!(s, "converged         {}", self.converged);
        let _ = writeln!(s, "evaluations       {}", self.evaluations);
        let _ = writeln!(s, "restarts          {}", self.restarts.len());
        let _ = writeln!(s, "restart  seed                  start_error   final_error   running_min   evals     rounds");
        for (r, m) in self.restarts.iter().zip(self.running_minimum()) {
            let _ = writeln!(
                s,
                "{:<8} {:<21} {:<13.6e} {:<13.6e} {:<13.6e} {:<9} {}",
                r.index, r.seed, r.start_error, r.final_error, m, r.evaluations, r.rounds
            );
        }
        s
    }
}

/// Searches for a control loop with `ν = nu` interior points that realizes
/// the objective's target.
///
/// The degeneracy loop (all fields zero) is probed first and logged as
/// restart 0 with seed 0; then restarts `1..=max_restarts` start from random
/// loops until one reaches `threshold`. Restarts run in batches of
/// `workers`; the log is cut after the first converged restart so the result
/// does not depend on the batch size.
pub fn synthesize_gate(
    objective: &GateObjective,
    nu: usize,
    opts: &SynthesisOptions,
) -> Result<OptimizationRun> {
    let started = Instant::now();
    let n = objective.target().n;
    check_dof(n, nu)?;
    opts.polytope.validate()?;
    if opts.workers == 0 {
        return Err(Error::Argument("workers must be >= 1".into()));
    }

    let zero = ControlPath::zeros(n, nu);
    let zero_error = objective.error(&zero)?;
    let mut restarts = vec![RestartRecord {
        index: 0,
        seed: 0,
        start_error: zero_error,
        final_error: zero_error,
        evaluations: 1,
        rounds: 0,
    }];
    let mut best: (ControlPath, f64) = (zero, zero_error);

    let spent = |log: &[RestartRecord]| log.iter().map(|r| r.evaluations).sum::<usize>();
    let mut next = 1;
    while best.1 >= opts.threshold
        && next <= opts.max_restarts
        && opts.evaluation_budget.is_none_or(|b| spent(&restarts) < b)
    {
        let batch_end = (next + opts.workers).min(opts.max_restarts + 1);
        let results = (next..batch_end)
            .into_par_iter()
            .map(|index| run_restart(objective, nu, opts, index))
            .collect::<Result<Vec<_>>>()?;
        for (record, path) in results {
            if best.1 < opts.threshold
                || opts
                    .evaluation_budget
                    .is_some_and(|b| spent(&restarts) >= b)
            {
                break;
            }
            if record.final_error < best.1 {
                best = (path, record.final_error);
            }
            restarts.push(record);
        }
        next = batch_end;
    }

    Ok(OptimizationRun {
        target: objective.target().name.clone(),
        n,
        nu,
        mode: objective.mode().label(),
        threshold: opts.threshold,
        best_error: best.1,
        best_path: best.0,
        evaluations: restarts.iter().map(|r| r.evaluations).sum(),
        converged: best.1 < opts.threshold,
        restarts,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

fn run_restart(
    objective: &GateObjective,
    nu: usize,
    opts: &SynthesisOptions,
    index: usize,
) -> Result<(RestartRecord, ControlPath)> {
    let n = objective.target().n;
    let seed = derive_seed(opts.seed, index as u64);
    let start = ControlPath::random(n, nu, opts.start_amplitude.min(opts.amplitude_bound), seed)?;
    let bound = opts.amplitude_bound;
    let penalized = |x: &[f64]| -> f64 {
        let violation: f64 = x.iter().map(|v| (v.abs() - bound).max(0.0).powi(2)).sum();
        match ControlPath::from_interior(n, nu, x).and_then(|p| objective.error(&p)) {
            Ok(e) => e + violation,
            Err(_) => f64::INFINITY,
        }
    };

    let start_error = objective.error(&start)?;
    let mut x = start.interior().to_vec();
    let mut f = penalized(&x);
    let mut evaluations = 1;
    let mut rounds = 0;
    while evaluations < opts.restart_evaluations && f >= opts.threshold {
        let budget = PolytopeOptions {
            max_evaluations: opts.restart_evaluations - evaluations,
            ..opts.polytope
        };
        let res = polytope_minimize(penalized, &x, &budget)?;
        evaluations += res.evaluations;
        rounds += 1;
        let improved = res.f < f * (1.0 - opts.min_round_improvement);
        if res.f < f {
            x = res.x;
            f = res.f;
        }
        if !improved {
            break;
        }
    }

    let path = ControlPath::from_interior(n, nu, &x)?.quantized();
    let final_error = objective.error(&path)?;
    evaluations += 1;
    Ok((
        RestartRecord {
            index,
            seed,
            start_error,
            final_error,
            evaluations,
            rounds,
        },
        path,
    ))
}

/// Aggregate gate error at one noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityLevel {
    pub rms: f64,
    pub mean_error: f64,
    /// Sample standard deviation over the trials (0 for a single trial).
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub base_error: f64,
    pub levels: Vec<SensitivityLevel>,
    /// Least-squares slope of `ln(mean error)` against `ln(rms)`; `None`
    /// when fewer than two levels have positive rms.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
}

impl SensitivityReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "base_error {:.6e}", self.base_error);
        let _ = writeln!(s, "rms mean_error stddev");
        for l in &self.levels {
            let _ = writeln!(s, "{:e} {:.6e} {:.6e}", l.rms, l.mean_error, l.stddev);
        }
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(s, "slope {}", fmt(self.slope));
        let _ = writeln!(s, "r_squared {}", fmt(self.r_squared));
        s
    }
}

/// Perturbs `path` with Gaussian noise `trials` times per rms level and fits
/// the log–log response of the mean gate error.
pub fn sensitivity_analysis(
    path: &ControlPath,
    objective: &GateObjective,
    rms_levels: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SensitivityReport> {
    if trials == 0 {
        return Err(Error::Argument("need at least one trial per level".into()));
    }
    let base_error = objective.error(path)?;
    let mut levels = Vec::with_capacity(rms_levels.len());
    for (li, &rms) in rms_levels.iter().enumerate() {
        let errors = (0..trials)
            .into_par_iter()
            .map(|t| {
                let s = derive_seed(derive_seed(seed, li as u64), t as u64);
                objective.error(&path.perturb_gaussian(rms, s)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = errors.iter().sum::<f64>() / trials as f64;
        let stddev = if trials > 1 {
            (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt()
        } else {
            0.0
        };
        levels.push(SensitivityLevel {
            rms,
            mean_error: mean,
            stddev,
        });
    }

    let points: Vec<(f64, f64)> = levels
        .iter()
        .filter(|l| l.rms > 0.0 && l.mean_error > 0.0)
        .map(|l| (l.rms.ln(), l.mean_error.ln()))
        .collect();
    let fit = linear_fit(&points);
    Ok(SensitivityReport {
        base_error,
        levels,
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        r_squared: fit.map(|f| f.2),
    })
}

/// Ordinary least squares `y = a·x + b`; returns `(a, b, R²)`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some((a, b, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_in_one_dimension() {
        let res = polytope_minimize(
            |x| (x[0] - 1.0).powi(2),
            &[0.0],
            &PolytopeOptions::default(),
        )
        .unwrap();
        assert!((res.x[0] - 1.0).abs() < 1e-6, "{:?}", res);
        assert!(res.converged);
    }

    #[test]
    fn rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let res = polytope_minimize(rosen, &[-1.2, 1.0], &PolytopeOptions::default()).unwrap();
        assert!(
            (res.x[0] - 1.0).abs() < 1e-4 && (res.x[1] - 1.0).abs() < 1e-4,
            "{:?}",
            res
        );
    }

    #[test]
    fn constant_objective_stalls_cleanly() {
        let res =
            polytope_minimize(|_| 3.5, &[0.2, -0.1, 4.0], &PolytopeOptions::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.f, 3.5);
        assert!(res.evaluations < 1000);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let opts = PolytopeOptions {
            max_evaluations: 30,
            ..PolytopeOptions::default()
        };
        let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let x0 = [3.0; 6];
        let res = polytope_minimize(sphere, &x0, &opts).unwrap();
        assert!(!res.converged);
        assert!(res.f <= sphere(&x0));
        assert!(res.evaluations <= 30 + 6);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let f = |x: &[f64]| {
            if x[0] > 0.7 {
                f64::NAN
            } else {
                (x[0] - 0.5).powi(2)
            }
        };
        let res = polytope_minimize(f, &[0.0], &PolytopeOptions::default()).unwrap();
        assert!((res.x[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn option_validation() {
        let bad = [
            PolytopeOptions {
                reflection: 0.0,
                ..Default::default()
            },
            PolytopeOptions {
                expansion: 1.0,
                ..Default::default()
            },
            PolytopeOptions {
                contraction: 1.0,
                ..Default::default()
            },
            PolytopeOptions {
                shrink: 0.0,
                ..Default::default()
            },
            PolytopeOptions {
                initial_simplex_scale: 0.0,
                ..Default::default()
            },
        ];
        for o in bad {
            assert!(polytope_minimize(|x| x[0], &[0.0], &o).is_err());
        }
        assert!(polytope_minimize(|_| 0.0, &[], &PolytopeOptions::default()).is_err());
        assert!(PolytopeOptions::adaptive(72).validate().is_ok());
    }

    #[test]
    fn deterministic_given_inputs() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (v - i as f64).powi(2))
                .sum::<f64>()
        };
        let a = polytope_minimize(f, &[0.3; 5], &PolytopeOptions::default()).unwrap();
        let b = polytope_minimize(f, &[0.3; 5], &PolytopeOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seeds_are_distinct_per_stream() {
        let s: Vec<u64> = (0..100).map(|k| derive_seed(7, k)).collect();
        let mut dedup = s.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), 100);
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 - 1.0)).collect();
        let (a, b, r2) = linear_fit(&pts).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&pts[..1]).is_none());
    }
}
