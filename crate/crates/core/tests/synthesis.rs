use chargeq::objective::random_orthonormal_directions;
use chargeq::{
    surface_scan, synthesize_gate, target_gate, ControlPath, CouplingConvention, ErrorMode,
    GateObjective, PropagatorConfig, RunMode, SynthesisOptions,
};

fn objective(gate: &str, steps: usize) -> GateObjective {
    GateObjective::new(
        target_gate(gate).unwrap(),
        CouplingConvention::default(),
        PropagatorConfig::default().with_steps(steps),
        ErrorMode::BestRepresentative,
    )
    .unwrap()
}

#[test]
fn identity_is_reached_by_the_degeneracy_loop() {
    let obj = objective("identity-2", 20);
    let run = synthesize_gate(&obj, 4, &SynthesisOptions::preset(RunMode::Quick, 2, 4)).unwrap();
    assert!(run.converged);
    assert!(run.best_error < 1e-10);
    assert_eq!(run.restarts.len(), 1);
    assert_eq!(run.best_path, ControlPath::zeros(2, 4));
}

#[test]
fn dof_violation_is_rejected() {
    let obj = objective("toffoli", 20);
    let err = synthesize_gate(&obj, 7, &SynthesisOptions::default()).unwrap_err();
    assert!(matches!(err, chargeq::Error::Dof { n: 3, nu: 7, .. }));
}

fn single_qubit_options(seed: u64, workers: usize) -> SynthesisOptions {
    SynthesisOptions {
        threshold: 1e-6,
        max_restarts: 4,
        restart_evaluations: 3000,
        seed,
        workers,
        ..SynthesisOptions::default()
    }
}

#[test]
fn single_qubit_not_gate() {
    let x = chargeq::SquareMatrix::from_fn(2, |r, c| {
        num_complex::Complex64::new(if r != c { 1.0 } else { 0.0 }, 0.0)
    });
    let target = chargeq::GateTarget::new("not", x).unwrap();
    let obj = GateObjective::new(
        target,
        CouplingConvention::default(),
        PropagatorConfig::default().with_steps(20),
        ErrorMode::BestRepresentative,
    )
    .unwrap();
    let run = synthesize_gate(&obj, 2, &single_qubit_options(3, 1)).unwrap();
    assert!(run.best_error < 1e-3, "best {}", run.best_error);
    // The stored loop is table-precise and reproduces the reported error.
    assert_eq!(run.best_path.quantized(), run.best_path);
    assert_eq!(obj.error(&run.best_path).unwrap(), run.best_error);
    let mins = run.running_minimum();
    assert!(mins.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn synthesis_is_deterministic_and_worker_independent() {
    let obj = objective("cnot", 10);
    let opts = |workers| SynthesisOptions {
        threshold: 1e-9,
        max_restarts: 3,
        restart_evaluations: 400,
        seed: 11,
        workers,
        ..SynthesisOptions::default()
    };
    let a = synthesize_gate(&obj, 4, &opts(1)).unwrap();
    let b = synthesize_gate(&obj, 4, &opts(1)).unwrap();
    let c = synthesize_gate(&obj, 4, &opts(3)).unwrap();
    assert_eq!(a.report(), b.report());
    assert_eq!(a.report(), c.report());
    assert_eq!(a.best_path, c.best_path);
    let seeds: std::collections::HashSet<u64> = a.restarts[1..].iter().map(|r| r.seed).collect();
    assert_eq!(seeds.len(), 3);
}

#[test]
fn scan_around_an_exact_minimum_is_minimal_at_center() {
    let obj = objective("identity-2", 10);
    let center = ControlPath::zeros(2, 4);
    let (d1, d2) = random_orthonormal_directions(16, 5).unwrap();
    let grid = surface_scan(&center, &d1, &d2, 0.05, 5, &obj).unwrap();
    assert!(grid.center_value() < 1e-12);
    assert_eq!(grid.argmin().0, (2, 2));
    assert!(grid.values.iter().flatten().filter(|&&v| v > 1e-6).count() == 24);

    let flat = surface_scan(&center, &d1, &d2, 0.0, 5, &obj).unwrap();
    assert!(flat
        .values
        .iter()
        .flatten()
        .all(|&v| v == flat.center_value()));
}

#[test]
fn error_grows_linearly_along_a_ray() {
    // Near an exact solution U ≈ Û(I − iεK), so f ∝ ε.
    let obj = objective("identity-2", 20);
    let (dir, _) = random_orthonormal_directions(16, 9).unwrap();
    let points: Vec<(f64, f64)> = [1e-4, 1e-3, 1e-2]
        .iter()
        .map(|&eps| {
            let x: Vec<f64> = dir.iter().map(|d| eps * d).collect();
            let f = obj
                .error(&ControlPath::from_interior(2, 4, &x).unwrap())
                .unwrap();
            (eps.ln(), f.ln())
        })
        .collect();
    let (slope, _, _) = chargeq::optimizer::linear_fit(&points).unwrap();
    assert!((0.8..=1.2).contains(&slope), "slope {slope}");
}
