use std::fmt::Write as _;
use std::fs;
use std::io;

use chargeq::objective::{random_orthonormal_directions, unitary_error};
use chargeq::{
    costmodel, surface_scan, target_gate, Coefficients, ControlPath, CouplingConvention, ErrorMode,
    ExpmBackend, GateObjective, PairOrdering, Propagator, PropagatorConfig, RunMode,
    SynthesisOptions,
};

use crate::{exit, CostArgs, ModelArgs, OptimizeArgs, ScanArgs, SensitivityArgs, SimulateArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] chargeq::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("{path}: {source}")]
    Table {
        path: String,
        source: chargeq::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Table { .. } => exit::PARSE,
            CliError::Core(chargeq::Error::Dof { .. }) => exit::DOF,
            CliError::Core(chargeq::Error::Parse { .. } | chargeq::Error::Argument(_)) => {
                exit::PARSE
            }
            CliError::Core(_) | CliError::Output(_) => exit::FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

fn write(path: &str, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

fn load_path(path: &str) -> Result<ControlPath> {
    ControlPath::from_table(&read(path)?).map_err(|source| CliError::Table {
        path: path.to_string(),
        source,
    })
}

impl ModelArgs {
    fn config(&self) -> Result<PropagatorConfig> {
        Ok(PropagatorConfig {
            steps_per_segment: self.steps,
            backend: self.backend.parse::<ExpmBackend>()?,
            parallel_chunking: self.chunks,
        })
    }

    /// Resolved conventions; `both` is accepted only when `allow_both`.
    fn conventions(&self, allow_both: bool) -> Result<(String, Vec<CouplingConvention>)> {
        let default = if allow_both { "both" } else { "ordered" };
        let label = self
            .convention
            .clone()
            .unwrap_or_else(|| default.to_string());
        let orderings = if allow_both && label == "both" {
            vec![PairOrdering::OrderedLiteral, PairOrdering::UnorderedPairs]
        } else {
            vec![label.parse::<PairOrdering>()?]
        };
        let label = if orderings.len() == 1 {
            orderings[0].label().to_string()
        } else {
            label
        };
        let convs = orderings
            .into_iter()
            .map(|o| CouplingConvention::new(o, self.coupling))
            .collect();
        Ok((label, convs))
    }

    fn echo(&self, convention: &str) -> Result<String> {
        Ok(format!(
            "--convention {convention} --coupling {} --steps {} --backend {} --chunks {}",
            self.coupling,
            self.steps,
            self.backend.parse::<ExpmBackend>()?.label(),
            self.chunks
        ))
    }
}

fn single_objective(
    model: &ModelArgs,
    target: &str,
    mode: &str,
) -> Result<(GateObjective, String)> {
    let (label, convs) = model.conventions(false)?;
    let objective = GateObjective::new(
        target_gate(target)?,
        convs[0],
        model.config()?,
        mode.parse()?,
    )?;
    Ok((objective, label))
}

pub fn simulate(out: &mut dyn io::Write, a: &SimulateArgs, workers: usize) -> Result<u8> {
    let target = target_gate(&a.target)?;
    let cfg = a.model.config()?;
    let (label, convs) = a.model.conventions(true)?;
    let mut text = format!(
        "# chargeq simulate --path {} --target {} {} --workers {workers}{}\n",
        a.path,
        target.name,
        a.model.echo(&label)?,
        if a.print_unitary {
            " --print-unitary"
        } else {
            ""
        }
    );
    let path = load_path(&a.path)?;
    let _ = writeln!(text, "path {}", a.path);
    let _ = writeln!(text, "qubits {}", path.n());
    let _ = writeln!(text, "control_points {}", path.nu());
    let _ = writeln!(text, "duration {}", path.duration());
    let _ = writeln!(text, "target {}", target.name);
    let modes = [
        ErrorMode::Fixed(0),
        ErrorMode::BestRepresentative,
        ErrorMode::PhaseFree,
    ];
    for conv in convs {
        let u = Propagator::new(path.n(), conv, cfg)?.evolve(&path)?;
        let fine_cfg = cfg.with_steps(2 * cfg.steps_per_segment);
        let fine = Propagator::new(path.n(), conv, fine_cfg)?.evolve(&path)?;
        let _ = writeln!(text, "[convention {}]", conv.pair_ordering.label());
        let _ = writeln!(text, "unitarity_residual {:.6e}", u.unitarity_residual());
        for mode in modes {
            let _ = writeln!(
                text,
                "error {} {:.15e}",
                mode.label(),
                unitary_error(&u, &target, mode)?
            );
        }
        let _ = writeln!(
            text,
            "self_convergence steps {} vs {} delta {:.6e}",
            cfg.steps_per_segment,
            fine_cfg.steps_per_segment,
            u.distance(&fine)
        );
        if a.print_unitary {
            let _ = writeln!(text, "unitary");
            for r in 0..u.dim() {
                let row: Vec<String> = (0..u.dim())
                    .map(|c| format!("{:+.9e}{:+.9e}i", u[(r, c)].re, u[(r, c)].im))
                    .collect();
                let _ = writeln!(text, "  {}", row.join(" "));
            }
        }
    }
    out.write_all(text.as_bytes())?;
    Ok(exit::OK)
}

fn default_nu(n: usize) -> usize {
    match n {
        1 => 2,
        2 => 4,
        3 => 12,
        n => ((1usize << (2 * n)) - 1).div_ceil(2 * n),
    }
}

pub fn optimize(out: &mut dyn io::Write, a: &OptimizeArgs, workers: usize) -> Result<u8> {
    let (objective, label) = single_objective(&a.model, &a.target, &a.error_mode)?;
    let target = objective.target().clone();
    let n = target.n;
    let nu = a.nu.unwrap_or_else(|| default_nu(n));
    chargeq::controlpath::check_dof(n, nu)?;

    let mode: RunMode = a.mode.parse()?;
    let coefficients = match a.coefficients.as_str() {
        "auto" => Coefficients::auto(n),
        other => other.parse()?,
    };
    let mut opts = SynthesisOptions::preset(mode, n, nu);
    opts.polytope = coefficients.options(2 * n * nu);
    opts.polytope.initial_simplex_scale = a.simplex_scale;
    opts.seed = a.seed;
    opts.amplitude_bound = a.amplitude_bound;
    opts.start_amplitude = a.start_amplitude;
    opts.workers = workers;
    if let Some(t) = a.threshold {
        opts.threshold = t;
    }
    if let Some(m) = a.max_restarts {
        opts.max_restarts = m;
    }
    if let Some(r) = a.restart_evals {
        opts.restart_evaluations = r;
    }
    if let Some(b) = a.budget {
        opts.evaluation_budget = (b > 0).then_some(b);
    }
    let out_path = a
        .out
        .clone()
        .unwrap_or_else(|| format!("{}_best.csv", target.name));

    writeln!(
        out,
        "# chargeq optimize --target {} --nu {nu} --mode {} {} --error-mode {} --threshold {:e} \
         --max-restarts {} --restart-evals {} --budget {} --seed {} --amplitude-bound {} \
         --start-amplitude {} --simplex-scale {} --coefficients {} --out {out_path} --workers {workers}",
        target.name,
        a.mode,
        a.model.echo(&label)?,
        objective.mode().label(),
        opts.threshold,
        opts.max_restarts,
        opts.restart_evaluations,
        opts.evaluation_budget.unwrap_or(0),
        opts.seed,
        opts.amplitude_bound,
        opts.start_amplitude,
        opts.polytope.initial_simplex_scale,
        match coefficients {
            Coefficients::Classical => "classical",
            Coefficients::Adaptive => "adaptive",
        },
    )?;

    let run = chargeq::synthesize_gate(&objective, nu, &opts)?;
    let report = run.report();
    write!(out, "{report}")?;
    write(&out_path, &run.best_path.to_table())?;
    if let Some(r) = &a.report {
        write(r, &report)?;
    }
    eprintln!("wrote {out_path} ({:.1} s)", run.wall_seconds);
    Ok(if run.converged {
        exit::OK
    } else {
        exit::UNCONVERGED
    })
}

fn parse_directions(text: &str, d: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .enumerate()
                .map(|(j, f)| {
                    f.parse::<f64>().map_err(|_| chargeq::Error::Parse {
                        line: i + 1,
                        column: j + 1,
                        message: format!("'{f}' is not a number"),
                    })
                })
                .collect::<std::result::Result<Vec<f64>, _>>()
        })
        .collect::<std::result::Result<_, _>>()?;
    if rows.len() != 2 || rows.iter().any(|r| r.len() != d) {
        return Err(chargeq::Error::Argument(format!(
            "direction file must hold two rows of {d} values"
        ))
        .into());
    }
    let mut it = rows.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

pub fn scan(out: &mut dyn io::Write, a: &ScanArgs, workers: usize) -> Result<u8> {
    let (objective, label) = single_objective(&a.model, &a.target, &a.error_mode)?;
    let dirs_flag = a
        .directions
        .as_ref()
        .map_or(String::new(), |d| format!(" --directions {d}"));
    let out_flag = a
        .out
        .as_ref()
        .map_or(String::new(), |o| format!(" --out {o}"));
    writeln!(
        out,
        "# chargeq scan --path {} --target {} {} --error-mode {} --half-width {} --grid {} --seed {}{dirs_flag}{out_flag} --workers {workers}",
        a.path,
        objective.target().name,
        a.model.echo(&label)?,
        objective.mode().label(),
        a.half_width,
        a.grid,
        a.seed
    )?;
    let center = load_path(&a.path)?;
    let d = center.interior().len();
    let (dir1, dir2) = match &a.directions {
        Some(file) => parse_directions(&read(file)?, d)?,
        None => random_orthonormal_directions(d, a.seed)?,
    };
    let grid = surface_scan(&center, &dir1, &dir2, a.half_width, a.grid, &objective)?;
    let text = grid.to_text();
    match &a.out {
        Some(file) => {
            write(file, &text)?;
            let ((r, c), v) = grid.argmin();
            writeln!(out, "center_value {:.15e}", grid.center_value())?;
            writeln!(out, "grid_min {v:.15e} at ({r}, {c})")?;
        }
        None => write!(out, "{text}")?,
    }
    Ok(exit::OK)
}

pub fn sensitivity(out: &mut dyn io::Write, a: &SensitivityArgs, workers: usize) -> Result<u8> {
    let (objective, label) = single_objective(&a.model, &a.target, &a.error_mode)?;
    let levels: Vec<String> = a.rms.iter().map(|r| format!("{r:e}")).collect();
    writeln!(
        out,
        "# chargeq sensitivity --path {} --target {} {} --error-mode {} --rms {} --trials {} --seed {} --workers {workers}",
        a.path,
        objective.target().name,
        a.model.echo(&label)?,
        objective.mode().label(),
        levels.join(","),
        a.trials,
        a.seed
    )?;
    let path = load_path(&a.path)?;
    let report = chargeq::sensitivity_analysis(&path, &objective, &a.rms, a.trials, a.seed)?;
    write!(out, "{}", report.to_text())?;
    Ok(exit::OK)
}

pub fn cost(out: &mut dyn io::Write, a: &CostArgs) -> Result<u8> {
    let mut echo = String::from("# chargeq cost");
    if let Some(t) = a.two {
        let _ = write!(echo, " --two {t}");
    }
    if let Some(t) = a.three {
        let _ = write!(echo, " --three {t}");
    }
    writeln!(out, "{echo}")?;
    writeln!(
        out,
        "{:<12} {:<25} {:>9} {:>11} {:>6}",
        "gate", "realization", "two_qubit", "three_qubit", "time"
    )?;
    for e in costmodel::reference_comparison() {
        writeln!(
            out,
            "{:<12} {:<25} {:>9} {:>11} {:>6}",
            e.gate,
            e.realization,
            e.cost.two_qubit_gates,
            e.cost.three_qubit_gates,
            e.execution_time()
        )?;
    }
    if a.two.is_some() || a.three.is_some() {
        let c = costmodel::CircuitCost::new(a.two.unwrap_or(0), a.three.unwrap_or(0));
        writeln!(
            out,
            "{:<12} {:<25} {:>9} {:>11} {:>6}",
            "custom",
            "user counts",
            c.two_qubit_gates,
            c.three_qubit_gates,
            costmodel::execution_time(c)
        )?;
    }
    Ok(exit::OK)
}
