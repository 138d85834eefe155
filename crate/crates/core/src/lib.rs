//! Pulse-level synthesis of one-, two- and three-qubit gates on a Josephson
//! charge-qubit register.
//!
//! The pipeline: a piecewise-linear [`ControlPath`] is sampled at interval
//! midpoints, each sample builds the register Hamiltonian, the short-time
//! exponentials are multiplied into a propagator, and the Frobenius distance
//! to a target gate is minimized with a restarted Nelder–Mead search.

pub mod algebra;
pub mod controlpath;
pub mod costmodel;
pub mod error;
pub mod hamiltonian;
pub mod objective;
pub mod optimizer;
pub mod propagator;

pub use algebra::{
    embed_pauli, expm_spectral, expm_taylor, frobenius_norm, kron, PauliAxis, SquareMatrix,
};
pub use controlpath::{random_path, validate_dof, ControlPath, DEFAULT_AMPLITUDE_BOUND};
pub use costmodel::{execution_time, CircuitCost};
pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, ControlSample, CouplingConvention, PairOrdering};
pub use objective::{
    gate_error, phase_align, surface_scan, target_gate, ErrorMode, GateName, GateObjective,
    GateTarget,
};
pub use optimizer::{
    polytope_minimize, sensitivity_analysis, synthesize_gate, Coefficients, OptimizationRun,
    PolytopeOptions, RunMode, SensitivityReport, SynthesisOptions,
};
pub use propagator::{convergence_report, evolve, ExpmBackend, Propagator, PropagatorConfig};
