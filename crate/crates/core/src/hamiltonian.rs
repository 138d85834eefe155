//! Charge-qubit register Hamiltonian
//!
//! ```text
//! H = Σ_i { −½ B_z^i σ_z^i − ½ B_x^i σ_x^i } − Σ_{i≠j} C B_x^i B_x^j σ_y^i σ_y^j
//! ```
//!
//! All three operator families are real matrices in the computational basis,
//! so `H` is real symmetric. [`RegisterOperators`] keeps the embedded
//! operators around so that repeated construction inside the propagator does
//! not rebuild Kronecker products.

use num_complex::Complex64;

use crate::algebra::{embed_pauli, PauliAxis, SquareMatrix};
use crate::error::{Error, Result};

/// Instantaneous control fields for an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSample {
    pub bz: Vec<f64>,
    pub bx: Vec<f64>,
}

impl ControlSample {
    pub fn new(bz: Vec<f64>, bx: Vec<f64>) -> Result<Self> {
        if bz.len() != bx.len() || bz.is_empty() {
            return Err(Error::Argument(format!(
                "field vectors must have equal positive length (bz: {}, bx: {})",
                bz.len(),
                bx.len()
            )));
        }
        if bz.iter().chain(&bx).any(|v| !v.is_finite()) {
            return Err(Error::Argument("control fields must be finite".into()));
        }
        Ok(Self { bz, bx })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bz: vec![0.0; n],
            bx: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.bz.len()
    }
}

/// How the `i ≠ j` coupling sum is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PairOrdering {
    /// Both `(i, j)` and `(j, i)` are summed, so each pair appears twice.
    #[default]
    OrderedLiteral,
    /// One term per unordered pair.
    UnorderedPairs,
}

impl PairOrdering {
    pub fn label(self) -> &'static str {
        match self {
            PairOrdering::OrderedLiteral => "ordered",
            PairOrdering::UnorderedPairs => "unordered",
        }
    }

    /// Multiplicity of each unordered pair in the coupling sum.
    fn multiplicity(self) -> f64 {
        match self {
            PairOrdering::OrderedLiteral => 2.0,
            PairOrdering::UnorderedPairs => 1.0,
        }
    }
}

impl std::str::FromStr for PairOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordered" | "ordered-literal" => Ok(PairOrdering::OrderedLiteral),
            "unordered" | "unordered-pairs" => Ok(PairOrdering::UnorderedPairs),
            other => Err(Error::Argument(format!("unknown pair ordering '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConvention {
    pub pair_ordering: PairOrdering,
    pub coupling_constant: f64,
}

impl Default for CouplingConvention {
    fn default() -> Self {
        Self {
            pair_ordering: PairOrdering::OrderedLiteral,
            coupling_constant: 1.0,
        }
    }
}

impl CouplingConvention {
    pub fn new(pair_ordering: PairOrdering, coupling_constant: f64) -> Self {
        Self {
            pair_ordering,
            coupling_constant,
        }
    }

    /// Prefactor multiplying `B_x^i B_x^j σ_y^i σ_y^j` for one unordered pair.
    pub fn pair_weight(&self) -> f64 {
        self.coupling_constant * self.pair_ordering.multiplicity()
    }
}

/// Build `H` for one control sample.
pub fn build_hamiltonian(
    sample: &ControlSample,
    conv: &CouplingConvention,
) -> Result<SquareMatrix> {
    let ops = RegisterOperators::new(sample.n())?;
    ops.hamiltonian(sample, conv)
}

/// Pre-embedded real operators of an `n`-qubit register.
#[derive(Debug, Clone)]
pub struct RegisterOperators {
    n: usize,
    dim: usize,
    z: Vec<Vec<f64>>,
    x: Vec<Vec<f64>>,
    /// `(i, j, σ_y^i σ_y^j)` for `i < j`, 0-based.
    yy: Vec<(usize, usize, Vec<f64>)>,
}

impl RegisterOperators {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("register needs at least one qubit".into()));
        }
        let real = |m: &SquareMatrix| -> Vec<f64> {
            debug_assert!(m.as_slice().iter().all(|v| v.im == 0.0));
            m.as_slice().iter().map(|v| v.re).collect()
        };
        let mut z = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for site in 1..=n {
            z.push(real(&embed_pauli(PauliAxis::Z, site, n)?));
            x.push(real(&embed_pauli(PauliAxis::X, site, n)?));
            y.push(embed_pauli(PauliAxis::Y, site, n)?);
        }
        let mut yy = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                yy.push((i, j, real(&y[i].matmul(&y[j]))));
            }
        }
        Ok(Self {
            n,
            dim: 1 << n,
            z,
            x,
            yy,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes the real symmetric `H` (row-major) for fields `bz`, `bx` into `out`.
    pub fn fill_real(&self, bz: &[f64], bx: &[f64], conv: &CouplingConvention, out: &mut [f64]) {
        debug_assert_eq!(bz.len(), self.n);
        debug_assert_eq!(bx.len(), self.n);
        debug_assert_eq!(out.len(), self.dim * self.dim);
        out.fill(0.0);
        for i in 0..self.n {
            axpy(-0.5 * bz[i], &self.z[i], out);
            axpy(-0.5 * bx[i], &self.x[i], out);
        }
        let w = conv.pair_weight();
        for (i, j, op) in &self.yy {
            axpy(-w * bx[*i] * bx[*j], op, out);
        }
    }

    pub fn hamiltonian(
        &self,
        sample: &ControlSample,
        conv: &CouplingConvention,
    ) -> Result<SquareMatrix> {
        if sample.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: sample.n(),
            });
        }
        let mut buf = vec![0.0; self.dim * self.dim];
        self.fill_real(&sample.bz, &sample.bx, conv, &mut buf);
        SquareMatrix::from_row_major(buf.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    if a == 0.0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
