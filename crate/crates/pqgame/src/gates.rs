//! Concrete moves: the Hadamard family, σx, identities, permutation moves,
//! the f-controlled-NOT s(f), the δ and dot-product oracles, and the
//! assembled Grover turn operator.
//!
//! Permutation moves are stored as index bijections and applied by
//! relabeling, never as materialized matrices.  Structured moves (tensor
//! products and sequential composites) are applied factor-wise, so a
//! Hadamard layer on n qubits costs O(d·n) rather than O(d²).

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;

/// A game move: unitary for Q, permutation for Picard.
#[derive(Debug, Clone, PartialEq)]
pub struct Move {
    kind: MoveKind,
    label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MoveKind {
    /// Dense unitary matrix.
    Unitary(DMatrix<Complex64>),
    /// Bijection σ on basis indices; amplitude at i moves to σ(i).
    Permutation(Vec<usize>),
    /// Tensor product of factor moves, leftmost factor most significant.
    Kron(Vec<Move>),
    /// Sequential composite, listed in application order.
    Composite(Vec<Move>),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

impl Move {
    /// Wrap a dense matrix, validating m†m = I within 1e-10.
    pub fn unitary(matrix: DMatrix<Complex64>, label: impl Into<String>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d == 0 {
            return Err(Error::Dimension("unitary payload must be square".into()));
        }
        let prod = matrix.adjoint() * &matrix;
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                if (prod[(i, j)] - expected).norm() > UNITARY_TOL {
                    return Err(Error::Domain(format!(
                        "matrix is not unitary: residual at ({}, {})",
                        i, j
                    )));
                }
            }
        }
        Ok(Move {
            kind: MoveKind::Unitary(matrix),
            label: label.into(),
        })
    }

    /// Wrap a bijection on {0,…,d−1}.
    pub fn permutation(map: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        let d = map.len();
        let mut seen = vec![false; d];
        for &i in &map {
            if i >= d || seen[i] {
                return Err(Error::Domain(
                    "permutation payload is not a bijection".into(),
                ));
            }
            seen[i] = true;
        }
        Ok(Move {
            kind: MoveKind::Permutation(map),
            label: label.into(),
        })
    }

    /// Tensor product of factor moves.
    pub fn kron(factors: Vec<Move>, label: impl Into<String>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("tensor product of no factors".into()));
        }
        Ok(Move {
            kind: MoveKind::Kron(factors),
            label: label.into(),
        })
    }

    /// Sequential composite; `parts[0]` is applied first.
    pub fn sequence(parts: Vec<Move>, label: impl Into<String>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("composite of no moves".into()));
        }
        let d = parts[0].dim();
        if parts.iter().any(|p| p.dim() != d) {
            return Err(Error::Dimension(
                "composite parts must share one dimension".into(),
            ));
        }
        Ok(Move {
            kind: MoveKind::Composite(parts),
            label: label.into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &MoveKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MoveKind::Unitary(m) => m.nrows(),
            MoveKind::Permutation(p) => p.len(),
            MoveKind::Kron(fs) => fs.iter().map(Move::dim).product(),
            MoveKind::Composite(ps) => ps[0].dim(),
        }
    }

    /// True when the move acts purely by basis relabeling, i.e. is a member
    /// of S_N and thus a legal Picard move.
    pub fn is_permutation(&self) -> bool {
        match &self.kind {
            MoveKind::Unitary(_) => false,
            MoveKind::Permutation(_) => true,
            MoveKind::Kron(fs) => fs.iter().all(Move::is_permutation),
            MoveKind::Composite(ps) => ps.iter().all(Move::is_permutation),
        }
    }

    /// In-place application to an amplitude vector of matching dimension.
    pub fn apply_in_place(&self, amps: &mut Vec<Complex64>) {
        debug_assert_eq!(self.dim(), amps.len());
        match &self.kind {
            MoveKind::Unitary(m) => {
                let d = amps.len();
                let mut out = vec![Complex64::ZERO; d];
                for j in 0..d {
                    let a = amps[j];
                    if a == Complex64::ZERO {
                        continue;
                    }
                    for i in 0..d {
                        out[i] += m[(i, j)] * a;
                    }
                }
                *amps = out;
            }
            MoveKind::Permutation(p) => {
                let mut out = vec![Complex64::ZERO; amps.len()];
                for (i, &target) in p.iter().enumerate() {
                    out[target] = amps[i];
                }
                *amps = out;
            }
            MoveKind::Kron(fs) => {
                let dims: Vec<usize> = fs.iter().map(Move::dim).collect();
                let total: usize = dims.iter().product();
                let mut stride_after: usize = total;
                for (f, mv) in fs.iter().enumerate() {
                    let m = dims[f];
                    stride_after /= m;
                    let stride = stride_after;
                    let block = m * stride;
                    let mut sub = vec![Complex64::ZERO; m];
                    for outer in 0..total / block {
                        for inner in 0..stride {
                            let base = outer * block + inner;
                            for i in 0..m {
                                sub[i] = amps[base + i * stride];
                            }
                            mv.apply_in_place(&mut sub);
                            for i in 0..m {
                                amps[base + i * stride] = sub[i];
                            }
                        }
                    }
                }
            }
            MoveKind::Composite(ps) => {
                for p in ps {
                    p.apply_in_place(amps);
                }
            }
        }
    }

    /// Materialize as a dense matrix (diagnostics and small-case tests).
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        match &self.kind {
            MoveKind::Unitary(m) => m.clone(),
            MoveKind::Permutation(p) => {
                let d = p.len();
                let mut m = DMatrix::<Complex64>::zeros(d, d);
                for (j, &i) in p.iter().enumerate() {
                    m[(i, j)] = Complex64::ONE;
                }
                m
            }
            MoveKind::Kron(fs) => {
                let mut m = fs[0].to_matrix();
                for f in &fs[1..] {
                    m = m.kronecker(&f.to_matrix());
                }
                m
            }
            MoveKind::Composite(ps) => {
                let d = self.dim();
                let mut m = DMatrix::<Complex64>::identity(d, d);
                for p in ps {
                    m = p.to_matrix() * m;
                }
                m
            }
        }
    }
}

/// H = 1/√2 (1 1; 1 −1).
pub fn hadamard() -> Move {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let m = DMatrix::from_row_slice(2, 2, &[s, s, s, -s]);
    Move {
        kind: MoveKind::Unitary(m),
        label: "H".into(),
    }
}

/// σx = (0 1; 1 0), the penny flip.
pub fn pauli_x() -> Move {
    Move {
        kind: MoveKind::Permutation(vec![1, 0]),
        label: "X".into(),
    }
}

/// Identity of dimension d.
pub fn identity(d: usize) -> Move {
    Move {
        kind: MoveKind::Permutation((0..d).collect()),
        label: "I".into(),
    }
}

/// H^{⊗n}, mapping |0…0⟩ to the uniform superposition.
pub fn hadamard_n(n: usize) -> Move {
    assert!(n >= 1);
    if n == 1 {
        return hadamard();
    }
    Move {
        kind: MoveKind::Kron(vec![hadamard(); n]),
        label: format!("H^{}", n),
    }
}

/// A total boolean function on n-bit inputs, the object Picard's oracle
/// moves compute.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFunction {
    arity: usize,
    table: Vec<u8>,
    label: String,
}

impl OracleFunction {
    pub fn new(arity: usize, table: Vec<u8>, label: impl Into<String>) -> Result<Self> {
        if arity == 0 || table.len() != 1 << arity {
            return Err(Error::Domain(format!(
                "oracle table length {} does not match arity {}",
                table.len(),
                arity
            )));
        }
        if table.iter().any(|&b| b > 1) {
            return Err(Error::Domain("oracle range must be {0,1}".into()));
        }
        Ok(OracleFunction {
            arity,
            table,
            label: label.into(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: usize) -> u8 {
        self.table[x]
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// f_a(x) = δ_{xa}: 1 exactly on the hidden number a.
pub fn delta_oracle(a: u64, n: usize) -> Result<OracleFunction> {
    if a >= 1u64 << n {
        return Err(Error::Domain(format!(
            "hidden number {} out of range for {} qubits",
            a, n
        )));
    }
    let table = (0..1usize << n).map(|x| u8::from(x as u64 == a)).collect();
    OracleFunction::new(n, table, format!("f_{}", a))
}

/// g_a(x) = x·a mod 2: the parity of the bitwise AND of guess and answer.
pub fn dot_oracle(a: u64, n: usize) -> Result<OracleFunction> {
    if n == 0 {
        return Err(Error::Domain("dot oracle needs at least one bit".into()));
    }
    if a >= 1u64 << n {
        return Err(Error::Domain(format!(
            "answer {} out of range for {} bits",
            a, n
        )));
    }
    let table = (0..1usize << n)
        .map(|x| ((x as u64 & a).count_ones() % 2) as u8)
        .collect();
    OracleFunction::new(n, table, format!("g_{:0width$b}", a, width = n))
}

/// s(f)|x,b⟩ = |x, b ⊕ f(x)⟩, the f-controlled-NOT on n+1 qubits.
pub fn controlled_f(f: &OracleFunction) -> Move {
    let n = f.arity();
    let d = 1usize << (n + 1);
    let mut map = Vec::with_capacity(d);
    for x in 0..1usize << n {
        let flip = f.eval(x) as usize;
        map.push(2 * x + flip);
        map.push(2 * x + (1 - flip));
    }
    Move {
        kind: MoveKind::Permutation(map),
        label: format!("s({})", f.label()),
    }
}

/// The Grover turn (H^{⊗n} ⊗ I_2) ∘ s(f_0) ∘ (H^{⊗n} ⊗ I_2), assembled
/// literally as that composite (equivalent to the textbook diffusion up to
/// a global phase).
pub fn grover_turn(n: usize) -> Result<Move> {
    if n == 0 {
        return Err(Error::Domain("grover turn needs at least one qubit".into()));
    }
    let layer = Move::kron(vec![hadamard_n(n), identity(2)], format!("H^{}⊗I", n))?;
    let oracle = controlled_f(&delta_oracle(0, n)?);
    Move::sequence(vec![layer.clone(), oracle, layer], format!("G_{}", n))
}
