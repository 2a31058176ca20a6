//! Dense complex linear algebra for game states: state vectors over a
//! labeled tensor factorization, density matrices, projectors, projective
//! win probabilities, partial traces and seeded outcome sampling.
//!
//! Index convention is big-endian: the leftmost tensor factor is the most
//! significant digit, so with an ancilla written last, |x,b⟩ sits at index
//! 2x+b.  Inputs that violate normalization by more than 1e-8 are rejected
//! rather than silently renormalized.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::Move;
use crate::rng::SplitMix64;

pub const NORM_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Default cap on the Hilbert-space dimension (20 qubits + ancilla).
pub const MAX_DIMENSION: usize = 1 << 21;

/// A normalized pure state over a tensor factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    factors: Vec<usize>,
}

impl StateVector {
    /// Build a state from amplitudes, validating normalization and the
    /// factorization product.
    pub fn new(amps: Vec<Complex64>, factors: Vec<usize>) -> Result<Self> {
        let d: usize = factors.iter().product();
        if d != amps.len() {
            return Err(Error::Dimension(format!(
                "factorization {:?} has product {} but {} amplitudes given",
                factors,
                d,
                amps.len()
            )));
        }
        if d == 0 || d > MAX_DIMENSION {
            return Err(Error::Domain(format!("dimension {} out of range", d)));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!(
                "state not normalized: |psi|^2 = {}",
                norm_sq
            )));
        }
        Ok(StateVector { amps, factors })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reduced density matrix of a single tensor factor, computed directly
    /// from the amplitudes in O(d·m) where m is the factor dimension.
    pub fn reduced_factor(&self, factor: usize) -> Result<DensityMatrix> {
        if factor >= self.factors.len() {
            return Err(Error::Domain(format!(
                "factor index {} out of range ({} factors)",
                factor,
                self.factors.len()
            )));
        }
        let m = self.factors[factor];
        let stride: usize = self.factors[factor + 1..].iter().product();
        let block = m * stride;
        let outer = self.dim() / block;
        let mut rho = DMatrix::<Complex64>::zeros(m, m);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * block + inner;
                for i in 0..m {
                    let ai = self.amps[base + i * stride];
                    for j in 0..m {
                        rho[(i, j)] += ai * self.amps[base + j * stride].conj();
                    }
                }
            }
        }
        DensityMatrix::new(rho, vec![m])
    }
}

/// |index⟩ in the basis labeled by `factorization`, big-endian.
pub fn basis_state(factorization: &[usize], index: usize) -> Result<StateVector> {
    let d: usize = factorization.iter().product();
    if index >= d {
        return Err(Error::Domain(format!(
            "basis index {} out of range for dimension {}",
            index, d
        )));
    }
    let mut amps = vec![Complex64::ZERO; d];
    amps[index] = Complex64::ONE;
    StateVector::new(amps, factorization.to_vec())
}

/// Kronecker composition; factorizations concatenate.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    let mut factors = a.factors.clone();
    factors.extend_from_slice(&b.factors);
    StateVector { amps, factors }
}

/// One evolution factor of ψ_f = u_{k+1} s_k u_k … u_2 s_1 u_1 ψ_0.
pub fn apply(m: &Move, s: &StateVector) -> Result<StateVector> {
    if m.dim() != s.dim() {
        return Err(Error::Dimension(format!(
            "move '{}' has dimension {} but state has dimension {}",
            m.label(),
            m.dim(),
            s.dim()
        )));
    }
    let mut amps = s.amps.clone();
    m.apply_in_place(&mut amps);
    Ok(StateVector {
        amps,
        factors: s.factors.clone(),
    })
}

/// A d×d density matrix with unit trace over a tensor factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    factors: Vec<usize>,
}

impl DensityMatrix {
    /// Validates unit trace, Hermiticity and positive semidefiniteness
    /// (up to tolerance).
    pub fn new(entries: DMatrix<Complex64>, factors: Vec<usize>) -> Result<Self> {
        let d: usize = factors.iter().product();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::Dimension(format!(
                "factorization {:?} has product {} but matrix is {}x{}",
                factors,
                d,
                entries.nrows(),
                entries.ncols()
            )));
        }
        let trace: Complex64 = (0..d).map(|i| entries[(i, i)]).sum();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::Domain(format!("trace {} is not 1", trace)));
        }
        for i in 0..d {
            for j in 0..d {
                let delta = entries[(i, j)] - entries[(j, i)].conj();
                if delta.norm() > HERMITIAN_TOL {
                    return Err(Error::Domain(format!(
                        "not Hermitian at ({}, {}): residual {}",
                        i,
                        j,
                        delta.norm()
                    )));
                }
            }
        }
        // Eigenvalue check is O(d^3); skip above a few hundred dimensions
        // where the Hermitian + trace checks already catch construction bugs.
        if d <= 256 {
            let eig = entries.clone().symmetric_eigenvalues();
            if eig.iter().any(|&l| l < -PSD_TOL) {
                return Err(Error::Domain(format!(
                    "not positive semidefinite: min eigenvalue {}",
                    eig.iter().cloned().fold(f64::INFINITY, f64::min)
                )));
            }
        }
        Ok(DensityMatrix { entries, factors })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Tr ρ², 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut p = Complex64::ZERO;
        for i in 0..d {
            for j in 0..d {
                p += self.entries[(i, j)] * self.entries[(j, i)];
            }
        }
        p.re
    }
}

/// ρ = ψ ⊗ ψ†.
pub fn to_density(s: &StateVector) -> DensityMatrix {
    let d = s.dim();
    let mut entries = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            entries[(i, j)] = s.amps[i] * s.amps[j].conj();
        }
    }
    DensityMatrix {
        entries,
        factors: s.factors.clone(),
    }
}

/// Conjugation ρ ↦ m ρ m†.
pub fn apply_density(m: &Move, r: &DensityMatrix) -> Result<DensityMatrix> {
    if m.dim() != r.dim() {
        return Err(Error::Dimension(format!(
            "move '{}' has dimension {} but density matrix has dimension {}",
            m.label(),
            m.dim(),
            r.dim()
        )));
    }
    // m ρ m† = (m (m ρ)†)†, so two passes of column application suffice.
    let b = apply_to_columns(m, &r.entries);
    let c = apply_to_columns(m, &b.adjoint());
    Ok(DensityMatrix {
        entries: c.adjoint(),
        factors: r.factors.clone(),
    })
}

fn apply_to_columns(m: &Move, mat: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = mat.nrows();
    let mut out = DMatrix::<Complex64>::zeros(d, mat.ncols());
    let mut col = vec![Complex64::ZERO; d];
    for c in 0..mat.ncols() {
        for i in 0..d {
            col[i] = mat[(i, c)];
        }
        m.apply_in_place(&mut col);
        for i in 0..d {
            out[(i, c)] = col[i];
        }
    }
    out
}

/// The win projector Π; its image is Q's winning subspace W_Q.
#[derive(Debug, Clone, PartialEq)]
pub enum Projector {
    /// Projection onto a set of computational basis states.
    Basis { dim: usize, indices: Vec<usize> },
    /// General projection matrix (validated Π² = Π, Π† = Π).
    Matrix(DMatrix<Complex64>),
}

impl Projector {
    pub fn onto_basis(dim: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::Domain(format!(
                "basis index out of range for dimension {}",
                dim
            )));
        }
        Ok(Projector::Basis { dim, indices })
    }

    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension("projector must be square".into()));
        }
        let sq = &entries * &entries;
        let adj = entries.adjoint();
        let d = entries.nrows();
        for i in 0..d {
            for j in 0..d {
                if (sq[(i, j)] - entries[(i, j)]).norm() > HERMITIAN_TOL
                    || (adj[(i, j)] - entries[(i, j)]).norm() > HERMITIAN_TOL
                {
                    return Err(Error::Domain(
                        "matrix is not an orthogonal projector".into(),
                    ));
                }
            }
        }
        Ok(Projector::Matrix(entries))
    }

    pub fn dim(&self) -> usize {
        match self {
            Projector::Basis { dim, .. } => *dim,
            Projector::Matrix(m) => m.nrows(),
        }
    }
}

/// ⟨ψ|Π|ψ⟩, the probability Q observes eigenvalue 1.
pub fn win_prob_state(s: &StateVector, p: &Projector) -> Result<f64> {
    if p.dim() != s.dim() {
        return Err(Error::Dimension(format!(
            "projector dimension {} but state dimension {}",
            p.dim(),
            s.dim()
        )));
    }
    let value = match p {
        Projector::Basis { indices, .. } => {
            indices.iter().map(|&i| s.amps[i].norm_sqr()).sum::<f64>()
        }
        Projector::Matrix(m) => {
            let mut acc = Complex64::ZERO;
            for i in 0..s.dim() {
                for j in 0..s.dim() {
                    acc += s.amps[i].conj() * m[(i, j)] * s.amps[j];
                }
            }
            acc.re
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Tr(Πρ).
pub fn win_prob_density(r: &DensityMatrix, p: &Projector) -> Result<f64> {
    if p.dim() != r.dim() {
        return Err(Error::Dimension(format!(
            "projector dimension {} but density matrix dimension {}",
            p.dim(),
            r.dim()
        )));
    }
    let value = match p {
        Projector::Basis { indices, .. } => {
            indices.iter().map(|&i| r.entries[(i, i)].re).sum::<f64>()
        }
        Projector::Matrix(m) => {
            let mut acc = Complex64::ZERO;
            for i in 0..r.dim() {
                for j in 0..r.dim() {
                    acc += m[(i, j)] * r.entries[(j, i)];
                }
            }
            acc.re
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Reduced density matrix over the kept factors (sorted, deduplicated).
pub fn partial_trace(r: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::Domain("cannot trace out every factor".into()));
    }
    if keep.iter().any(|&k| k >= r.factors.len()) {
        return Err(Error::Domain(format!(
            "keep set {:?} out of range ({} factors)",
            keep,
            r.factors.len()
        )));
    }
    let dims = &r.factors;
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // Global index from a kept multi-index and a traced multi-index.
    let global = |ik: usize, it: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut rest = ik;
        for (pos, &f) in keep.iter().enumerate().rev() {
            let _ = pos;
            digits[f] = rest % dims[f];
            rest /= dims[f];
        }
        let mut rest = it;
        for &f in traced.iter().rev() {
            digits[f] = rest % dims[f];
            rest /= dims[f];
        }
        let mut idx = 0usize;
        for (f, &dim) in dims.iter().enumerate() {
            idx = idx * dim + digits[f];
        }
        idx
    };

    let mut out = DMatrix::<Complex64>::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::ZERO;
            for t in 0..dt {
                acc += r.entries[(global(i, t), global(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix {
        entries: out,
        factors: kept_dims,
    })
}

/// Result of a single projective measurement of the win condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Win,
    Lose,
}

/// Measure Π on ψ once; deterministic for a fixed seed.
pub fn sample_outcome(s: &StateVector, p: &Projector, seed: u64) -> Result<Outcome> {
    let prob = win_prob_state(s, p)?;
    let mut rng = SplitMix64::new(seed);
    Ok(if rng.next_f64() < prob {
        Outcome::Win
    } else {
        Outcome::Lose
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, identity, pauli_x};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![c(s, 0.0), c(s, 0.0)], vec![2]).unwrap()
    }

    fn bell() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(
            vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn basis_state_examples() {
        let s = basis_state(&[2, 2], 0).unwrap();
        assert_eq!(
            s.amplitudes(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        let s = basis_state(&[2, 2], 2).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
        assert!(basis_state(&[2, 2], 4).is_err());
    }

    #[test]
    fn basis_index_is_2x_plus_b() {
        // Enumerate all |x,b> labels for 2 qubits + ancilla and check the
        // big-endian index convention.
        for x in 0..4usize {
            for b in 0..2usize {
                let idx = 2 * x + b;
                let s = basis_state(&[2, 2, 2], idx).unwrap();
                assert_eq!(s.amplitudes()[idx], c(1.0, 0.0));
            }
        }
        // |x=10,b=1> in particular sits at index 5.
        assert_eq!(2 * 0b10 + 1, 5);
    }

    #[test]
    fn tensor_examples() {
        let zero = basis_state(&[2], 0).unwrap();
        let t = tensor(&zero, &zero);
        assert_eq!(t.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(t.factors(), &[2, 2]);

        let one = basis_state(&[2], 1).unwrap();
        let t = tensor(&plus(), &one);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(t.amplitudes()[1].re, s, epsilon = 1e-12);
        assert_relative_eq!(t.amplitudes()[3].re, s, epsilon = 1e-12);
        assert_eq!(t.amplitudes()[0], c(0.0, 0.0));
        assert_eq!(t.amplitudes()[2], c(0.0, 0.0));

        let unit = StateVector::new(vec![c(1.0, 0.0)], vec![1]).unwrap();
        let t = tensor(&plus(), &unit);
        assert_eq!(t.amplitudes(), plus().amplitudes());
    }

    #[test]
    fn apply_examples() {
        let zero = basis_state(&[2], 0).unwrap();
        let h = apply(&hadamard(), &zero).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(h.amplitudes()[0].re, s, epsilon = 1e-12);
        assert_relative_eq!(h.amplitudes()[1].re, s, epsilon = 1e-12);

        let same = apply(&identity(2), &plus()).unwrap();
        assert_eq!(same.amplitudes(), plus().amplitudes());

        // Picard's flip leaves the superposition fixed.
        let flipped = apply(&pauli_x(), &plus()).unwrap();
        assert_eq!(flipped.amplitudes(), plus().amplitudes());

        assert!(apply(&identity(4), &plus()).is_err());
    }

    #[test]
    fn to_density_examples() {
        let zero = basis_state(&[2], 0).unwrap();
        let rho = to_density(&zero);
        assert_eq!(rho.entries()[(0, 0)], c(1.0, 0.0));
        assert_eq!(rho.entries()[(1, 1)], c(0.0, 0.0));

        let rho = to_density(&plus());
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(rho.entries()[(i, j)].re, 0.5, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_density_examples() {
        let rho = to_density(&basis_state(&[2], 0).unwrap());
        let same = apply_density(&identity(2), &rho).unwrap();
        assert_eq!(same.entries(), rho.entries());

        let mixed = apply_density(&hadamard(), &rho).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(mixed.entries()[(i, j)].re, 0.5, epsilon = 1e-12);
            }
        }

        let flipped = apply_density(&pauli_x(), &rho).unwrap();
        assert_relative_eq!(flipped.entries()[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(flipped.entries()[(0, 0)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn win_prob_examples() {
        let head = Projector::onto_basis(2, vec![0]).unwrap();
        let zero = basis_state(&[2], 0).unwrap();
        assert_relative_eq!(win_prob_state(&zero, &head).unwrap(), 1.0);
        assert_relative_eq!(
            win_prob_state(&plus(), &head).unwrap(),
            0.5,
            epsilon = 1e-12
        );

        let rho = to_density(&zero);
        assert_relative_eq!(win_prob_density(&rho, &head).unwrap(), 1.0);
        let maximally_mixed =
            DensityMatrix::new(DMatrix::from_diagonal_element(2, 2, c(0.5, 0.0)), vec![2]).unwrap();
        assert_relative_eq!(win_prob_density(&maximally_mixed, &head).unwrap(), 0.5);

        assert!(win_prob_state(&bell(), &head).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = to_density(&basis_state(&[2, 2], 0).unwrap());
        let reduced = partial_trace(&rho, &[0]).unwrap();
        assert_relative_eq!(reduced.entries()[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(reduced.entries()[(1, 1)].re, 0.0, epsilon = 1e-12);

        let rho = to_density(&bell());
        for keep in [[0usize], [1usize]] {
            let reduced = partial_trace(&rho, &keep).unwrap();
            assert_relative_eq!(reduced.entries()[(0, 0)].re, 0.5, epsilon = 1e-12);
            assert_relative_eq!(reduced.entries()[(1, 1)].re, 0.5, epsilon = 1e-12);
            assert_relative_eq!(reduced.entries()[(0, 1)].norm(), 0.0, epsilon = 1e-12);
        }

        let full = partial_trace(&rho, &[0, 1]).unwrap();
        assert_eq!(full.entries(), rho.entries());

        assert!(partial_trace(&rho, &[]).is_err());
    }

    #[test]
    fn reduced_factor_matches_partial_trace() {
        let s = bell();
        let direct = s.reduced_factor(0).unwrap();
        let via_density = partial_trace(&to_density(&s), &[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(
                    (direct.entries()[(i, j)] - via_density.entries()[(i, j)]).norm(),
                    0.0,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn sample_outcome_deterministic_extremes() {
        let head = Projector::onto_basis(2, vec![0]).unwrap();
        let zero = basis_state(&[2], 0).unwrap();
        let one = basis_state(&[2], 1).unwrap();
        for seed in [0u64, 1, 42, u64::MAX] {
            assert_eq!(sample_outcome(&zero, &head, seed).unwrap(), Outcome::Win);
            assert_eq!(sample_outcome(&one, &head, seed).unwrap(), Outcome::Lose);
        }
    }

    #[test]
    fn sample_outcome_frequency_matches_win_prob() {
        let head = Projector::onto_basis(2, vec![0]).unwrap();
        let state = plus();
        let trials = 100_000u64;
        let wins = (0..trials)
            .filter(|&seed| sample_outcome(&state, &head, seed).unwrap() == Outcome::Win)
            .count();
        let freq = wins as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "frequency {}", freq);
    }

    #[test]
    fn rejects_unnormalized_input() {
        let err = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![2]);
        assert!(err.is_err());
    }
}
