//! Per-timestep entanglement analysis of game transcripts: product-state
//! detection relative to the qubit factorization, a scalar global measure,
//! and Schmidt coefficients across a bipartition.
//!
//! The scalar measure is the average single-qubit linear entropy
//! Q(ψ) = 2(1 − (1/n)Σ_k Tr ρ_k²), zero exactly on product states.  Traces
//! over oracle-game transcripts evaluate it on the first register only; the
//! ancilla stays in (|0⟩−|1⟩)/√2 throughout and never changes a product
//! verdict, only the scalar.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::engine::GameTranscript;
use crate::error::{Error, Result};
use crate::qstate::StateVector;

/// Default tolerance for product verdicts.
pub const PRODUCT_TOL: f64 = 1e-9;

/// True iff every single-factor reduced density matrix has purity at least
/// 1 − tol; for a pure global state this is full factorization.
pub fn is_product(s: &StateVector, tol: f64) -> Result<bool> {
    if (s.norm() - 1.0).abs() > crate::qstate::NORM_TOL {
        return Err(Error::Domain("state is not normalized".into()));
    }
    for k in 0..s.factors().len() {
        if s.reduced_factor(k)?.purity() < 1.0 - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Average linear entropy over the given factors.
pub fn global_entanglement_over(s: &StateVector, factors: &[usize]) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::Domain("no factors to measure".into()));
    }
    let mut purity_sum = 0.0;
    for &k in factors {
        purity_sum += s.reduced_factor(k)?.purity();
    }
    let q = 2.0 * (1.0 - purity_sum / factors.len() as f64);
    Ok(q.max(0.0))
}

/// Average linear entropy over all qubit factors of the state.
pub fn global_entanglement(s: &StateVector) -> Result<f64> {
    let all: Vec<usize> = (0..s.factors().len()).collect();
    global_entanglement_over(s, &all)
}

/// One row per transcript state.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub step: usize,
    pub label: String,
    pub norm: f64,
    pub measure: f64,
    pub is_product: bool,
}

#[derive(Debug, Clone)]
pub struct EntanglementTrace {
    pub rows: Vec<TraceRow>,
    /// Factors the scalar measure averaged over (the first register for
    /// oracle games).
    pub measured_factors: Vec<usize>,
}

/// Evaluate the measure and the product verdict on every recorded state of
/// a transcript, excluding the ancilla from the scalar measure.
pub fn trace_transcript(t: &GameTranscript) -> Result<EntanglementTrace> {
    let first = &t
        .steps
        .first()
        .ok_or_else(|| Error::Domain("empty transcript".into()))?
        .state;
    let measured_factors: Vec<usize> = (0..first.factors().len())
        .filter(|&f| Some(f) != t.ancilla)
        .collect();
    let mut rows = Vec::with_capacity(t.steps.len());
    for (step, rec) in t.steps.iter().enumerate() {
        rows.push(TraceRow {
            step,
            label: rec.label.clone(),
            norm: rec.state.norm(),
            measure: global_entanglement_over(&rec.state, &measured_factors)?,
            is_product: is_product(&rec.state, PRODUCT_TOL)?,
        });
    }
    Ok(EntanglementTrace {
        rows,
        measured_factors,
    })
}

/// Singular values of the amplitude matrix reshaped along the given cut
/// (factor indices forming the row side), nonincreasing; squares sum to 1.
pub fn schmidt_coefficients(s: &StateVector, cut: &[usize]) -> Result<Vec<f64>> {
    let nf = s.factors().len();
    let mut cut: Vec<usize> = cut.to_vec();
    cut.sort_unstable();
    cut.dedup();
    if cut.is_empty() || cut.len() == nf {
        return Err(Error::Domain(
            "bipartition must leave factors on both sides".into(),
        ));
    }
    if cut.iter().any(|&f| f >= nf) {
        return Err(Error::Domain("cut factor index out of range".into()));
    }
    let rest: Vec<usize> = (0..nf).filter(|f| !cut.contains(f)).collect();
    let dims = s.factors();
    let rows: usize = cut.iter().map(|&f| dims[f]).product();
    let cols: usize = rest.iter().map(|&f| dims[f]).product();

    let mut matrix = DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, &amp) in s.amplitudes().iter().enumerate() {
        // Decompose the big-endian global index into per-factor digits.
        let mut digits = vec![0usize; nf];
        let mut rem = idx;
        for f in (0..nf).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let mut r = 0usize;
        for &f in &cut {
            r = r * dims[f] + digits[f];
        }
        let mut c = 0usize;
        for &f in &rest {
            c = c * dims[f] + digits[f];
        }
        matrix[(r, c)] = amp;
    }
    let mut values: Vec<f64> = matrix
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bv_game, grover_game, penny_flip};
    use crate::engine::{evolve_pure, ClassicalPureStrategy};
    use crate::gates::hadamard_n;
    use crate::qstate::{apply, basis_state};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn bell() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(
            vec![
                Complex64::new(s, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(s, 0.0),
            ],
            vec![2, 2],
        )
        .unwrap()
    }

    fn play(inst: &crate::catalog::GameInstance) -> crate::engine::GameTranscript {
        let p = ClassicalPureStrategy {
            moves: inst.game.p_move_sets.iter().map(|s| s[0].clone()).collect(),
        };
        evolve_pure(&inst.game, &inst.q_reference, &p, inst.a).unwrap()
    }

    #[test]
    fn product_detection() {
        let s = basis_state(&[2, 2, 2, 2], 0b0101).unwrap();
        assert!(is_product(&s, PRODUCT_TOL).unwrap());

        assert!(!is_product(&bell(), PRODUCT_TOL).unwrap());

        let uniform = apply(&hadamard_n(4), &basis_state(&[2, 2, 2, 2], 0).unwrap()).unwrap();
        assert!(is_product(&uniform, PRODUCT_TOL).unwrap());
    }

    #[test]
    fn measure_examples() {
        let s = basis_state(&[2, 2, 2], 5).unwrap();
        assert_relative_eq!(global_entanglement(&s).unwrap(), 0.0, epsilon = 1e-12);

        // Bell pair: both reduced purities are 1/2, so Q = 2(1 - 1/2) = 1.
        assert_relative_eq!(global_entanglement(&bell()).unwrap(), 1.0, epsilon = 1e-12);

        // Grover n=2 first-register state after the oracle: (1,1,1,-1)/2.
        let s = StateVector::new(
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(-0.5, 0.0),
            ],
            vec![2, 2],
        )
        .unwrap();
        let q = global_entanglement(&s).unwrap();
        assert!(q > 1e-6);
        // Hand computation: both single-qubit purities are 1/2 here too.
        assert_relative_eq!(q, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bv_transcript_has_no_entanglement() {
        for n in 1..=4usize {
            for a in 0..1u64 << n {
                let trace = trace_transcript(&play(&bv_game(n, a).unwrap())).unwrap();
                assert_eq!(trace.rows.len(), 4);
                for row in &trace.rows {
                    assert!(row.measure <= 1e-9, "n={} a={} step {}", n, a, row.step);
                    assert!(row.is_product);
                }
            }
        }
    }

    #[test]
    fn grover_interior_states_are_entangled() {
        let inst = grover_game(3, 5).unwrap();
        let t = play(&inst);
        let trace = trace_transcript(&t).unwrap();
        let last = trace.rows.len() - 1;
        for row in &trace.rows[2..last] {
            assert!(
                row.measure > 1e-6,
                "interior step {} has measure {}",
                row.step,
                row.measure
            );
            assert!(!row.is_product);
        }
        // The first two states (psi_0 and u_1 psi_0) are products.
        assert!(trace.rows[0].is_product);
        assert!(trace.rows[1].is_product);
    }

    #[test]
    fn penny_transcript_rows_are_trivially_product() {
        let inst = penny_flip();
        let p = ClassicalPureStrategy {
            moves: vec![inst.game.p_move_sets[0][0].clone()],
        };
        let t = evolve_pure(&inst.game, &inst.q_reference, &p, None).unwrap();
        let trace = trace_transcript(&t).unwrap();
        assert_eq!(trace.rows.len(), 4);
        for row in &trace.rows {
            assert!(row.is_product);
            assert_relative_eq!(row.measure, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn schmidt_examples() {
        let product = basis_state(&[2, 2], 2).unwrap();
        let coeffs = schmidt_coefficients(&product, &[0]).unwrap();
        assert_relative_eq!(coeffs[0], 1.0, epsilon = 1e-12);
        assert!(coeffs[1..].iter().all(|&c| c.abs() < 1e-12));

        let coeffs = schmidt_coefficients(&bell(), &[0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(coeffs[0], s, epsilon = 1e-12);
        assert_relative_eq!(coeffs[1], s, epsilon = 1e-12);

        let sq_sum: f64 = coeffs.iter().map(|c| c * c).sum();
        assert_relative_eq!(sq_sum, 1.0, epsilon = 1e-10);

        assert!(schmidt_coefficients(&bell(), &[]).is_err());
        assert!(schmidt_coefficients(&bell(), &[0, 1]).is_err());
    }
}
