//! The three reference games — Penny Flip, Grover Guess-a-Number and
//! Bernstein-Vazirani Guess-a-Number — packaged as games plus named
//! strategies, and the classical baselines they are measured against.

use crate::engine::{ClassicalMixedStrategy, PQGame, QuantumStrategy, WinCondition};
use crate::error::{Error, Result};
use crate::gates::{
    controlled_f, delta_oracle, dot_oracle, grover_turn, hadamard, hadamard_n, identity, pauli_x,
    Move,
};
use crate::qstate::{basis_state, Projector};
use crate::rng::SplitMix64;

pub const MAX_QUBITS: usize = 20;

/// A packaged game: the quintuple, Q's reference strategy and the instance
/// metadata (register size n, search space N = 2ⁿ, turn count k, hidden
/// number a where the game has one).
#[derive(Debug, Clone)]
pub struct GameInstance {
    pub name: String,
    pub game: PQGame,
    pub q_reference: QuantumStrategy,
    /// Picard's reference mixed strategy, where the game has a meaningful
    /// one (the Penny Flip equilibrium mixture).
    pub classical_reference: Option<ClassicalMixedStrategy>,
    pub n: usize,
    pub search_space: usize,
    pub k: usize,
    pub a: Option<u64>,
}

/// k = ⌊(π/4)·√N⌋, the Grover iteration count.
pub fn grover_iterations(n: usize) -> usize {
    let big_n = (1usize << n) as f64;
    (std::f64::consts::FRAC_PI_4 * big_n.sqrt()).floor() as usize
}

/// The one-qubit penny game: ψ_0 = |0⟩, Q presented {H, I, X} on both
/// turns, Picard {I, X}, Π = |0⟩⟨0|; Q's reference strategy is (H, H).
pub fn penny_flip() -> GameInstance {
    let q_set = vec![hadamard(), identity(2), pauli_x()];
    let p_set = vec![identity(2), pauli_x()];
    let game = PQGame::new(
        basis_state(&[2], 0).expect("|0> is valid"),
        vec![q_set.clone(), q_set],
        vec![p_set],
        WinCondition::Fixed(Projector::onto_basis(2, vec![0]).expect("valid projector")),
        None,
    )
    .expect("penny flip game is well formed");
    GameInstance {
        name: "penny".into(),
        game,
        q_reference: QuantumStrategy {
            moves: vec![hadamard(), hadamard()],
        },
        classical_reference: Some(
            ClassicalMixedStrategy::new(vec![vec![0.5, 0.5]]).expect("uniform is valid"),
        ),
        n: 1,
        search_space: 2,
        k: 1,
        a: None,
    }
}

/// u_1 = H^{⊗n} ⊗ Hσx, the query-preparation move of both oracle games.
pub fn oracle_prep(n: usize) -> Move {
    // X then H on the ancilla.
    let hx =
        Move::unitary(hadamard().to_matrix() * pauli_x().to_matrix(), "HX").expect("HX is unitary");
    Move::kron(vec![hadamard_n(n), hx], format!("H^{}⊗HX", n)).expect("nonempty")
}

fn check_register(n: usize, a: u64) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Domain(format!(
            "register size {} outside 1..={}",
            n, MAX_QUBITS
        )));
    }
    if a >= 1u64 << n {
        return Err(Error::Domain(format!(
            "hidden number {} out of range for {} qubits",
            a, n
        )));
    }
    Ok(())
}

/// Grover Guess-a-Number: Picard hides a, answers δ-oracle queries, and Q
/// plays k = ⌊(π/4)√N⌋ oracle/turn rounds.
pub fn grover_game(n: usize, a: u64) -> Result<GameInstance> {
    check_register(n, a)?;
    let k = grover_iterations(n).max(1);
    let oracle = controlled_f(&delta_oracle(a, n)?);
    let turn = grover_turn(n)?;
    let u1 = oracle_prep(n);

    let mut q_sets = vec![vec![u1.clone()]];
    q_sets.extend(std::iter::repeat(vec![turn.clone()]).take(k));
    let p_sets = vec![vec![oracle.clone()]; k];
    let factors = vec![2usize; n + 1];
    let game = PQGame::new(
        basis_state(&factors, 0)?,
        q_sets,
        p_sets,
        WinCondition::TargetFirstRegister,
        Some(n),
    )?;
    let mut moves = vec![u1];
    moves.extend(std::iter::repeat(turn).take(k));
    Ok(GameInstance {
        name: "grover".into(),
        game,
        q_reference: QuantumStrategy { moves },
        classical_reference: None,
        n,
        search_space: 1 << n,
        k,
        a: Some(a),
    })
}

/// Bernstein-Vazirani Guess-a-Number: one dot-product oracle query, then
/// H^{⊗n} ⊗ I₂ reads a out exactly.
pub fn bv_game(n: usize, a: u64) -> Result<GameInstance> {
    check_register(n, a)?;
    let oracle = controlled_f(&dot_oracle(a, n)?);
    let u1 = oracle_prep(n);
    let u2 = Move::kron(vec![hadamard_n(n), identity(2)], format!("H^{}⊗I", n))?;
    let factors = vec![2usize; n + 1];
    let game = PQGame::new(
        basis_state(&factors, 0)?,
        vec![vec![u1.clone()], vec![u2.clone()]],
        vec![vec![oracle]],
        WinCondition::TargetFirstRegister,
        Some(n),
    )?;
    Ok(GameInstance {
        name: "bv".into(),
        game,
        q_reference: QuantumStrategy {
            moves: vec![u1, u2],
        },
        classical_reference: None,
        n,
        search_space: 1 << n,
        k: 1,
        a: Some(a),
    })
}

/// Statistics from Monte-Carlo simulation of the classical guessing
/// equilibrium (uniform a, guesses in uniformly random order, count queries
/// up to and including the hit).  Exact expectation is (N+1)/2; the paper's
/// N/2 is the large-N approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessBaselineStats {
    pub trials: usize,
    pub mean_queries: f64,
    pub stddev_queries: f64,
    pub seed: u64,
}

impl GuessBaselineStats {
    pub fn standard_error(&self) -> f64 {
        self.stddev_queries / (self.trials as f64).sqrt()
    }
}

pub fn classical_guess_baseline(n: usize, trials: usize, seed: u64) -> Result<GuessBaselineStats> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Domain(format!(
            "register size {} outside 1..={}",
            n, MAX_QUBITS
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial required".into()));
    }
    let big_n = 1usize << n;
    let mut master = SplitMix64::new(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut order: Vec<usize> = (0..big_n).collect();
    for _ in 0..trials {
        let mut rng = SplitMix64::new(master.next_u64());
        let a = rng.next_below(big_n as u64) as usize;
        for (i, x) in order.iter_mut().enumerate() {
            *x = i;
        }
        rng.shuffle(&mut order);
        let queries = order.iter().position(|&x| x == a).expect("a is in 0..N") + 1;
        sum += queries as f64;
        sum_sq += (queries * queries) as f64;
    }
    let mean = sum / trials as f64;
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
    Ok(GuessBaselineStats {
        trials,
        mean_queries: mean,
        stddev_queries: var.sqrt(),
        seed,
    })
}

/// Result of the deterministic classical Bernstein-Vazirani baseline:
/// query g_a at each unit vector e_i, read a_i back directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BvBaselineResult {
    pub recovered: u64,
    pub queries: usize,
}

pub fn classical_bv_baseline(n: usize, a: u64) -> Result<BvBaselineResult> {
    check_register(n, a)?;
    let oracle = dot_oracle(a, n)?;
    let mut recovered = 0u64;
    let mut queries = 0usize;
    for i in 0..n {
        let unit = 1usize << (n - 1 - i);
        let bit = oracle.eval(unit) as u64;
        queries += 1;
        recovered = (recovered << 1) | bit;
    }
    Ok(BvBaselineResult { recovered, queries })
}
