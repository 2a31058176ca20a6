//! The PQ-game formalism: game records, strategy evaluation under the pure
//! and mixed evolution equations, win probabilities, and restriction of the
//! classical game to a payoff matrix.
//!
//! A game has k+1 turns for Q and k interleaved turns for Picard; pure play
//! evolves ψ_f = u_{k+1} s_k u_k … u_2 s_1 u_1 ψ_0 and mixed play replaces
//! each Picard turn by the convex combination of conjugations weighted by
//! his distribution f_i.

use crate::error::{Error, Result};
use crate::gates::Move;
use crate::qstate::{
    self, apply, apply_density, to_density, win_prob_density, win_prob_state, DensityMatrix,
    Projector, StateVector,
};
use crate::solver::MatrixGame;

/// Cap on the number of payoff-matrix cells the enumerator will fill.
pub const ENUMERATION_CAP: usize = 1_000_000;

/// Q's winning subspace, possibly depending on Picard's hidden choice a.
#[derive(Debug, Clone, PartialEq)]
pub enum WinCondition {
    Fixed(Projector),
    /// Π(a) = |a⟩⟨a| ⊗ I₂ on the first register, ancilla last.
    TargetFirstRegister,
}

impl WinCondition {
    pub fn projector(&self, dim: usize, a: Option<u64>) -> Result<Projector> {
        match self {
            WinCondition::Fixed(p) => Ok(p.clone()),
            WinCondition::TargetFirstRegister => {
                let a = a.ok_or_else(|| {
                    Error::Domain(
                        "win condition depends on the hidden number a, but none was supplied"
                            .into(),
                    )
                })? as usize;
                if 2 * a + 1 >= dim {
                    return Err(Error::Domain(format!(
                        "hidden number {} out of range for dimension {}",
                        a, dim
                    )));
                }
                Projector::onto_basis(dim, vec![2 * a, 2 * a + 1])
            }
        }
    }

    pub fn is_parameterized(&self) -> bool {
        matches!(self, WinCondition::TargetFirstRegister)
    }
}

/// The quintuple defining a PQ game.
#[derive(Debug, Clone, PartialEq)]
pub struct PQGame {
    pub dimension: usize,
    pub factorization: Vec<usize>,
    pub initial_state: StateVector,
    /// Q_1, …, Q_{k+1}.
    pub q_move_sets: Vec<Vec<Move>>,
    /// P_1, …, P_k.
    pub p_move_sets: Vec<Vec<Move>>,
    pub win_condition: WinCondition,
    /// Index of the ancilla factor, when the game has one (excluded from
    /// entanglement measures).
    pub ancilla: Option<usize>,
}

impl PQGame {
    pub fn new(
        initial_state: StateVector,
        q_move_sets: Vec<Vec<Move>>,
        p_move_sets: Vec<Vec<Move>>,
        win_condition: WinCondition,
        ancilla: Option<usize>,
    ) -> Result<Self> {
        let dimension = initial_state.dim();
        let factorization = initial_state.factors().to_vec();
        if q_move_sets.len() != p_move_sets.len() + 1 {
            return Err(Error::Domain(format!(
                "Q moves first and last: need |Q sets| = |P sets| + 1, got {} and {}",
                q_move_sets.len(),
                p_move_sets.len()
            )));
        }
        if q_move_sets.iter().any(Vec::is_empty) || p_move_sets.iter().any(Vec::is_empty) {
            return Err(Error::Domain("every move set must be nonempty".into()));
        }
        for (i, set) in q_move_sets.iter().enumerate() {
            for m in set {
                if m.dim() != dimension {
                    return Err(Error::Dimension(format!(
                        "Q move '{}' in Q_{} has dimension {}, game has {}",
                        m.label(),
                        i + 1,
                        m.dim(),
                        dimension
                    )));
                }
            }
        }
        for (i, set) in p_move_sets.iter().enumerate() {
            for m in set {
                if m.dim() != dimension {
                    return Err(Error::Dimension(format!(
                        "P move '{}' in P_{} has dimension {}, game has {}",
                        m.label(),
                        i + 1,
                        m.dim(),
                        dimension
                    )));
                }
                if !m.is_permutation() {
                    return Err(Error::Domain(format!(
                        "P move '{}' in P_{} is not a permutation",
                        m.label(),
                        i + 1
                    )));
                }
            }
        }
        if let WinCondition::Fixed(p) = &win_condition {
            if p.dim() != dimension {
                return Err(Error::Dimension(
                    "win projector dimension differs from game dimension".into(),
                ));
            }
        }
        if let Some(anc) = ancilla {
            if anc >= factorization.len() {
                return Err(Error::Domain("ancilla factor index out of range".into()));
            }
        }
        Ok(PQGame {
            dimension,
            factorization,
            initial_state,
            q_move_sets,
            p_move_sets,
            win_condition,
            ancilla,
        })
    }

    /// Number of Picard turns.
    pub fn k(&self) -> usize {
        self.p_move_sets.len()
    }
}

/// A pure quantum strategy for Q: u_i ∈ Q_i.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub moves: Vec<Move>,
}

/// A pure classical strategy for Picard: s_i ∈ P_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPureStrategy {
    pub moves: Vec<Move>,
}

/// A mixed classical strategy: per-turn distributions over P_i, indexed in
/// move-set order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMixedStrategy {
    pub distributions: Vec<Vec<f64>>,
}

impl ClassicalMixedStrategy {
    pub fn new(distributions: Vec<Vec<f64>>) -> Result<Self> {
        for (i, f) in distributions.iter().enumerate() {
            if f.iter().any(|&p| p < 0.0) {
                return Err(Error::Domain(format!(
                    "distribution for turn {} has a negative weight",
                    i + 1
                )));
            }
            let total: f64 = f.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "distribution for turn {} sums to {}",
                    i + 1,
                    total
                )));
            }
        }
        Ok(ClassicalMixedStrategy { distributions })
    }

    /// Point mass on one pure strategy, by move indices.
    pub fn point_mass(p_move_sets: &[Vec<Move>], choices: &[usize]) -> Result<Self> {
        if choices.len() != p_move_sets.len() {
            return Err(Error::Domain("one choice per Picard turn required".into()));
        }
        let mut distributions = Vec::with_capacity(choices.len());
        for (set, &c) in p_move_sets.iter().zip(choices) {
            if c >= set.len() {
                return Err(Error::Domain("choice index out of range".into()));
            }
            let mut f = vec![0.0; set.len()];
            f[c] = 1.0;
            distributions.push(f);
        }
        Ok(ClassicalMixedStrategy { distributions })
    }
}

/// One recorded state of a play-through.
#[derive(Debug, Clone)]
pub struct TranscriptStep {
    pub label: String,
    pub state: StateVector,
}

/// Full record of a pure play: ψ_0 plus the state after every move (2k+2
/// states in all), the final win probability and the oracle-call count.
#[derive(Debug, Clone)]
pub struct GameTranscript {
    pub steps: Vec<TranscriptStep>,
    pub win_probability: f64,
    pub oracle_calls: usize,
    pub ancilla: Option<usize>,
}

impl GameTranscript {
    pub fn final_state(&self) -> &StateVector {
        &self.steps.last().expect("transcript is never empty").state
    }
}

fn check_membership(set: &[Move], mv: &Move, turn: usize, player: &str) -> Result<()> {
    if set.iter().any(|m| m == mv) {
        Ok(())
    } else {
        Err(Error::Strategy {
            turn,
            msg: format!(
                "{} move '{}' is not in the game's move set",
                player,
                mv.label()
            ),
        })
    }
}

/// Evolve a pure/pure strategy pair, recording every intermediate state.
pub fn evolve_pure(
    g: &PQGame,
    q: &QuantumStrategy,
    p: &ClassicalPureStrategy,
    a: Option<u64>,
) -> Result<GameTranscript> {
    let k = g.k();
    if q.moves.len() != k + 1 {
        return Err(Error::Strategy {
            turn: q.moves.len(),
            msg: format!("Q must supply {} moves, got {}", k + 1, q.moves.len()),
        });
    }
    if p.moves.len() != k {
        return Err(Error::Strategy {
            turn: p.moves.len(),
            msg: format!("Picard must supply {} moves, got {}", k, p.moves.len()),
        });
    }
    for (i, mv) in q.moves.iter().enumerate() {
        check_membership(&g.q_move_sets[i], mv, i + 1, "Q")?;
    }
    for (i, mv) in p.moves.iter().enumerate() {
        check_membership(&g.p_move_sets[i], mv, i + 1, "Picard")?;
    }

    let mut steps = Vec::with_capacity(2 * k + 2);
    steps.push(TranscriptStep {
        label: "psi_0".into(),
        state: g.initial_state.clone(),
    });
    let mut state = g.initial_state.clone();
    for i in 0..k {
        state = apply(&q.moves[i], &state)?;
        steps.push(TranscriptStep {
            label: format!("Q{}:{}", i + 1, q.moves[i].label()),
            state: state.clone(),
        });
        state = apply(&p.moves[i], &state)?;
        steps.push(TranscriptStep {
            label: format!("P{}:{}", i + 1, p.moves[i].label()),
            state: state.clone(),
        });
    }
    state = apply(&q.moves[k], &state)?;
    steps.push(TranscriptStep {
        label: format!("Q{}:{}", k + 1, q.moves[k].label()),
        state: state.clone(),
    });

    let projector = g.win_condition.projector(g.dimension, a)?;
    let win_probability = win_prob_state(&state, &projector)?;
    Ok(GameTranscript {
        steps,
        win_probability,
        oracle_calls: k,
        ancilla: g.ancilla,
    })
}

/// Evolve Q's pure strategy against Picard's mixed strategy:
/// ρ_f = u_{k+1} (Σ f_k(s) s … (Σ f_1(s) s u_1 ρ_0 u_1† s†) … s†) u_{k+1}†.
pub fn evolve_mixed(
    g: &PQGame,
    q: &QuantumStrategy,
    p: &ClassicalMixedStrategy,
    _a: Option<u64>,
) -> Result<DensityMatrix> {
    let k = g.k();
    if q.moves.len() != k + 1 {
        return Err(Error::Strategy {
            turn: q.moves.len(),
            msg: format!("Q must supply {} moves, got {}", k + 1, q.moves.len()),
        });
    }
    if p.distributions.len() != k {
        return Err(Error::Strategy {
            turn: p.distributions.len(),
            msg: format!(
                "Picard must supply {} distributions, got {}",
                k,
                p.distributions.len()
            ),
        });
    }
    for (i, mv) in q.moves.iter().enumerate() {
        check_membership(&g.q_move_sets[i], mv, i + 1, "Q")?;
    }
    for (i, f) in p.distributions.iter().enumerate() {
        if f.len() != g.p_move_sets[i].len() {
            return Err(Error::Strategy {
                turn: i + 1,
                msg: format!(
                    "distribution has {} weights but P_{} has {} moves",
                    f.len(),
                    i + 1,
                    g.p_move_sets[i].len()
                ),
            });
        }
    }

    let mut rho = to_density(&g.initial_state);
    for i in 0..k {
        rho = apply_density(&q.moves[i], &rho)?;
        let mut mixed = nalgebra::DMatrix::zeros(g.dimension, g.dimension);
        for (j, &weight) in p.distributions[i].iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let term = apply_density(&g.p_move_sets[i][j], &rho)?;
            mixed += term.entries() * nalgebra::Complex::new(weight, 0.0);
        }
        rho = DensityMatrix::new(mixed, g.factorization.clone())?;
    }
    apply_density(&q.moves[k], &rho)
}

/// Picard's side of a win-probability query.
#[derive(Debug, Clone, Copy)]
pub enum PicardPlay<'a> {
    Pure(&'a ClassicalPureStrategy),
    Mixed(&'a ClassicalMixedStrategy),
}

/// Q's win probability for the given strategy pair (Tr(ψ†Πψ) for pure play,
/// Tr(Πρ_f) for mixed play).
pub fn win_probability(
    g: &PQGame,
    q: &QuantumStrategy,
    picard: PicardPlay<'_>,
    a: Option<u64>,
) -> Result<f64> {
    match picard {
        PicardPlay::Pure(p) => Ok(evolve_pure(g, q, p, a)?.win_probability),
        PicardPlay::Mixed(p) => {
            let rho = evolve_mixed(g, q, p, a)?;
            let projector = g.win_condition.projector(g.dimension, a)?;
            win_prob_density(&rho, &projector)
        }
    }
}

fn cartesian(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in counts {
        let mut next = Vec::with_capacity(out.len() * c);
        for prefix in &out {
            for i in 0..c {
                let mut row = prefix.clone();
                row.push(i);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Restrict Q to the permutation moves inside his move sets and tabulate
/// every deterministic play as a win-probability matrix (rows: Q, columns:
/// Picard, with columns ranging over (strategy, a) pairs when the win
/// condition depends on the hidden number).
pub fn enumerate_payoff_matrix(g: &PQGame, hidden_params: Option<&[u64]>) -> Result<MatrixGame> {
    let classical_q: Vec<Vec<&Move>> = g
        .q_move_sets
        .iter()
        .map(|set| set.iter().filter(|m| m.is_permutation()).collect())
        .collect();
    for (i, set) in classical_q.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::Domain(format!(
                "Q_{} contains no classical (permutation) moves",
                i + 1
            )));
        }
    }
    let params: Vec<Option<u64>> = if g.win_condition.is_parameterized() {
        let ps = hidden_params.ok_or_else(|| {
            Error::Domain("parameterized win condition requires a list of hidden numbers".into())
        })?;
        ps.iter().map(|&a| Some(a)).collect()
    } else {
        vec![None]
    };

    let q_counts: Vec<usize> = classical_q.iter().map(Vec::len).collect();
    let p_counts: Vec<usize> = g.p_move_sets.iter().map(Vec::len).collect();
    let rows: usize = q_counts.iter().product();
    let cols: usize = p_counts.iter().product::<usize>() * params.len();
    if rows.saturating_mul(cols) > ENUMERATION_CAP {
        return Err(Error::Resource(format!(
            "{}×{} payoff matrix exceeds the {}-cell cap",
            rows, cols, ENUMERATION_CAP
        )));
    }

    let q_indexings = cartesian(&q_counts);
    let p_indexings = cartesian(&p_counts);

    let mut payoff = Vec::with_capacity(rows);
    let mut row_labels = Vec::with_capacity(rows);
    let mut col_labels = Vec::with_capacity(cols);
    for p_idx in &p_indexings {
        let base: Vec<&str> = p_idx
            .iter()
            .enumerate()
            .map(|(i, &j)| g.p_move_sets[i][j].label())
            .collect();
        for a in &params {
            let mut label = base.join(",");
            if let Some(a) = a {
                label = format!("{}|a={}", label, a);
            }
            col_labels.push(label);
        }
    }
    for q_idx in &q_indexings {
        let q = QuantumStrategy {
            moves: q_idx
                .iter()
                .enumerate()
                .map(|(i, &j)| classical_q[i][j].clone())
                .collect(),
        };
        row_labels.push(
            q_idx
                .iter()
                .enumerate()
                .map(|(i, &j)| classical_q[i][j].label())
                .collect::<Vec<_>>()
                .join(","),
        );
        let mut row = Vec::with_capacity(cols);
        for p_idx in &p_indexings {
            let p = ClassicalPureStrategy {
                moves: p_idx
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| g.p_move_sets[i][j].clone())
                    .collect(),
            };
            for &a in &params {
                row.push(evolve_pure(g, &q, &p, a)?.win_probability);
            }
        }
        payoff.push(row);
    }
    MatrixGame::new(payoff, row_labels, col_labels)
}

/// Convenience: ⟨ψ|Π|ψ⟩ for a transcript's final state against an explicit
/// projector (used when re-checking traces).
pub fn final_win_probability(t: &GameTranscript, p: &Projector) -> Result<f64> {
    qstate::win_prob_state(t.final_state(), p)
}
