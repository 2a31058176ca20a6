//! JSON game definition files: a serializable schema that constructs a
//! `PQGame` from a small gate vocabulary, plus exporters for the built-in
//! games so that export → parse round-trips to the identical game.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use pqgame::catalog::{grover_iterations, oracle_prep};
use pqgame::engine::{PQGame, WinCondition};
use pqgame::gates::{
    controlled_f, delta_oracle, dot_oracle, grover_turn, hadamard, hadamard_n, identity, pauli_x,
    Move,
};
use pqgame::qstate::{basis_state, Projector, StateVector};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameDefinitionFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub initial_state: InitialState,
    pub turns: Vec<TurnDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat_block: Option<RepeatBlock>,
    pub projector: ProjectorDef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    /// Basis index in the big-endian convention.
    Basis(usize),
    /// Full amplitude list as [re, im] pairs.
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TurnDef {
    pub player: String,
    pub moves: Vec<String>,
}

/// Repeats `turns[from_turn..]` (0-based) `count` times in sequence, the
/// shorthand for Grover's k identical oracle/turn rounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepeatBlock {
    pub from_turn: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProjectorDef {
    Basis { basis: Vec<usize> },
    Target { target_register: String },
}

fn parse_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::parse(format!("field '{}': {}", field, msg))
}

/// Parse `--a`-style values: "0b…" or an n-length run of 0/1 characters is
/// binary, anything else decimal.
pub fn parse_number(s: &str, n: usize) -> Result<u64, String> {
    let s = s.trim();
    if let Some(bits) = s.strip_prefix("0b") {
        return u64::from_str_radix(bits, 2).map_err(|e| e.to_string());
    }
    if s.len() == n && !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') {
        return u64::from_str_radix(s, 2).map_err(|e| e.to_string());
    }
    s.parse::<u64>().map_err(|e| e.to_string())
}

struct BuildContext {
    dim: usize,
    qubits: Option<usize>,
    /// Register width excluding the trailing ancilla, when one exists.
    register: Option<usize>,
    has_ancilla: bool,
}

impl BuildContext {
    fn register(&self, token: &str) -> Result<usize, CliError> {
        self.register.filter(|_| self.has_ancilla).ok_or_else(|| {
            parse_err(
                "turns",
                format!(
                    "move '{}' needs a register-plus-ancilla game (projector target_register)",
                    token
                ),
            )
        })
    }
}

fn build_move(token: &str, ctx: &BuildContext) -> Result<Move, CliError> {
    match token {
        "H" => {
            if ctx.dim != 2 {
                return Err(parse_err("turns", "'H' is only defined at dimension 2"));
            }
            Ok(hadamard())
        }
        "X" => {
            if ctx.dim != 2 {
                return Err(parse_err("turns", "'X' is only defined at dimension 2"));
            }
            Ok(pauli_x())
        }
        "I" => Ok(identity(ctx.dim)),
        "Hn" => {
            if ctx.has_ancilla {
                let n = ctx.register(token)?;
                Ok(
                    Move::kron(vec![hadamard_n(n), identity(2)], format!("H^{}⊗I", n))
                        .expect("nonempty"),
                )
            } else {
                let q = ctx
                    .qubits
                    .ok_or_else(|| parse_err("turns", "'Hn' needs a qubit count"))?;
                Ok(hadamard_n(q))
            }
        }
        "query_prep" => Ok(oracle_prep(ctx.register(token)?)),
        "grover_turn" => {
            let n = ctx.register(token)?;
            grover_turn(n).map_err(|e| parse_err("turns", e))
        }
        _ => {
            if let Some(spec) = token.strip_prefix("oracle:delta:") {
                let n = ctx.register(token)?;
                let a = parse_number(spec, n).map_err(|e| parse_err("turns", e))?;
                let f = delta_oracle(a, n).map_err(|e| parse_err("turns", e))?;
                Ok(controlled_f(&f))
            } else if let Some(bits) = token.strip_prefix("oracle:dot:") {
                let n = ctx.register(token)?;
                let a = u64::from_str_radix(bits, 2).map_err(|e| parse_err("turns", e))?;
                let g = dot_oracle(a, n).map_err(|e| parse_err("turns", e))?;
                Ok(controlled_f(&g))
            } else if let Some(list) = token.strip_prefix("perm:") {
                let map: Vec<usize> =
                    serde_json::from_str(list).map_err(|e| parse_err("turns", e))?;
                if map.len() != ctx.dim {
                    return Err(parse_err(
                        "turns",
                        format!(
                            "permutation has {} entries, game dimension is {}",
                            map.len(),
                            ctx.dim
                        ),
                    ));
                }
                Move::permutation(map, token).map_err(|e| parse_err("turns", e))
            } else {
                Err(parse_err("turns", format!("unknown move '{}'", token)))
            }
        }
    }
}

impl GameDefinitionFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("{}", e)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn to_game(&self) -> Result<PQGame, CliError> {
        let (dim, factors) = match (self.qubits, self.dimension) {
            (Some(q), _) => {
                if q == 0 || q > 20 {
                    return Err(parse_err("qubits", "must be in 1..=20"));
                }
                (1usize << q, vec![2usize; q])
            }
            (None, Some(d)) => {
                if d == 0 {
                    return Err(parse_err("dimension", "must be positive"));
                }
                (d, vec![d])
            }
            (None, None) => return Err(parse_err("qubits", "either qubits or dimension required")),
        };
        let has_ancilla = matches!(self.projector, ProjectorDef::Target { .. });
        if has_ancilla && self.qubits.map_or(true, |q| q < 2) {
            return Err(parse_err(
                "projector",
                "target_register needs at least 2 qubits (register plus ancilla)",
            ));
        }
        let ctx = BuildContext {
            dim,
            qubits: self.qubits,
            register: self.qubits.map(|q| q - 1),
            has_ancilla,
        };

        let initial_state = match &self.initial_state {
            InitialState::Basis(i) => {
                basis_state(&factors, *i).map_err(|e| parse_err("initial_state", e))?
            }
            InitialState::Amplitudes(pairs) => {
                let amps: Vec<Complex64> = pairs
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect();
                StateVector::new(amps, factors.clone())
                    .map_err(|e| parse_err("initial_state", e))?
            }
        };

        // Expand the repeat block, then check alternation Q,P,…,P,Q.
        let mut turns: Vec<&TurnDef> = self.turns.iter().collect();
        if let Some(block) = &self.repeat_block {
            if block.from_turn >= self.turns.len() || block.count == 0 {
                return Err(parse_err(
                    "repeat_block",
                    "from_turn out of range or count zero",
                ));
            }
            turns.truncate(block.from_turn);
            for _ in 0..block.count {
                turns.extend(self.turns[block.from_turn..].iter());
            }
        }
        let mut q_sets = Vec::new();
        let mut p_sets = Vec::new();
        for (i, turn) in turns.iter().enumerate() {
            let expected = if i % 2 == 0 { "Q" } else { "P" };
            if turn.player != expected {
                return Err(parse_err(
                    "turns",
                    format!(
                        "turn {} must belong to {}, found '{}'",
                        i, expected, turn.player
                    ),
                ));
            }
            let set: Vec<Move> = turn
                .moves
                .iter()
                .map(|t| build_move(t, &ctx))
                .collect::<Result<_, _>>()?;
            if i % 2 == 0 {
                q_sets.push(set);
            } else {
                p_sets.push(set);
            }
        }
        if turns.len() % 2 == 0 {
            return Err(parse_err(
                "turns",
                "the turn list must start and end with Q",
            ));
        }

        let win_condition = match &self.projector {
            ProjectorDef::Basis { basis } => WinCondition::Fixed(
                Projector::onto_basis(dim, basis.clone()).map_err(|e| parse_err("projector", e))?,
            ),
            ProjectorDef::Target { target_register } => {
                if target_register != "a" {
                    return Err(parse_err("projector", "target_register must be \"a\""));
                }
                WinCondition::TargetFirstRegister
            }
        };
        let ancilla = if has_ancilla {
            self.qubits.map(|q| q - 1)
        } else {
            None
        };
        PQGame::new(initial_state, q_sets, p_sets, win_condition, ancilla)
            .map_err(|e| parse_err("turns", e))
    }
}

pub fn export_penny() -> GameDefinitionFile {
    let q = TurnDef {
        player: "Q".into(),
        moves: vec!["H".into(), "I".into(), "X".into()],
    };
    GameDefinitionFile {
        name: "penny".into(),
        qubits: Some(1),
        dimension: None,
        initial_state: InitialState::Basis(0),
        turns: vec![
            q.clone(),
            TurnDef {
                player: "P".into(),
                moves: vec!["I".into(), "X".into()],
            },
            q,
        ],
        repeat_block: None,
        projector: ProjectorDef::Basis { basis: vec![0] },
    }
}

pub fn export_bv(n: usize, a: u64) -> GameDefinitionFile {
    GameDefinitionFile {
        name: "bv".into(),
        qubits: Some(n + 1),
        dimension: None,
        initial_state: InitialState::Basis(0),
        turns: vec![
            TurnDef {
                player: "Q".into(),
                moves: vec!["query_prep".into()],
            },
            TurnDef {
                player: "P".into(),
                moves: vec![format!("oracle:dot:{:0width$b}", a, width = n)],
            },
            TurnDef {
                player: "Q".into(),
                moves: vec!["Hn".into()],
            },
        ],
        repeat_block: None,
        projector: ProjectorDef::Target {
            target_register: "a".into(),
        },
    }
}

pub fn export_grover(n: usize, a: u64) -> GameDefinitionFile {
    let k = grover_iterations(n).max(1);
    GameDefinitionFile {
        name: "grover".into(),
        qubits: Some(n + 1),
        dimension: None,
        initial_state: InitialState::Basis(0),
        turns: vec![
            TurnDef {
                player: "Q".into(),
                moves: vec!["query_prep".into()],
            },
            TurnDef {
                player: "P".into(),
                moves: vec![format!("oracle:delta:{}", a)],
            },
            TurnDef {
                player: "Q".into(),
                moves: vec!["grover_turn".into()],
            },
        ],
        repeat_block: Some(RepeatBlock {
            from_turn: 1,
            count: k,
        }),
        projector: ProjectorDef::Target {
            target_register: "a".into(),
        },
    }
}
