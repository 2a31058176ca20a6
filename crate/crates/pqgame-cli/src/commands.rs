//! The non-interactive subcommands: run, trace, solve, bench, export.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pqgame::catalog::{self, classical_bv_baseline, classical_guess_baseline, grover_iterations};
use pqgame::engine::{
    enumerate_payoff_matrix, evolve_pure, win_probability, ClassicalMixedStrategy,
    ClassicalPureStrategy, GameTranscript, PQGame, PicardPlay, QuantumStrategy,
};
use pqgame::entanglement::trace_transcript;
use pqgame::qstate::{sample_outcome, Outcome};
use pqgame::rng::SplitMix64;
use pqgame::solver::solve_zero_sum;

use crate::error::CliError;
use crate::gamefile::{self, parse_number, GameDefinitionFile};

#[derive(Debug, Clone)]
pub enum Selector {
    Penny,
    Grover,
    Bv,
    File(PathBuf),
}

impl Selector {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "penny" => Ok(Selector::Penny),
            "grover" => Ok(Selector::Grover),
            "bv" => Ok(Selector::Bv),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Selector::File(PathBuf::from(path))),
                _ => Err(CliError::usage(format!(
                    "unknown game selector '{}' (expected penny, grover, bv or file:PATH)",
                    s
                ))),
            },
        }
    }
}

pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("PQGAME_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("PQGAME_SEED is not an integer: '{}'", v))),
        Err(_) => Ok(0),
    }
}

/// A game plus the default strategies the commands evaluate: the built-in
/// games carry Q's reference strategy; file games default to the first move
/// of every set.
pub struct LoadedGame {
    pub name: String,
    pub game: PQGame,
    pub q: QuantumStrategy,
    pub a: Option<u64>,
}

fn register_width(game: &PQGame) -> usize {
    match game.ancilla {
        Some(anc) => game
            .factorization
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != anc)
            .count(),
        None => game.factorization.len(),
    }
}

pub fn load(
    selector: &Selector,
    n: Option<usize>,
    a: Option<&str>,
) -> Result<LoadedGame, CliError> {
    match selector {
        Selector::Penny => {
            let inst = catalog::penny_flip();
            Ok(LoadedGame {
                name: inst.name,
                game: inst.game,
                q: inst.q_reference,
                a: None,
            })
        }
        Selector::Grover | Selector::Bv => {
            let n = n.ok_or_else(|| CliError::usage("--n is required for this game"))?;
            let a_str = a.ok_or_else(|| CliError::usage("--a is required for this game"))?;
            let a = parse_number(a_str, n).map_err(|e| CliError::usage(format!("--a: {}", e)))?;
            let inst = match selector {
                Selector::Grover => catalog::grover_game(n, a)?,
                _ => catalog::bv_game(n, a)?,
            };
            Ok(LoadedGame {
                name: format!("{} n={} a={}", inst.name, n, a),
                game: inst.game,
                q: inst.q_reference,
                a: inst.a,
            })
        }
        Selector::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("{}: {}", path.display(), e)))?;
            let def = GameDefinitionFile::from_json(&text)?;
            let game = def.to_game()?;
            let a = match a {
                Some(s) => Some(
                    parse_number(s, register_width(&game))
                        .map_err(|e| CliError::usage(format!("--a: {}", e)))?,
                ),
                None => None,
            };
            if game.win_condition.is_parameterized() && a.is_none() {
                return Err(CliError::usage(
                    "this game's win condition depends on a: pass --a",
                ));
            }
            let q = QuantumStrategy {
                moves: game.q_move_sets.iter().map(|s| s[0].clone()).collect(),
            };
            Ok(LoadedGame {
                name: def.name,
                game,
                q,
                a,
            })
        }
    }
}

fn default_picard(game: &PQGame) -> ClassicalPureStrategy {
    ClassicalPureStrategy {
        moves: game.p_move_sets.iter().map(|s| s[0].clone()).collect(),
    }
}

fn picard_from_flag(loaded: &LoadedGame, flag: &str) -> Result<PennyPicard, CliError> {
    if loaded.name != "penny" {
        return Err(CliError::usage(
            "--picard selects the penny strategy; other games fix Picard's moves",
        ));
    }
    let sets = &loaded.game.p_move_sets;
    match flag {
        "stay" => Ok(PennyPicard::Pure(ClassicalPureStrategy {
            moves: vec![sets[0][0].clone()],
        })),
        "flip" => Ok(PennyPicard::Pure(ClassicalPureStrategy {
            moves: vec![sets[0][1].clone()],
        })),
        "uniform" => Ok(PennyPicard::Mixed(
            ClassicalMixedStrategy::new(vec![vec![0.5, 0.5]]).expect("uniform is valid"),
        )),
        _ => match flag.strip_prefix("p=") {
            Some(v) => {
                let p: f64 = v
                    .parse()
                    .map_err(|_| CliError::usage(format!("--picard p=<x>: bad number '{}'", v)))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(CliError::usage("--picard p=<x>: x must be in [0, 1]"));
                }
                Ok(PennyPicard::Mixed(
                    ClassicalMixedStrategy::new(vec![vec![1.0 - p, p]])
                        .expect("grid point is a distribution"),
                ))
            }
            None => Err(CliError::usage(format!(
                "unknown --picard value '{}' (expected flip, stay, uniform or p=<x>)",
                flag
            ))),
        },
    }
}

enum PennyPicard {
    Pure(ClassicalPureStrategy),
    Mixed(ClassicalMixedStrategy),
}

pub fn cmd_run(
    selector: &str,
    n: Option<usize>,
    a: Option<&str>,
    picard: Option<&str>,
    sample: bool,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let selector = Selector::parse(selector)?;
    let loaded = load(&selector, n, a)?;
    let seed = resolve_seed(seed)?;

    let (win, pure_transcript): (f64, Option<GameTranscript>) = match picard {
        Some(flag) => match picard_from_flag(&loaded, flag)? {
            PennyPicard::Pure(p) => {
                let t = evolve_pure(&loaded.game, &loaded.q, &p, loaded.a)?;
                (t.win_probability, Some(t))
            }
            PennyPicard::Mixed(m) => (
                win_probability(&loaded.game, &loaded.q, PicardPlay::Mixed(&m), loaded.a)?,
                None,
            ),
        },
        None => {
            let p = default_picard(&loaded.game);
            let t = evolve_pure(&loaded.game, &loaded.q, &p, loaded.a)?;
            (t.win_probability, Some(t))
        }
    };

    writeln!(out, "game {}", loaded.name)?;
    writeln!(out, "win_probability {:.12}", win)?;
    writeln!(out, "queries {}", loaded.game.k())?;
    if sample {
        let outcome = match &pure_transcript {
            Some(t) => {
                let projector = loaded
                    .game
                    .win_condition
                    .projector(loaded.game.dimension, loaded.a)?;
                sample_outcome(t.final_state(), &projector, seed)?
            }
            None => {
                // Mixed play: Bernoulli draw on the exact probability.
                if SplitMix64::new(seed).next_f64() < win {
                    Outcome::Win
                } else {
                    Outcome::Lose
                }
            }
        };
        writeln!(out, "seed {}", seed)?;
        writeln!(
            out,
            "sampled_outcome {}",
            match outcome {
                Outcome::Win => "win",
                Outcome::Lose => "lose",
            }
        )?;
    }
    Ok(())
}

pub fn cmd_trace(
    selector: &str,
    n: Option<usize>,
    a: Option<&str>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let selector = Selector::parse(selector)?;
    let loaded = load(&selector, n, a)?;
    let p = default_picard(&loaded.game);
    let t = evolve_pure(&loaded.game, &loaded.q, &p, loaded.a)?;
    let trace = trace_transcript(&t)?;

    let mut csv = String::from("step,label,norm,global_entanglement,is_product\n");
    for row in &trace.rows {
        csv.push_str(&format!(
            "{},{},{:.9},{:.9},{}\n",
            row.step, row.label, row.norm, row.measure, row.is_product
        ));
    }
    match out_path {
        Some(path) => {
            fs::write(path, csv).map_err(|e| CliError::io(format!("{}: {}", path.display(), e)))?
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_solve(
    selector: &str,
    n: Option<usize>,
    a: Option<&str>,
    tol: Option<f64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let selector = Selector::parse(selector)?;
    let loaded = load_for_solve(&selector, n, a)?;
    let tol = tol.unwrap_or(1e-6);
    let hidden: Option<Vec<u64>> = if loaded.game.win_condition.is_parameterized() {
        let bits = register_width(&loaded.game);
        Some((0..1u64 << bits).collect())
    } else {
        None
    };
    let matrix = enumerate_payoff_matrix(&loaded.game, hidden.as_deref())?;
    let sol = solve_zero_sum(&matrix, tol)?;

    writeln!(out, "game {}", loaded.name)?;
    writeln!(out, "rows {} cols {}", matrix.rows(), matrix.cols())?;
    writeln!(out, "value {:.12}", sol.value)?;
    let mixture_line = |labels: &[String], weights: &[f64]| {
        labels
            .iter()
            .zip(weights)
            .map(|(l, w)| format!("{}={:.12}", l, w))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(
        out,
        "row_mixture {}",
        mixture_line(matrix.row_labels(), &sol.row_mixture)
    )?;
    writeln!(
        out,
        "col_mixture {}",
        mixture_line(matrix.col_labels(), &sol.col_mixture)
    )?;
    writeln!(out, "exploitability {:e} <= {:e}", sol.exploitability, tol)?;
    Ok(())
}

/// Solve needs the game but not Q's reference strategy or a fixed a; for
/// parameterized games --a is not required here because the columns range
/// over every a.
fn load_for_solve(
    selector: &Selector,
    n: Option<usize>,
    a: Option<&str>,
) -> Result<LoadedGame, CliError> {
    match selector {
        Selector::Grover | Selector::Bv => {
            let n = n.ok_or_else(|| CliError::usage("--n is required for this game"))?;
            let inst = match selector {
                Selector::Grover => catalog::grover_game(n, 0)?,
                _ => catalog::bv_game(n, 0)?,
            };
            Ok(LoadedGame {
                name: format!("{} n={}", inst.name, n),
                game: inst.game,
                q: inst.q_reference,
                a: None,
            })
        }
        Selector::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("{}: {}", path.display(), e)))?;
            let def = GameDefinitionFile::from_json(&text)?;
            let game = def.to_game()?;
            let q = QuantumStrategy {
                moves: game.q_move_sets.iter().map(|s| s[0].clone()).collect(),
            };
            Ok(LoadedGame {
                name: def.name,
                game,
                q,
                a: None,
            })
        }
        Selector::Penny => load(selector, n, a),
    }
}

pub fn cmd_bench(
    baseline: &str,
    n: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let n = n.ok_or_else(|| CliError::usage("--n is required for bench"))?;
    match baseline {
        "classical-guess" => {
            let trials = trials.unwrap_or(10_000);
            let seed = resolve_seed(seed)?;
            let stats = classical_guess_baseline(n, trials, seed)?;
            writeln!(out, "baseline classical-guess")?;
            writeln!(out, "n {} trials {} seed {}", n, trials, seed)?;
            writeln!(out, "mean_queries {:.6}", stats.mean_queries)?;
            writeln!(out, "stddev_queries {:.6}", stats.stddev_queries)?;
            writeln!(out, "stderr_queries {:.6}", stats.standard_error())?;
            writeln!(out, "quantum_comparator {}", grover_iterations(n).max(1))?;
        }
        "classical-bv" => {
            for a in 0..1u64 << n {
                let r = classical_bv_baseline(n, a)?;
                if r.recovered != a || r.queries != n {
                    return Err(CliError::resource(format!(
                        "baseline failed to recover a = {}",
                        a
                    )));
                }
            }
            writeln!(out, "baseline classical-bv")?;
            writeln!(out, "n {}", n)?;
            writeln!(out, "queries {}", n)?;
            writeln!(out, "quantum_comparator 1")?;
        }
        _ => {
            return Err(CliError::usage(format!(
                "unknown baseline '{}' (expected classical-guess or classical-bv)",
                baseline
            )))
        }
    }
    Ok(())
}

pub fn cmd_export(
    selector: &str,
    n: Option<usize>,
    a: Option<&str>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let def = match Selector::parse(selector)? {
        Selector::Penny => gamefile::export_penny(),
        Selector::Grover | Selector::Bv => {
            let n = n.ok_or_else(|| CliError::usage("--n is required for this game"))?;
            let a_str = a.ok_or_else(|| CliError::usage("--a is required for this game"))?;
            let a = parse_number(a_str, n).map_err(|e| CliError::usage(format!("--a: {}", e)))?;
            if a >= 1u64 << n {
                return Err(CliError::usage(format!(
                    "--a {} out of range for n = {}",
                    a, n
                )));
            }
            match Selector::parse(selector)? {
                Selector::Grover => gamefile::export_grover(n, a),
                _ => gamefile::export_bv(n, a),
            }
        }
        Selector::File(_) => {
            return Err(CliError::usage(
                "export writes the built-in games; pass penny, grover or bv",
            ))
        }
    };
    let mut json = def.to_json();
    json.push('\n');
    match out_path {
        Some(path) => {
            fs::write(path, json).map_err(|e| CliError::io(format!("{}: {}", path.display(), e)))?
        }
        None => out.write_all(json.as_bytes())?,
    }
    Ok(())
}
