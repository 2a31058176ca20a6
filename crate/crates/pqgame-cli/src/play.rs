//! Interactive text-mode play: the human is Picard, the program plays Q's
//! reference strategy and reports the exact win probability plus a seeded
//! measured outcome.  Transcripts echo every input and the seed, so a
//! scripted replay is byte-identical.

use std::io::{BufRead, Write};

use pqgame::catalog::{bv_game, grover_game, penny_flip};
use pqgame::engine::{evolve_pure, ClassicalPureStrategy, GameTranscript};
use pqgame::qstate::{sample_outcome, Outcome, StateVector};

use crate::commands::Selector;
use crate::error::CliError;
use crate::gamefile::parse_number;

fn prompt(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    write!(out, "{}", text)?;
    out.flush()?;
    Ok(())
}

fn read_line(input: &mut dyn BufRead) -> Result<Option<String>, CliError> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_string()))
}

fn report_outcome(
    out: &mut dyn Write,
    t: &GameTranscript,
    projector: &pqgame::qstate::Projector,
    seed: u64,
) -> Result<(), CliError> {
    writeln!(out, "win_probability {:.12}", t.win_probability)?;
    let outcome = sample_outcome(t.final_state(), projector, seed)?;
    writeln!(
        out,
        "outcome: Q {}",
        match outcome {
            Outcome::Win => "wins",
            Outcome::Lose => "loses",
        }
    )?;
    Ok(())
}

/// Most likely first-register value of an oracle-game final state.
fn announced_register(state: &StateVector) -> u64 {
    let mut best = 0usize;
    let mut best_mass = -1.0;
    for (x, pair) in state.amplitudes().chunks(2).enumerate() {
        let mass: f64 = pair.iter().map(|c| c.norm_sqr()).sum();
        if mass > best_mass {
            best_mass = mass;
            best = x;
        }
    }
    best as u64
}

pub fn cmd_play(
    selector: &str,
    n: Option<usize>,
    seed: u64,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match Selector::parse(selector)? {
        Selector::Penny => play_penny(seed, input, out),
        Selector::Bv => play_oracle(false, n.unwrap_or(3), seed, input, out),
        Selector::Grover => play_oracle(true, n.unwrap_or(3), seed, input, out),
        Selector::File(_) => Err(CliError::usage(
            "interactive play supports penny, bv and grover",
        )),
    }
}

fn play_penny(seed: u64, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = penny_flip();
    writeln!(
        out,
        "penny: you are Picard; the penny starts heads up and Q moves first and last."
    )?;
    writeln!(out, "seed {}", seed)?;
    let mut round = 0u64;
    loop {
        prompt(out, "your move (flip/stay): ")?;
        let line = match read_line(input)? {
            Some(l) => l,
            None => break,
        };
        writeln!(out, "picard: {}", line)?;
        let choice = match line.as_str() {
            "stay" => 0,
            "flip" => 1,
            _ => {
                writeln!(out, "invalid input '{}': expected flip or stay", line)?;
                continue;
            }
        };
        let p = ClassicalPureStrategy {
            moves: vec![inst.game.p_move_sets[0][choice].clone()],
        };
        let t = evolve_pure(&inst.game, &inst.q_reference, &p, None)?;
        let projector = inst.game.win_condition.projector(2, None)?;
        report_outcome(out, &t, &projector, seed.wrapping_add(round))?;
        round += 1;
    }
    writeln!(out, "session ended")?;
    Ok(())
}

fn play_oracle(
    grover: bool,
    n: usize,
    seed: u64,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let name = if grover { "grover" } else { "bv" };
    writeln!(
        out,
        "{} n={}: pick a secret number; Q queries your oracle and then guesses.",
        name, n
    )?;
    writeln!(out, "seed {}", seed)?;
    let mut round = 0u64;
    loop {
        prompt(out, &format!("secret a (integer or {}-bit string): ", n))?;
        let line = match read_line(input)? {
            Some(l) => l,
            None => break,
        };
        writeln!(out, "picard: {}", line)?;
        let a = match parse_number(&line, n) {
            Ok(a) if a < 1u64 << n => a,
            _ => {
                writeln!(
                    out,
                    "invalid input '{}': expected a number below {}",
                    line,
                    1u64 << n
                )?;
                continue;
            }
        };
        let inst = if grover {
            grover_game(n, a)?
        } else {
            bv_game(n, a)?
        };
        let p = ClassicalPureStrategy {
            moves: inst.game.p_move_sets.iter().map(|s| s[0].clone()).collect(),
        };
        let t = evolve_pure(&inst.game, &inst.q_reference, &p, inst.a)?;
        let announced = announced_register(t.final_state());
        writeln!(
            out,
            "Q announces a = {:0width$b} ({}) after {} quer{}",
            announced,
            announced,
            t.oracle_calls,
            if t.oracle_calls == 1 { "y" } else { "ies" },
            width = n
        )?;
        let projector = inst
            .game
            .win_condition
            .projector(inst.game.dimension, inst.a)?;
        report_outcome(out, &t, &projector, seed.wrapping_add(round))?;
        round += 1;
    }
    writeln!(out, "session ended")?;
    Ok(())
}
