//! Zero-sum matrix games: payoff matrices over win probabilities, an
//! iterative regret-matching solver with an exploitability certificate, and
//! an exact support-enumeration fallback for small matrices.
//!
//! The row player maximizes Q's win probability, the column player
//! minimizes it.  The certificate is independent of the solving method:
//! returned mixtures are re-checked so that no pure deviation gains more
//! than ε.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const CHECK_INTERVAL: usize = 1024;
const MAX_ITERATIONS: usize = 5_000_000;
const SUPPORT_ENUM_LIMIT: usize = 8;

/// Payoff matrix for the classical restriction of a PQ game.  Entries are
/// Q's win probabilities in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    payoff: Vec<Vec<f64>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl MatrixGame {
    pub fn new(
        payoff: Vec<Vec<f64>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        if payoff.is_empty() || payoff[0].is_empty() {
            return Err(Error::Domain("empty payoff matrix".into()));
        }
        let cols = payoff[0].len();
        if payoff.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged payoff matrix".into()));
        }
        if payoff.len() != row_labels.len() || cols != col_labels.len() {
            return Err(Error::Dimension("label count mismatch".into()));
        }
        if payoff
            .iter()
            .flatten()
            .any(|&v| !(-1e-9..=1.0 + 1e-9).contains(&v))
        {
            return Err(Error::Domain("payoff entries must be probabilities".into()));
        }
        Ok(MatrixGame {
            payoff,
            row_labels,
            col_labels,
        })
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.payoff[r][c]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }
}

/// An equilibrium candidate with its certificate.
#[derive(Debug, Clone)]
pub struct ZeroSumSolution {
    pub value: f64,
    pub row_mixture: Vec<f64>,
    pub col_mixture: Vec<f64>,
    pub exploitability: f64,
}

/// Best pure-deviation gain over both players; zero exactly at equilibrium.
pub fn exploitability(m: &MatrixGame, row_mixture: &[f64], col_mixture: &[f64]) -> Result<f64> {
    if row_mixture.len() != m.rows() || col_mixture.len() != m.cols() {
        return Err(Error::Dimension(
            "mixture lengths do not match the matrix".into(),
        ));
    }
    let (value, row_payoffs, col_payoffs) = evaluate(m, row_mixture, col_mixture);
    let best_row = row_payoffs
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let best_col = col_payoffs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((best_row - value).max(value - best_col))
}

fn evaluate(m: &MatrixGame, x: &[f64], y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut row_payoffs = vec![0.0; rows]; // (My)_r
    let mut col_payoffs = vec![0.0; cols]; // (xᵀM)_c
    for r in 0..rows {
        for c in 0..cols {
            row_payoffs[r] += m.payoff[r][c] * y[c];
            col_payoffs[c] += m.payoff[r][c] * x[r];
        }
    }
    let value = row_payoffs.iter().zip(x).map(|(p, w)| p * w).sum();
    (value, row_payoffs, col_payoffs)
}

/// Solve to exploitability ≤ ε via regret matching, with exact support
/// enumeration as a fallback for matrices up to 8×8.
pub fn solve_zero_sum(m: &MatrixGame, eps: f64) -> Result<ZeroSumSolution> {
    if eps <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if let Some(sol) = regret_matching(m, eps) {
        return Ok(sol);
    }
    if m.rows() <= SUPPORT_ENUM_LIMIT && m.cols() <= SUPPORT_ENUM_LIMIT {
        if let Some(sol) = support_enumeration(m, eps) {
            return Ok(sol);
        }
    }
    Err(Error::Resource(format!(
        "solver did not reach exploitability {} within {} iterations",
        eps, MAX_ITERATIONS
    )))
}

fn normalize_positive(regrets: &[f64], out: &mut [f64]) {
    let total: f64 = regrets.iter().map(|&r| r.max(0.0)).sum();
    if total <= 0.0 {
        let u = 1.0 / out.len() as f64;
        out.iter_mut().for_each(|p| *p = u);
    } else {
        for (p, &r) in out.iter_mut().zip(regrets) {
            *p = r.max(0.0) / total;
        }
    }
}

fn regret_matching(m: &MatrixGame, eps: f64) -> Option<ZeroSumSolution> {
    let rows = m.rows();
    let cols = m.cols();
    let mut reg_row = vec![0.0; rows];
    let mut reg_col = vec![0.0; cols];
    let mut avg_row = vec![0.0; rows];
    let mut avg_col = vec![0.0; cols];
    let mut x = vec![1.0 / rows as f64; rows];
    let mut y = vec![1.0 / cols as f64; cols];

    for t in 1..=MAX_ITERATIONS {
        normalize_positive(&reg_row, &mut x);
        normalize_positive(&reg_col, &mut y);
        // Linear averaging weights late iterates more heavily.
        let w = t as f64;
        for (a, &p) in avg_row.iter_mut().zip(&x) {
            *a += w * p;
        }
        for (a, &p) in avg_col.iter_mut().zip(&y) {
            *a += w * p;
        }
        let (value, row_payoffs, col_payoffs) = evaluate(m, &x, &y);
        // RM+: clip accumulated regrets at zero.
        for r in 0..rows {
            reg_row[r] = (reg_row[r] + row_payoffs[r] - value).max(0.0);
        }
        for c in 0..cols {
            reg_col[c] = (reg_col[c] + value - col_payoffs[c]).max(0.0);
        }

        if t % CHECK_INTERVAL == 0 {
            let total: f64 = avg_row.iter().sum();
            let xm: Vec<f64> = avg_row.iter().map(|a| a / total).collect();
            let total: f64 = avg_col.iter().sum();
            let ym: Vec<f64> = avg_col.iter().map(|a| a / total).collect();
            let e = exploitability(m, &xm, &ym).expect("dimensions match");
            if e <= eps {
                let (value, _, _) = evaluate(m, &xm, &ym);
                return Some(ZeroSumSolution {
                    value,
                    row_mixture: xm,
                    col_mixture: ym,
                    exploitability: e,
                });
            }
        }
    }
    None
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Solve the indifference system for one side of a square support pair.
/// Unknowns: the m support weights plus the game value.
fn solve_support(
    m: &MatrixGame,
    rows: &[usize],
    cols: &[usize],
    for_columns: bool,
) -> Option<(Vec<f64>, f64)> {
    let k = rows.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut b = nalgebra::DVector::<f64>::zeros(k + 1);
    if for_columns {
        // Column weights make every support row indifferent at value v.
        for (eq, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                a[(eq, j)] = m.payoff[r][c];
            }
            a[(eq, k)] = -1.0;
        }
    } else {
        // Row weights make every support column indifferent at value v.
        for (eq, &c) in cols.iter().enumerate() {
            for (j, &r) in rows.iter().enumerate() {
                a[(eq, j)] = m.payoff[r][c];
            }
            a[(eq, k)] = -1.0;
        }
    }
    for j in 0..k {
        a[(k, j)] = 1.0;
    }
    b[k] = 1.0;
    let solution = a.lu().solve(&b)?;
    let weights: Vec<f64> = solution.iter().take(k).cloned().collect();
    Some((weights, solution[k]))
}

fn support_enumeration(m: &MatrixGame, eps: f64) -> Option<ZeroSumSolution> {
    let tol = 1e-9;
    let rows = m.rows();
    let cols = m.cols();
    for size in 1..=rows.min(cols) {
        for row_support in subsets_of_size(rows, size) {
            for col_support in subsets_of_size(cols, size) {
                let (yw, vy) = match solve_support(m, &row_support, &col_support, true) {
                    Some(s) => s,
                    None => continue,
                };
                let (xw, vx) = match solve_support(m, &row_support, &col_support, false) {
                    Some(s) => s,
                    None => continue,
                };
                if (vx - vy).abs() > 1e-6 {
                    continue;
                }
                if yw.iter().any(|&w| w < -tol) || xw.iter().any(|&w| w < -tol) {
                    continue;
                }
                let mut x = vec![0.0; rows];
                let mut y = vec![0.0; cols];
                for (&r, &w) in row_support.iter().zip(&xw) {
                    x[r] = w.max(0.0);
                }
                for (&c, &w) in col_support.iter().zip(&yw) {
                    y[c] = w.max(0.0);
                }
                let e = exploitability(m, &x, &y).expect("dimensions match");
                if e <= eps {
                    let (value, _, _) = evaluate(m, &x, &y);
                    return Some(ZeroSumSolution {
                        value,
                        row_mixture: x,
                        col_mixture: y,
                        exploitability: e,
                    });
                }
            }
        }
    }
    None
}
