//! Exact 0/1 solver for `A x = lambda * 1` with nonnegative integer `A`.
//!
//! Depth-first search over columns, ordered by descending maximum entry and
//! then by index. A branch is cut when some row sum exceeds `lambda`, or when
//! the columns still undecided cannot lift a row up to `lambda`.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::incidence::KmMatrix;

/// Dense nonnegative integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for {rows}x{cols}", entries.len())));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }
}

impl From<&KmMatrix> for IntMatrix {
    fn from(m: &KmMatrix) -> Self {
        IntMatrix { rows: m.num_rows(), cols: m.num_cols(), entries: m.entries().to_vec() }
    }
}

#[derive(Clone, Debug)]
pub struct SolveRequest {
    pub matrix: IntMatrix,
    pub lambda: u64,
    pub max_solutions: usize,
    pub time_limit: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// The search space was exhausted; the solution list is complete.
    Complete,
    /// `max_solutions` solutions were found and the search stopped.
    Truncated,
    /// The time limit ran out first.
    Timeout,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Complete => "complete",
            SolveStatus::Truncated => "truncated",
            SolveStatus::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Selections as 0/1 vectors, sorted by their lists of selected columns.
    pub solutions: Vec<Vec<bool>>,
    pub status: SolveStatus,
    pub nodes: u64,
}

/// Exact residual test `A x - lambda 1 = 0`.
pub fn check(a: &IntMatrix, x: &[bool], lambda: u64) -> Result<bool> {
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch(format!("{} selectors for {} columns", x.len(), a.cols)));
    }
    Ok((0..a.rows).all(|r| (0..a.cols).filter(|&c| x[c]).map(|c| a.get(r, c)).sum::<u64>() == lambda))
}

struct Search<'a> {
    a: &'a IntMatrix,
    lambda: u64,
    order: Vec<usize>,
    /// `remaining[d * rows + r]`: row r's total over columns `order[d..]`.
    remaining: Vec<u64>,
    sums: Vec<u64>,
    chosen: Vec<bool>,
    found: Vec<Vec<bool>>,
    max_solutions: usize,
    deadline: Option<Instant>,
    nodes: u64,
    stop: Option<SolveStatus>,
}

impl Search<'_> {
    fn feasible(&self, depth: usize) -> bool {
        let rows = self.a.rows;
        let rem = &self.remaining[depth * rows..(depth + 1) * rows];
        self.sums.iter().zip(rem).all(|(&s, &r)| s <= self.lambda && s + r >= self.lambda)
    }

    fn run(&mut self, depth: usize) {
        if self.stop.is_some() {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.stop = Some(SolveStatus::Timeout);
                    return;
                }
            }
        }
        if depth == self.order.len() {
            self.found.push(self.chosen.clone());
            if self.found.len() >= self.max_solutions {
                self.stop = Some(SolveStatus::Truncated);
            }
            return;
        }
        let col = self.order[depth];
        let rows = self.a.rows;
        for r in 0..rows {
            self.sums[r] += self.a.get(r, col);
        }
        self.chosen[col] = true;
        if self.feasible(depth + 1) {
            self.run(depth + 1);
        }
        for r in 0..rows {
            self.sums[r] -= self.a.get(r, col);
        }
        self.chosen[col] = false;
        if self.stop.is_none() && self.feasible(depth + 1) {
            self.run(depth + 1);
        }
    }
}

pub fn solve(req: &SolveRequest) -> Result<SolveOutcome> {
    if req.max_solutions == 0 {
        return Err(Error::params("max_solutions must be positive"));
    }
    let a = &req.matrix;
    let (rows, cols) = (a.rows, a.cols);
    let mut order: Vec<usize> = (0..cols).collect();
    let col_max = |c: usize| (0..rows).map(|r| a.get(r, c)).max().unwrap_or(0);
    order.sort_by_key(|&c| (std::cmp::Reverse(col_max(c)), c));

    let mut remaining = vec![0u64; (cols + 1) * rows];
    for d in (0..cols).rev() {
        for r in 0..rows {
            remaining[d * rows + r] = remaining[(d + 1) * rows + r] + a.get(r, order[d]);
        }
    }
    let mut search = Search {
        a,
        lambda: req.lambda,
        order,
        remaining,
        sums: vec![0; rows],
        chosen: vec![false; cols],
        found: Vec::new(),
        max_solutions: req.max_solutions,
        deadline: req.time_limit.map(|d| Instant::now() + d),
        nodes: 0,
        stop: None,
    };
    if search.feasible(0) {
        search.run(0);
    }
    let mut solutions = search.found;
    solutions.sort_by_key(|x| x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect::<Vec<_>>());
    Ok(SolveOutcome { solutions, status: search.stop.unwrap_or(SolveStatus::Complete), nodes: search.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(rows: usize, cols: usize, e: &[u64], lambda: u64) -> SolveRequest {
        SolveRequest {
            matrix: IntMatrix::new(rows, cols, e.to_vec()).unwrap(),
            lambda,
            max_solutions: usize::MAX,
            time_limit: None,
        }
    }

    #[test]
    fn lambda_zero_gives_only_the_empty_selection() {
        let r = req(2, 3, &[1, 0, 2, 3, 1, 0], 0);
        let out = solve(&r).unwrap();
        assert_eq!(out.solutions, vec![vec![false; 3]]);
        assert_eq!(out.status, SolveStatus::Complete);
    }

    #[test]
    fn finds_all_solutions() {
        // rows: [1 1 0 2], [0 1 1 1]; lambda 2
        let r = req(2, 4, &[1, 1, 0, 2, 0, 1, 1, 1], 2);
        let out = solve(&r).unwrap();
        let as_idx: Vec<Vec<usize>> =
            out.solutions.iter().map(|x| x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()).collect();
        assert_eq!(as_idx, vec![vec![0, 1, 2], vec![2, 3]]);
        for x in &out.solutions {
            assert!(check(&r.matrix, x, 2).unwrap());
        }
    }

    #[test]
    fn infeasible_zero_row() {
        let r = req(2, 2, &[1, 1, 0, 0], 1);
        let out = solve(&r).unwrap();
        assert!(out.solutions.is_empty());
        assert_eq!(out.status, SolveStatus::Complete);
    }

    #[test]
    fn cap_truncates() {
        let r = SolveRequest { max_solutions: 2, ..req(1, 4, &[1, 1, 1, 1], 1) };
        let out = solve(&r).unwrap();
        assert_eq!(out.solutions.len(), 2);
        assert_eq!(out.status, SolveStatus::Truncated);
        assert!(solve(&SolveRequest { max_solutions: 0, ..r }).is_err());
    }

    #[test]
    fn timeout_is_reported() {
        // all-ones 1 x 40 with lambda 20 has C(40,20) solutions
        let r = SolveRequest { time_limit: Some(Duration::from_millis(0)), ..req(1, 40, &[1; 40], 20) };
        let out = solve(&r).unwrap();
        assert_eq!(out.status, SolveStatus::Timeout);
    }

    #[test]
    fn check_shapes() {
        let a = IntMatrix::new(1, 2, vec![1, 2]).unwrap();
        assert!(check(&a, &[true], 1).is_err());
        assert!(check(&a, &[false, false], 0).unwrap());
        assert!(!check(&a, &[true, true], 2).unwrap());
        assert!(IntMatrix::new(2, 2, vec![1]).is_err());
    }
}
