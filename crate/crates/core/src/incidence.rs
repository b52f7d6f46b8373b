//! Kramer-Mesner incidence matrices between group orbits.
//!
//! The entry for the t-orbit of `T` and the k-orbit `G(S)` counts the members
//! of `G(S)` containing `T`. Every row of a single k-block sums to
//! `[n-t, k-t]_q`.

use std::fmt::Write as _;

use crate::enumerate::{enum_class_members, enum_pivot_sets, standard_rep, PivotSet};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::group::{orbits, transversal, GroupKind, MatrixGroup};
use crate::linalg::Subspace;

/// A column of a Kramer-Mesner matrix: an orbit on k-subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmColumn {
    pub k: usize,
    pub rep: Subspace,
    pub orbit_size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmMatrix {
    /// Group label, e.g. `borel` or `singer`.
    pub group: String,
    pub n: usize,
    pub t: usize,
    pub ks: Vec<usize>,
    pub rows: Vec<Subspace>,
    pub cols: Vec<KmColumn>,
    entries: Vec<u64>,
}

impl KmMatrix {
    pub fn from_parts(
        group: &str,
        n: usize,
        t: usize,
        ks: Vec<usize>,
        rows: Vec<Subspace>,
        cols: Vec<KmColumn>,
        entries: Vec<u64>,
    ) -> Result<Self> {
        if entries.len() != rows.len() * cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows.len(),
                cols.len()
            )));
        }
        Ok(KmMatrix { group: group.into(), n, t, ks, rows, cols, entries })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols.len() + c]
    }

    pub fn row(&self, r: usize) -> &[u64] {
        let w = self.cols.len();
        &self.entries[r * w..(r + 1) * w]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.num_rows()).map(|r| self.row(r).iter().sum()).collect()
    }

    /// Row sums restricted to the columns with dimension `k`.
    pub fn block_row_sums(&self, k: usize) -> Vec<u64> {
        (0..self.num_rows())
            .map(|r| self.cols.iter().enumerate().filter(|(_, c)| c.k == k).map(|(j, _)| self.entry(r, j)).sum())
            .collect()
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> KmMatrix {
        let cols = idx.iter().map(|&j| self.cols[j].clone()).collect();
        let entries = (0..self.num_rows()).flat_map(|r| idx.iter().map(move |&j| self.entry(r, j))).collect();
        KmMatrix { cols, entries, ..self.clone_header() }
    }

    /// Reorders rows; `idx` must be a permutation of the row indices.
    pub fn permute_rows(&self, idx: &[usize]) -> KmMatrix {
        let rows = idx.iter().map(|&i| self.rows[i].clone()).collect();
        let entries = idx.iter().flat_map(|&i| self.row(i).to_vec()).collect();
        KmMatrix { rows, entries, cols: self.cols.clone(), ..self.clone_header() }
    }

    fn clone_header(&self) -> KmMatrix {
        KmMatrix {
            group: self.group.clone(),
            n: self.n,
            t: self.t,
            ks: self.ks.clone(),
            rows: self.rows.clone(),
            cols: Vec::new(),
            entries: Vec::new(),
        }
    }

    /// Index of the column whose representative is `E(pi)`.
    pub fn col_index(&self, pi: &PivotSet) -> Option<usize> {
        self.cols.iter().position(|c| is_standard(&c.rep, pi))
    }

    pub fn row_index(&self, tau: &PivotSet) -> Option<usize> {
        self.rows.iter().position(|s| is_standard(s, tau))
    }

    /// Paper-style rendering: right-aligned cells, blanks for zeros, `|`
    /// between consecutive dimension blocks, trailing spaces trimmed.
    pub fn to_text(&self) -> String {
        let width = self.entries.iter().filter(|&&e| e != 0).map(|e| e.to_string().len()).max().unwrap_or(1);
        let mut out = String::new();
        for r in 0..self.num_rows() {
            let mut line = String::new();
            for (j, col) in self.cols.iter().enumerate() {
                if j > 0 {
                    line.push_str(if self.cols[j - 1].k != col.k { " | " } else { " " });
                }
                let e = self.entry(r, j);
                if e == 0 {
                    line.push_str(&" ".repeat(width));
                } else {
                    let _ = write!(line, "{e:>width$}");
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// Labeled CSV: a header of column labels, then one row per t-orbit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in &self.cols {
            let _ = write!(out, ",k{}:{}", c.k, subspace_label(&c.rep));
        }
        out.push('\n');
        for (r, rep) in self.rows.iter().enumerate() {
            out.push_str(&subspace_label(rep));
            for e in self.row(r) {
                let _ = write!(out, ",{e}");
            }
            out.push('\n');
        }
        out
    }
}

fn is_standard(s: &Subspace, pi: &PivotSet) -> bool {
    s.pivots() == pi && *s == standard_rep(pi, s.field())
}

/// `E(1 2 6)` for unit-vector subspaces, otherwise the canonical matrix as
/// `/`-separated rows of `.`-separated entries.
pub fn subspace_label(s: &Subspace) -> String {
    if is_standard(s, s.pivots()) {
        let parts: Vec<String> = s.pivots().as_slice().iter().map(u8::to_string).collect();
        return format!("E({})", parts.join(" "));
    }
    let rows: Vec<String> =
        s.canon().to_rows().iter().map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(".")).collect();
    format!("M({})", rows.join("/"))
}

/// `A_{t,k}^G` by enumerating each column orbit once and testing every
/// member against every row representative.
pub fn km_matrix(g: &MatrixGroup, t: usize, k: usize, guard: u64) -> Result<KmMatrix> {
    if t > k || k > g.dim() {
        return Err(Error::params(format!("need t <= k <= n, got t={t} k={k} n={}", g.dim())));
    }
    let rows: Vec<Subspace> = transversal(g, t, guard)?.into_iter().map(|(s, _)| s).collect();
    let col_orbits = orbits(g, k, guard)?;
    let w = col_orbits.len();
    let mut entries = vec![0u64; rows.len() * w];
    let mut cols = Vec::with_capacity(w);
    for (j, orb) in col_orbits.into_iter().enumerate() {
        for member in &orb.members {
            for (i, rep) in rows.iter().enumerate() {
                if member.contains_unchecked(rep) {
                    entries[i * w + j] += 1;
                }
            }
        }
        cols.push(KmColumn { k, orbit_size: orb.members.len() as u64, rep: orb.rep });
    }
    KmMatrix::from_parts(g.label(), g.dim(), t, vec![k], rows, cols, entries)
}

/// Horizontal concatenation of `A_{t,k}^G` over `ks`, in the given order.
pub fn km_concat(g: &MatrixGroup, t: usize, ks: &[usize], guard: u64) -> Result<KmMatrix> {
    if ks.is_empty() {
        return Err(Error::params("empty dimension list"));
    }
    let blocks: Vec<KmMatrix> = ks.iter().map(|&k| km_matrix(g, t, k, guard)).collect::<Result<_>>()?;
    concat(blocks)
}

fn concat(blocks: Vec<KmMatrix>) -> Result<KmMatrix> {
    let first = &blocks[0];
    let rows = first.rows.clone();
    let h = rows.len();
    let mut cols = Vec::new();
    let mut ks = Vec::new();
    for b in &blocks {
        cols.extend(b.cols.iter().cloned());
        ks.extend(b.ks.iter().copied());
    }
    let mut entries = Vec::with_capacity(h * cols.len());
    for r in 0..h {
        for b in &blocks {
            entries.extend_from_slice(b.row(r));
        }
    }
    KmMatrix::from_parts(&first.group, first.n, first.t, ks, rows, cols, entries)
}

/// `A_{t,k}` for the Borel group, rows and columns indexed by pivot sets in
/// lexicographic order. Entries vanish unless `tau` is a subset of `pi`;
/// otherwise they count members of the class of `pi` containing `E(tau)`.
pub fn borel_km_matrix(field: &FieldSpec, n: usize, t: usize, k: usize) -> Result<KmMatrix> {
    if t > k || k > n {
        return Err(Error::params(format!("need t <= k <= n, got t={t} k={k} n={n}")));
    }
    let taus = enum_pivot_sets(n, t);
    let pis = enum_pivot_sets(n, k);
    let row_reps: Vec<Subspace> = taus.iter().map(|tau| standard_rep(tau, field)).collect();
    let w = pis.len();
    let mut entries = vec![0u64; taus.len() * w];
    let mut cols = Vec::with_capacity(w);
    for (j, pi) in pis.iter().enumerate() {
        let inside: Vec<usize> = (0..taus.len()).filter(|&i| taus[i].is_subset_of(pi)).collect();
        let mut size = 0;
        for member in enum_class_members(pi, field) {
            size += 1;
            for &i in &inside {
                if member.contains_unchecked(&row_reps[i]) {
                    entries[i * w + j] += 1;
                }
            }
        }
        cols.push(KmColumn { k, rep: standard_rep(pi, field), orbit_size: size });
    }
    KmMatrix::from_parts(GroupKind::Borel.name(), n, t, vec![k], row_reps, cols, entries)
}

pub fn borel_km_concat(field: &FieldSpec, n: usize, t: usize, ks: &[usize]) -> Result<KmMatrix> {
    if ks.is_empty() {
        return Err(Error::params("empty dimension list"));
    }
    concat(ks.iter().map(|&k| borel_km_matrix(field, n, t, k)).collect::<Result<_>>()?)
}

/// The `q = 1` shadow of a Borel matrix: every nonzero entry becomes 1.
pub fn q1_specialize(m: &KmMatrix) -> Result<KmMatrix> {
    if m.group != GroupKind::Borel.name() {
        return Err(Error::params(format!("q = 1 specialization needs a Borel matrix, got `{}`", m.group)));
    }
    let entries = m.entries.iter().map(|&e| u64::from(e != 0)).collect();
    Ok(KmMatrix { group: "subsets".into(), entries, ..m.clone() })
}

/// Row and column blocks of `A_{t,{t+1,t+2}}` for the Borel group.
#[derive(Clone, Debug)]
pub struct BorelBlockLayout {
    /// t-subsets of `{1..n-1}`, then t-subsets containing `n`.
    pub rows: Vec<PivotSet>,
    pub upper_rows: usize,
    /// (t+1)-subsets containing `n`.
    pub first: Vec<PivotSet>,
    /// (t+2)-subsets of `{1..n-1}`.
    pub second: Vec<PivotSet>,
    /// All remaining (t+1)- and (t+2)-subsets.
    pub rest: Vec<PivotSet>,
}

impl BorelBlockLayout {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if t == 0 || t + 2 > n {
            return Err(Error::params(format!("block layout needs 1 <= t <= n-2, got t={t} n={n}")));
        }
        let (upper, lower): (Vec<_>, Vec<_>) = enum_pivot_sets(n, t).into_iter().partition(|p| !p.contains(n));
        let upper_rows = upper.len();
        let rows = upper.into_iter().chain(lower).collect();
        let (first, rest1): (Vec<_>, Vec<_>) = enum_pivot_sets(n, t + 1).into_iter().partition(|p| p.contains(n));
        let (second, rest2): (Vec<_>, Vec<_>) = enum_pivot_sets(n, t + 2).into_iter().partition(|p| !p.contains(n));
        Ok(BorelBlockLayout { rows, upper_rows, first, second, rest: rest1.into_iter().chain(rest2).collect() })
    }

    /// The selected columns: first block then second block.
    pub fn selection(&self) -> Vec<PivotSet> {
        self.first.iter().chain(&self.second).cloned().collect()
    }

    /// Arranges `A_{t,{t+1,t+2}}^B` in this layout, keeping all columns.
    pub fn arrange(&self, m: &KmMatrix) -> Result<KmMatrix> {
        let row_idx = self.rows.iter().map(|p| m.row_index(p)).collect::<Option<Vec<_>>>();
        let cols: Vec<PivotSet> = self.selection().into_iter().chain(self.rest.iter().cloned()).collect();
        let col_idx = cols.iter().map(|p| m.col_index(p)).collect::<Option<Vec<_>>>();
        match (row_idx, col_idx) {
            (Some(r), Some(c)) => Ok(m.permute_rows(&r).select_columns(&c)),
            _ => Err(Error::params("matrix does not carry the expected Borel labels")),
        }
    }

    /// The selected submatrix: rows in layout order, first two column blocks.
    pub fn selected(&self, m: &KmMatrix) -> Result<KmMatrix> {
        let full = self.arrange(m)?;
        let w = self.first.len() + self.second.len();
        Ok(full.select_columns(&(0..w).collect::<Vec<_>>()))
    }
}
