//! Matrices and subspaces over GF(q).
//!
//! Subspaces are column spaces. Each one is stored through its canonical
//! generator matrix: an `n x k` matrix with pivot rows `p_1 < ... < p_k`
//! where column `j` has a 1 in row `p_j`, zeros below it, and zeros in every
//! other pivot row. Rows above `p_j` that are not pivots are free.
//!
//! Matrix entry access is 0-based; pivot rows are reported 1-based.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use crate::enumerate::PivotSet;
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFq {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl MatrixFq {
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, entries: Vec<Elem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if let Some(&e) = entries.iter().find(|&&e| !field.contains(u32::from(e))) {
            return Err(Error::InvalidElement { value: u32::from(e), q: field.order() });
        }
        Ok(MatrixFq { field: field.clone(), rows, cols, entries })
    }

    /// Builds a matrix from row lists of element indices.
    pub fn from_rows(field: &FieldSpec, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for &v in row {
                entries.push(field.element(v)?);
            }
        }
        Self::new(field, rows.len(), cols, entries)
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        MatrixFq { field: field.clone(), rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|r| r.iter().map(|&e| u32::from(e)).collect())
            .collect()
    }

    pub fn mul(&self, rhs: &MatrixFq) -> Result<MatrixFq> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![0; self.rows * rhs.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out[idx] = f.add(out[idx], f.mul(a, rhs.get(l, j)));
                }
            }
        }
        Ok(MatrixFq { field: f.clone(), rows: self.rows, cols: rhs.cols, entries: out })
    }

    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            let Some(pr) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            for j in 0..cols {
                m.swap(pr * cols + j, rank * cols + j);
            }
            let inv = f.inv_nonzero(m[rank * cols + c]);
            for j in 0..cols {
                m[rank * cols + j] = f.mul(m[rank * cols + j], inv);
            }
            for r in 0..rows {
                let factor = m[r * cols + c];
                if r != rank && factor != 0 {
                    for j in 0..cols {
                        let v = f.mul(factor, m[rank * cols + j]);
                        m[r * cols + j] = f.sub(m[r * cols + j], v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Inverse by Gauss-Jordan elimination on `[A | I]`.
    pub fn inverse(&self) -> Result<MatrixFq> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let w = 2 * n;
        let mut m = vec![0; n * w];
        for r in 0..n {
            for c in 0..n {
                m[r * w + c] = self.get(r, c);
            }
            m[r * w + n + r] = 1;
        }
        for c in 0..n {
            let pr = (c..n).find(|&r| m[r * w + c] != 0).ok_or(Error::Singular)?;
            for j in 0..w {
                m.swap(pr * w + j, c * w + j);
            }
            let inv = f.inv_nonzero(m[c * w + c]);
            for j in 0..w {
                m[c * w + j] = f.mul(m[c * w + j], inv);
            }
            for r in 0..n {
                let factor = m[r * w + c];
                if r != c && factor != 0 {
                    for j in 0..w {
                        let v = f.mul(factor, m[c * w + j]);
                        m[r * w + j] = f.sub(m[r * w + j], v);
                    }
                }
            }
        }
        let entries = (0..n).flat_map(|r| m[r * w + n..r * w + w].to_vec()).collect();
        Ok(MatrixFq { field: f.clone(), rows: n, cols: n, entries })
    }

    pub fn pow(&self, mut e: u64) -> Result<MatrixFq> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = MatrixFq::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Plain-text form: a `rows cols` header line followed by one line per
    /// row of space-separated element indices.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(field: &FieldSpec, text: &str) -> Result<MatrixFq> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("header must be `rows cols`, got {header:?}")));
        };
        let mut data = Vec::with_capacity(rows);
        for line in lines {
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad entry {t:?}"))))
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(Error::Parse(format!("expected {cols} entries per row, got {}", row.len())));
            }
            data.push(row);
        }
        if data.len() != rows {
            return Err(Error::Parse(format!("expected {rows} rows, got {}", data.len())));
        }
        if rows == 0 || cols == 0 {
            return Ok(MatrixFq::zeros(field, rows, cols));
        }
        MatrixFq::from_rows(field, &data)
    }
}

/// True iff `alpha` is upper triangular with nonzero diagonal.
pub fn is_borel(alpha: &MatrixFq) -> bool {
    if !alpha.is_square() {
        return false;
    }
    let n = alpha.rows();
    (0..n).all(|r| alpha.get(r, r) != 0 && (0..r).all(|c| alpha.get(r, c) == 0))
}

/// A k-subspace of F_q^n held in canonical form.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: FieldSpec,
    n: usize,
    k: usize,
    canon: Vec<Elem>,
    pivots: PivotSet,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.canon == other.canon
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.k.hash(state);
        self.canon.hash(state);
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by `(n, k)` then by the row-major canonical bytes.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.k, &self.canon).cmp(&(other.n, other.k, &other.canon))
    }
}

/// Reduces the column-major `n x k` buffer `work` in place and returns the
/// canonical row-major matrix and 1-based pivots, or the rank reached.
pub(crate) fn canonical_form(
    f: &FieldSpec,
    n: usize,
    k: usize,
    work: &mut [Elem],
) -> std::result::Result<(Vec<Elem>, Vec<u8>), usize> {
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(k); // (pivot row, column)
    let mut used = vec![false; k];
    for step in 0..k {
        let mut best: Option<(usize, usize)> = None;
        for c in (0..k).filter(|&c| !used[c]) {
            let col = &work[c * n..(c + 1) * n];
            if let Some(r) = col.iter().rposition(|&e| e != 0) {
                if best.is_none_or(|(br, _)| r > br) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else {
            return Err(step);
        };
        used[pc] = true;
        let inv = f.inv_nonzero(work[pc * n + pr]);
        if inv != 1 {
            for r in 0..=pr {
                work[pc * n + r] = f.mul(work[pc * n + r], inv);
            }
        }
        for c in (0..k).filter(|&c| c != pc) {
            let factor = work[c * n + pr];
            if factor == 0 {
                continue;
            }
            for r in 0..=pr {
                let v = f.mul(factor, work[pc * n + r]);
                work[c * n + r] = f.sub(work[c * n + r], v);
            }
        }
        chosen.push((pr, pc));
    }
    chosen.reverse(); // pivots were found in decreasing order
    let mut canon = vec![0; n * k];
    for (j, &(_, c)) in chosen.iter().enumerate() {
        for r in 0..n {
            canon[r * k + j] = work[c * n + r];
        }
    }
    let pivots = chosen.iter().map(|&(r, _)| (r + 1) as u8).collect();
    Ok((canon, pivots))
}

/// Computes the subspace spanned by the columns of `g`.
pub fn canonicalize(g: &MatrixFq) -> Result<Subspace> {
    let (n, k) = (g.rows(), g.cols());
    let mut work = vec![0; n * k];
    for r in 0..n {
        for c in 0..k {
            work[c * n + r] = g.get(r, c);
        }
    }
    match canonical_form(g.field(), n, k, &mut work) {
        Ok((canon, pivots)) => Ok(Subspace::from_parts(g.field(), n, k, canon, pivots)),
        Err(rank) => Err(Error::RankDeficient { rank, expected: k }),
    }
}

/// `alpha * s`, re-canonicalized.
pub fn apply(alpha: &MatrixFq, s: &Subspace) -> Result<Subspace> {
    if !alpha.is_square() || alpha.rows() != s.n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix acting on F_q^{}",
            alpha.rows(),
            alpha.cols(),
            s.n
        )));
    }
    if !alpha.is_invertible() {
        return Err(Error::Singular);
    }
    Ok(apply_unchecked(alpha, s))
}

/// `apply` without the invertibility check; `alpha` must be invertible.
pub(crate) fn apply_unchecked(alpha: &MatrixFq, s: &Subspace) -> Subspace {
    let f = &s.field;
    let (n, k) = (s.n, s.k);
    let mut work = vec![0; n * k];
    for c in 0..k {
        for r in 0..n {
            let mut acc = 0;
            for l in 0..n {
                let b = s.canon[l * k + c];
                if b != 0 {
                    acc = f.add(acc, f.mul(alpha.get(r, l), b));
                }
            }
            work[c * n + r] = acc;
        }
    }
    let (canon, pivots) = canonical_form(f, n, k, &mut work).expect("invertible matrix preserves rank");
    Subspace::from_parts(f, n, k, canon, pivots)
}

/// True iff every generator of `t` lies in `s`.
pub fn contains(t: &Subspace, s: &Subspace) -> Result<bool> {
    if t.n != s.n || t.field != s.field {
        return Err(Error::DimensionMismatch("subspaces live in different ambient spaces".into()));
    }
    Ok(s.contains_unchecked(t))
}

impl Subspace {
    pub(crate) fn from_parts(f: &FieldSpec, n: usize, k: usize, canon: Vec<Elem>, pivots: Vec<u8>) -> Self {
        Subspace { field: f.clone(), n, k, canon, pivots: PivotSet::from_sorted_unchecked(n, pivots) }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    /// Row-major canonical generator matrix entries.
    pub fn canon_bytes(&self) -> &[Elem] {
        &self.canon
    }

    pub fn canon(&self) -> MatrixFq {
        MatrixFq { field: self.field.clone(), rows: self.n, cols: self.k, entries: self.canon.clone() }
    }

    pub fn pivots(&self) -> &PivotSet {
        &self.pivots
    }

    #[inline]
    pub(crate) fn entry(&self, r: usize, c: usize) -> Elem {
        self.canon[r * self.k + c]
    }

    /// Whether `v` (length n) lies in the span: with canonical columns, the
    /// only candidate combination uses the coefficients `v[p_j]`.
    pub fn contains_vector(&self, v: &[Elem]) -> bool {
        let f = &self.field;
        let piv = self.pivots.as_slice();
        (0..self.n).all(|r| {
            let mut acc = 0;
            for (j, &p) in piv.iter().enumerate() {
                let coeff = v[p as usize - 1];
                if coeff != 0 {
                    acc = f.add(acc, f.mul(coeff, self.entry(r, j)));
                }
            }
            acc == v[r]
        })
    }

    pub(crate) fn contains_unchecked(&self, t: &Subspace) -> bool {
        if t.k > self.k {
            return false;
        }
        let mut col = vec![0; t.n];
        (0..t.k).all(|c| {
            for (r, slot) in col.iter_mut().enumerate() {
                *slot = t.entry(r, c);
            }
            self.contains_vector(&col)
        })
    }
}
