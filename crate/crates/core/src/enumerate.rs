//! Counting and enumerating k-subspaces through their echelon classes.
//!
//! The echelon class of a subspace is the pivot set of its canonical
//! generator matrix. A class with pivots `p_1 < ... < p_k` has
//! `sum_j (p_j - j)` free cells, so it holds `q^stars` subspaces.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::linalg::Subspace;

/// A strictly increasing subset of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PivotSet {
    n: usize,
    elems: Vec<u8>,
}

impl PivotSet {
    pub fn new(n: usize, elems: &[usize]) -> Result<Self> {
        if n > u8::MAX as usize {
            return Err(Error::params(format!("ambient dimension {n} too large")));
        }
        let ok = elems.windows(2).all(|w| w[0] < w[1])
            && elems.first().is_none_or(|&e| e >= 1)
            && elems.last().is_none_or(|&e| e <= n);
        if !ok {
            return Err(Error::params(format!("{elems:?} is not a strictly increasing subset of 1..={n}")));
        }
        Ok(PivotSet { n, elems: elems.iter().map(|&e| e as u8).collect() })
    }

    pub(crate) fn from_sorted_unchecked(n: usize, elems: Vec<u8>) -> Self {
        PivotSet { n, elems }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.elems
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elems.iter().map(|&e| e as usize).collect()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.elems.iter().any(|&x| x as usize == e)
    }

    pub fn is_subset_of(&self, other: &PivotSet) -> bool {
        self.elems.iter().all(|&e| other.elems.contains(&e))
    }

    /// Number of free cells in the class's canonical matrices.
    pub fn star_count(&self) -> usize {
        self.elems.iter().enumerate().map(|(j, &p)| p as usize - 1 - j).sum()
    }
}

impl fmt::Display for PivotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elems.iter().map(u8::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Gaussian binomial coefficient; `q = 1` gives the ordinary binomial.
pub fn qbinom(n: i64, k: i64, q: u64) -> BigUint {
    if k < 0 || k > n || n < 0 {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u32;
    let n = n as u32;
    if q == 1 {
        let mut acc = BigUint::one();
        for i in 0..k {
            acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        return acc;
    }
    if q == 0 {
        return BigUint::one();
    }
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= qb.pow(n - i) - 1u32;
        den *= qb.pow(i + 1) - 1u32;
    }
    num / den
}

/// 64-bit Gaussian binomial by the Pascal-type recurrence
/// `[n,k] = [n-1,k-1] + q^k [n-1,k]`; `None` on overflow.
pub fn qbinom_u64(n: usize, k: usize, q: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let mut row = vec![0u64; k + 1];
    row[0] = 1;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            let scaled = q.checked_pow(j as u32)?.checked_mul(row[j])?;
            row[j] = row[j - 1].checked_add(scaled)?;
        }
    }
    Some(row[k])
}

/// All k-subsets of `{1..n}` in lexicographic order.
pub fn enum_pivot_sets(n: usize, k: usize) -> Vec<PivotSet> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(PivotSet::from_sorted_unchecked(n, cur.iter().map(|&e| e as u8).collect()));
        // advance to next combination
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - (k - 1 - i)) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// The subspace `E(pi)` spanned by unit vectors `e_{pi_1}, ..., e_{pi_k}`.
pub fn standard_rep(pi: &PivotSet, field: &FieldSpec) -> Subspace {
    let (n, k) = (pi.n, pi.len());
    let mut canon = vec![0; n * k];
    for (j, &p) in pi.elems.iter().enumerate() {
        canon[(p as usize - 1) * k + j] = 1;
    }
    Subspace::from_parts(field, n, k, canon, pi.elems.clone())
}

/// `q^stars`, the number of subspaces in the echelon class of `pi`.
pub fn class_size(pi: &PivotSet, q: u64) -> BigUint {
    BigUint::from(q).pow(pi.star_count() as u32)
}

pub fn class_size_u64(pi: &PivotSet, q: u64) -> Option<u64> {
    q.checked_pow(pi.star_count() as u32)
}

/// The echelon class key of `s`.
pub fn class_of(s: &Subspace) -> PivotSet {
    s.pivots().clone()
}

/// Streams the members of an echelon class.
///
/// Free cells are taken in row-major order; the counter behaves like an
/// odometer whose last cell turns fastest, starting from all zeros, so the
/// first member yielded is `E(pi)`.
pub struct ClassMembers {
    field: FieldSpec,
    template: Vec<Elem>,
    pivots: PivotSet,
    cells: Vec<usize>,
    counter: Vec<Elem>,
    done: bool,
}

impl ClassMembers {
    fn new(pi: &PivotSet, field: &FieldSpec) -> Self {
        let (n, k) = (pi.n, pi.len());
        let rep = standard_rep(pi, field);
        let piv = pi.as_slice();
        let mut cells = Vec::new();
        for r in 0..n {
            if piv.contains(&((r + 1) as u8)) {
                continue;
            }
            for (j, &p) in piv.iter().enumerate() {
                if r + 1 < p as usize {
                    cells.push(r * k + j);
                }
            }
        }
        ClassMembers {
            field: field.clone(),
            template: rep.canon_bytes().to_vec(),
            pivots: pi.clone(),
            counter: vec![0; cells.len()],
            cells,
            done: false,
        }
    }
}

impl Iterator for ClassMembers {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let mut canon = self.template.clone();
        for (&cell, &v) in self.cells.iter().zip(&self.counter) {
            canon[cell] = v;
        }
        let out = Subspace::from_parts(&self.field, self.pivots.n, self.pivots.len(), canon, self.pivots.elems.clone());
        let q = self.field.order() as Elem;
        let mut i = self.counter.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.counter[i] += 1;
            if self.counter[i] < q {
                break;
            }
            self.counter[i] = 0;
        }
        Some(out)
    }
}

pub fn enum_class_members(pi: &PivotSet, field: &FieldSpec) -> ClassMembers {
    ClassMembers::new(pi, field)
}

/// Every k-subspace of F_q^n: classes in lexicographic pivot order, members
/// in odometer order.
pub fn all_subspaces(field: &FieldSpec, n: usize, k: usize) -> impl Iterator<Item = Subspace> + '_ {
    enum_pivot_sets(n, k).into_iter().flat_map(move |pi| enum_class_members(&pi, field))
}

/// Rejects enumerations larger than `limit`.
pub fn guard_count(what: &str, count: &BigUint, limit: u64) -> Result<u64> {
    match count.to_u64() {
        Some(c) if c <= limit => Ok(c),
        _ => Err(Error::GuardExceeded { what: what.into(), size: count.to_string(), limit }),
    }
}
