//! Designs over F_q^n: representation, the Borel-orbit family, and
//! brute-force verification.
//!
//! A set of subspaces with dimensions in `K` is a `t-(n,K,lambda;q)` design
//! when every t-subspace lies in exactly `lambda` of them.

use std::collections::{HashMap, HashSet};
use std::thread;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::enumerate::{all_subspaces, enum_pivot_sets, guard_count, qbinom, standard_rep, PivotSet};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::group::{orbit, MatrixGroup};
use crate::incidence::{BorelBlockLayout, KmMatrix};
use crate::linalg::{canonical_form, Subspace};

/// Parameters `t-(n, K, lambda; q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignParams {
    pub t: usize,
    pub n: usize,
    pub ks: Vec<usize>,
    pub lambda: u64,
    pub q: u32,
}

impl DesignParams {
    pub fn validate(&self) -> Result<()> {
        let (Some(&lo), Some(&hi)) = (self.ks.iter().min(), self.ks.iter().max()) else {
            return Err(Error::params("empty dimension set K"));
        };
        if self.t > lo || hi > self.n {
            return Err(Error::params(format!(
                "need t <= min K and max K <= n, got t={} K={:?} n={}",
                self.t, self.ks, self.n
            )));
        }
        Ok(())
    }
}

/// A design given as a union of group orbits.
#[derive(Clone, Debug)]
pub struct OrbitSelection {
    pub group: MatrixGroup,
    pub reps: Vec<Subspace>,
}

/// An explicit simple design: distinct subspaces of F_q^n.
#[derive(Clone, Debug)]
pub struct BlockList {
    field: FieldSpec,
    n: usize,
    blocks: Vec<Subspace>,
}

impl BlockList {
    pub fn new(field: &FieldSpec, n: usize, blocks: Vec<Subspace>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(blocks.len());
        for b in &blocks {
            if b.ambient_dim() != n || b.field() != field {
                return Err(Error::DimensionMismatch(format!("block of F^{} in a design on F^{n}", b.ambient_dim())));
            }
            if !seen.insert(b) {
                return Err(Error::params("duplicate block"));
            }
        }
        Ok(BlockList { field: field.clone(), n, blocks })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Subspace] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Removes the block at `idx`.
    pub fn without(&self, idx: usize) -> BlockList {
        let mut blocks = self.blocks.clone();
        blocks.remove(idx);
        BlockList { blocks, ..self.clone() }
    }

    /// Sorted distinct block dimensions.
    pub fn dims(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.blocks.iter().map(Subspace::dim).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }
}

/// Outcome of a brute-force balance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification<T> {
    Balanced {
        lambda: u64,
    },
    /// `expected` is the most frequent count; `violations` lists up to ten
    /// t-sets whose count differs from it.
    Unbalanced {
        expected: u64,
        violations: Vec<(T, u64)>,
    },
}

impl<T> Verification<T> {
    pub fn lambda(&self) -> Option<u64> {
        match self {
            Verification::Balanced { lambda } => Some(*lambda),
            Verification::Unbalanced { .. } => None,
        }
    }

    pub fn is_balanced(&self) -> bool {
        matches!(self, Verification::Balanced { .. })
    }
}

const MAX_VIOLATIONS: usize = 10;

/// `lambda_max = sum_{k in K} [n-t, k-t]_q`, the index of the trivial design.
pub fn lambda_max(n: usize, ks: &[usize], t: usize, q: u64) -> BigUint {
    ks.iter().map(|&k| qbinom(n as i64 - t as i64, k as i64 - t as i64, q)).sum()
}

/// Row sums of the selected Borel columns: `alpha` over the rows avoiding
/// `n`, `beta` over the rows containing `n`.
pub fn alpha_beta(t: usize, n: usize, q: u64) -> Result<(BigUint, BigUint)> {
    if n < t + 2 {
        return Err(Error::params(format!("need n >= t + 2, got t={t} n={n}")));
    }
    let m = (n - t) as i64;
    let alpha = BigUint::from(q).pow((n - t - 1) as u32) + qbinom(m - 1, 2, q);
    let beta = qbinom(m, 1, q);
    Ok((alpha, beta))
}

/// The Borel-orbit family in F_q^{t+4}: `E(tau + {n})` for every t-subset
/// `tau` of `{1..n-1}` together with `E(pi)` for every (t+2)-subset `pi` of
/// `{1..n-1}`. Declared index `[4, 1]_q = q^3 + q^2 + q + 1`.
pub fn borel_family_selection(t: usize, field: &FieldSpec) -> Result<(OrbitSelection, DesignParams)> {
    if t == 0 {
        return Err(Error::params("the family needs t >= 1"));
    }
    let n = t + 4;
    let layout = BorelBlockLayout::new(n, t)?;
    let reps = layout.selection().iter().map(|pi| standard_rep(pi, field)).collect();
    let q = u64::from(field.order());
    let lambda = qbinom((n - t) as i64, 1, q).to_u64().ok_or_else(|| Error::params("lambda overflows"))?;
    let params = DesignParams { t, n, ks: vec![t + 1, t + 2], lambda, q: field.order() };
    Ok((OrbitSelection { group: MatrixGroup::borel(field, n), reps }, params))
}

/// Union of the selected orbits. Fails if two representatives share an orbit.
pub fn expand(sel: &OrbitSelection, guard: u64) -> Result<BlockList> {
    let field = sel.group.field();
    let n = sel.group.dim();
    let mut blocks = Vec::new();
    let mut seen = HashSet::new();
    for rep in &sel.reps {
        let members = orbit(&sel.group, rep)?;
        if blocks.len() + members.len() > guard as usize {
            return Err(Error::GuardExceeded {
                what: "expanded design".into(),
                size: format!(">{}", blocks.len() + members.len() - 1),
                limit: guard,
            });
        }
        for m in members {
            if !seen.insert(m.clone()) {
                return Err(Error::params("two representatives lie in the same orbit"));
            }
            blocks.push(m);
        }
    }
    BlockList::new(field, n, blocks)
}

/// Orbit selection chosen by a 0/1 vector over the columns of `km`.
pub fn selection_from_solution(km: &KmMatrix, group: &MatrixGroup, x: &[bool]) -> Result<OrbitSelection> {
    if x.len() != km.num_cols() {
        return Err(Error::DimensionMismatch(format!("{} selectors for {} columns", x.len(), km.num_cols())));
    }
    let reps = km.cols.iter().zip(x).filter(|(_, &on)| on).map(|(c, _)| c.rep.clone()).collect();
    Ok(OrbitSelection { group: group.clone(), reps })
}

/// Canonical matrices of all t-subspaces of F_q^k, row-major `k x t`.
fn local_subspaces(field: &FieldSpec, k: usize, t: usize) -> Vec<Vec<Elem>> {
    all_subspaces(field, k, t).map(|s| s.canon_bytes().to_vec()).collect()
}

fn count_shard(
    field: &FieldSpec,
    n: usize,
    t: usize,
    blocks: &[Subspace],
    locals: &HashMap<usize, Vec<Vec<Elem>>>,
) -> HashMap<Vec<Elem>, u64> {
    let mut counts: HashMap<Vec<Elem>, u64> = HashMap::new();
    let mut work = vec![0; n * t];
    for b in blocks {
        let k = b.dim();
        let canon = b.canon_bytes();
        for h in &locals[&k] {
            // column-major product block * h
            for c in 0..t {
                for r in 0..n {
                    let mut acc = 0;
                    for l in 0..k {
                        let y = h[l * t + c];
                        if y != 0 {
                            acc = field.add(acc, field.mul(canon[r * k + l], y));
                        }
                    }
                    work[c * n + r] = acc;
                }
            }
            let (key, _) = canonical_form(field, n, t, &mut work).expect("block generators are independent");
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

/// Counts, for every t-subspace, the blocks containing it, by enumerating
/// the t-subspaces of each block.
pub fn verify_design(b: &BlockList, t: usize, guard: u64) -> Result<Verification<Subspace>> {
    let field = &b.field;
    let n = b.n;
    let q = u64::from(field.order());
    let total = guard_count(&format!("the set of {t}-subspaces"), &qbinom(n as i64, t as i64, q), guard)?;
    if let Some(k) = b.blocks.iter().map(Subspace::dim).find(|&k| k < t) {
        return Err(Error::params(format!("block of dimension {k} below t = {t}")));
    }
    let locals: HashMap<usize, Vec<Vec<Elem>>> =
        b.dims().into_iter().map(|k| (k, local_subspaces(field, k, t))).collect();

    let workers = thread::available_parallelism().map_or(1, |p| p.get()).min(16);
    let chunk = b.blocks.len().div_ceil(workers).max(256);
    let counts = thread::scope(|scope| {
        let handles: Vec<_> = b
            .blocks
            .chunks(chunk)
            .map(|part| {
                let locals = &locals;
                scope.spawn(move || count_shard(field, n, t, part, locals))
            })
            .collect();
        let mut merged: HashMap<Vec<Elem>, u64> = HashMap::new();
        for h in handles {
            for (key, c) in h.join().expect("verification worker panicked") {
                *merged.entry(key).or_insert(0) += c;
            }
        }
        merged
    });

    let missing = total - counts.len() as u64;
    let values: Vec<u64> = counts.values().copied().collect();
    if missing == 0 {
        if let Some(&first) = values.first() {
            if values.iter().all(|&v| v == first) {
                return Ok(Verification::Balanced { lambda: first });
            }
        }
    } else if values.is_empty() {
        return Ok(Verification::Balanced { lambda: 0 });
    }

    // Reference value: most frequent count, zero included.
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for &v in &values {
        *freq.entry(v).or_insert(0) += 1;
    }
    if missing > 0 {
        *freq.entry(0).or_insert(0) += missing;
    }
    let expected = freq.iter().max_by_key(|(v, c)| (**c, std::cmp::Reverse(**v))).map(|(v, _)| *v).unwrap_or(0);
    let mut violations = Vec::new();
    for s in all_subspaces(field, n, t) {
        let c = counts.get(s.canon_bytes()).copied().unwrap_or(0);
        if c != expected {
            violations.push((s, c));
            if violations.len() == MAX_VIOLATIONS {
                break;
            }
        }
    }
    Ok(Verification::Unbalanced { expected, violations })
}

/// Every subspace of F_q^n with dimension in `ks`.
pub fn trivial_design(field: &FieldSpec, n: usize, ks: &[usize], guard: u64) -> Result<BlockList> {
    let q = u64::from(field.order());
    let total: BigUint = ks.iter().map(|&k| qbinom(n as i64, k as i64, q)).sum();
    guard_count("trivial design", &total, guard)?;
    let blocks = ks.iter().flat_map(|&k| all_subspaces(field, n, k)).collect();
    BlockList::new(field, n, blocks)
}

/// True iff no block occurs in two of the designs.
pub fn are_disjoint(designs: &[BlockList]) -> bool {
    let mut seen: HashSet<&Subspace> = HashSet::new();
    designs.iter().all(|d| d.blocks.iter().all(|b| seen.insert(b)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargeSetReport {
    pub disjoint: bool,
    /// Whether the union is every subspace with dimension in `ks`.
    pub covers_all: bool,
}

/// Disjointness plus a check that the union is the trivial design on `ks`.
pub fn large_set_report(designs: &[BlockList], ks: &[usize], guard: u64) -> Result<LargeSetReport> {
    let disjoint = are_disjoint(designs);
    let Some(first) = designs.first() else {
        return Ok(LargeSetReport { disjoint, covers_all: false });
    };
    let q = u64::from(first.field.order());
    let total: BigUint = ks.iter().map(|&k| qbinom(first.n as i64, k as i64, q)).sum();
    guard_count("union of designs", &total, guard)?;
    let union: HashSet<&Subspace> = designs.iter().flat_map(|d| d.blocks.iter()).collect();
    let covers_all = union.iter().all(|b| ks.contains(&b.dim())) && BigUint::from(union.len()) == total;
    Ok(LargeSetReport { disjoint, covers_all })
}

/// A design on the point set `{1..n}` (the `q = 1` shadow).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetDesign {
    pub n: usize,
    pub blocks: Vec<PivotSet>,
}

/// Blocks: (t+1)-subsets containing `t+4`, and (t+2)-subsets of `{1..t+3}`.
pub fn q1_family(t: usize) -> Result<(SetDesign, u64)> {
    if t == 0 {
        return Err(Error::params("the family needs t >= 1"));
    }
    let layout = BorelBlockLayout::new(t + 4, t)?;
    let design = SetDesign { n: t + 4, blocks: layout.selection() };
    match verify_set_design(&design, t)? {
        Verification::Balanced { lambda: 4 } => Ok((design, 4)),
        other => Err(Error::params(format!("set family failed its own check: {other:?}"))),
    }
}

pub fn verify_set_design(d: &SetDesign, t: usize) -> Result<Verification<PivotSet>> {
    let tsets = enum_pivot_sets(d.n, t);
    if tsets.is_empty() {
        return Err(Error::params(format!("t = {t} exceeds n = {}", d.n)));
    }
    let counts: Vec<u64> =
        tsets.iter().map(|ts| d.blocks.iter().filter(|b| ts.is_subset_of(b)).count() as u64).collect();
    if counts.iter().all(|&c| c == counts[0]) {
        return Ok(Verification::Balanced { lambda: counts[0] });
    }
    let mut freq: HashMap<u64, u64> = HashMap::new();
    for &c in &counts {
        *freq.entry(c).or_insert(0) += 1;
    }
    let expected = freq.iter().max_by_key(|(v, c)| (**c, std::cmp::Reverse(**v))).map(|(v, _)| *v).unwrap_or(0);
    let violations = tsets.into_iter().zip(counts).filter(|(_, c)| *c != expected).take(MAX_VIOLATIONS).collect();
    Ok(Verification::Unbalanced { expected, violations })
}

/// Sum of orbit sizes of the selection, without expanding it.
pub fn selection_size(sel: &OrbitSelection) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for rep in &sel.reps {
        total += BigUint::from(orbit(&sel.group, rep)?.len());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{class_of, class_size};
    use crate::field::make_field;
    use crate::group::DEFAULT_GUARD;

    fn ps(n: usize, e: &[usize]) -> PivotSet {
        PivotSet::new(n, e).unwrap()
    }

    #[test]
    fn lambda_max_values() {
        assert_eq!(lambda_max(6, &[3, 4], 2, 2), BigUint::from(50u32));
        assert_eq!(lambda_max(7, &[3, 4], 2, 2), BigUint::from(186u32));
        assert_eq!(lambda_max(8, &[4, 5, 6], 3, 2), BigUint::from(341u32));
        assert_eq!(lambda_max(9, &[5], 5, 7), BigUint::from(1u32));
    }

    #[test]
    fn alpha_beta_values() {
        let (a, b) = alpha_beta(2, 6, 2).unwrap();
        assert_eq!((a, b), (BigUint::from(15u32), BigUint::from(15u32)));
        // 2^2 + [2,2]_2 = 5 against [3,1]_2 = 7
        let (a, b) = alpha_beta(1, 4, 2).unwrap();
        assert_eq!((a.clone(), b.clone()), (BigUint::from(5u32), BigUint::from(7u32)));
        assert_ne!(a, b);
        let (a, b) = alpha_beta(3, 7, 3).unwrap();
        assert_eq!((a, b), (BigUint::from(40u32), BigUint::from(40u32)));
        assert!(alpha_beta(3, 4, 2).is_err());
    }

    #[test]
    fn alpha_equals_beta_exactly_at_t_plus_4() {
        for q in 1..=7u64 {
            for t in 0..6 {
                for n in t + 2..t + 12 {
                    let (a, b) = alpha_beta(t, n, q).unwrap();
                    assert_eq!(a == b, n == t + 4, "q={q} t={t} n={n}");
                }
            }
        }
    }

    #[test]
    fn family_selection_t2_q2() {
        let f2 = make_field(2, None).unwrap();
        let (sel, params) = borel_family_selection(2, &f2).unwrap();
        let names: Vec<String> = sel.reps.iter().map(|s| class_of(s).to_string()).collect();
        assert_eq!(
            names,
            [
                "{1,2,6}",
                "{1,3,6}",
                "{1,4,6}",
                "{1,5,6}",
                "{2,3,6}",
                "{2,4,6}",
                "{2,5,6}",
                "{3,4,6}",
                "{3,5,6}",
                "{4,5,6}",
                "{1,2,3,4}",
                "{1,2,3,5}",
                "{1,2,4,5}",
                "{1,3,4,5}",
                "{2,3,4,5}"
            ]
        );
        assert_eq!(params, DesignParams { t: 2, n: 6, ks: vec![3, 4], lambda: 15, q: 2 });

        let blocks = expand(&sel, DEFAULT_GUARD).unwrap();
        let expect: BigUint = sel.reps.iter().map(|s| class_size(s.pivots(), 2)).sum();
        assert_eq!(BigUint::from(blocks.len()), expect);
        // round trip: classes of the blocks are the selected pivot sets
        let classes: HashSet<PivotSet> = blocks.blocks().iter().map(class_of).collect();
        let selected: HashSet<PivotSet> = sel.reps.iter().map(class_of).collect();
        assert_eq!(classes, selected);
        assert_eq!(verify_design(&blocks, 2, DEFAULT_GUARD).unwrap(), Verification::Balanced { lambda: 15 });
    }

    #[test]
    fn family_lambda_at_q3() {
        let f3 = make_field(3, None).unwrap();
        let (_, params) = borel_family_selection(2, &f3).unwrap();
        assert_eq!(params.lambda, 40);
    }

    #[test]
    fn single_trivial_rep_expands_to_one_block() {
        let f3 = make_field(3, None).unwrap();
        let sel = OrbitSelection { group: MatrixGroup::borel(&f3, 5), reps: vec![standard_rep(&ps(5, &[1, 2]), &f3)] };
        assert_eq!(expand(&sel, DEFAULT_GUARD).unwrap().len(), 1);
        let dup = OrbitSelection { reps: vec![sel.reps[0].clone(), sel.reps[0].clone()], ..sel };
        assert!(expand(&dup, DEFAULT_GUARD).is_err());
    }

    #[test]
    fn trivial_design_index() {
        let f2 = make_field(2, None).unwrap();
        let d = trivial_design(&f2, 6, &[3, 4], DEFAULT_GUARD).unwrap();
        assert_eq!(verify_design(&d, 2, DEFAULT_GUARD).unwrap(), Verification::Balanced { lambda: 50 });
    }

    #[test]
    fn removing_a_block_breaks_balance() {
        let f2 = make_field(2, None).unwrap();
        let (sel, _) = borel_family_selection(1, &f2).unwrap();
        let d = expand(&sel, DEFAULT_GUARD).unwrap().without(0);
        match verify_design(&d, 1, DEFAULT_GUARD).unwrap() {
            Verification::Unbalanced { expected, violations } => {
                assert_eq!(expected, 15);
                assert!(!violations.is_empty());
                assert!(violations.iter().all(|(_, c)| *c == 14));
            }
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn empty_design_is_balanced_with_zero() {
        let f2 = make_field(2, None).unwrap();
        let d = BlockList::new(&f2, 4, Vec::new()).unwrap();
        assert_eq!(verify_design(&d, 1, DEFAULT_GUARD).unwrap(), Verification::Balanced { lambda: 0 });
    }

    #[test]
    fn block_list_rejects_duplicates() {
        let f2 = make_field(2, None).unwrap();
        let b = standard_rep(&ps(4, &[1, 2]), &f2);
        assert!(BlockList::new(&f2, 4, vec![b.clone(), b]).is_err());
    }

    #[test]
    fn set_family_examples() {
        let (d, lambda) = q1_family(1).unwrap();
        let blocks: Vec<String> = d.blocks.iter().map(ToString::to_string).collect();
        assert_eq!(blocks, ["{1,5}", "{2,5}", "{3,5}", "{4,5}", "{1,2,3}", "{1,2,4}", "{1,3,4}", "{2,3,4}"]);
        assert_eq!(lambda, 4);
        let (d2, _) = q1_family(2).unwrap();
        assert_eq!(d2.blocks.len(), 15);
        let (d6, _) = q1_family(6).unwrap();
        assert_eq!(enum_pivot_sets(10, 6).len(), 210);
        assert_eq!(verify_set_design(&d6, 6).unwrap(), Verification::Balanced { lambda: 4 });
    }

    #[test]
    fn disjointness() {
        let f2 = make_field(2, None).unwrap();
        let (sel, _) = borel_family_selection(2, &f2).unwrap();
        let d = expand(&sel, DEFAULT_GUARD).unwrap();
        assert!(!are_disjoint(&[d.clone(), d.clone()]));

        let all = trivial_design(&f2, 6, &[3, 4], DEFAULT_GUARD).unwrap();
        let inside: HashSet<&Subspace> = d.blocks().iter().collect();
        let rest: Vec<Subspace> = all.blocks().iter().filter(|b| !inside.contains(b)).cloned().collect();
        let complement = BlockList::new(&f2, 6, rest).unwrap();
        assert!(are_disjoint(&[d.clone(), complement.clone()]));
        let report = large_set_report(&[d.clone(), complement.clone()], &[3, 4], DEFAULT_GUARD).unwrap();
        assert_eq!(report, LargeSetReport { disjoint: true, covers_all: true });
        assert_eq!(verify_design(&complement, 2, DEFAULT_GUARD).unwrap(), Verification::Balanced { lambda: 35 });

        let half = large_set_report(&[d], &[3, 4], DEFAULT_GUARD).unwrap();
        assert!(!half.covers_all);
    }

    #[test]
    fn params_validation() {
        assert!(DesignParams { t: 2, n: 6, ks: vec![3, 4], lambda: 15, q: 2 }.validate().is_ok());
        assert!(DesignParams { t: 4, n: 6, ks: vec![3, 4], lambda: 15, q: 2 }.validate().is_err());
        assert!(DesignParams { t: 2, n: 6, ks: vec![3, 7], lambda: 15, q: 2 }.validate().is_err());
        assert!(DesignParams { t: 2, n: 6, ks: vec![], lambda: 15, q: 2 }.validate().is_err());
    }
}
