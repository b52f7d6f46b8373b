//! Matrix groups acting on subspaces, and their orbits.
//!
//! Groups are given by generators, except the Borel group of invertible
//! upper-triangular matrices, whose orbits on k-subspaces are exactly the
//! echelon classes and are enumerated directly.

use std::collections::{HashSet, VecDeque};

use crate::enumerate::{
    all_subspaces, class_size_u64, enum_class_members, enum_pivot_sets, guard_count, qbinom, standard_rep,
};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::linalg::{apply_unchecked, MatrixFq, Subspace};
use crate::poly::{default_primitive, is_primitive, x_pow_mod};

/// Default limit on the number of subspaces materialized at once.
pub const DEFAULT_GUARD: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Borel,
    Singer,
    SingerFrobenius,
    Matrices,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Borel => "borel",
            GroupKind::Singer => "singer",
            GroupKind::SingerFrobenius => "singer_frobenius",
            GroupKind::Matrices => "matrices",
        }
    }
}

/// A subgroup of GL(n, q).
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    field: FieldSpec,
    n: usize,
    kind: GroupKind,
    gens: Vec<MatrixFq>,
    poly: Option<Vec<Elem>>,
}

/// Companion matrix of the primitive polynomial (multiplication by a root)
/// and the Frobenius map `x -> x^q`, both in the power basis.
pub fn singer_frobenius_gens(field: &FieldSpec, n: usize, poly: Option<&[Elem]>) -> Result<(MatrixFq, MatrixFq)> {
    let poly = resolve_poly(field, n, poly)?;
    Ok(build_singer_frobenius(field, n, &poly))
}

fn resolve_poly(field: &FieldSpec, n: usize, poly: Option<&[Elem]>) -> Result<Vec<Elem>> {
    match poly {
        Some(p) => {
            if p.len() != n + 1 || !is_primitive(field, p) {
                return Err(Error::params(format!(
                    "{p:?} is not a primitive polynomial of degree {n} over GF({})",
                    field.order()
                )));
            }
            Ok(p.to_vec())
        }
        None => default_primitive(field, n),
    }
}

fn build_singer_frobenius(field: &FieldSpec, n: usize, poly: &[Elem]) -> (MatrixFq, MatrixFq) {
    let mut sigma = MatrixFq::zeros(field, n, n);
    for j in 0..n - 1 {
        sigma.set(j + 1, j, 1);
    }
    for (r, &c) in poly.iter().take(n).enumerate() {
        sigma.set(r, n - 1, field.neg(c));
    }
    let mut phi = MatrixFq::zeros(field, n, n);
    for j in 0..n {
        let image = x_pow_mod(field, j as u64 * u64::from(field.order()), poly);
        for (r, &c) in image.iter().enumerate() {
            phi.set(r, j, c);
        }
    }
    (sigma, phi)
}

impl MatrixGroup {
    pub fn borel(field: &FieldSpec, n: usize) -> Self {
        MatrixGroup { field: field.clone(), n, kind: GroupKind::Borel, gens: Vec::new(), poly: None }
    }

    pub fn trivial(field: &FieldSpec, n: usize) -> Self {
        MatrixGroup {
            field: field.clone(),
            n,
            kind: GroupKind::Matrices,
            gens: vec![MatrixFq::identity(field, n)],
            poly: None,
        }
    }

    pub fn from_matrices(field: &FieldSpec, n: usize, gens: Vec<MatrixFq>) -> Result<Self> {
        for g in &gens {
            if g.rows() != n || g.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator is {}x{}, expected {n}x{n}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.field() != field {
                return Err(Error::DimensionMismatch("generator over a different field".into()));
            }
            if !g.is_invertible() {
                return Err(Error::Singular);
            }
        }
        Ok(MatrixGroup { field: field.clone(), n, kind: GroupKind::Matrices, gens, poly: None })
    }

    pub fn singer(field: &FieldSpec, n: usize, poly: Option<&[Elem]>) -> Result<Self> {
        let poly = resolve_poly(field, n, poly)?;
        let (sigma, _) = build_singer_frobenius(field, n, &poly);
        Ok(MatrixGroup { field: field.clone(), n, kind: GroupKind::Singer, gens: vec![sigma], poly: Some(poly) })
    }

    pub fn singer_frobenius(field: &FieldSpec, n: usize, poly: Option<&[Elem]>) -> Result<Self> {
        let poly = resolve_poly(field, n, poly)?;
        let (sigma, phi) = build_singer_frobenius(field, n, &poly);
        Ok(MatrixGroup {
            field: field.clone(),
            n,
            kind: GroupKind::SingerFrobenius,
            gens: vec![sigma, phi],
            poly: Some(poly),
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn label(&self) -> &'static str {
        self.kind.name()
    }

    pub fn generators(&self) -> &[MatrixFq] {
        &self.gens
    }

    /// The primitive polynomial behind a Singer-type group.
    pub fn poly(&self) -> Option<&[Elem]> {
        self.poly.as_deref()
    }

    /// Group order where it is known in closed form.
    pub fn order(&self) -> Option<u64> {
        let qn = u64::from(self.field.order()).checked_pow(self.n as u32)? - 1;
        match self.kind {
            GroupKind::Singer => Some(qn),
            GroupKind::SingerFrobenius => qn.checked_mul(self.n as u64),
            _ => None,
        }
    }

    fn check_subspace(&self, s: &Subspace) -> Result<()> {
        if s.ambient_dim() != self.n || s.field() != &self.field {
            return Err(Error::DimensionMismatch(format!(
                "subspace of F^{} under a group on F^{}",
                s.ambient_dim(),
                self.n
            )));
        }
        Ok(())
    }
}

/// `G(s)`: the Borel orbit is the echelon class of `s`; otherwise the
/// breadth-first closure of `{s}` under the generators.
pub fn orbit(g: &MatrixGroup, s: &Subspace) -> Result<Vec<Subspace>> {
    g.check_subspace(s)?;
    if g.kind == GroupKind::Borel {
        return Ok(enum_class_members(s.pivots(), &g.field).collect());
    }
    Ok(bfs_orbit(&g.gens, s))
}

pub(crate) fn bfs_orbit(gens: &[MatrixFq], s: &Subspace) -> Vec<Subspace> {
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(s.clone());
    queue.push_back(s.clone());
    while let Some(cur) = queue.pop_front() {
        for gen in gens {
            let img = apply_unchecked(gen, &cur);
            if !seen.contains(&img) {
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
        order.push(cur);
    }
    order
}

/// An orbit with its representative and members.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub rep: Subspace,
    pub members: Vec<Subspace>,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// All orbits on k-subspaces, with members. Borel orbits come in
/// lexicographic pivot order with `E(pi)` as representative; other groups
/// list orbits in order of first discovery along the subspace enumeration,
/// represented by their lexicographically least canonical matrix.
pub fn orbits(g: &MatrixGroup, k: usize, guard: u64) -> Result<Vec<Orbit>> {
    if k > g.n {
        return Err(Error::params(format!("k = {k} exceeds n = {}", g.n)));
    }
    let total = qbinom(g.n as i64, k as i64, u64::from(g.field.order()));
    guard_count(&format!("the set of {k}-subspaces of F_{}^{}", g.field.order(), g.n), &total, guard)?;
    if g.kind == GroupKind::Borel {
        return Ok(enum_pivot_sets(g.n, k)
            .into_iter()
            .map(|pi| Orbit { rep: standard_rep(&pi, &g.field), members: enum_class_members(&pi, &g.field).collect() })
            .collect());
    }
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut out = Vec::new();
    for s in all_subspaces(&g.field, g.n, k) {
        if seen.contains(&s) {
            continue;
        }
        let members = bfs_orbit(&g.gens, &s);
        seen.extend(members.iter().cloned());
        let rep = members.iter().min().expect("orbit is nonempty").clone();
        out.push(Orbit { rep, members });
    }
    Ok(out)
}

/// Orbit representatives and orbit sizes on k-subspaces.
pub fn transversal(g: &MatrixGroup, k: usize, guard: u64) -> Result<Vec<(Subspace, u64)>> {
    if g.kind == GroupKind::Borel {
        if k > g.n {
            return Err(Error::params(format!("k = {k} exceeds n = {}", g.n)));
        }
        // No materialization needed: class sizes are known.
        let q = u64::from(g.field.order());
        return enum_pivot_sets(g.n, k)
            .into_iter()
            .map(|pi| {
                let size = class_size_u64(&pi, q).ok_or_else(|| Error::GuardExceeded {
                    what: format!("class {pi}"),
                    size: "overflow".into(),
                    limit: u64::MAX,
                })?;
                Ok((standard_rep(&pi, &g.field), size))
            })
            .collect();
    }
    Ok(orbits(g, k, guard)?.into_iter().map(|o| (o.rep, o.members.len() as u64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{class_of, PivotSet};
    use crate::field::make_field;

    #[test]
    fn singer_order_and_frobenius() {
        let f2 = make_field(2, None).unwrap();
        let (sigma, phi) = singer_frobenius_gens(&f2, 6, Some(&[1, 1, 0, 0, 0, 0, 1])).unwrap();
        let id = MatrixFq::identity(&f2, 6);
        // iterate powers until identity
        let mut cur = sigma.clone();
        let mut order = 1;
        while cur != id {
            cur = cur.mul(&sigma).unwrap();
            order += 1;
        }
        assert_eq!(order, 63);
        assert_eq!(phi.pow(6).unwrap(), id);
        assert_ne!(phi.pow(3).unwrap(), id);
        assert_ne!(phi.pow(2).unwrap(), id);
        let conj = phi.mul(&sigma).unwrap().mul(&phi.inverse().unwrap()).unwrap();
        assert_eq!(conj, sigma.pow(2).unwrap());
    }

    #[test]
    fn frobenius_normalizes_over_gf3() {
        let f3 = make_field(3, None).unwrap();
        let (sigma, phi) = singer_frobenius_gens(&f3, 3, None).unwrap();
        assert_eq!(sigma.pow(26).unwrap(), MatrixFq::identity(&f3, 3));
        assert_ne!(sigma.pow(13).unwrap(), MatrixFq::identity(&f3, 3));
        assert_eq!(phi.pow(3).unwrap(), MatrixFq::identity(&f3, 3));
        let conj = phi.mul(&sigma).unwrap().mul(&phi.inverse().unwrap()).unwrap();
        assert_eq!(conj, sigma.pow(3).unwrap());
    }

    #[test]
    fn rejects_non_primitive_poly() {
        let f2 = make_field(2, None).unwrap();
        // x^6 + 1 is reducible
        assert!(MatrixGroup::singer(&f2, 6, Some(&[1, 0, 0, 0, 0, 0, 1])).is_err());
    }

    #[test]
    fn borel_orbit_sizes() {
        let f2 = make_field(2, None).unwrap();
        let pi = PivotSet::new(6, &[2, 3, 6]).unwrap();
        let g = MatrixGroup::borel(&f2, 6);
        let orb = orbit(&g, &standard_rep(&pi, &f2)).unwrap();
        assert_eq!(orb.len(), 32);
        assert!(orb.iter().all(|s| class_of(s) == pi));
    }

    #[test]
    fn trivial_group_orbits_are_singletons() {
        let f3 = make_field(3, None).unwrap();
        let g = MatrixGroup::trivial(&f3, 4);
        let s = standard_rep(&PivotSet::new(4, &[1, 3]).unwrap(), &f3);
        assert_eq!(orbit(&g, &s).unwrap(), vec![s]);
        let tr = transversal(&g, 2, DEFAULT_GUARD).unwrap();
        assert_eq!(tr.len(), 130);
        assert!(tr.iter().all(|(_, size)| *size == 1));
    }

    #[test]
    fn transvections_act_transitively() {
        let f2 = make_field(2, None).unwrap();
        let n = 4;
        let mut gens = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut t = MatrixFq::identity(&f2, n);
                    t.set(i, j, 1);
                    gens.push(t);
                }
            }
        }
        let g = MatrixGroup::from_matrices(&f2, n, gens).unwrap();
        for k in 0..=n {
            assert_eq!(transversal(&g, k, DEFAULT_GUARD).unwrap().len(), 1);
        }
    }

    #[test]
    fn singer_orbits_on_lines_of_f2_6() {
        let f2 = make_field(2, None).unwrap();
        let g = MatrixGroup::singer(&f2, 6, None).unwrap();
        let tr = transversal(&g, 2, DEFAULT_GUARD).unwrap();
        assert_eq!(tr.iter().map(|(_, s)| s).sum::<u64>(), 651);
        let mut sizes: Vec<u64> = tr.iter().map(|(_, s)| *s).collect();
        sizes.sort_unstable();
        // ten regular orbits and the line spread from the GF(4) structure
        assert_eq!(sizes, [21, 63, 63, 63, 63, 63, 63, 63, 63, 63, 63]);
        for (rep, _) in &tr {
            let orb = orbit(&g, rep).unwrap();
            assert_eq!(orb.iter().min().unwrap(), rep);
        }
    }

    #[test]
    fn guard_rejects_large_enumerations() {
        let f2 = make_field(2, None).unwrap();
        let g = MatrixGroup::singer(&f2, 6, None).unwrap();
        assert!(matches!(transversal(&g, 3, 100), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn bad_generators() {
        let f2 = make_field(2, None).unwrap();
        assert!(matches!(MatrixGroup::from_matrices(&f2, 3, vec![MatrixFq::zeros(&f2, 3, 3)]), Err(Error::Singular)));
        assert!(MatrixGroup::from_matrices(&f2, 3, vec![MatrixFq::identity(&f2, 2)]).is_err());
    }
}
