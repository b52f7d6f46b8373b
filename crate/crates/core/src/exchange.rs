//! JSON exchange formats: group descriptors, design files, Kramer-Mesner
//! matrix files and solver requests/responses.
//!
//! Subspaces are written either as `{"pivots": [..]}` (the unit-vector
//! subspace `E(pi)`, 1-based) or as `{"matrix": [[..], ..]}`, an `n x k`
//! generator matrix of element indices, one inner list per row.

use serde::{Deserialize, Serialize};

use crate::design::{expand, BlockList, DesignParams, OrbitSelection, SetDesign};
use crate::enumerate::{standard_rep, PivotSet};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec, ModulusOverrides};
use crate::group::{GroupKind, MatrixGroup};
use crate::incidence::{subspace_label, KmColumn, KmMatrix};
use crate::linalg::{canonicalize, MatrixFq, Subspace};
use crate::solver::{SolveOutcome, SolveRequest};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    /// `borel`, `singer`, `singer_frobenius`, `matrices` or `trivial`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<u32>>>>,
    /// Primitive polynomial `c_0 .. c_n` for Singer-type groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<u32>>,
}

impl GroupDescriptor {
    pub fn of_kind(kind: &str) -> Self {
        GroupDescriptor { kind: kind.into(), matrices: None, poly: None }
    }

    pub fn build(&self, field: &FieldSpec, n: usize) -> Result<MatrixGroup> {
        let poly = self.poly.as_ref().map(|p| elems(field, p)).transpose()?;
        match self.kind.as_str() {
            "borel" => Ok(MatrixGroup::borel(field, n)),
            "trivial" => Ok(MatrixGroup::trivial(field, n)),
            "singer" => MatrixGroup::singer(field, n, poly.as_deref()),
            "singer_frobenius" => MatrixGroup::singer_frobenius(field, n, poly.as_deref()),
            "matrices" => {
                let mats = self
                    .matrices
                    .as_ref()
                    .ok_or_else(|| Error::params("group kind `matrices` needs a `matrices` list"))?;
                let gens = mats.iter().map(|m| MatrixFq::from_rows(field, m)).collect::<Result<Vec<_>>>()?;
                MatrixGroup::from_matrices(field, n, gens)
            }
            other => Err(Error::params(format!("unknown group kind `{other}`"))),
        }
    }

    /// Describes `g` so that [`GroupDescriptor::build`] reproduces it.
    pub fn describe(g: &MatrixGroup) -> Self {
        let matrices =
            (g.kind() == GroupKind::Matrices).then(|| g.generators().iter().map(MatrixFq::to_rows).collect());
        GroupDescriptor {
            kind: g.label().into(),
            matrices,
            poly: g.poly().map(|p| p.iter().map(|&c| u32::from(c)).collect()),
        }
    }
}

fn elems(field: &FieldSpec, v: &[u32]) -> Result<Vec<Elem>> {
    v.iter().map(|&c| field.element(c)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubspaceJson {
    Pivots { pivots: Vec<usize> },
    Matrix { matrix: Vec<Vec<u32>> },
}

impl SubspaceJson {
    pub fn from_subspace(s: &Subspace) -> Self {
        if *s == standard_rep(s.pivots(), s.field()) {
            SubspaceJson::Pivots { pivots: s.pivots().to_vec() }
        } else {
            SubspaceJson::Matrix { matrix: s.canon().to_rows() }
        }
    }

    pub fn to_subspace(&self, field: &FieldSpec, n: usize) -> Result<Subspace> {
        match self {
            SubspaceJson::Pivots { pivots } => Ok(standard_rep(&PivotSet::new(n, pivots)?, field)),
            SubspaceJson::Matrix { matrix } => {
                if matrix.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "generator matrix has {} rows, expected {n}",
                        matrix.len()
                    )));
                }
                canonicalize(&MatrixFq::from_rows(field, matrix)?)
            }
        }
    }

    pub fn to_pivot_set(&self, n: usize) -> Result<PivotSet> {
        match self {
            SubspaceJson::Pivots { pivots } => PivotSet::new(n, pivots),
            SubspaceJson::Matrix { .. } => Err(Error::params("set designs take pivot lists, not matrices")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub t: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub ks: Vec<usize>,
    pub lambda: u64,
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl ParamsJson {
    pub fn new(p: &DesignParams, field: Option<&FieldSpec>) -> Self {
        ParamsJson { t: p.t, n: p.n, ks: p.ks.clone(), lambda: p.lambda, q: p.q, modulus: field.and_then(modulus_of) }
    }

    pub fn params(&self) -> DesignParams {
        DesignParams { t: self.t, n: self.n, ks: self.ks.clone(), lambda: self.lambda, q: self.q }
    }
}

fn modulus_of(f: &FieldSpec) -> Option<Vec<u32>> {
    (!f.modulus().is_empty()).then(|| f.modulus().iter().map(|&c| u32::from(c)).collect())
}

/// Field from an order plus an optional explicit modulus, falling back to
/// the overrides and then the built-in table.
pub fn field_from(q: u32, modulus: Option<&[u32]>, overrides: &ModulusOverrides) -> Result<FieldSpec> {
    match modulus {
        Some(m) => {
            let m: Vec<Elem> = m
                .iter()
                .map(|&c| u8::try_from(c).map_err(|_| Error::InvalidModulus { q, reason: format!("coefficient {c}") }))
                .collect::<Result<_>>()?;
            FieldSpec::new(q, Some(&m))
        }
        None => FieldSpec::with_overrides(q, overrides),
    }
}

/// A design file. `q = 1` marks a set design whose representatives are the
/// blocks themselves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFile {
    pub params: ParamsJson,
    pub group: GroupDescriptor,
    pub representatives: Vec<SubspaceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<SubspaceJson>>,
}

/// A design file resolved into blocks.
#[derive(Clone, Debug)]
pub enum LoadedDesign {
    Subspaces(BlockList),
    Sets(SetDesign),
}

impl DesignFile {
    pub fn from_selection(sel: &OrbitSelection, params: &DesignParams) -> Self {
        DesignFile {
            params: ParamsJson::new(params, Some(sel.group.field())),
            group: GroupDescriptor::describe(&sel.group),
            representatives: sel.reps.iter().map(SubspaceJson::from_subspace).collect(),
            blocks: None,
        }
    }

    pub fn from_set_design(d: &SetDesign, params: &DesignParams) -> Self {
        DesignFile {
            params: ParamsJson::new(params, None),
            group: GroupDescriptor::of_kind("borel"),
            representatives: d.blocks.iter().map(|b| SubspaceJson::Pivots { pivots: b.to_vec() }).collect(),
            blocks: None,
        }
    }

    pub fn with_blocks(mut self, blocks: &BlockList) -> Self {
        self.blocks = Some(blocks.blocks().iter().map(SubspaceJson::from_subspace).collect());
        self
    }

    pub fn field(&self, overrides: &ModulusOverrides) -> Result<FieldSpec> {
        field_from(self.params.q, self.params.modulus.as_deref(), overrides)
    }

    pub fn selection(&self, overrides: &ModulusOverrides) -> Result<OrbitSelection> {
        let field = self.field(overrides)?;
        let n = self.params.n;
        let group = self.group.build(&field, n)?;
        let reps = self.representatives.iter().map(|r| r.to_subspace(&field, n)).collect::<Result<_>>()?;
        Ok(OrbitSelection { group, reps })
    }

    /// Explicit blocks when present, otherwise the expanded orbits.
    pub fn load(&self, overrides: &ModulusOverrides, guard: u64) -> Result<LoadedDesign> {
        let n = self.params.n;
        if self.params.q == 1 {
            let src = self.blocks.as_ref().unwrap_or(&self.representatives);
            let blocks = src.iter().map(|b| b.to_pivot_set(n)).collect::<Result<_>>()?;
            return Ok(LoadedDesign::Sets(SetDesign { n, blocks }));
        }
        match &self.blocks {
            Some(bs) => {
                let field = self.field(overrides)?;
                let blocks = bs.iter().map(|b| b.to_subspace(&field, n)).collect::<Result<_>>()?;
                Ok(LoadedDesign::Subspaces(BlockList::new(&field, n, blocks)?))
            }
            None => Ok(LoadedDesign::Subspaces(expand(&self.selection(overrides)?, guard)?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmColumnJson {
    pub k: usize,
    pub rep: SubspaceJson,
    pub orbit_size: u64,
}

/// A Kramer-Mesner matrix with its labels and the group that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmFile {
    pub group: GroupDescriptor,
    pub n: usize,
    pub q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub t: usize,
    #[serde(rename = "K")]
    pub ks: Vec<usize>,
    pub rows: Vec<SubspaceJson>,
    pub cols: Vec<KmColumnJson>,
    pub entries: Vec<Vec<u64>>,
}

impl KmFile {
    pub fn new(m: &KmMatrix, group: &MatrixGroup) -> Self {
        KmFile {
            group: GroupDescriptor::describe(group),
            n: m.n,
            q: group.field().order(),
            modulus: modulus_of(group.field()),
            t: m.t,
            ks: m.ks.clone(),
            rows: m.rows.iter().map(SubspaceJson::from_subspace).collect(),
            cols: m
                .cols
                .iter()
                .map(|c| KmColumnJson { k: c.k, rep: SubspaceJson::from_subspace(&c.rep), orbit_size: c.orbit_size })
                .collect(),
            entries: (0..m.num_rows()).map(|r| m.row(r).to_vec()).collect(),
        }
    }

    /// Rebuilds the matrix and its group.
    pub fn resolve(&self, overrides: &ModulusOverrides) -> Result<(KmMatrix, MatrixGroup)> {
        let field = field_from(self.q, self.modulus.as_deref(), overrides)?;
        let group = self.group.build(&field, self.n)?;
        let rows = self.rows.iter().map(|r| r.to_subspace(&field, self.n)).collect::<Result<Vec<_>>>()?;
        let cols = self
            .cols
            .iter()
            .map(|c| Ok(KmColumn { k: c.k, rep: c.rep.to_subspace(&field, self.n)?, orbit_size: c.orbit_size }))
            .collect::<Result<Vec<_>>>()?;
        if self.entries.len() != rows.len() || self.entries.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DimensionMismatch("entries do not match the row and column labels".into()));
        }
        let entries = self.entries.concat();
        let m = KmMatrix::from_parts(group.label(), self.n, self.t, self.ks.clone(), rows, cols, entries)?;
        Ok((m, group))
    }
}

/// Solver request: a matrix file plus search limits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRequestJson {
    pub matrix: KmFile,
    pub lambda: u64,
    #[serde(default = "default_max_solutions")]
    pub max_solutions: usize,
    /// Wall-clock budget in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
}

fn default_max_solutions() -> usize {
    1
}

impl SolveRequestJson {
    pub fn request(&self, m: &KmMatrix) -> SolveRequest {
        SolveRequest {
            matrix: m.into(),
            lambda: self.lambda,
            max_solutions: self.max_solutions,
            time_limit: self.time_limit.map(std::time::Duration::from_secs_f64),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionJson {
    /// Selected column indices, 0-based.
    pub columns: Vec<usize>,
    pub labels: Vec<String>,
    pub design: DesignFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResponseJson {
    pub lambda: u64,
    pub max_solutions: usize,
    pub status: String,
    pub nodes: u64,
    pub solutions: Vec<SolutionJson>,
}

impl SolveResponseJson {
    pub fn new(m: &KmMatrix, group: &MatrixGroup, lambda: u64, max_solutions: usize, out: &SolveOutcome) -> Self {
        let params = DesignParams { t: m.t, n: m.n, ks: m.ks.clone(), lambda, q: group.field().order() };
        let solutions = out
            .solutions
            .iter()
            .map(|x| {
                let columns: Vec<usize> = x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
                let reps: Vec<Subspace> = columns.iter().map(|&c| m.cols[c].rep.clone()).collect();
                let sel = OrbitSelection { group: group.clone(), reps };
                SolutionJson {
                    labels: columns.iter().map(|&c| subspace_label(&m.cols[c].rep)).collect(),
                    columns,
                    design: DesignFile::from_selection(&sel, &params),
                }
            })
            .collect();
        SolveResponseJson { lambda, max_solutions, status: out.status.name().into(), nodes: out.nodes, solutions }
    }
}
