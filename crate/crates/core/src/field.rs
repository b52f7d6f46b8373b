//! Exact arithmetic in GF(q) for small prime powers q.
//!
//! Elements are encoded as a single integer index in `[0, q)`. For a prime
//! field this is the residue; for an extension field GF(p^m) it is the
//! base-p packing `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of the coefficient
//! vector in the power basis `{1, x, ..., x^{m-1}}`. Index 0 is zero and
//! index 1 is one in both cases.
//!
//! Every [`FieldSpec`] carries precomputed addition, log and antilog tables,
//! so all operations are table lookups.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, stored as its index.
pub type Elem = u8;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 32;

/// Built-in primitive moduli, coefficients `c_0 .. c_m` over GF(p).
const PRIMITIVE_MODULI: &[(u32, &[u8])] = &[
    (4, &[1, 1, 1]),
    (8, &[1, 1, 0, 1]),
    (9, &[2, 2, 1]),
    (16, &[1, 1, 0, 0, 1]),
    (25, &[2, 4, 1]),
    (27, &[1, 2, 0, 1]),
    (32, &[1, 0, 1, 0, 0, 1]),
];

/// Returns `(p, m)` with `q = p^m` if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

#[derive(Debug)]
struct Tables {
    add: Vec<Elem>,
    neg: Vec<Elem>,
    /// `exp[i] = g^i` for a primitive element g, doubled in length so that
    /// `exp[log a + log b]` needs no reduction.
    exp: Vec<Elem>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u16>,
}

/// A finite field GF(q), immutable after construction.
#[derive(Clone)]
pub struct FieldSpec {
    q: u32,
    p: u32,
    m: u32,
    modulus: Vec<Elem>,
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Primitive-modulus overrides, keyed by field order.
#[derive(Debug, Clone, Default)]
pub struct ModulusOverrides {
    entries: BTreeMap<u32, Vec<Elem>>,
}

impl ModulusOverrides {
    /// Parses records of the form `q m c_0 c_1 ... c_m`, one per line.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Vec<u32> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| Error::Parse(format!("line {}: bad integer {tok:?}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            if nums.len() < 2 {
                return Err(Error::Parse(format!("line {}: expected `q m c_0 .. c_m`", lineno + 1)));
            }
            let (q, m) = (nums[0], nums[1] as usize);
            let coeffs = &nums[2..];
            if coeffs.len() != m + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} coefficients, found {}",
                    lineno + 1,
                    m + 1,
                    coeffs.len()
                )));
            }
            let (p, ext) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
            if ext as usize != m {
                return Err(Error::Parse(format!(
                    "line {}: GF({q}) has extension degree {ext}, record says {m}",
                    lineno + 1
                )));
            }
            if let Some(&c) = coeffs.iter().find(|&&c| c >= p) {
                return Err(Error::InvalidModulus { q, reason: format!("coefficient {c} not in [0, {p})") });
            }
            entries.insert(q, coeffs.iter().map(|&c| c as Elem).collect());
        }
        Ok(ModulusOverrides { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, q: u32) -> Option<&[Elem]> {
        self.entries.get(&q).map(Vec::as_slice)
    }
}

/// Builds GF(q), using the built-in primitive modulus table when `q` is not
/// prime and no modulus is supplied.
pub fn make_field(q: u32, modulus: Option<&[Elem]>) -> Result<FieldSpec> {
    FieldSpec::new(q, modulus)
}

impl FieldSpec {
    pub fn new(q: u32, modulus: Option<&[Elem]>) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge { q, max: MAX_ORDER });
        }
        if m == 1 {
            if let Some(md) = modulus {
                if !md.is_empty() {
                    return Err(Error::InvalidModulus { q, reason: "prime fields take no modulus".into() });
                }
            }
            return Ok(Self::prime(p));
        }
        let modulus = match modulus {
            Some(md) => md.to_vec(),
            None => PRIMITIVE_MODULI
                .iter()
                .find(|(order, _)| *order == q)
                .map(|(_, c)| c.to_vec())
                .ok_or_else(|| Error::InvalidModulus { q, reason: "no built-in modulus".into() })?,
        };
        Self::extension(p, m, modulus)
    }

    /// Like [`FieldSpec::new`] but consulting `overrides` before the built-in table.
    pub fn with_overrides(q: u32, overrides: &ModulusOverrides) -> Result<Self> {
        Self::new(q, overrides.get(q))
    }

    fn prime(p: u32) -> Self {
        let q = p as usize;
        let mut add = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = ((a + b) % q) as Elem;
            }
        }
        let neg = (0..q).map(|a| ((q - a) % q) as Elem).collect();
        // Smallest primitive root by brute-force order check.
        let g = (1..q)
            .find(|&g| {
                let mut x = g;
                let mut order = 1;
                while x != 1 {
                    x = x * g % q;
                    order += 1;
                }
                order == q - 1
            })
            .expect("prime field has a primitive root");
        let mut exp = vec![0; 2 * (q - 1)];
        let mut log = vec![0u16; q];
        let mut x = 1;
        for i in 0..q - 1 {
            exp[i] = x as Elem;
            exp[i + q - 1] = x as Elem;
            log[x] = i as u16;
            x = x * g % q;
        }
        FieldSpec { q: p, p, m: 1, modulus: Vec::new(), tables: Arc::new(Tables { add, neg, exp, log }) }
    }

    fn extension(p: u32, m: u32, modulus: Vec<Elem>) -> Result<Self> {
        let q = p.pow(m);
        let bad = |reason: &str| Error::InvalidModulus { q, reason: reason.into() };
        if modulus.len() != m as usize + 1 {
            return Err(bad("modulus must have degree m"));
        }
        if modulus[m as usize] != 1 {
            return Err(bad("modulus must be monic"));
        }
        if modulus.iter().any(|&c| u32::from(c) >= p) {
            return Err(bad("coefficient out of range"));
        }
        let (pu, mu, qu) = (p as usize, m as usize, q as usize);
        let digits = |mut idx: usize| -> Vec<usize> {
            (0..mu)
                .map(|_| {
                    let d = idx % pu;
                    idx /= pu;
                    d
                })
                .collect()
        };
        let pack = |ds: &[usize]| ds.iter().rev().fold(0, |acc, &d| acc * pu + d);

        let mut add = vec![0; qu * qu];
        let mut neg = vec![0; qu];
        for a in 0..qu {
            let da = digits(a);
            let dn: Vec<usize> = da.iter().map(|&d| (pu - d) % pu).collect();
            neg[a] = pack(&dn) as Elem;
            for b in 0..qu {
                let db = digits(b);
                let ds: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % pu).collect();
                add[a * qu + b] = pack(&ds) as Elem;
            }
        }

        // Powers of x modulo the modulus; x must have order q - 1.
        let mut exp = vec![0; 2 * (qu - 1)];
        let mut log = vec![u16::MAX; qu];
        let mut cur = vec![0usize; mu];
        cur[0] = 1;
        for i in 0..qu - 1 {
            let idx = pack(&cur);
            if log[idx] != u16::MAX {
                return Err(bad("modulus is not primitive"));
            }
            exp[i] = idx as Elem;
            exp[i + qu - 1] = idx as Elem;
            log[idx] = i as u16;
            // cur *= x, then reduce x^m = -(c_0 + ... + c_{m-1} x^{m-1}).
            let top = cur[mu - 1];
            for j in (1..mu).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..mu {
                cur[j] = (cur[j] + (pu - usize::from(modulus[j])) * top) % pu;
            }
        }
        if pack(&cur) != 1 {
            return Err(bad("modulus is not primitive"));
        }
        log[0] = 0;
        Ok(FieldSpec { q, p, m, modulus, tables: Arc::new(Tables { add, neg, exp, log }) })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Coefficients `c_0 .. c_m` of the primitive modulus; empty for prime fields.
    pub fn modulus(&self) -> &[Elem] {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        self.q as usize
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    pub fn element(&self, a: u32) -> Result<Elem> {
        if self.contains(a) {
            Ok(a as Elem)
        } else {
            Err(Error::InvalidElement { value: a, q: self.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.tables.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.tables.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.tables;
        t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nonzero(a))
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Elem) -> Elem {
        debug_assert!(a != 0);
        let t = &self.tables;
        let qm1 = self.q as usize - 1;
        t.exp[(qm1 - t.log[a as usize] as usize) % qm1]
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let qm1 = u64::from(self.q) - 1;
        let l = u64::from(self.tables.log[a as usize]) * (e % qm1) % qm1;
        self.tables.exp[l as usize]
    }

    /// The primitive element used by the log tables.
    pub fn primitive_element(&self) -> Elem {
        self.tables.exp[1 % (self.q as usize - 1)]
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Elem) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Ok(k)
    }
}
