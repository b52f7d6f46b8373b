//! Polynomials over GF(q) as needed for Singer cycles: primitivity testing
//! and a default table of primitive polynomials.
//!
//! A polynomial is a coefficient slice `c_0 .. c_n`, lowest degree first.

use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};

/// Default primitive polynomials over GF(2), degrees 2..=9.
const GF2_PRIMITIVE: &[(usize, &[Elem])] = &[
    (2, &[1, 1, 1]),
    (3, &[1, 1, 0, 1]),
    (4, &[1, 1, 0, 0, 1]),
    (5, &[1, 0, 1, 0, 0, 1]),
    (6, &[1, 1, 0, 0, 0, 0, 1]),
    (7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (9, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
];

/// Search bound for `q^n - 1` when no table entry exists.
const SEARCH_LIMIT: u64 = 1 << 40;

/// Multiplies `a * b mod f` where `f` is monic of degree `n` and `a`, `b`
/// have degree `< n`.
fn mulmod(field: &FieldSpec, a: &[Elem], b: &[Elem], f: &[Elem]) -> Vec<Elem> {
    let n = f.len() - 1;
    let mut prod = vec![0; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = field.add(prod[i + j], field.mul(x, y));
        }
    }
    for d in (n..2 * n).rev() {
        let top = prod[d];
        if top == 0 {
            continue;
        }
        prod[d] = 0;
        for j in 0..n {
            prod[d - n + j] = field.sub(prod[d - n + j], field.mul(top, f[j]));
        }
    }
    prod.truncate(n);
    prod
}

pub(crate) fn x_pow_mod(field: &FieldSpec, mut e: u64, f: &[Elem]) -> Vec<Elem> {
    let n = f.len() - 1;
    let mut base = vec![0; n];
    let mut acc = vec![0; n];
    acc[0] = 1;
    if n == 1 {
        base[0] = field.neg(f[0]);
    } else {
        base[1] = 1;
    }
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(field, &acc, &base, f);
        }
        base = mulmod(field, &base, &base, f);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(d);
            while v.is_multiple_of(d) {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

fn group_order(q: u32, n: usize) -> Option<u64> {
    u64::from(q).checked_pow(n as u32).map(|v| v - 1)
}

/// True iff `f` is monic of degree `n >= 1` and `x` has multiplicative order
/// `q^n - 1` modulo `f` (which forces `f` to be irreducible).
pub fn is_primitive(field: &FieldSpec, f: &[Elem]) -> bool {
    if f.len() < 2 || *f.last().unwrap() != 1 || f[0] == 0 {
        return false;
    }
    if f.iter().any(|&c| !field.contains(u32::from(c))) {
        return false;
    }
    let n = f.len() - 1;
    let Some(order) = group_order(field.order(), n) else {
        return false;
    };
    if order > SEARCH_LIMIT {
        return false;
    }
    let one = {
        let mut v = vec![0; n];
        v[0] = 1;
        v
    };
    if x_pow_mod(field, order, f) != one {
        return false;
    }
    prime_factors(order).into_iter().all(|r| x_pow_mod(field, order / r, f) != one)
}

/// A primitive polynomial of degree `n` over `field`: the built-in entry for
/// GF(2) when present, otherwise the first primitive polynomial in
/// increasing order of the packed coefficients `c_0 .. c_{n-1}`.
pub fn default_primitive(field: &FieldSpec, n: usize) -> Result<Vec<Elem>> {
    let err = || Error::NoPrimitivePolynomial { q: field.order(), n };
    if n == 0 {
        return Err(err());
    }
    if field.order() == 2 {
        if let Some((_, c)) = GF2_PRIMITIVE.iter().find(|(d, _)| *d == n) {
            return Ok(c.to_vec());
        }
    }
    let order = group_order(field.order(), n).ok_or_else(err)?;
    if order > SEARCH_LIMIT {
        return Err(err());
    }
    let q = u64::from(field.order());
    let total = order + 1;
    (0..total)
        .map(|mut idx| {
            let mut f: Vec<Elem> = (0..n)
                .map(|_| {
                    let c = (idx % q) as Elem;
                    idx /= q;
                    c
                })
                .collect();
            f.push(1);
            f
        })
        .find(|f| is_primitive(field, f))
        .ok_or_else(err)
}
