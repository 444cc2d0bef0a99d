//! Sparse multivariate polynomials over the integers in the Witt variables
//! `x_0, y_0, x_1, y_1, ...`.
//!
//! Monomials are packed into a `u128`, one fixed-width field per variable.
//! With the interleaved variable order a polynomial in `x_0..x_m, y_0..y_m`
//! is also a polynomial in any longer prefix, which is how the cache stores
//! `S_m` next to `S_n`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Witt variable. `X(i)` is `x_i`, `Y(i)` is `y_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl Var {
    /// The Witt index `i` of `x_i` or `y_i`.
    pub fn index(self) -> usize {
        match self {
            Var::X(i) | Var::Y(i) => i,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x_{i}"),
            Var::Y(i) => write!(f, "y_{i}"),
        }
    }
}

/// The ordered variable list `x_0, y_0, ..., x_n, y_n`.
pub fn xy_vars(n: usize) -> Vec<Var> {
    (0..=n).flat_map(|i| [Var::X(i), Var::Y(i)]).collect()
}

/// The ordered variable list `x_0, ..., x_n`.
pub fn x_vars(n: usize) -> Vec<Var> {
    (0..=n).map(Var::X).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Packing {
    arity: usize,
    bits: u32,
}

impl Packing {
    fn new(arity: usize) -> Self {
        assert!(arity > 0 && arity <= 128, "arity {arity} out of range");
        let bits = (128 / arity as u32).min(32);
        Packing { arity, bits }
    }

    fn mask(self) -> u128 {
        (1u128 << self.bits) - 1
    }

    fn max_exponent(self) -> u64 {
        self.mask() as u64
    }

    fn get(self, m: u128, i: usize) -> u64 {
        ((m >> (self.bits as usize * i)) & self.mask()) as u64
    }

    fn pack(self, exps: &[u64]) -> Result<u128> {
        let mut m = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            if e > self.max_exponent() {
                return Err(self.overflow());
            }
            m |= (e as u128) << (self.bits as usize * i);
        }
        Ok(m)
    }

    fn unpack(self, m: u128) -> Vec<u64> {
        (0..self.arity).map(|i| self.get(m, i)).collect()
    }

    fn overflow(self) -> Error {
        Error::ExponentOverflow {
            arity: self.arity,
            bits: self.bits,
        }
    }
}

/// Exact integer polynomial with a declared variable list.
///
/// Zero coefficients are never stored. Terms are kept unordered internally;
/// [`UniversalPoly::terms`] yields them in the canonical graded-lex order.
#[derive(Clone)]
pub struct UniversalPoly {
    vars: Vec<Var>,
    packing: Packing,
    terms: HashMap<u128, BigInt>,
    // per-variable maximum exponent, used to rule out field overflow in products
    max_exps: Vec<u64>,
}

impl PartialEq for UniversalPoly {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl Eq for UniversalPoly {}

impl fmt::Debug for UniversalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniversalPoly({self})")
    }
}

impl UniversalPoly {
    pub fn zero(vars: Vec<Var>) -> Self {
        let packing = Packing::new(vars.len());
        let max_exps = vec![0; vars.len()];
        UniversalPoly {
            vars,
            packing,
            terms: HashMap::new(),
            max_exps,
        }
    }

    pub fn constant(vars: Vec<Var>, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero(vars);
        out.add_term(0, c.into());
        out
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn var(vars: Vec<Var>, v: Var) -> Self {
        let pos = vars
            .iter()
            .position(|&w| w == v)
            .unwrap_or_else(|| panic!("{v} not among the declared variables"));
        let mut exps = vec![0; vars.len()];
        exps[pos] = 1;
        Self::from_terms(vars, [(BigInt::one(), exps)]).expect("unit exponent always packs")
    }

    pub fn from_terms<I>(vars: Vec<Var>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigInt, Vec<u64>)>,
    {
        let mut out = Self::zero(vars);
        for (c, exps) in terms {
            if exps.len() != out.vars.len() {
                return Err(Error::LengthMismatch {
                    expected: out.vars.len(),
                    got: exps.len(),
                });
            }
            let m = out.packing.pack(&exps)?;
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: u128, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
                for i in 0..self.packing.arity {
                    let e = self.packing.get(m, i);
                    if e > self.max_exps[i] {
                        self.max_exps[i] = e;
                    }
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            self.vars, other.vars,
            "polynomials over different variable lists"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars.clone());
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other);
        let limit = self.packing.max_exponent();
        if self
            .max_exps
            .iter()
            .zip(&other.max_exps)
            .any(|(a, b)| a + b > limit)
        {
            return Err(self.packing.overflow());
        }
        let mut out = Self::zero(self.vars.clone());
        // iterate the shorter side in the inner loop
        let (a, b) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: HashMap<u128, BigInt> =
            HashMap::with_capacity(a.terms.len().saturating_mul(2));
        let mut prod = BigInt::zero();
        for (&mb, cb) in &b.terms {
            for (&ma, ca) in &a.terms {
                prod.clone_from(ca);
                prod *= cb;
                // fields never carry: per-variable sums were bounded above
                match acc.entry(ma + mb) {
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += &prod,
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod.clone());
                    }
                }
            }
        }
        for (m, c) in acc {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::constant(self.vars.clone(), 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Divides every coefficient by `d`; `None` if some coefficient is not a
    /// multiple of `d`.
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            *c = q;
        }
        Some(out)
    }

    /// Re-expresses the polynomial over a longer variable list that starts
    /// with the current one.
    pub fn extend_vars(&self, vars: Vec<Var>) -> Result<Self> {
        assert!(
            vars.starts_with(&self.vars),
            "target variable list must extend the current one"
        );
        let mut out = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut exps = self.packing.unpack(*m);
            exps.resize(out.arity(), 0);
            let packed = out.packing.pack(&exps)?;
            out.add_term(packed, c.clone());
        }
        Ok(out)
    }

    /// Terms in canonical order: descending total degree, ties broken by
    /// descending lexicographic order of the exponent vector.
    pub fn terms(&self) -> Vec<(BigInt, Vec<u64>)> {
        let mut out: Vec<(BigInt, Vec<u64>)> = self
            .terms
            .iter()
            .map(|(m, c)| (c.clone(), self.packing.unpack(*m)))
            .collect();
        out.sort_by(|a, b| grlex_desc(&a.1, &b.1));
        out
    }

    pub fn coefficient(&self, exps: &[u64]) -> BigInt {
        self.packing
            .pack(exps)
            .ok()
            .and_then(|m| self.terms.get(&m).cloned())
            .unwrap_or_default()
    }

    /// Highest variable position with a nonzero exponent, plus one.
    pub fn used_arity(&self) -> usize {
        self.max_exps
            .iter()
            .rposition(|&e| e > 0)
            .map_or(0, |i| i + 1)
    }

    /// Weighted degree of each term with `deg x_i = deg y_i = p^i`.
    pub fn weighted_degrees(&self, p: u64) -> Vec<u64> {
        let weights: Vec<u64> = self
            .vars
            .iter()
            .map(|v| p.pow(v.index() as u32))
            .collect();
        self.terms
            .keys()
            .map(|&m| {
                (0..self.arity())
                    .map(|i| self.packing.get(m, i) * weights[i])
                    .sum()
            })
            .collect()
    }

    /// Evaluates at an integer point given per variable.
    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.arity());
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = self.packing.get(*m, i);
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Terms with coefficients reduced into `0..p`, zeros dropped. Used to
    /// evaluate the polynomial inside a characteristic-p ring.
    pub fn reduce_mod(&self, p: u64) -> Vec<(u64, Vec<(usize, u64)>)> {
        let modulus = BigInt::from(p);
        self.terms()
            .into_iter()
            .filter_map(|(c, exps)| {
                let r = c.mod_floor(&modulus);
                let r: u64 = r.try_into().expect("residue fits u64");
                if r == 0 {
                    return None;
                }
                let sparse = exps
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, e)| e > 0)
                    .collect();
                Some((r, sparse))
            })
            .collect()
    }
}

pub(crate) fn grlex_desc(a: &[u64], b: &[u64]) -> Ordering {
    let da: u64 = a.iter().sum();
    let db: u64 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl fmt::Display for UniversalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, exps)) in terms.iter().enumerate() {
            let monomial: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].to_string()
                    } else {
                        format!("{}^{e}", self.vars[i])
                    }
                })
                .collect();
            let abs = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (monomial.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => write!(f, "{}", monomial.join("*"))?,
                (false, false) => write!(f, "{abs}*{}", monomial.join("*"))?,
            }
        }
        Ok(())
    }
}
