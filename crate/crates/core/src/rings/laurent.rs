//! Multigraded Laurent polynomial rings used as coordinate rings of charts.
//!
//! A ring has `k` variables, each either required to carry a non-negative
//! exponent or unrestricted (inverted). Optionally the total degree of every
//! monomial is pinned to zero, which is how the rings `O(U_I)` of the
//! standard cover of `P^N` sit inside the function field.

use std::collections::BTreeMap;

use rand::Rng;

use super::BaseRing;
use crate::error::{Error, Result};

pub type Exponent = Vec<i64>;

/// Sparse Laurent polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent<C> {
    terms: BTreeMap<Exponent, C>,
}

impl<C: Clone> Laurent<C> {
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exponent vectors in the support.
    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn coefficient(&self, e: &[i64]) -> Option<&C> {
        self.terms.get(e)
    }

    /// Applies `f` to every exponent; `f` must be injective.
    pub fn map_exponents(&self, mut f: impl FnMut(&Exponent) -> Exponent) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (f(e), c.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentRing<K: BaseRing> {
    coeffs: K,
    nonneg: Vec<bool>,
    degree_zero: bool,
}

impl<K: BaseRing> LaurentRing<K> {
    /// `nonneg[j]` requires the exponent of variable `j` to be `>= 0`.
    pub fn new(coeffs: K, nonneg: Vec<bool>, degree_zero: bool) -> Self {
        LaurentRing {
            coeffs,
            nonneg,
            degree_zero,
        }
    }

    /// The polynomial ring `K[x_1..x_k]`.
    pub fn polynomial(coeffs: K, k: usize) -> Self {
        Self::new(coeffs, vec![true; k], false)
    }

    /// The coordinate ring of the chart `U_I = {x_i != 0, i in I}` of `P^N`:
    /// degree-zero Laurent monomials in `x_0..x_N` whose exponents are
    /// non-negative outside `I`.
    pub fn projective_chart(coeffs: K, n: usize, chart: &[usize]) -> Self {
        let nonneg = (0..=n).map(|j| !chart.contains(&j)).collect();
        Self::new(coeffs, nonneg, true)
    }

    /// Degree-zero Laurent monomials in `x_0..x_N` with no sign condition,
    /// containing every chart ring; functions of `K(P^N)` that are
    /// regular on the torus.
    pub fn projective_torus(coeffs: K, n: usize) -> Self {
        Self::new(coeffs, vec![false; n + 1], true)
    }

    pub fn coeff_ring(&self) -> &K {
        &self.coeffs
    }

    pub fn nvars(&self) -> usize {
        self.nonneg.len()
    }

    pub fn nonneg(&self) -> &[bool] {
        &self.nonneg
    }

    pub fn is_degree_zero(&self) -> bool {
        self.degree_zero
    }

    pub fn allows(&self, e: &[i64]) -> bool {
        e.len() == self.nvars()
            && e.iter().zip(&self.nonneg).all(|(&x, &nn)| !nn || x >= 0)
            && (!self.degree_zero || e.iter().sum::<i64>() == 0)
    }

    /// Builds a canonical element, checking every exponent against the chart.
    pub fn make(&self, monomials: impl IntoIterator<Item = (K::Elem, Exponent)>) -> Result<Laurent<K::Elem>> {
        let mut out = Laurent { terms: BTreeMap::new() };
        for (c, e) in monomials {
            if !self.allows(&e) {
                return Err(Error::ExponentOutOfChart { exponent: e });
            }
            self.add_term(&mut out, e, c);
        }
        Ok(out)
    }

    pub fn monomial(&self, c: K::Elem, e: Exponent) -> Result<Laurent<K::Elem>> {
        self.make([(c, e)])
    }

    /// A constant, embedded at exponent zero.
    pub fn constant(&self, c: K::Elem) -> Laurent<K::Elem> {
        let mut out = Laurent { terms: BTreeMap::new() };
        self.add_term(&mut out, vec![0; self.nvars()], c);
        out
    }

    /// Membership of an arbitrary element (e.g. built in a bigger ring).
    pub fn contains(&self, a: &Laurent<K::Elem>) -> bool {
        a.support().all(|e| self.allows(e))
    }

    fn add_term(&self, out: &mut Laurent<K::Elem>, e: Exponent, c: K::Elem) {
        if self.coeffs.is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match out.terms.entry(e) {
            Entry::Occupied(mut o) => {
                let s = self.coeffs.add(o.get(), &c);
                if self.coeffs.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, a: &Laurent<K::Elem>, c: &K::Elem) -> Laurent<K::Elem> {
        let mut out = Laurent { terms: BTreeMap::new() };
        for (e, x) in &a.terms {
            self.add_term(&mut out, e.clone(), self.coeffs.mul(x, c));
        }
        out
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, a: &Laurent<K::Elem>, f: impl Fn(&Exponent, &K::Elem) -> K::Elem) -> Laurent<K::Elem> {
        let mut out = Laurent { terms: BTreeMap::new() };
        for (e, x) in &a.terms {
            self.add_term(&mut out, e.clone(), f(e, x));
        }
        out
    }

    fn random_exponent<G: Rng + ?Sized>(&self, rng: &mut G, radius: i64) -> Exponent {
        loop {
            let mut e: Exponent = self
                .nonneg
                .iter()
                .map(|&nn| if nn { rng.gen_range(0..=radius) } else { rng.gen_range(-radius..=radius) })
                .collect();
            if self.degree_zero {
                let k = self.nvars();
                let rest: i64 = e[..k - 1].iter().sum();
                e[k - 1] = -rest;
            }
            if self.allows(&e) {
                return e;
            }
        }
    }

    /// Random element with at most `max_terms` terms and exponents bounded by
    /// `radius`.
    pub fn random_with<G: Rng + ?Sized>(&self, rng: &mut G, max_terms: usize, radius: i64) -> Laurent<K::Elem> {
        let nterms = rng.gen_range(0..=max_terms);
        let mut out = Laurent { terms: BTreeMap::new() };
        for _ in 0..nterms {
            let e = self.random_exponent(rng, radius);
            let c = self.coeffs.random(rng);
            self.add_term(&mut out, e, c);
        }
        out
    }

    /// A random homogeneous element of multidegree `e`.
    pub fn random_homogeneous<G: Rng + ?Sized>(&self, rng: &mut G, e: &[i64]) -> Laurent<K::Elem> {
        let mut out = Laurent { terms: BTreeMap::new() };
        self.add_term(&mut out, e.to_vec(), self.coeffs.random(rng));
        out
    }
}

impl<K: BaseRing> BaseRing for LaurentRing<K> {
    type Elem = Laurent<K::Elem>;

    fn characteristic(&self) -> u64 {
        self.coeffs.characteristic()
    }

    fn zero(&self) -> Self::Elem {
        Laurent { terms: BTreeMap::new() }
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.coeffs.one())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.terms.is_empty()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (big, small) = if a.terms.len() >= b.terms.len() { (a, b) } else { (b, a) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            self.add_term(&mut out, e.clone(), c.clone());
        }
        out
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        Laurent {
            terms: a.terms.iter().map(|(e, c)| (e.clone(), self.coeffs.neg(c))).collect(),
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = Laurent { terms: BTreeMap::new() };
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.add_term(&mut out, e, self.coeffs.mul(ca, cb));
            }
        }
        out
    }

    fn from_int(&self, k: i64) -> Self::Elem {
        self.constant(self.coeffs.from_int(k))
    }

    /// In characteristic p the p-th power of a sum is the sum of p-th powers.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        let p = self.characteristic() as i64;
        let mut out = Laurent { terms: BTreeMap::new() };
        for (e, c) in &a.terms {
            let e = e.iter().map(|x| x * p).collect();
            self.add_term(&mut out, e, self.coeffs.frobenius(c));
        }
        out
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        // only monomials with an admissible inverse exponent are units
        if a.terms.len() != 1 {
            return None;
        }
        let (e, c) = a.terms.iter().next()?;
        let inv_e: Exponent = e.iter().map(|x| -x).collect();
        if !self.allows(&inv_e) {
            return None;
        }
        let c = self.coeffs.inv(c)?;
        let mut out = Laurent { terms: BTreeMap::new() };
        self.add_term(&mut out, inv_e, c);
        Some(out)
    }

    fn multidegree(&self, a: &Self::Elem) -> Option<Vec<i64>> {
        if a.terms.len() == 1 {
            a.terms.keys().next().cloned()
        } else {
            None
        }
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem {
        self.random_with(rng, 3, 2)
    }
}
