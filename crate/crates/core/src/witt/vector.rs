use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use super::universal::{cached_reduced, require_prime, PolyKind, ReducedPoly};
use crate::error::{Error, Result};
use crate::rings::BaseRing;

/// An element `(a_0, ..., a_{n-1})` of `W_n(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WittVector<E> {
    p: u64,
    components: Vec<E>,
}

impl<E> WittVector<E> {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[E] {
        &self.components
    }

    pub fn into_components(self) -> Vec<E> {
        self.components
    }
}

type PolySlot = Arc<OnceLock<Arc<Vec<ReducedPoly>>>>;

/// `W_n(A)` for a base ring `A` of characteristic `p`.
///
/// The universal polynomials are fetched from the process cache on first use
/// and kept by the ring, so clones share them.
#[derive(Debug, Clone)]
pub struct WittRing<R: BaseRing> {
    base: R,
    p: u64,
    n: usize,
    sums: PolySlot,
    negs: PolySlot,
    prods: PolySlot,
}

impl<R: BaseRing> WittRing<R> {
    pub fn new(base: R, n: usize) -> Result<Self> {
        let p = base.characteristic();
        require_prime(p)?;
        if n == 0 {
            return Err(Error::Config("witt length must be positive".into()));
        }
        Ok(WittRing {
            base,
            p,
            n,
            sums: Default::default(),
            negs: Default::default(),
            prods: Default::default(),
        })
    }

    /// The same base ring at another length.
    pub fn with_length(&self, n: usize) -> Result<Self> {
        if n == self.n {
            return Ok(self.clone());
        }
        Self::new(self.base.clone(), n)
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn length(&self) -> usize {
        self.n
    }

    fn polys(&self, kind: PolyKind) -> Arc<Vec<ReducedPoly>> {
        let slot = match kind {
            PolyKind::Sum => &self.sums,
            PolyKind::Neg => &self.negs,
            PolyKind::Prod => &self.prods,
        };
        slot.get_or_init(|| {
            cached_reduced(kind, self.p, self.n - 1).expect("p was checked to be prime")
        })
        .clone()
    }

    pub fn make(&self, components: Vec<R::Elem>) -> Result<WittVector<R::Elem>> {
        if components.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: components.len(),
            });
        }
        Ok(WittVector { p: self.p, components })
    }

    pub fn zero(&self) -> WittVector<R::Elem> {
        self.teichmuller(&self.base.zero())
    }

    pub fn one(&self) -> WittVector<R::Elem> {
        self.teichmuller(&self.base.one())
    }

    /// `[a] = (a, 0, ..., 0)`.
    pub fn teichmuller(&self, a: &R::Elem) -> WittVector<R::Elem> {
        let mut components = vec![self.base.zero(); self.n];
        components[0] = a.clone();
        WittVector { p: self.p, components }
    }

    pub fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> WittVector<R::Elem> {
        WittVector {
            p: self.p,
            components: (0..self.n).map(|_| self.base.random(rng)).collect(),
        }
    }

    fn check(&self, a: &WittVector<R::Elem>) -> Result<()> {
        if a.p != self.p {
            return Err(Error::RingMismatch { left: self.p, right: a.p });
        }
        if a.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: a.len() });
        }
        Ok(())
    }

    /// Evaluates reduced universal polynomials at `inputs`, caching powers
    /// of each input.
    fn eval(&self, polys: &[ReducedPoly], inputs: &[&R::Elem]) -> Vec<R::Elem> {
        let zero: Vec<bool> = inputs.iter().map(|a| self.base.is_zero(a)).collect();
        let mut powers: Vec<HashMap<u64, R::Elem>> = vec![HashMap::new(); inputs.len()];
        let mut out = Vec::with_capacity(polys.len());
        for poly in polys {
            let mut acc = self.base.zero();
            'terms: for (c, mono) in poly {
                let mut term: Option<R::Elem> = None;
                for &(pos, e) in mono {
                    if zero[pos] {
                        continue 'terms;
                    }
                    let pw = powers[pos]
                        .entry(e)
                        .or_insert_with(|| self.base.pow(inputs[pos], e));
                    term = Some(match term {
                        None => pw.clone(),
                        Some(t) => self.base.mul(&t, pw),
                    });
                }
                let mut term = term.unwrap_or_else(|| self.base.one());
                if *c != 1 {
                    term = self.base.mul(&term, &self.base.from_int(*c as i64));
                }
                acc = self.base.add(&acc, &term);
            }
            out.push(acc);
        }
        out
    }

    fn binary(&self, kind: PolyKind, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.check(a)?;
        self.check(b)?;
        let inputs: Vec<&R::Elem> = a
            .components
            .iter()
            .zip(&b.components)
            .flat_map(|(x, y)| [x, y])
            .collect();
        Ok(WittVector {
            p: self.p,
            components: self.eval(&self.polys(kind), &inputs),
        })
    }

    pub fn add(&self, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.binary(PolyKind::Sum, a, b)
    }

    pub fn mul(&self, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.binary(PolyKind::Prod, a, b)
    }

    pub fn neg(&self, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.check(a)?;
        let inputs: Vec<&R::Elem> = a.components.iter().collect();
        Ok(WittVector {
            p: self.p,
            components: self.eval(&self.polys(PolyKind::Neg), &inputs),
        })
    }

    pub fn sub(&self, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.add(a, &self.neg(b)?)
    }

    /// `k * a` by double-and-add on the additive group.
    pub fn mul_int(&self, a: &WittVector<R::Elem>, k: i64) -> Result<WittVector<R::Elem>> {
        self.check(a)?;
        let mut base = if k < 0 { self.neg(a)? } else { a.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = self.zero();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// The image of the integer `k`.
    pub fn from_integer(&self, k: i64) -> WittVector<R::Elem> {
        self.mul_int(&self.one(), k).expect("one has the ring's length")
    }

    /// Multiplicative inverse by Newton iteration `t <- t (2 - u t)` from the
    /// Teichmüller lift of `u_0^{-1}`. Each step doubles the number of
    /// correct components.
    pub fn inverse(&self, u: &WittVector<R::Elem>) -> Result<Option<WittVector<R::Elem>>> {
        self.check(u)?;
        let Some(inv0) = self.base.inv(&u.components[0]) else {
            return Ok(None);
        };
        let two = self.from_integer(2);
        let one = self.one();
        let mut t = self.teichmuller(&inv0);
        let mut correct = 1;
        while correct < self.n {
            let ut = self.mul(u, &t)?;
            t = self.mul(&t, &self.sub(&two, &ut)?)?;
            correct *= 2;
        }
        Ok((self.mul(u, &t)? == one).then_some(t))
    }

    /// `F(a_0, a_1, ...) = (a_0^p, a_1^p, ...)`.
    pub fn frobenius(&self, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.check(a)?;
        Ok(self.map(a, |x| self.base.frobenius(x)))
    }

    /// `V^m : W_n -> W_{n+m}`, prepending `m` zeros.
    pub fn verschiebung(&self, a: &WittVector<R::Elem>, m: usize) -> Result<WittVector<R::Elem>> {
        self.check(a)?;
        let mut components = vec![self.base.zero(); m];
        components.extend(a.components.iter().cloned());
        Ok(WittVector { p: self.p, components })
    }

    /// `V^m` inside `W_n`: shift right and drop the top `m` components.
    pub fn verschiebung_trunc(&self, a: &WittVector<R::Elem>, m: usize) -> Result<WittVector<R::Elem>> {
        let mut v = self.verschiebung(a, m)?;
        v.components.truncate(self.n);
        Ok(v)
    }

    /// `R^{n-m} : W_n -> W_m`, keeping the first `m` components.
    pub fn restrict(&self, a: &WittVector<R::Elem>, m: usize) -> Result<WittVector<R::Elem>> {
        self.check(a)?;
        if m > self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: m });
        }
        Ok(WittVector {
            p: self.p,
            components: a.components[..m].to_vec(),
        })
    }

    /// Applies a ring homomorphism of the base componentwise.
    pub fn map(&self, a: &WittVector<R::Elem>, f: impl Fn(&R::Elem) -> R::Elem) -> WittVector<R::Elem> {
        WittVector {
            p: self.p,
            components: a.components.iter().map(f).collect(),
        }
    }
}
