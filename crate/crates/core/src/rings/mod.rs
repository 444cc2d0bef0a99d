//! Base rings of characteristic p for Witt vector arithmetic.

mod etale;
mod field;
mod laurent;

pub use etale::EtaleAlgebra;
pub use field::{ExtField, Fq, PrimeField};
pub use laurent::{Exponent, Laurent, LaurentRing};

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

/// A commutative ring of prime characteristic `p`, passed around as a value
/// so that runtime-configured rings (`F_q`, chart rings) share one interface.
pub trait BaseRing: Clone + Debug {
    type Elem: Clone + PartialEq + Eq + Hash + Debug;

    fn characteristic(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Uniform-ish sample for property tests.
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// Image of the integer `k`.
    fn from_int(&self, k: i64) -> Self::Elem {
        let p = self.characteristic() as i64;
        let r = k.rem_euclid(p) as u64;
        let mut acc = self.zero();
        let one = self.one();
        for _ in 0..r {
            acc = self.add(&acc, &one);
        }
        acc
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a -> a^p`.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.characteristic())
    }

    /// Multiplicative inverse, when `a` is a unit and the ring can find it.
    fn inv(&self, _a: &Self::Elem) -> Option<Self::Elem> {
        None
    }

    /// The common multidegree of a homogeneous element; `None` for zero, for
    /// inhomogeneous elements, and for ungraded rings.
    fn multidegree(&self, _a: &Self::Elem) -> Option<Vec<i64>> {
        None
    }

    fn is_homogeneous(&self, a: &Self::Elem) -> bool {
        self.multidegree(a).is_some()
    }
}
