//! Cyclic Kummer covers `B = A[y]/(y^ell - x_r)` of an affine torus chart,
//! the Galois action on Witt vectors, the trace splitting of the pullback,
//! and base change along the étale extension `A[z]/(1 + z + ... + z^{ell-1})`.
//!
//! `A` is the ring of Laurent polynomials in `x_0..x_{k-1}` over `F_q`, with
//! divisors `D = sum a_j div(x_j)` given as an [`RDivisor`] with one
//! coefficient per coordinate. `B` is written in the same variables with
//! `y` in place of `x_r`; `A` embeds by multiplying the `r`-th exponent by
//! `ell`.

use std::collections::HashSet;

use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;

use crate::divisor::RDivisor;
use crate::divisorial::Multidegree;
use crate::error::{Error, Result};
use crate::rings::{BaseRing, EtaleAlgebra, ExtField, Fq, Laurent, LaurentRing};
use crate::witt::{WittRing, WittVector};

type Elem = Laurent<Fq>;

/// `W_n O(D)` on the affine space with coordinates `x_0..x_{k-1}`, inside
/// `W_n` of the torus ring: `u_j + floor(p^m a_j) >= 0` for every `j`.
#[derive(Debug, Clone)]
pub struct AffineSectionSpace {
    divisor: RDivisor,
    bounds: Vec<Vec<i64>>,
    witt: WittRing<LaurentRing<ExtField>>,
}

impl AffineSectionSpace {
    pub fn new(field: &ExtField, divisor: RDivisor, n: usize) -> Result<Self> {
        let p = field.p();
        let k = divisor.coeffs().len();
        let torus = LaurentRing::new(field.clone(), vec![false; k], false);
        Ok(AffineSectionSpace {
            bounds: (0..n).map(|m| divisor.level_floor(p, m)).collect(),
            witt: WittRing::new(torus, n)?,
            divisor,
        })
    }

    pub fn divisor(&self) -> &RDivisor {
        &self.divisor
    }

    pub fn witt(&self) -> &WittRing<LaurentRing<ExtField>> {
        &self.witt
    }

    pub fn contains(&self, v: &WittVector<Elem>) -> bool {
        v.len() == self.bounds.len()
            && v.components().iter().zip(&self.bounds).all(|(phi, b)| {
                phi.support()
                    .all(|u| u.len() == b.len() && u.iter().zip(b).all(|(x, y)| x + y >= 0))
            })
    }

    pub fn random_member<G: Rng + ?Sized>(&self, rng: &mut G, max_terms: usize, radius: i64) -> WittVector<Elem> {
        let ring = self.witt.base();
        let components = self
            .bounds
            .iter()
            .map(|b| {
                let nterms = rng.gen_range(0..=max_terms);
                let terms: Vec<_> = (0..nterms)
                    .map(|_| {
                        let u = b.iter().map(|x| -x + rng.gen_range(0..=radius)).collect();
                        (ring.coeff_ring().random(rng), u)
                    })
                    .collect();
                ring.make(terms).expect("torus ring takes any exponent")
            })
            .collect();
        self.witt.make(components).expect("one component per level")
    }
}

/// `Spec B -> Spec A` with `B = A[y]/(y^ell - x_r)`, `G = <sigma>`,
/// `sigma(y) = zeta y`.
#[derive(Debug, Clone)]
pub struct KummerCover {
    field: ExtField,
    nvars: usize,
    ramified: usize,
    ell: u64,
    zeta: Fq,
    witt: WittRing<LaurentRing<ExtField>>,
    /// The multiplicative inverse of `ell` in `W_n(F_q)`.
    inv_ell: WittVector<Fq>,
}

impl KummerCover {
    pub fn new(field: &ExtField, nvars: usize, ramified: usize, ell: u64, n: usize) -> Result<Self> {
        let p = field.p();
        if ell < 2 {
            return Err(Error::Config(format!("ell = {ell} must be at least 2")));
        }
        if ell.is_multiple_of(p) {
            return Err(Error::OrderDivisibleByP { order: ell, p });
        }
        if ramified >= nvars {
            return Err(Error::Config(format!("ramified coordinate {ramified} out of range 0..{nvars}")));
        }
        let zeta = field.primitive_root_of_unity(ell).ok_or_else(|| {
            Error::Config(format!("F_{} has no primitive {ell}-th root of unity", field.order()))
        })?;
        let scalars = WittRing::new(field.clone(), n)?;
        let inv_ell = scalars
            .inverse(&scalars.from_integer(ell as i64))?
            .ok_or(Error::OrderDivisibleByP { order: ell, p })?;
        let torus = LaurentRing::new(field.clone(), vec![false; nvars], false);
        Ok(KummerCover {
            field: field.clone(),
            nvars,
            ramified,
            ell,
            zeta,
            witt: WittRing::new(torus, n)?,
            inv_ell,
        })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn zeta(&self) -> Fq {
        self.zeta
    }

    /// `W_n` of the torus rings of both `A` and `B`.
    pub fn witt(&self) -> &WittRing<LaurentRing<ExtField>> {
        &self.witt
    }

    pub fn inv_ell(&self) -> &WittVector<Fq> {
        &self.inv_ell
    }

    /// `x_r -> y^ell`.
    pub fn embed(&self, a: &Elem) -> Elem {
        let (r, ell) = (self.ramified, self.ell as i64);
        a.map_exponents(|e| {
            let mut e = e.clone();
            e[r] *= ell;
            e
        })
    }

    /// The preimage in `A`, when every `y`-exponent is a multiple of `ell`.
    pub fn descend(&self, b: &Elem) -> Option<Elem> {
        let (r, ell) = (self.ramified, self.ell as i64);
        if b.support().any(|e| e[r] % ell != 0) {
            return None;
        }
        Some(b.map_exponents(|e| {
            let mut e = e.clone();
            e[r] /= ell;
            e
        }))
    }

    /// `sigma^i`: the coefficient of `y^a` is multiplied by `zeta^{ia}`.
    pub fn sigma(&self, b: &Elem, i: u64) -> Elem {
        let ring = self.witt.base();
        let r = self.ramified;
        let ell = self.ell as i64;
        ring.map_coeffs(b, |e, c| {
            let power = (e[r] * i as i64).rem_euclid(ell) as u64;
            self.field.mul(c, &self.field.pow(&self.zeta, power))
        })
    }

    /// `W(sigma^i)`, componentwise.
    pub fn galois_on_witt(&self, w: &WittVector<Elem>, i: u64) -> WittVector<Elem> {
        self.witt.map(w, |c| self.sigma(c, i))
    }

    pub fn is_invariant(&self, w: &WittVector<Elem>) -> bool {
        self.galois_on_witt(w, 1) == *w
    }

    /// `f^* D`: the coefficient along `x_r = y^ell` is multiplied by `ell`.
    pub fn pullback_divisor(&self, d: &RDivisor) -> Result<RDivisor> {
        if d.coeffs().len() != self.nvars {
            return Err(Error::DivisorNotCompatible(format!("{d} has {} coordinates, the cover has {}", d.coeffs().len(), self.nvars)));
        }
        let ar = d.coeff(self.ramified) * Rational64::from_integer(self.ell as i64);
        if !ar.is_integer() {
            return Err(Error::DivisorNotCompatible(format!(
                "{} times the coefficient of x_{} in {d} is not an integer",
                self.ell, self.ramified
            )));
        }
        let mut coeffs = d.coeffs().to_vec();
        coeffs[self.ramified] = ar;
        RDivisor::new(coeffs)
    }

    /// `W_n O_A(D) -> W_n O_B(f^* D)`.
    pub fn pullback(&self, w: &WittVector<Elem>) -> WittVector<Elem> {
        self.witt.map(w, |c| self.embed(c))
    }

    /// `T(beta) = ell^{-1} sum_i sigma^i(beta)`, descended to `A`.
    pub fn trace(&self, beta: &WittVector<Elem>) -> Result<WittVector<Elem>> {
        let mut sum = self.witt.zero();
        for i in 0..self.ell {
            sum = self.witt.add(&sum, &self.galois_on_witt(beta, i))?;
        }
        let ring = self.witt.base();
        let scalar = self.witt.make(self.inv_ell.components().iter().map(|c| ring.constant(*c)).collect())?;
        let averaged = self.witt.mul(&scalar, &sum)?;
        let components = averaged
            .components()
            .iter()
            .map(|c| {
                self.descend(c)
                    .ok_or_else(|| Error::Config("the averaged vector is not Galois invariant".into()))
            })
            .collect::<Result<_>>()?;
        self.witt.make(components)
    }

    /// `[y]`, the Teichmüller lift of the adjoined root.
    pub fn teichmuller_y(&self) -> WittVector<Elem> {
        let ring = self.witt.base();
        let mut e = vec![0; self.nvars];
        e[self.ramified] = 1;
        self.witt.teichmuller(&ring.monomial(self.field.one(), e).expect("torus"))
    }
}

/// Result of the trace-splitting experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceSplitReport {
    pub p: u64,
    pub q: u64,
    pub ell: u64,
    pub n: usize,
    pub divisor: RDivisor,
    pub samples: usize,
    /// `T(f^* phi) = phi`.
    pub splitting_failures: usize,
    /// `T(beta)` outside `W_n O_A(D)` or `f^* phi` outside `W_n O_B(f^* D)`.
    pub membership_failures: usize,
    /// `T(w) = w` disagreeing with `sigma(w) = w`.
    pub invariant_failures: usize,
    pub trace_of_y_vanishes: bool,
    pub sigma_order_ell: bool,
    pub pass: bool,
}

/// Samples sections and checks the splitting, membership and invariants.
pub fn trace_split<G: Rng + ?Sized>(
    field: &ExtField,
    ell: u64,
    n: usize,
    divisor: &RDivisor,
    ramified: usize,
    samples: usize,
    rng: &mut G,
) -> Result<TraceSplitReport> {
    let cover = KummerCover::new(field, divisor.coeffs().len(), ramified, ell, n)?;
    let base = AffineSectionSpace::new(field, divisor.clone(), n)?;
    let upstairs = AffineSectionSpace::new(field, cover.pullback_divisor(divisor)?, n)?;
    let mut splitting = 0;
    let mut membership = 0;
    let mut invariant = 0;
    let mut order = true;
    for _ in 0..samples {
        let phi = base.random_member(rng, 3, 2);
        let up = cover.pullback(&phi);
        if !upstairs.contains(&up) {
            membership += 1;
        }
        if cover.trace(&up)? != phi {
            splitting += 1;
        }
        let beta = upstairs.random_member(rng, 3, 2);
        let t = cover.trace(&beta)?;
        if !base.contains(&t) {
            membership += 1;
        }
        // T(w) = w exactly for invariant w, on an invariant and a generic vector
        let averaged = cover.pullback(&t);
        for w in [&beta, &averaged] {
            let fixed = cover.pullback(&cover.trace(w)?) == *w;
            if fixed != cover.is_invariant(w) {
                invariant += 1;
            }
        }
        order &= cover.galois_on_witt(&beta, ell) == beta;
    }
    let y = cover.teichmuller_y();
    let trace_y = cover.trace(&y)? == cover.witt().zero();
    let pass = splitting == 0 && membership == 0 && invariant == 0 && trace_y && order;
    Ok(TraceSplitReport {
        p: field.p(),
        q: field.order(),
        ell,
        n,
        divisor: divisor.clone(),
        samples,
        splitting_failures: splitting,
        membership_failures: membership,
        invariant_failures: invariant,
        trace_of_y_vanishes: trace_y,
        sigma_order_ell: order,
        pass,
    })
}

/// Levels of `W_n O(D)` on affine space whose degree-`e` slot is nonzero.
pub fn affine_admissible_slots(divisor: &RDivisor, e: &Multidegree, n: usize) -> Vec<bool> {
    let p = e.p();
    (0..n)
        .map(|m| {
            e.level_exponent(m).is_some_and(|u| {
                let b = divisor.level_floor(p, m);
                u.iter().zip(&b).all(|(x, y)| x + y >= 0)
            })
        })
        .collect()
}

/// `k`-dimensional multidegrees at scale `p^scale` with `|e_j| <= radius`.
fn affine_window(k: usize, p: u64, scale: u32, radius: i64) -> Vec<Multidegree> {
    let r = radius * p.pow(scale) as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(|num| Multidegree::new(num, p, scale)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaleReport {
    pub p: u64,
    pub q: u64,
    pub ell: u64,
    pub n: usize,
    pub divisor: RDivisor,
    pub etale: bool,
    /// `W_n(F_q)^{ell-1} -> W_n(E)`, `(w_i) -> sum [z^i] w_i`, is bijective.
    pub scalars_free: bool,
    pub pieces: usize,
    pub patterns_checked: usize,
    pub orders_match: bool,
    pub injective: bool,
    pub witness: Option<String>,
    pub holds: bool,
}

/// Checks that `W_n(C) (x)_{W_n(A)} W_n O_A(D) -> W_n O_C(D)` is bijective on
/// every multidegree in `|e_j| <= radius`, where `C = A (x) E` and
/// `E = F_q[z]/(1 + ... + z^{ell-1})`. With the basis `[z^i]` of `W_n(E)`
/// over `W_n(F_q)` the source piece is `M_e^{ell-1}`, mapped by
/// `(m_i) -> sum [z^i] m_i` computed in `W_n(E[x^{+-1}])`.
pub fn etale_pullback_iso_check(field: &ExtField, ell: u64, n: usize, divisor: &RDivisor, radius: i64, bound: u64) -> Result<EtaleReport> {
    let p = field.p();
    let algebra = EtaleAlgebra::cyclotomic(field.clone(), ell)?;
    let rank = algebra.rank();
    let k = divisor.coeffs().len();
    let etale = algebra.is_etale();
    let basis = algebra.basis();

    // scalars: W_n(F_q)^rank -> W_n(E)
    let wq = WittRing::new(field.clone(), n)?;
    let we = WittRing::new(algebra.clone(), n)?;
    let z_lifts: Vec<WittVector<Vec<Fq>>> = basis.iter().map(|b| we.teichmuller(b)).collect();
    let lift_scalar = |w: &WittVector<Fq>| -> WittVector<Vec<Fq>> { we.make(w.components().iter().map(|c| algebra.embed(*c)).collect()).expect("length n") };
    let mut witness = None;
    let source_count = field.order().checked_pow((n * rank) as u32).filter(|c| *c <= bound);
    let scalars_free = match source_count {
        None => return Err(Error::EnumerationBoundExceeded { log_order: (n * rank) as u64 * field.degree() as u64, bound_log: 0 }),
        Some(_) => {
            let singles: Vec<WittVector<Fq>> = crate::divisorial::enumerate_vectors(field, &vec![true; n])
                .into_iter()
                .map(|c| wq.make(c).expect("length n"))
                .collect();
            let mut images: HashSet<WittVector<Vec<Fq>>> = HashSet::new();
            let mut tuples: Vec<WittVector<Vec<Fq>>> = vec![we.zero()];
            for z in &z_lifts {
                let mut next = Vec::with_capacity(tuples.len() * singles.len());
                for acc in &tuples {
                    for w in &singles {
                        next.push(we.add(acc, &we.mul(z, &lift_scalar(w))?)?);
                    }
                }
                tuples = next;
            }
            let total = tuples.len();
            images.extend(tuples);
            let ok = images.len() == total && total as u64 == algebra.order().pow(n as u32);
            if !ok {
                witness = Some(format!("W_{n}(F_q)^{rank} -> W_{n}(E) hits {} of {total}", images.len()));
            }
            ok
        }
    };

    // graded pieces over the Laurent rings
    let ring_c = LaurentRing::new(algebra.clone(), vec![false; k], false);
    let wc = WittRing::new(ring_c.clone(), n)?;
    let z_lifts_c: Vec<WittVector<Laurent<Vec<Fq>>>> = basis
        .iter()
        .map(|b| wc.teichmuller(&ring_c.constant(b.clone())))
        .collect();
    let degrees = affine_window(k, p, (n - 1) as u32, radius);
    let mut seen_patterns: HashSet<Vec<bool>> = HashSet::new();
    let mut orders_match = true;
    let mut injective = true;
    for e in &degrees {
        let slots = affine_admissible_slots(divisor, e, n);
        if !seen_patterns.insert(slots.clone()) {
            continue;
        }
        let open = slots.iter().filter(|s| **s).count();
        let piece: Vec<Vec<Fq>> = crate::divisorial::enumerate_vectors(field, &slots);
        let to_c = |coeffs: &[Fq]| -> Result<WittVector<Laurent<Vec<Fq>>>> {
            let comps = coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| match e.level_exponent(m) {
                    Some(u) if slots[m] => ring_c.monomial(algebra.embed(*c), u),
                    _ => Ok(ring_c.zero()),
                })
                .collect::<Result<_>>()?;
            wc.make(comps)
        };
        let source_size = (piece.len() as u64).checked_pow(rank as u32).filter(|c| *c <= bound).ok_or(
            Error::EnumerationBoundExceeded {
                log_order: (open * rank) as u64 * field.degree() as u64,
                bound_log: 0,
            },
        )?;
        let target_size = algebra.order().pow(open as u32);
        if source_size != target_size {
            orders_match = false;
            witness.get_or_insert_with(|| format!("degree {e}: source {source_size}, target {target_size}"));
        }
        let mut images: Vec<WittVector<Laurent<Vec<Fq>>>> = vec![wc.zero()];
        for z in &z_lifts_c {
            let mut next = Vec::with_capacity(images.len() * piece.len());
            for acc in &images {
                for m in &piece {
                    next.push(wc.add(acc, &wc.mul(z, &to_c(m)?)?)?);
                }
            }
            images = next;
        }
        let count = images.len();
        let mut in_target = true;
        for img in &images {
            for (m, c) in img.components().iter().enumerate() {
                let expected = if slots[m] { e.level_exponent(m) } else { None };
                in_target &= c.support().all(|u| Some(u) == expected.as_ref());
            }
        }
        let distinct: HashSet<_> = images.into_iter().collect();
        if distinct.len() != count || !in_target {
            injective = false;
            witness.get_or_insert_with(|| format!("degree {e}: {} distinct images of {count}", distinct.len()));
        }
    }
    let holds = etale && scalars_free && orders_match && injective;
    Ok(EtaleReport {
        p,
        q: field.order(),
        ell,
        n,
        divisor: divisor.clone(),
        etale,
        scalars_free,
        pieces: degrees.len(),
        patterns_checked: seen_patterns.len(),
        orders_match,
        injective,
        witness,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn sigma_has_order_ell_and_fixes_the_base() {
        let f4 = ExtField::new(4).unwrap();
        let cover = KummerCover::new(&f4, 2, 0, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ring = cover.witt().base().clone();
        for _ in 0..50 {
            let b = ring.random_with(&mut rng, 4, 3);
            let w = cover.witt().make(vec![b.clone(), ring.random_with(&mut rng, 3, 3)]).unwrap();
            assert_eq!(cover.galois_on_witt(&w, 3), w);
            let a = cover.embed(&b);
            assert_eq!(cover.sigma(&a, 1), a);
        }
        let y = cover.teichmuller_y();
        let zy = cover.witt().teichmuller(&ring.scale(&y.components()[0], &cover.zeta()));
        assert_eq!(cover.galois_on_witt(&y, 1), zy);
    }

    #[test]
    fn inverse_of_ell_is_exact() {
        let f4 = ExtField::new(4).unwrap();
        let cover = KummerCover::new(&f4, 1, 0, 3, 3).unwrap();
        let w = WittRing::new(f4, 3).unwrap();
        assert_eq!(w.mul(cover.inv_ell(), &w.from_integer(3)).unwrap(), w.one());
        // the Teichmüller guess [1/3 mod 2] = [1] is not the inverse
        assert_ne!(cover.inv_ell(), &w.one());
    }

    #[test]
    fn pullback_divisors() {
        let f4 = ExtField::new(4).unwrap();
        let cover = KummerCover::new(&f4, 2, 0, 3, 1).unwrap();
        let d = RDivisor::new(vec![r(1, 3), r(1, 2)]).unwrap();
        assert_eq!(cover.pullback_divisor(&d).unwrap().coeffs(), &[r(1, 1), r(1, 2)]);
        let e = RDivisor::new(vec![r(2, 3), r(0, 1)]).unwrap();
        assert_eq!(cover.pullback_divisor(&e).unwrap().coeffs(), &[r(2, 1), r(0, 1)]);
        let bad = RDivisor::new(vec![r(1, 2), r(0, 1)]).unwrap();
        assert!(matches!(cover.pullback_divisor(&bad), Err(Error::DivisorNotCompatible(_))));
    }

    #[test]
    fn bad_configurations() {
        let f4 = ExtField::new(4).unwrap();
        assert!(matches!(KummerCover::new(&f4, 1, 0, 2, 1), Err(Error::OrderDivisibleByP { .. })));
        assert!(matches!(KummerCover::new(&f4, 1, 0, 5, 1), Err(Error::Config(_))));
    }

    #[test]
    fn trace_splits_pullback() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f4 = ExtField::new(4).unwrap();
        let d = RDivisor::new(vec![r(2, 3), r(-1, 2)]).unwrap();
        let rep = trace_split(&f4, 3, 2, &d, 0, 30, &mut rng).unwrap();
        assert!(rep.pass, "{rep:?}");
        let f3 = ExtField::new(3).unwrap();
        let d = RDivisor::new(vec![r(1, 2)]).unwrap();
        let rep = trace_split(&f3, 2, 2, &d, 0, 30, &mut rng).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn trace_of_one_is_one() {
        let f4 = ExtField::new(4).unwrap();
        let cover = KummerCover::new(&f4, 1, 0, 3, 3).unwrap();
        let one = cover.witt().one();
        assert_eq!(cover.trace(&one).unwrap(), one);
    }

    #[test]
    fn etale_check_small() {
        let f4 = ExtField::new(4).unwrap();
        let rep = etale_pullback_iso_check(&f4, 3, 2, &RDivisor::zero(0), 1, 1 << 16).unwrap();
        assert!(rep.holds, "{rep:?}");
        let f3 = ExtField::new(3).unwrap();
        let half = RDivisor::new(vec![r(1, 2)]).unwrap();
        let rep = etale_pullback_iso_check(&f3, 2, 2, &half, 2, 1 << 16).unwrap();
        assert!(rep.holds, "{rep:?}");
    }
}
