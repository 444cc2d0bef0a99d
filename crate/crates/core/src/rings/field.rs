use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BaseRing;
use crate::error::{Error, Result};
use crate::witt::is_prime;

/// The prime field `F_p`, elements in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl BaseRing for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn from_int(&self, k: i64) -> u64 {
        k.rem_euclid(self.p as i64) as u64
    }
    fn frobenius(&self, a: &u64) -> u64 {
        *a
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(self.pow(a, self.p - 2))
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// An element of `F_q`, stored as its coefficient vector over `F_p` packed
/// in base `p` (coefficient of `t^i` is digit `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Fq(pub u32);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({})", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    // exp[i] = g^i for i in 0..q-1, log[exp[i]] = i
    exp: Vec<Fq>,
    log: Vec<u32>,
}

/// `F_q = F_p[t]/(f)` for a fixed monic irreducible `f` of degree `d`.
#[derive(Clone)]
pub struct ExtField {
    p: u64,
    d: u32,
    q: u64,
    modulus: Vec<u64>,
    tables: Arc<Tables>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{} (modulus {:?})", self.q, self.modulus)
    }
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for ExtField {}

const MAX_ORDER: u64 = 1 << 16;

/// Splits `q = p^d`.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2 has a divisor");
    let mut rest = q;
    let mut d = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        d += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p, d))
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m monic
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().expect("nonempty");
        if lead == 0 {
            continue;
        }
        let shift = r.len() - dm;
        for (i, &c) in m[..dm].iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * lead % p) % p;
        }
    }
    r
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    for deg in 1..=d / 2 {
        let count = p.pow(deg as u32);
        for code in 0..count {
            let mut g: Vec<u64> = (0..deg).map(|i| code / p.pow(i as u32) % p).collect();
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `d` over `F_p`, ordering candidates
/// by the base-`p` value of their lower coefficients. Gives `t^2 + t + 1`
/// for `F_4`.
pub fn default_modulus(p: u64, d: u32) -> Vec<u64> {
    for code in 0..p.pow(d) {
        let mut f: Vec<u64> = (0..d).map(|i| code / p.pow(i) % p).collect();
        f.push(1);
        if (f[0] != 0 || d == 1)
            && is_irreducible(&f, p) {
                return f;
            }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl ExtField {
    /// `F_q` with the default modulus.
    pub fn new(q: u64) -> Result<Self> {
        let (p, d) = prime_power(q)?;
        Self::with_modulus(p, default_modulus(p, d))
    }

    /// `F_p[t]/(f)`; `modulus` lists the coefficients of the monic `f` from
    /// the constant term up.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let d = modulus.len() as u32 - 1;
        if d == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Config(format!("modulus {modulus:?} is not monic over F_{p}")));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Config(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let q = p.pow(d);
        if q > MAX_ORDER {
            return Err(Error::Config(format!("F_{q} is larger than supported")));
        }
        let mut field = ExtField {
            p,
            d,
            q,
            modulus,
            tables: Arc::new(Tables {
                exp: Vec::new(),
                log: Vec::new(),
            }),
        };
        field.tables = Arc::new(field.build_tables());
        Ok(field)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        for cand in 1..q as u32 {
            let g = Fq(cand);
            let mut exp = Vec::with_capacity(q - 1);
            let mut x = Fq(1);
            let mut seen = vec![false; q];
            let mut ok = true;
            for _ in 0..q - 1 {
                if seen[x.0 as usize] {
                    ok = false;
                    break;
                }
                seen[x.0 as usize] = true;
                exp.push(x);
                x = self.slow_mul(x, g);
            }
            if ok {
                let mut log = vec![0; q];
                for (i, e) in exp.iter().enumerate() {
                    log[e.0 as usize] = i as u32;
                }
                return Tables { exp, log };
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    fn slow_mul(&self, a: Fq, b: Fq) -> Fq {
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; ca.len() + cb.len()];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.element(&poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Element with the given coefficients over `F_p` (constant term first).
    pub fn element(&self, coeffs: &[u64]) -> Fq {
        let mut packed = 0u64;
        let mut scale = 1u64;
        for &c in coeffs.iter().take(self.d as usize) {
            packed += (c % self.p) * scale;
            scale *= self.p;
        }
        Fq(packed as u32)
    }

    pub fn coeffs(&self, a: Fq) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.d)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    /// All `q` elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q as u32).map(Fq)
    }

    /// The basis `1, t, ..., t^{d-1}` of `F_q` over `F_p`.
    pub fn prime_basis(&self) -> Vec<Fq> {
        (0..self.d).map(|i| Fq(self.p.pow(i) as u32)).collect()
    }

    /// The fixed generator of the multiplicative group.
    pub fn generator(&self) -> Fq {
        self.tables.exp[1 % self.tables.exp.len()]
    }

    /// A primitive `ell`-th root of unity, if `ell | q - 1`.
    pub fn primitive_root_of_unity(&self, ell: u64) -> Option<Fq> {
        if ell == 0 || !(self.q - 1).is_multiple_of(ell) {
            return None;
        }
        Some(self.tables.exp[((self.q - 1) / ell) as usize % self.tables.exp.len()])
    }

    /// Order of `a` in the multiplicative group.
    pub fn multiplicative_order(&self, a: Fq) -> Option<u64> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        let l = self.tables.log[a.0 as usize] as u64;
        Some(n / num_integer::gcd(n, l))
    }
}

impl BaseRing for ExtField {
    type Elem = Fq;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> Fq {
        Fq(0)
    }
    fn one(&self) -> Fq {
        Fq(1)
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        let p = self.p as u32;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut scale = 1;
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale *= p;
        }
        Fq(out)
    }
    fn neg(&self, a: &Fq) -> Fq {
        if self.p == 2 {
            return *a;
        }
        let p = self.p as u32;
        let mut x = a.0;
        let mut out = 0;
        let mut scale = 1;
        while x > 0 {
            out += ((p - x % p) % p) * scale;
            x /= p;
            scale *= p;
        }
        Fq(out)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        let t = &self.tables;
        let n = t.exp.len();
        let l = (t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize) % n;
        t.exp[l]
    }
    fn pow(&self, a: &Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq(1);
        }
        if a.0 == 0 {
            return Fq(0);
        }
        let t = &self.tables;
        let n = t.exp.len() as u64;
        let l = (t.log[a.0 as usize] as u64 * (e % n)) % n;
        t.exp[l as usize]
    }
    fn inv(&self, a: &Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let t = &self.tables;
        let n = t.exp.len();
        Some(t.exp[(n - t.log[a.0 as usize] as usize) % n])
    }
    fn from_int(&self, k: i64) -> Fq {
        Fq(k.rem_euclid(self.p as i64) as u32)
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Fq {
        Fq(rng.gen_range(0..self.q as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_uses_t2_t_1() {
        let f = ExtField::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let t = f.element(&[0, 1]);
        // t^2 = t + 1
        assert_eq!(f.mul(&t, &t), f.element(&[1, 1]));
    }

    #[test]
    fn frobenius_has_order_d_and_fixes_prime_field() {
        for q in [4u64, 8, 9, 25, 27] {
            let f = ExtField::new(q).unwrap();
            let d = f.degree();
            for a in f.elements() {
                let mut x = a;
                for _ in 0..d {
                    x = f.frobenius(&x);
                }
                assert_eq!(x, a);
            }
            let fixed = f.elements().filter(|a| f.frobenius(a) == *a).count() as u64;
            assert_eq!(fixed, f.p());
            // order exactly d: some element moves under every smaller power
            for k in 1..d {
                assert!(f.elements().any(|a| {
                    let mut x = a;
                    for _ in 0..k {
                        x = f.frobenius(&x);
                    }
                    x != a
                }));
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_f9() {
        let f = ExtField::new(9).unwrap();
        let els: Vec<Fq> = f.elements().collect();
        for a in &els {
            assert_eq!(f.add(a, &f.neg(a)), f.zero());
            if a.0 != 0 {
                assert_eq!(f.mul(a, &f.inv(a).unwrap()), f.one());
            }
            for b in &els {
                assert_eq!(f.mul(a, b), f.slow_mul(*a, *b));
                for c in &els {
                    let lhs = f.mul(a, &f.add(b, c));
                    let rhs = f.add(&f.mul(a, b), &f.mul(a, c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn roots_of_unity_exist_iff_ell_divides_q_minus_one() {
        let f4 = ExtField::new(4).unwrap();
        let z = f4.primitive_root_of_unity(3).unwrap();
        assert_eq!(f4.multiplicative_order(z), Some(3));
        assert!(f4.primitive_root_of_unity(5).is_none());
        let f3 = ExtField::new(3).unwrap();
        assert_eq!(f3.primitive_root_of_unity(2), Some(Fq(2)));
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(ExtField::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert!(PrimeField::new(4).is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 1 = (t + 1)^2 over F_2
        assert!(ExtField::with_modulus(2, vec![1, 0, 1]).is_err());
    }
}
