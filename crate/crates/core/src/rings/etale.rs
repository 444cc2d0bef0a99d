use rand::Rng;

use super::{BaseRing, ExtField, Fq};
use crate::error::{Error, Result};

/// `F_q[z]/(f)` for a monic `f`; a product of finite fields when `f` is
/// separable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleAlgebra {
    field: ExtField,
    // monic, constant term first
    modulus: Vec<Fq>,
}

fn trim(f: &mut Vec<Fq>) {
    while f.last() == Some(&Fq(0)) {
        f.pop();
    }
}

/// Remainder of `a` by a nonzero `b` over `F_q`.
fn poly_rem(field: &ExtField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = field.inv(b.last().unwrap()).expect("nonzero leading coefficient");
    while r.len() > db {
        let lead = field.mul(r.last().unwrap(), &lead_inv);
        let shift = r.len() - 1 - db;
        for (i, c) in b.iter().enumerate() {
            let t = field.mul(&lead, c);
            r[shift + i] = field.sub(&r[shift + i], &t);
        }
        trim(&mut r);
    }
    r
}

fn poly_gcd(field: &ExtField, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(field, &a, &b);
        a = b;
        b = r;
    }
    a
}

impl EtaleAlgebra {
    pub fn new(field: ExtField, modulus: Vec<Fq>) -> Result<Self> {
        if modulus.len() < 2 || modulus.last() != Some(&field.one()) {
            return Err(Error::Config("modulus must be monic of positive degree".into()));
        }
        Ok(EtaleAlgebra { field, modulus })
    }

    /// `F_q[z]/(z^{ell-1} + ... + z + 1)`.
    pub fn cyclotomic(field: ExtField, ell: u64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::Config(format!("ell = {ell} must be at least 2")));
        }
        let modulus = vec![field.one(); ell as usize];
        Self::new(field, modulus)
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    /// Rank over `F_q`.
    pub fn rank(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> u64 {
        self.field.order().pow(self.rank() as u32)
    }

    /// `gcd(f, f') = 1`: the derivative of the modulus is a unit.
    pub fn is_etale(&self) -> bool {
        let f = &self.field;
        let deriv: Vec<Fq> = self.modulus[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| f.mul(c, &f.from_int(i as i64 + 1)))
            .collect();
        let g = poly_gcd(f, &self.modulus, &deriv);
        g.len() == 1
    }

    /// The basis `1, z, ..., z^{r-1}` over `F_q`.
    pub fn basis(&self) -> Vec<Vec<Fq>> {
        (0..self.rank())
            .map(|i| {
                let mut v = vec![Fq(0); self.rank()];
                v[i] = self.field.one();
                v
            })
            .collect()
    }

    /// Embeds `F_q` as constants.
    pub fn embed(&self, c: Fq) -> Vec<Fq> {
        let mut v = vec![Fq(0); self.rank()];
        v[0] = c;
        v
    }

    /// All elements, in lexicographic order of coefficient vectors.
    pub fn elements(&self) -> Vec<Vec<Fq>> {
        let q = self.field.order() as u32;
        let r = self.rank();
        let total = self.order();
        (0..total)
            .map(|mut code| {
                (0..r)
                    .map(|_| {
                        let c = Fq((code % q as u64) as u32);
                        code /= q as u64;
                        c
                    })
                    .collect()
            })
            .collect()
    }
}

impl BaseRing for EtaleAlgebra {
    type Elem = Vec<Fq>;

    fn characteristic(&self) -> u64 {
        self.field.p()
    }
    fn zero(&self) -> Vec<Fq> {
        vec![Fq(0); self.rank()]
    }
    fn one(&self) -> Vec<Fq> {
        self.embed(self.field.one())
    }
    fn add(&self, a: &Vec<Fq>, b: &Vec<Fq>) -> Vec<Fq> {
        a.iter().zip(b).map(|(x, y)| self.field.add(x, y)).collect()
    }
    fn neg(&self, a: &Vec<Fq>) -> Vec<Fq> {
        a.iter().map(|x| self.field.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<Fq>, b: &Vec<Fq>) -> Vec<Fq> {
        let f = &self.field;
        let mut prod = vec![Fq(0); 2 * self.rank()];
        for (i, x) in a.iter().enumerate() {
            if x.0 == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
            }
        }
        let mut r = poly_rem(f, &prod, &self.modulus);
        r.resize(self.rank(), Fq(0));
        r
    }
    fn from_int(&self, k: i64) -> Vec<Fq> {
        self.embed(self.field.from_int(k))
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Vec<Fq> {
        (0..self.rank()).map(|_| self.field.random(rng)).collect()
    }
}
