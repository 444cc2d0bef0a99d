//! Teichmüller lifts of line bundles on `P^N` and their comparison with the
//! Witt divisorial sheaves of Cartier divisors.

use rand::Rng;

use crate::divisor::RDivisor;
use crate::divisorial::WittSectionSpace;
use crate::error::{Error, Result};
use crate::rings::{BaseRing, Laurent, LaurentRing};
use crate::witt::{WittRing, WittVector};

/// Transition functions `f_ij` of a line bundle on the standard cover of
/// `P^N`, as functions on the torus.
#[derive(Debug, Clone)]
pub struct TransitionCocycle<K: BaseRing> {
    ring: LaurentRing<K>,
    f: Vec<Vec<Laurent<K::Elem>>>,
}

impl<K: BaseRing> TransitionCocycle<K> {
    /// Checks `f_ij f_jk f_ki = 1` for every triple of charts.
    pub fn new(coeffs: K, f: Vec<Vec<Laurent<K::Elem>>>) -> Result<Self> {
        let k = f.len();
        if k == 0 || f.iter().any(|row| row.len() != k) {
            return Err(Error::Config("transition functions need a square (N+1)x(N+1) table".into()));
        }
        let ring = LaurentRing::projective_torus(coeffs, k - 1);
        if let Some(bad) = f.iter().flatten().find(|x| !ring.contains(x)) {
            return Err(Error::Config(format!("{bad:?} is not a degree-zero function on the torus")));
        }
        let one = ring.one();
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if ring.mul(&ring.mul(&f[i][j], &f[j][l]), &f[l][i]) != one {
                        return Err(Error::NotACocycle(i, j, l));
                    }
                }
            }
        }
        Ok(TransitionCocycle { ring, f })
    }

    /// `O(d)` with `f_ij = (x_j / x_i)^d`.
    pub fn line_bundle(coeffs: K, dim: usize, d: i64) -> Self {
        let ring = LaurentRing::projective_torus(coeffs, dim);
        let one = ring.coeff_ring().one();
        let f = (0..=dim)
            .map(|i| {
                (0..=dim)
                    .map(|j| {
                        let mut e = vec![0; dim + 1];
                        e[j] += d;
                        e[i] -= d;
                        ring.monomial(one.clone(), e).expect("degree zero")
                    })
                    .collect()
            })
            .collect();
        TransitionCocycle { ring, f }
    }

    pub fn dim(&self) -> usize {
        self.f.len() - 1
    }

    pub fn ring(&self) -> &LaurentRing<K> {
        &self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent<K::Elem> {
        &self.f[i][j]
    }
}

/// The lifted cocycle `[f_ij]` in `W_n` of the torus ring.
#[derive(Debug, Clone)]
pub struct WittCocycle<K: BaseRing> {
    witt: WittRing<LaurentRing<K>>,
    lifts: Vec<Vec<WittVector<Laurent<K::Elem>>>>,
}

impl<K: BaseRing> WittCocycle<K> {
    pub fn witt(&self) -> &WittRing<LaurentRing<K>> {
        &self.witt
    }

    pub fn get(&self, i: usize, j: usize) -> &WittVector<Laurent<K::Elem>> {
        &self.lifts[i][j]
    }

    /// `[f_ij][f_jk][f_ki] = 1` in `W_n`, computed with the Witt product.
    pub fn check(&self) -> Result<()> {
        let w = &self.witt;
        let one = w.one();
        let k = self.lifts.len();
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let prod = w.mul(&w.mul(&self.lifts[i][j], &self.lifts[j][l])?, &self.lifts[l][i])?;
                    if prod != one {
                        return Err(Error::NotACocycle(i, j, l));
                    }
                }
            }
        }
        Ok(())
    }

    /// The first component of every lift.
    pub fn level_one(&self) -> Vec<Vec<Laurent<K::Elem>>> {
        self.lifts
            .iter()
            .map(|row| row.iter().map(|v| v.components()[0].clone()).collect())
            .collect()
    }
}

/// Lifts every transition function to its Teichmüller vector in `W_n` and
/// verifies the cocycle condition there.
pub fn teichmuller_cocycle<K: BaseRing>(cocycle: &TransitionCocycle<K>, n: usize) -> Result<WittCocycle<K>> {
    let witt = WittRing::new(cocycle.ring.clone(), n)?;
    let lifts = cocycle
        .f
        .iter()
        .map(|row| row.iter().map(|f| witt.teichmuller(f)).collect())
        .collect();
    let out = WittCocycle { witt, lifts };
    out.check()?;
    Ok(out)
}

/// Exponent of the local equation `f_i` of an integral `D` on `U_i`:
/// `D|_{U_i} = div(f_i)|_{U_i}` with `f_i = prod_{j != i} (x_j / x_i)^{a_j}`.
pub fn local_equation(divisor: &RDivisor, chart: usize) -> Result<Vec<i64>> {
    if !divisor.is_integral() {
        return Err(Error::NotCartier(divisor.to_string()));
    }
    if chart > divisor.dim() {
        return Err(Error::ChartMismatch {
            chart: vec![chart],
            reason: format!("P^{} has no chart U_{chart}", divisor.dim()),
        });
    }
    let mut u = divisor.floor();
    let total: i64 = u.iter().sum();
    u[chart] -= total;
    Ok(u)
}

/// A Witt vector on the torus whose level-`m` exponents sit within a unit or
/// two of the bounds of `W_n O(D)` on `U_i`, so that both outcomes of the
/// membership test are common.
fn boundary_sample<K: BaseRing, G: Rng + ?Sized>(space: &WittSectionSpace<K>, rng: &mut G) -> WittVector<Laurent<K::Elem>> {
    let torus = space.witt().base();
    let pivot = space.chart()[0];
    let components = (0..space.length())
        .map(|m| {
            let bounds = space.level(m).bounds();
            let terms: Vec<_> = (0..rng.gen_range(0..=2))
                .map(|_| {
                    let mut u: Vec<i64> = bounds.iter().map(|b| -b + rng.gen_range(-1..=2)).collect();
                    u[pivot] = 0;
                    u[pivot] = -u.iter().sum::<i64>();
                    (torus.coeff_ring().random(rng), u)
                })
                .collect();
            torus.make(terms).expect("degree zero")
        })
        .collect();
    space.witt().make(components).expect("one component per level")
}

/// On every chart `U_i` of `P^N`, compares `W_n O(D)(U_i)` with
/// `[f_i^{-1}] W_n(O(U_i))` on `samples` draws of each of three kinds:
/// vectors near the membership boundary (both tests must agree), members of
/// `W_n O(D)` (must land in `W_n(O(U_i))` after `[f_i]`), and elements of
/// `W_n(O(U_i))` (must land in `W_n O(D)` after `[f_i^{-1}]`).
pub fn div_vs_teichmuller<K: BaseRing, G: Rng + ?Sized>(
    coeffs: &K,
    divisor: &RDivisor,
    n: usize,
    samples: usize,
    rng: &mut G,
) -> Result<bool> {
    if !divisor.is_integral() {
        return Err(Error::NotCartier(divisor.to_string()));
    }
    let one = coeffs.one();
    for i in 0..=divisor.dim() {
        let space = WittSectionSpace::new(coeffs.clone(), divisor.clone(), n, &[i])?;
        let w = space.witt();
        let torus = w.base();
        let u = local_equation(divisor, i)?;
        let f = w.teichmuller(&torus.monomial(one.clone(), u.clone())?);
        let f_inv = w.teichmuller(&torus.monomial(one.clone(), u.iter().map(|x| -x).collect())?);
        let regular = |v: &WittVector<Laurent<K::Elem>>| v.components().iter().all(|c| space.chart_ring().contains(c));
        for _ in 0..samples {
            let phi = boundary_sample(&space, rng);
            if space.contains(&phi)? != regular(&w.mul(&f, &phi)?) {
                return Ok(false);
            }
            let member = space.random_member(rng, 3, 2);
            if !regular(&w.mul(&f, member.vector())?) {
                return Ok(false);
            }
            let psi = space.random_scalar(rng, 3, 2);
            if !space.contains(&w.mul(&f_inv, &psi)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
