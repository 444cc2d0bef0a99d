//! Ghost components and the universal Witt polynomials.
//!
//! The sum, negation and product polynomials are all produced by the same
//! exact-division recursion: given a target ghost sequence `g_m`, the
//! `m`-th polynomial is `(g_m - sum_{i<m} p^i Q_i^{p^{m-i}}) / p^m`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Pow;

use super::poly::{grlex_desc, x_vars, xy_vars, UniversalPoly, Var};
use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `w_n(z_0, ..., z_n) = sum_i p^i z_i^{p^{n-i}}` with `n = components.len() - 1`.
pub fn ghost(components: &[UniversalPoly], p: u64) -> Result<UniversalPoly> {
    let n = components
        .len()
        .checked_sub(1)
        .expect("ghost needs at least one component");
    let vars = components[0].vars().to_vec();
    let mut total = UniversalPoly::zero(vars);
    for (i, z) in components.iter().enumerate() {
        let term = z
            .pow(p.pow((n - i) as u32))?
            .scale(&BigInt::from(p).pow(i as u32));
        total = total.add(&term);
    }
    Ok(total)
}

/// `w_n` in the variables `x_0..x_n`.
pub fn ghost_x(p: u64, n: usize) -> UniversalPoly {
    let vars = x_vars(n);
    let xs: Vec<UniversalPoly> = (0..=n)
        .map(|i| UniversalPoly::var(vars.clone(), Var::X(i)))
        .collect();
    ghost(&xs, p).expect("single-variable powers never overflow")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyKind {
    Sum,
    Neg,
    Prod,
}

impl PolyKind {
    pub fn letter(self) -> char {
        match self {
            PolyKind::Sum => 'S',
            PolyKind::Neg => 'I',
            PolyKind::Prod => 'P',
        }
    }

    fn from_letter(c: &str) -> Option<Self> {
        match c {
            "S" => Some(PolyKind::Sum),
            "I" => Some(PolyKind::Neg),
            "P" => Some(PolyKind::Prod),
            _ => None,
        }
    }

    /// Variables of the polynomial with index `m`.
    pub fn vars(self, m: usize) -> Vec<Var> {
        match self {
            PolyKind::Neg => x_vars(m),
            PolyKind::Sum | PolyKind::Prod => xy_vars(m),
        }
    }

    /// Weighted degree of the index-`m` polynomial when `deg x_i = deg y_i = p^i`.
    pub fn expected_degree(self, p: u64, m: usize) -> u64 {
        let base = p.pow(m as u32);
        match self {
            PolyKind::Prod => 2 * base,
            PolyKind::Sum | PolyKind::Neg => base,
        }
    }
}

fn ghost_target(kind: PolyKind, p: u64, n: usize, m: usize) -> Result<UniversalPoly> {
    let vars = kind.vars(n);
    let w = |v: fn(usize) -> Var| -> Result<UniversalPoly> {
        let comps: Vec<UniversalPoly> = (0..=m)
            .map(|i| UniversalPoly::var(vars.clone(), v(i)))
            .collect();
        ghost(&comps, p)
    };
    match kind {
        PolyKind::Sum => Ok(w(Var::X)?.add(&w(Var::Y)?)),
        PolyKind::Neg => Ok(w(Var::X)?.neg()),
        PolyKind::Prod => w(Var::X)?.mul(&w(Var::Y)?),
    }
}

fn recursion(kind: PolyKind, p: u64, n: usize) -> Result<Vec<UniversalPoly>> {
    require_prime(p)?;
    let vars = kind.vars(n);
    let pb = BigInt::from(p);
    let mut out: Vec<UniversalPoly> = Vec::with_capacity(n + 1);
    // powers[i] = Q_i^{p^{m-1-i}} at the start of step m
    let mut powers: Vec<UniversalPoly> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut numerator = ghost_target(kind, p, n, m)?;
        for (i, pw) in powers.iter_mut().enumerate() {
            *pw = pw.pow(p)?;
            numerator = numerator.sub(&pw.scale(&pb.clone().pow(i as u32)));
        }
        let q = numerator
            .div_exact(&pb.clone().pow(m as u32))
            .ok_or(Error::InexactDivision {
                kind: kind.letter(),
                p,
                m,
            })?;
        debug_assert_eq!(q.vars(), &vars[..]);
        powers.push(q.clone());
        out.push(q);
    }
    Ok(out)
}

/// `S_0..S_n` over `x_0, y_0, ..., x_n, y_n`.
pub fn sum_polys(p: u64, n: usize) -> Result<Vec<UniversalPoly>> {
    recursion(PolyKind::Sum, p, n)
}

/// `I_0..I_n` over `x_0..x_n`, determined by `w_m(I) = -w_m(x)`.
pub fn neg_polys(p: u64, n: usize) -> Result<Vec<UniversalPoly>> {
    recursion(PolyKind::Neg, p, n)
}

/// `P_0..P_n` over `x_0, y_0, ..., x_n, y_n`, determined by
/// `w_m(P) = w_m(x) w_m(y)`.
pub fn prod_polys(p: u64, n: usize) -> Result<Vec<UniversalPoly>> {
    recursion(PolyKind::Prod, p, n)
}

/// True iff every monomial of `poly` has weighted degree exactly `p^n`
/// under `deg x_i = deg y_i = p^i`.
pub fn homogeneity_check(poly: &UniversalPoly, p: u64, n: usize) -> bool {
    is_weighted_homogeneous(poly, p, p.pow(n as u32))
}

pub fn is_weighted_homogeneous(poly: &UniversalPoly, p: u64, degree: u64) -> bool {
    poly.weighted_degrees(p).into_iter().all(|d| d == degree)
}

/// The universal polynomials for one `(p, n)`: indices `0..=n` of each kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittPolys {
    pub p: u64,
    pub n: usize,
    pub sums: Vec<UniversalPoly>,
    pub negs: Vec<UniversalPoly>,
    pub prods: Vec<UniversalPoly>,
}

impl WittPolys {
    pub fn compute(p: u64, n: usize) -> Result<Self> {
        Ok(WittPolys {
            p,
            n,
            sums: sum_polys(p, n)?,
            negs: neg_polys(p, n)?,
            prods: prod_polys(p, n)?,
        })
    }

    pub fn of_kind(&self, kind: PolyKind) -> &[UniversalPoly] {
        match kind {
            PolyKind::Sum => &self.sums,
            PolyKind::Neg => &self.negs,
            PolyKind::Prod => &self.prods,
        }
    }

    /// Assembled from the per-kind process cache.
    pub fn cached(p: u64, n: usize) -> Result<WittPolys> {
        Ok(WittPolys {
            p,
            n,
            sums: cached_polys(PolyKind::Sum, p, n)?.to_vec(),
            negs: cached_polys(PolyKind::Neg, p, n)?.to_vec(),
            prods: cached_polys(PolyKind::Prod, p, n)?.to_vec(),
        })
    }

    /// Loads `dir/witt-p{p}-n{n}.txt` if present, otherwise computes and
    /// writes it.
    pub fn load_or_compute(dir: &Path, p: u64, n: usize) -> Result<WittPolys> {
        let path = cache_path(dir, p, n);
        if let Ok(text) = std::fs::read_to_string(&path) {
            let polys = WittPolys::from_cache_text(&text)?;
            if polys.p == p && polys.n == n {
                return Ok(polys);
            }
        }
        let polys = WittPolys::compute(p, n)?;
        std::fs::create_dir_all(dir).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(&path, polys.to_cache_text()).map_err(|e| Error::Config(e.to_string()))?;
        Ok(polys)
    }

    /// One polynomial per line: `S <p> <m> : <coeff> [<exps>]; ...`, kinds in
    /// the order S, I, P and terms in canonical order.
    pub fn to_cache_text(&self) -> String {
        let mut out = String::new();
        for kind in [PolyKind::Sum, PolyKind::Neg, PolyKind::Prod] {
            for (m, poly) in self.of_kind(kind).iter().enumerate() {
                out.push_str(&cache_line(kind, self.p, m, poly));
                out.push('\n');
            }
        }
        out
    }

    pub fn from_cache_text(text: &str) -> Result<WittPolys> {
        let mut p = None;
        let mut kinds: HashMap<PolyKind, Vec<(usize, UniversalPoly)>> = HashMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (kind, lp, m, poly) = parse_cache_line(line)?;
            if *p.get_or_insert(lp) != lp {
                return Err(Error::Parse(format!("mixed primes in cache: {line}")));
            }
            kinds.entry(kind).or_default().push((m, poly));
        }
        let p = p.ok_or_else(|| Error::Parse("empty cache file".into()))?;
        let mut n = None;
        let mut collect = |kind: PolyKind| -> Result<Vec<UniversalPoly>> {
            let mut list = kinds.remove(&kind).unwrap_or_default();
            list.sort_by_key(|(m, _)| *m);
            if list.iter().enumerate().any(|(i, (m, _))| i != *m) {
                return Err(Error::Parse(format!("{} indices not contiguous", kind.letter())));
            }
            let len = list.len();
            if len == 0 || *n.get_or_insert(len - 1) != len - 1 {
                return Err(Error::Parse(format!("{} has the wrong length", kind.letter())));
            }
            let top = kind.vars(len - 1);
            list.into_iter().map(|(_, q)| q.extend_vars(top.clone())).collect()
        };
        let sums = collect(PolyKind::Sum)?;
        let negs = collect(PolyKind::Neg)?;
        let prods = collect(PolyKind::Prod)?;
        Ok(WittPolys {
            p,
            n: sums.len() - 1,
            sums,
            negs,
            prods,
        })
    }
}

pub fn cache_path(dir: &Path, p: u64, n: usize) -> PathBuf {
    dir.join(format!("witt-p{p}-n{n}.txt"))
}

/// Serializes one polynomial. Exponent vectors are written over the index-`m`
/// variable list, so `S_m` has `2(m+1)` entries however it was computed.
pub fn cache_line(kind: PolyKind, p: u64, m: usize, poly: &UniversalPoly) -> String {
    let arity = kind.vars(m).len();
    assert!(poly.used_arity() <= arity, "polynomial uses variables beyond index {m}");
    let mut terms: Vec<(BigInt, Vec<u64>)> = poly
        .terms()
        .into_iter()
        .map(|(c, mut e)| {
            e.truncate(arity);
            (c, e)
        })
        .collect();
    terms.sort_by(|a, b| grlex_desc(&a.1, &b.1));
    let mut line = format!("{} {p} {m} :", kind.letter());
    for (k, (c, exps)) in terms.iter().enumerate() {
        let sep = if k == 0 { " " } else { "; " };
        let exps: Vec<String> = exps.iter().map(u64::to_string).collect();
        let _ = write!(line, "{sep}{c} [{}]", exps.join(","));
    }
    line
}

pub fn parse_cache_line(line: &str) -> Result<(PolyKind, u64, usize, UniversalPoly)> {
    let bad = |what: &str| Error::Parse(format!("{what} in cache line `{line}`"));
    let (head, body) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    let mut head = head.split_whitespace();
    let kind = head
        .next()
        .and_then(PolyKind::from_letter)
        .ok_or_else(|| bad("unknown polynomial kind"))?;
    let p: u64 = head
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad prime"))?;
    let m: usize = head
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad index"))?;
    let vars = kind.vars(m);
    let mut terms = Vec::new();
    for term in body.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (c, exps) = term.split_once(' ').ok_or_else(|| bad("malformed term"))?;
        let c: BigInt = c.parse().map_err(|_| bad("bad coefficient"))?;
        let exps = exps
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| bad("exponent vector must be bracketed"))?;
        let exps: Vec<u64> = exps
            .split(',')
            .map(|e| e.trim().parse().map_err(|_| bad("bad exponent")))
            .collect::<Result<_>>()?;
        terms.push((c, exps));
    }
    let poly = UniversalPoly::from_terms(vars, terms)?;
    Ok((kind, p, m, poly))
}

/// Terms `(coefficient mod p, [(variable position, exponent)])`.
pub type ReducedPoly = Vec<(u64, Vec<(usize, u64)>)>;

type KindCache<T> = OnceLock<Mutex<HashMap<(PolyKind, u64, usize), Arc<T>>>>;

fn cached_with<T>(
    cache: &'static KindCache<T>,
    key: (PolyKind, u64, usize),
    make: impl FnOnce() -> Result<T>,
) -> Result<Arc<T>> {
    let cache = cache.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    // computed outside the lock; a racing thread may duplicate the work
    let fresh = Arc::new(make()?);
    let mut guard = cache.lock().expect("cache poisoned");
    Ok(guard.entry(key).or_insert(fresh).clone())
}

/// Indices `0..=n` of one kind, computed at most once per process.
pub fn cached_polys(kind: PolyKind, p: u64, n: usize) -> Result<Arc<Vec<UniversalPoly>>> {
    static CACHE: KindCache<Vec<UniversalPoly>> = OnceLock::new();
    cached_with(&CACHE, (kind, p, n), || recursion(kind, p, n))
}

/// Like [`cached_polys`], reduced mod p for evaluation inside a
/// characteristic-p ring.
pub fn cached_reduced(kind: PolyKind, p: u64, n: usize) -> Result<Arc<Vec<ReducedPoly>>> {
    static CACHE: KindCache<Vec<ReducedPoly>> = OnceLock::new();
    cached_with(&CACHE, (kind, p, n), || {
        Ok(cached_polys(kind, p, n)?.iter().map(|q| q.reduce_mod(p)).collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(vars: Vec<Var>, terms: &[(i64, &[u64])]) -> UniversalPoly {
        UniversalPoly::from_terms(
            vars,
            terms.iter().map(|(c, e)| (BigInt::from(*c), e.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn ghost_examples() {
        assert_eq!(ghost_x(2, 1), poly(x_vars(1), &[(1, &[2, 0]), (2, &[0, 1])]));
        assert_eq!(ghost_x(7, 0), poly(x_vars(0), &[(1, &[1])]));
        assert_eq!(
            ghost_x(3, 2),
            poly(x_vars(2), &[(1, &[9, 0, 0]), (3, &[0, 3, 0]), (9, &[0, 0, 1])])
        );
    }

    #[test]
    fn first_sum_polynomials() {
        let s = sum_polys(2, 1).unwrap();
        assert_eq!(s[0], poly(xy_vars(1), &[(1, &[1, 0, 0, 0]), (1, &[0, 1, 0, 0])]));
        assert_eq!(
            s[1],
            poly(
                xy_vars(1),
                &[(1, &[0, 0, 1, 0]), (1, &[0, 0, 0, 1]), (-1, &[1, 1, 0, 0])]
            )
        );
        let s = sum_polys(3, 1).unwrap();
        assert_eq!(
            s[1],
            poly(
                xy_vars(1),
                &[
                    (1, &[0, 0, 1, 0]),
                    (1, &[0, 0, 0, 1]),
                    (-1, &[2, 1, 0, 0]),
                    (-1, &[1, 2, 0, 0])
                ]
            )
        );
    }

    #[test]
    fn negation_for_odd_primes_is_componentwise() {
        for p in [3, 5] {
            let negs = neg_polys(p, 3).unwrap();
            for (m, q) in negs.iter().enumerate() {
                let expect = UniversalPoly::var(x_vars(3), Var::X(m)).neg();
                assert_eq!(q, &expect, "p = {p}, m = {m}");
            }
        }
    }

    #[test]
    fn negation_for_two() {
        let negs = neg_polys(2, 1).unwrap();
        assert_eq!(negs[0], poly(x_vars(1), &[(-1, &[1, 0])]));
        assert_eq!(negs[1], poly(x_vars(1), &[(-1, &[0, 1]), (-1, &[2, 0])]));
    }

    #[test]
    fn homogeneity_examples() {
        let s = sum_polys(2, 1).unwrap();
        assert!(homogeneity_check(&s[0], 2, 0));
        assert!(homogeneity_check(&s[1], 2, 1));
        let mixed = poly(x_vars(1), &[(1, &[1, 0]), (1, &[0, 1])]);
        assert!(!homogeneity_check(&mixed, 2, 0));
        assert!(!homogeneity_check(&mixed, 2, 1));
    }

    #[test]
    fn product_polynomials_start_with_the_product() {
        let pr = prod_polys(2, 1).unwrap();
        assert_eq!(pr[0], poly(xy_vars(1), &[(1, &[1, 1, 0, 0])]));
        // w_1: x0^2 y0^2 + 2(x0^2 y1 + y0^2 x1) + 4 x1 y1 = P_0^2 + 2 P_1
        assert_eq!(
            pr[1],
            poly(
                xy_vars(1),
                &[(1, &[2, 0, 0, 1]), (1, &[0, 2, 1, 0]), (2, &[0, 0, 1, 1])]
            )
        );
    }

    #[test]
    fn rejects_composite() {
        assert_eq!(sum_polys(4, 1), Err(Error::NotPrime(4)));
    }

    #[test]
    fn cache_text_round_trip() {
        let polys = WittPolys::compute(3, 2).unwrap();
        let text = polys.to_cache_text();
        let back = WittPolys::from_cache_text(&text).unwrap();
        assert_eq!(back, polys);
        assert_eq!(back.to_cache_text(), text);
        assert!(text.starts_with("S 3 0 : 1 [1,0]; 1 [0,1]\n"));
    }

    #[test]
    fn cache_file_is_reused() {
        let dir = std::env::temp_dir().join(format!("wittdiv-cache-{}", std::process::id()));
        let first = WittPolys::load_or_compute(&dir, 2, 2).unwrap();
        let second = WittPolys::load_or_compute(&dir, 2, 2).unwrap();
        assert_eq!(first, second);
        assert!(cache_path(&dir, 2, 2).exists());
        let _ = std::fs::remove_dir_all(dir);
    }
}
