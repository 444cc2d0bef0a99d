//! Čech cohomology of `W_n O(D)` on the standard cover of `P^N`.
//!
//! The Čech complex splits into pieces indexed by multidegrees
//! `e in (1/p^{n-1}) Z^{N+1}`: on a chart the level-`m` slot of degree `e`
//! is the single monomial `x^{p^m e}`, so a cochain is a tuple of Witt
//! vectors over `F_q` and every piece is a finite abelian p-group.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Rational64;
use serde::Serialize;

use crate::divisor::RDivisor;
use crate::divisorial::{admissible_slots, Multidegree};
use crate::error::{Error, Result};
use crate::rings::{ExtField, Fq};
use crate::witt::{WittRing, WittVector};

/// Default cap on the number of elements of an enumerated cochain group.
pub const DEFAULT_BOUND: u64 = 1 << 20;

fn binom(n: i64, k: usize) -> u64 {
    if n < k as i64 || n < 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

/// `h^i(P^N, O(d))` for `i = 0..=N`.
pub fn classical_h(dim: usize, d: i64) -> Vec<u64> {
    let mut h = vec![0; dim + 1];
    h[0] += binom(d + dim as i64, dim);
    h[dim] += binom(-d - 1, dim);
    h
}

/// `h^j(O(floor(p^k D)))`, zero for `j > N`.
fn classical_at(divisor: &RDivisor, p: u64, k: usize, j: usize) -> u64 {
    let deg: i64 = divisor.level_floor(p, k).iter().sum();
    classical_h(divisor.dim(), deg).get(j).copied().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    LesCertificate,
    Formula,
}

/// Order and p-torsion of one cohomology group, both as `log_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct GroupData {
    pub log_order: u64,
    /// `log_p` of the number of classes killed by `p`.
    pub p_rank: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub j: usize,
    pub log_p_order: u64,
    pub p_rank: Option<u64>,
    pub method: Method,
}

pub type Cochain = Vec<WittVector<Fq>>;

fn ilog(mut x: u64, p: u64) -> Option<u64> {
    let mut k = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        k += 1;
    }
    Some(k)
}

fn floor_log(bound: u64, p: u64) -> u64 {
    let mut k = 0;
    let mut acc = 1u64;
    while acc.saturating_mul(p) <= bound {
        acc *= p;
        k += 1;
    }
    k
}

fn subsets(dim: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, dim: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..=dim {
            cur.push(i);
            go(i + 1, dim, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, dim, size, &mut Vec::new(), &mut out);
    out
}

/// Admissible slots of every chart, grouped by Čech degree. Two
/// multidegrees with the same shape have isomorphic complexes.
pub type Shape = Vec<Vec<Vec<bool>>>;

/// The multidegree-`e` piece of the Čech complex of `W_n O(D)`.
#[derive(Debug, Clone)]
pub struct GradedCechComplex {
    field: ExtField,
    witt: WittRing<ExtField>,
    divisor: RDivisor,
    degree: Multidegree,
    charts: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    shape: Shape,
}

impl GradedCechComplex {
    pub fn new(field: &ExtField, divisor: &RDivisor, n: usize, degree: &Multidegree) -> Result<Self> {
        let dim = divisor.dim();
        if degree.numerators().len() != dim + 1 || !degree.is_degree_zero() {
            return Err(Error::Config(format!("{degree} is not a degree-zero multidegree of P^{dim}")));
        }
        if degree.p() != field.p() {
            return Err(Error::RingMismatch { left: field.p(), right: degree.p() });
        }
        let charts: Vec<Vec<Vec<usize>>> = (0..=dim).map(|j| subsets(dim, j + 1)).collect();
        let index = charts
            .iter()
            .map(|cs| cs.iter().enumerate().map(|(k, c)| (c.clone(), k)).collect())
            .collect();
        let shape = charts
            .iter()
            .map(|cs| cs.iter().map(|c| admissible_slots(divisor, degree, n, c)).collect())
            .collect();
        Ok(GradedCechComplex {
            field: field.clone(),
            witt: WittRing::new(field.clone(), n)?,
            divisor: divisor.clone(),
            degree: degree.clone(),
            charts,
            index,
            shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.divisor.dim()
    }

    pub fn degree(&self) -> &Multidegree {
        &self.degree
    }

    pub fn divisor(&self) -> &RDivisor {
        &self.divisor
    }

    pub fn witt(&self) -> &WittRing<ExtField> {
        &self.witt
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn charts(&self, j: usize) -> &[Vec<usize>] {
        &self.charts[j]
    }

    /// No chart has an admissible slot.
    pub fn is_empty(&self) -> bool {
        self.shape.iter().flatten().flatten().all(|&s| !s)
    }

    fn open_slots(&self, j: usize) -> Vec<(usize, usize)> {
        self.shape[j]
            .iter()
            .enumerate()
            .flat_map(|(k, slots)| slots.iter().enumerate().filter(|(_, &s)| s).map(move |(m, _)| (k, m)))
            .collect()
    }

    /// `log_p |C^j|`.
    pub fn log_order(&self, j: usize) -> u64 {
        if j > self.dim() {
            return 0;
        }
        self.open_slots(j).len() as u64 * self.field.degree() as u64
    }

    pub fn zero(&self, j: usize) -> Cochain {
        vec![self.witt.zero(); self.charts[j].len()]
    }

    /// All cochains of degree `j`, in a fixed order.
    pub fn cochains(&self, j: usize) -> impl Iterator<Item = Cochain> + '_ {
        let open = if j <= self.dim() { self.open_slots(j) } else { Vec::new() };
        let elements: Vec<Fq> = self.field.elements().collect();
        let q = elements.len() as u64;
        let count = q.pow(open.len() as u32);
        let ncharts = if j <= self.dim() { self.charts[j].len() } else { 0 };
        let n = self.witt.length();
        (0..count).map(move |mut code| {
            let mut comps = vec![vec![Fq(0); n]; ncharts];
            for &(k, m) in &open {
                comps[k][m] = elements[(code % q) as usize];
                code /= q;
            }
            comps
                .into_iter()
                .map(|c| self.witt.make(c).expect("length n"))
                .collect()
        })
    }

    /// `c` is a cochain of degree `j`: right length, zero outside admissible
    /// slots.
    pub fn contains(&self, j: usize, c: &Cochain) -> bool {
        j <= self.dim()
            && c.len() == self.charts[j].len()
            && c.iter().zip(&self.shape[j]).all(|(v, slots)| {
                v.len() == slots.len() && v.components().iter().zip(slots).all(|(x, &open)| open || x.0 == 0)
            })
    }

    /// `V^m [b]` on one chart, for every admissible slot and every `b` in an
    /// `F_p`-basis of `F_q`. They generate `C^j`.
    pub fn generators(&self, j: usize) -> Vec<Cochain> {
        if j > self.dim() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (k, m) in self.open_slots(j) {
            for b in self.field.prime_basis() {
                let mut c = self.zero(j);
                let v = self.witt.teichmuller(&b);
                c[k] = self.witt.verschiebung_trunc(&v, m).expect("length n");
                out.push(c);
            }
        }
        out
    }

    /// `(d c)_J = sum_k (-1)^k c_{J - J_k}`, restrictions being inclusions of
    /// coefficient vectors.
    pub fn differential(&self, j: usize, c: &Cochain) -> Result<Cochain> {
        if j >= self.dim() {
            return Ok(Vec::new());
        }
        let mut out = Vec::with_capacity(self.charts[j + 1].len());
        for big in &self.charts[j + 1] {
            let mut acc = self.witt.zero();
            for k in 0..big.len() {
                let mut face = big.clone();
                face.remove(k);
                let term = &c[self.index[j][&face]];
                acc = if k % 2 == 0 {
                    self.witt.add(&acc, term)?
                } else {
                    self.witt.sub(&acc, term)?
                };
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn add(&self, a: &Cochain, b: &Cochain) -> Result<Cochain> {
        a.iter().zip(b).map(|(x, y)| self.witt.add(x, y)).collect()
    }

    pub fn mul_int(&self, a: &Cochain, k: i64) -> Result<Cochain> {
        a.iter().map(|x| self.witt.mul_int(x, k)).collect()
    }

    /// `d d = 0` on all generators.
    pub fn d_squared_vanishes(&self) -> Result<bool> {
        for j in 0..self.dim().saturating_sub(1) {
            for g in self.generators(j) {
                let dd = self.differential(j + 1, &self.differential(j, &g)?)?;
                if dd != self.zero(j + 2) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn check_bound(&self, j: usize, bound: u64) -> Result<()> {
        let log = self.log_order(j);
        let p = self.field.p();
        let fits = p.checked_pow(log as u32).is_some_and(|size| size <= bound);
        if !fits {
            return Err(Error::EnumerationBoundExceeded {
                log_order: log,
                bound_log: floor_log(bound, p),
            });
        }
        Ok(())
    }

    /// `im d^{j-1}` as the closure of the generator images under addition.
    pub fn image(&self, j: usize, bound: u64) -> Result<HashSet<Cochain>> {
        let mut seen: HashSet<Cochain> = HashSet::new();
        if j > self.dim() {
            return Ok(seen);
        }
        seen.insert(self.zero(j));
        if j == 0 {
            return Ok(seen);
        }
        self.check_bound(j, bound)?;
        let mut gens: Vec<Cochain> = Vec::new();
        for g in self.generators(j - 1) {
            let dg = self.differential(j - 1, &g)?;
            if dg != self.zero(j) && !gens.contains(&dg) {
                gens.push(dg);
            }
        }
        let mut queue: VecDeque<Cochain> = VecDeque::from([self.zero(j)]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = self.add(&x, g)?;
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(seen)
    }

    /// `H^j` of this piece by enumeration of `C^j`.
    pub fn cohomology(&self, j: usize, bound: u64) -> Result<GroupData> {
        if j > self.dim() || self.log_order(j) == 0 {
            return Ok(GroupData::default());
        }
        self.check_bound(j, bound)?;
        let image = self.image(j, bound)?;
        let p = self.field.p();
        let zero_next = if j < self.dim() { self.zero(j + 1) } else { Vec::new() };
        let mut kernel = 0u64;
        let mut torsion = 0u64;
        for c in self.cochains(j) {
            if j < self.dim() && self.differential(j, &c)? != zero_next {
                continue;
            }
            kernel += 1;
            if image.contains(&self.mul_int(&c, p as i64)?) {
                torsion += 1;
            }
        }
        let im = image.len() as u64;
        let exact = |num: u64| -> u64 {
            debug_assert_eq!(num % im, 0);
            ilog(num / im, p).expect("orders of p-groups are powers of p")
        };
        Ok(GroupData {
            log_order: exact(kernel),
            p_rank: exact(torsion),
        })
    }
}

/// `H^j(P^N, W_n O(D))_e` by brute force.
pub fn witt_cech_h(field: &ExtField, j: usize, divisor: &RDivisor, n: usize, degree: &Multidegree, bound: u64) -> Result<CohomologyReport> {
    let complex = GradedCechComplex::new(field, divisor, n, degree)?;
    let g = complex.cohomology(j, bound)?;
    Ok(CohomologyReport {
        j,
        log_p_order: g.log_order,
        p_rank: Some(g.p_rank),
        method: Method::BruteForce,
    })
}

/// The bounding box, in `e` coordinates, of all multidegrees where some
/// level has a chart pattern with nonzero classical cohomology. Outside it
/// every piece of the complex is acyclic. `None` when no level contributes.
pub fn support_box(divisor: &RDivisor, p: u64, n: usize) -> Option<(Vec<Rational64>, Vec<Rational64>)> {
    let dim = divisor.dim();
    let mut lo: Option<Vec<Rational64>> = None;
    let mut hi: Option<Vec<Rational64>> = None;
    let mut absorb = |l: Vec<Rational64>, h: Vec<Rational64>| {
        lo = Some(match lo.take() {
            None => l,
            Some(old) => old.into_iter().zip(l).map(|(a, b)| a.min(b)).collect(),
        });
        hi = Some(match hi.take() {
            None => h,
            Some(old) => old.into_iter().zip(h).map(|(a, b)| a.max(b)).collect(),
        });
    };
    for m in 0..n {
        let b = divisor.level_floor(p, m);
        let scale = p.pow(m as u32) as i64;
        let total: i64 = b.iter().sum();
        let r = |x: i64| Rational64::new(x, scale);
        // every u_j >= -b_j: global sections
        if total >= 0 {
            let l = (0..=dim).map(|j| r(-b[j])).collect();
            let h = (0..=dim).map(|j| r(total - b[j])).collect();
            absorb(l, h);
        }
        // every u_j <= -b_j - 1: top cohomology
        let shifted: i64 = b.iter().map(|x| x + 1).sum();
        if shifted <= 0 {
            let l = (0..=dim).map(|j| r(shifted - (b[j] + 1))).collect();
            let h = (0..=dim).map(|j| r(-b[j] - 1)).collect();
            absorb(l, h);
        }
    }
    Some((lo?, hi?))
}

/// Which multidegrees `witt_cech_h_total` sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Exactly the support box.
    Auto,
    /// `|e_j| <= r`; rejected unless it contains the support box.
    Radius(i64),
}

/// Degree-zero multidegrees at scale `p^scale` inside `[lo, hi]`.
fn degrees_in_box(p: u64, scale: u32, lo: &[Rational64], hi: &[Rational64]) -> Vec<Multidegree> {
    let den = p.pow(scale) as i64;
    let lo_n: Vec<i64> = lo.iter().map(|x| (x * den).ceil().to_integer()).collect();
    let hi_n: Vec<i64> = hi.iter().map(|x| (x * den).floor().to_integer()).collect();
    let dim = lo.len() - 1;
    let mut out = Vec::new();
    if lo_n.iter().zip(&hi_n).any(|(l, h)| l > h) {
        return out;
    }
    let mut cur: Vec<i64> = lo_n[..dim].to_vec();
    loop {
        let last = -cur.iter().sum::<i64>();
        if last >= lo_n[dim] && last <= hi_n[dim] {
            let mut num = cur.clone();
            num.push(last);
            out.push(Multidegree::new(num, p, scale));
        }
        let mut k = 0;
        loop {
            if k == dim {
                return out;
            }
            if cur[k] < hi_n[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = lo_n[k];
            k += 1;
        }
    }
}

/// A sum of graded pieces of `H^j(P^N, W_n O(D))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TotalCohomology {
    pub j: usize,
    pub log_p_order: u64,
    pub p_rank: u64,
    /// Multidegrees with a nontrivial piece, with its `log_p` order.
    pub contributions: Vec<(Multidegree, u64)>,
    pub degrees_checked: usize,
    pub distinct_shapes: usize,
}

/// Memoized brute force over many multidegrees of one `(field, D, n)`.
#[derive(Debug)]
pub struct CechSolver {
    field: ExtField,
    divisor: RDivisor,
    n: usize,
    bound: u64,
    memo: HashMap<(Shape, usize), GroupData>,
}

impl CechSolver {
    pub fn new(field: &ExtField, divisor: &RDivisor, n: usize, bound: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("witt length must be positive".into()));
        }
        Ok(CechSolver {
            field: field.clone(),
            divisor: divisor.clone(),
            n,
            bound,
            memo: HashMap::new(),
        })
    }

    pub fn piece(&mut self, j: usize, degree: &Multidegree) -> Result<GroupData> {
        let complex = GradedCechComplex::new(&self.field, &self.divisor, self.n, degree)?;
        if complex.is_empty() || j > complex.dim() {
            return Ok(GroupData::default());
        }
        let key = (complex.shape().clone(), j);
        if let Some(g) = self.memo.get(&key) {
            return Ok(*g);
        }
        let g = complex.cohomology(j, self.bound)?;
        self.memo.insert(key, g);
        Ok(g)
    }

    /// The multidegrees of `window` at scale `p^{n-1}`, after checking that
    /// the window contains the support box.
    pub fn degrees(&self, window: Window) -> Result<Vec<Multidegree>> {
        let p = self.field.p();
        let scale = (self.n - 1) as u32;
        let Some((lo, hi)) = support_box(&self.divisor, p, self.n) else {
            return Ok(match window {
                Window::Auto => Vec::new(),
                Window::Radius(r) => Multidegree::window(self.divisor.dim(), p, scale, r),
            });
        };
        match window {
            Window::Auto => Ok(degrees_in_box(p, scale, &lo, &hi)),
            Window::Radius(r) => {
                let r = Rational64::from_integer(r);
                if lo.iter().any(|x| *x < -r) || hi.iter().any(|x| *x > r) {
                    let fmt = |v: &[Rational64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
                    return Err(Error::WindowIncomplete(format!(
                        "support box [{}] .. [{}] leaves |e_j| <= {r}",
                        fmt(&lo),
                        fmt(&hi)
                    )));
                }
                Ok(Multidegree::window(self.divisor.dim(), p, scale, *r.numer()))
            }
        }
    }

    pub fn total(&mut self, j: usize, window: Window) -> Result<TotalCohomology> {
        let degrees = self.degrees(window)?;
        let mut log = 0;
        let mut rank = 0;
        let mut contributions = Vec::new();
        for e in &degrees {
            let g = self.piece(j, e)?;
            if g.log_order > 0 {
                contributions.push((e.clone(), g.log_order));
            }
            log += g.log_order;
            rank += g.p_rank;
        }
        Ok(TotalCohomology {
            j,
            log_p_order: log,
            p_rank: rank,
            contributions,
            degrees_checked: degrees.len(),
            distinct_shapes: self.memo.len(),
        })
    }
}

/// `H^j(P^N, W_n O(D))` summed over a window of multidegrees.
pub fn witt_cech_h_total(field: &ExtField, j: usize, divisor: &RDivisor, n: usize, window: Window, bound: u64) -> Result<CohomologyReport> {
    let t = CechSolver::new(field, divisor, n, bound)?.total(j, window)?;
    Ok(CohomologyReport {
        j,
        log_p_order: t.log_p_order,
        p_rank: Some(t.p_rank),
        method: Method::BruteForce,
    })
}

/// A one-sided proof that a group vanishes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub holds: bool,
    pub trace: Vec<String>,
}

/// `H^j(W_n O(D)) = 0` whenever `h^j(O(floor(p^k D))) = 0` for all `k < n`,
/// by induction along `0 -> F_* W_{n-1} O(pD) -> W_n O(D) -> O(floor D) -> 0`.
/// `holds = false` means inconclusive, never nonvanishing.
pub fn vanishing_certificate(j: usize, divisor: &RDivisor, n: usize, p: u64) -> Certificate {
    let dim = divisor.dim();
    if j > dim {
        return Certificate {
            holds: true,
            trace: vec![format!("j = {j} > N = {dim}: no cochains")],
        };
    }
    let mut trace = Vec::new();
    let mut holds = true;
    for k in 0..n {
        let deg: i64 = divisor.level_floor(p, k).iter().sum();
        let h = classical_at(divisor, p, k, j);
        trace.push(format!("h^{j}(O(floor({}^{k} D))) = h^{j}(O({deg})) = {h}", p));
        holds &= h == 0;
    }
    Certificate { holds, trace }
}

/// `log_p |H^j(W_n O(D))|` when the exact sequences pin it down: each step
/// needs `h^{j-1}(O(floor D)) = 0` and a vanishing certificate for
/// `H^{j+1}(W_{n-1} O(pD))`, and then adds `d h^j(O(floor D))`.
pub fn les_prediction(j: usize, divisor: &RDivisor, n: usize, field: &ExtField) -> Option<u64> {
    let p = field.p();
    let d = field.degree() as u64;
    let dim = divisor.dim();
    if n == 0 || j > dim {
        return Some(0);
    }
    if j > 0 && classical_at(divisor, p, 0, j - 1) != 0 {
        return None;
    }
    let p_div = divisor.scale(p as i64);
    if j < dim && !vanishing_certificate(j + 1, &p_div, n - 1, p).holds {
        return None;
    }
    let rest = les_prediction(j, &p_div, n - 1, field)?;
    Some(rest + d * classical_at(divisor, p, 0, j))
}

/// Vanishing of `H^i(P^N, W_n O(sH))` for `i > 0`.
pub fn witt_serre_check(i: usize, dim: usize, s: i64, n: usize, p: u64) -> Certificate {
    if i == 0 {
        return Certificate {
            holds: false,
            trace: vec!["i must be positive".into()],
        };
    }
    let mut cert = vanishing_certificate(i, &RDivisor::multiple_of_h(dim, s), n, p);
    if s <= 0 {
        cert.trace.push(format!("s = {s}: O({s}) is not ample"));
    }
    cert
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub s: i64,
    pub formula: u64,
    pub enumerated: u64,
}

/// `d sum_{m<n} h^0(O(p^m s))`.
pub fn h0_formula(dim: usize, n: usize, s: i64, field: &ExtField) -> u64 {
    let p = field.p() as i64;
    let d = field.degree() as u64;
    (0..n).map(|m| d * classical_h(dim, p.pow(m as u32) * s)[0]).sum()
}

/// `log_p |H^0(P^N, W_n O(sH))|` from the closed formula and from
/// enumeration of the Čech pieces.
pub fn h0_growth_table(field: &ExtField, dim: usize, n: usize, s_range: impl IntoIterator<Item = i64>, bound: u64) -> Result<Vec<GrowthRow>> {
    s_range
        .into_iter()
        .map(|s| {
            if s < 0 {
                return Err(Error::Config(format!("growth needs s >= 0, got {s}")));
            }
            let divisor = RDivisor::multiple_of_h(dim, s);
            let t = CechSolver::new(field, &divisor, n, bound)?.total(0, Window::Auto)?;
            Ok(GrowthRow {
                s,
                formula: h0_formula(dim, n, s, field),
                enumerated: t.log_p_order,
            })
        })
        .collect()
}
