//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Every criterion is exact; the only tolerances are wall-clock budgets.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wittdiv::cech::{
    classical_h, h0_growth_table, les_prediction, vanishing_certificate, witt_cech_h_total, witt_serre_check, Window,
    DEFAULT_BOUND,
};
use wittdiv::divisorial::{exact_sequence_orders, WittSectionSpace};
use wittdiv::kummer::{etale_pullback_iso_check, trace_split};
use wittdiv::maps::{frobenius_on_top_h, frobenius_on_witt_top, verschiebung_on_h};
use wittdiv::rings::{ExtField, Fq, PrimeField};
use wittdiv::teichmuller::div_vs_teichmuller;
use wittdiv::witt::{
    ghost, homogeneity_check, neg_polys, sum_polys, PolyKind, UniversalPoly, Var, WittRing, WittVector,
};
use wittdiv::{Error, RDivisor};

const SEED: u64 = 0x5eed;

type V = WittVector<Fq>;

type Outcome = std::result::Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(q: u64) -> ExtField {
    ExtField::new(q).expect("prime power")
}

fn err(e: Error) -> String {
    e.to_string()
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn universal_polynomials() -> Outcome {
    let mut checked = 0;
    for p in [2u64, 3, 5] {
        let top = if p == 5 { 3 } else { 4 };
        let s = sum_polys(p, top).map_err(err)?;
        let i = neg_polys(p, top).map_err(err)?;
        for m in 0..=top {
            ensure(homogeneity_check(&s[m], p, m), || format!("S_{m} not homogeneous for p={p}"))?;
            ensure(homogeneity_check(&i[m], p, m), || format!("I_{m} not homogeneous for p={p}"))?;
            checked += 2;
        }
        // ghost identity w_m(S) = w_m(x) + w_m(y), symbolically, up to index 3
        let vars = PolyKind::Sum.vars(top);
        let xs: Vec<UniversalPoly> = (0..=top).map(|k| UniversalPoly::var(vars.clone(), Var::X(k))).collect();
        let ys: Vec<UniversalPoly> = (0..=top).map(|k| UniversalPoly::var(vars.clone(), Var::Y(k))).collect();
        for m in 0..=top.min(3) {
            let lhs = ghost(&s[..=m], p).map_err(err)?;
            let rhs = ghost(&xs[..=m], p).map_err(err)?.add(&ghost(&ys[..=m], p).map_err(err)?);
            ensure(lhs == rhs, || format!("ghost identity fails at p={p}, m={m}"))?;
        }
    }
    let s = sum_polys(2, 1).map_err(err)?;
    let vars = PolyKind::Sum.vars(1);
    let x = |k| UniversalPoly::var(vars.clone(), Var::X(k));
    let y = |k| UniversalPoly::var(vars.clone(), Var::Y(k));
    ensure(s[0] == x(0).add(&y(0)), || "S_0 != x_0 + y_0".into())?;
    let s1 = x(1).add(&y(1)).sub(&x(0).mul(&y(0)).map_err(err)?);
    ensure(s[1] == s1, || format!("S_1 for p=2 is {:?}", s[1]))?;
    let s3 = sum_polys(3, 1).map_err(err)?;
    // p = 3: S_1 = x_1 + y_1 - x_0^2 y_0 - x_0 y_0^2
    let x0y0 = x(0).mul(&y(0)).map_err(err)?;
    let s1_3 = x(1)
        .add(&y(1))
        .sub(&x0y0.mul(&x(0)).map_err(err)?)
        .sub(&x0y0.mul(&y(0)).map_err(err)?);
    ensure(s3[1] == s1_3, || format!("S_1 for p=3 is {:?}", s3[1]))?;
    Ok(format!("{checked} polynomials homogeneous, divisions exact"))
}

fn witt_ring() -> Outcome {
    for p in [2u64, 3, 5] {
        for n in 1..=4 {
            let w = WittRing::new(PrimeField::new(p).map_err(err)?, n).map_err(err)?;
            let one = w.one();
            let mut acc = w.zero();
            let mut order = 0u64;
            loop {
                acc = w.add(&acc, &one).map_err(err)?;
                order += 1;
                if acc == w.zero() {
                    break;
                }
            }
            ensure(order == p.pow(n as u32), || format!("additive order of 1 in W_{n}(F_{p}) is {order}"))?;
        }
    }
    let w = WittRing::new(field(4), 3).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let p = w.from_integer(2);
    for _ in 0..1000 {
        let (a, b, c) = (w.random(&mut rng), w.random(&mut rng), w.random(&mut rng));
        let add = |x: &V, y: &V| -> V { w.add(x, y).unwrap() };
        let mul = |x: &V, y: &V| -> V { w.mul(x, y).unwrap() };
        ensure(add(&add(&a, &b), &c) == add(&a, &add(&b, &c)), || "addition not associative".into())?;
        ensure(add(&a, &b) == add(&b, &a), || "addition not commutative".into())?;
        ensure(mul(&mul(&a, &b), &c) == mul(&a, &mul(&b, &c)), || "multiplication not associative".into())?;
        ensure(mul(&a, &b) == mul(&b, &a), || "multiplication not commutative".into())?;
        ensure(mul(&a, &add(&b, &c)) == add(&mul(&a, &b), &mul(&a, &c)), || "not distributive".into())?;
        ensure(add(&a, &w.neg(&a).unwrap()) == w.zero(), || "a + (-a) != 0".into())?;
        ensure(mul(&a, &w.one()) == a && add(&a, &w.zero()) == a, || "identities fail".into())?;
        let pa = mul(&p, &a);
        let fv = w.frobenius(&w.verschiebung_trunc(&a, 1).unwrap()).unwrap();
        let vf = w.verschiebung_trunc(&w.frobenius(&a).unwrap(), 1).unwrap();
        ensure(fv == pa && vf == pa, || format!("FV = VF = p fails at {a:?}"))?;
    }
    Ok("orders p^n for n <= 4; 1000 samples over W_3(F_4)".into())
}

fn random_fractional_divisor(rng: &mut ChaCha8Rng, dim: usize) -> RDivisor {
    let coeffs = (0..=dim)
        .map(|_| {
            let den = if rng.gen_bool(0.5) { 2 } else { 3 };
            r(rng.gen_range(-2 * den..=2 * den), den)
        })
        .collect();
    RDivisor::new(coeffs).expect("nonempty")
}

fn submodule_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ops = 0;
    let mut failures = 0;
    for (q, dim) in [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2)] {
        for n in 1..=3 {
            for _ in 0..4 {
                let d = random_fractional_divisor(&mut rng, dim);
                let chart: Vec<usize> = (0..=dim).filter(|_| rng.gen_bool(0.5)).collect();
                let chart = if chart.is_empty() { vec![rng.gen_range(0..=dim)] } else { chart };
                let space = WittSectionSpace::new(field(q), d, n, &chart).map_err(err)?;
                for _ in 0..5 {
                    let a = space.random_member(&mut rng, 3, 2);
                    let b = space.random_member(&mut rng, 3, 2);
                    let s = space.random_scalar(&mut rng, 3, 2);
                    failures += space.add(&a, &b).is_err() as usize;
                    failures += space.scale(&s, &a).is_err() as usize;
                    failures += space.neg(&b).is_err() as usize;
                    ops += 3;
                }
            }
        }
    }
    ensure(ops >= 500 && failures == 0, || format!("{failures} failures in {ops} operations"))?;
    Ok(format!("{ops} operations, 0 failures"))
}

fn exact_sequences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pieces = 0;
    for k in 0..10 {
        let d = random_fractional_divisor(&mut rng, 1);
        let (q, n, m) = [(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 1, 2)][k % 4];
        for chart in [vec![0], vec![1], vec![0, 1]] {
            let rep = exact_sequence_orders(&field(q), &d, n, m, &chart, 4).map_err(err)?;
            if let Some(bad) = rep.pieces.iter().find(|x| !x.exact || x.total != x.sub * x.quotient) {
                return Err(format!("D = {d}, n = {n}, m = {m}, chart {chart:?}: {bad:?}"));
            }
            ensure(rep.holds, || format!("D = {d}, n = {n}, m = {m}, chart {chart:?}"))?;
            pieces += rep.pieces.len();
        }
    }
    Ok(format!("{pieces} pieces over 10 divisors"))
}

/// `Ok(None)` when the groups are too large to enumerate.
fn brute_log_order(q: u64, j: usize, d: &RDivisor, n: usize) -> std::result::Result<Option<u64>, String> {
    match witt_cech_h_total(&field(q), j, d, n, Window::Auto, DEFAULT_BOUND) {
        Ok(rep) => Ok(Some(rep.log_p_order)),
        Err(Error::EnumerationBoundExceeded { .. }) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn finite_level_vanishing() -> Outcome {
    let mut certs = 0;
    let mut brute = 0;
    let mut skipped = 0;
    for (dim, js) in [(1usize, vec![0usize]), (2, vec![0, 1])] {
        for p in [2u64, 3] {
            for s in 1..=10 {
                let d = RDivisor::multiple_of_h(dim, -s);
                for n in 1..=3 {
                    for &j in &js {
                        let cert = vanishing_certificate(j, &d, n, p);
                        ensure(cert.holds, || format!("no certificate for H^{j}(P^{dim}, W_{n} O(-{s}H)), p={p}"))?;
                        certs += 1;
                        match brute_log_order(p, j, &d, n)? {
                            Some(0) => brute += 1,
                            Some(k) => return Err(format!("H^{j}(P^{dim}, W_{n} O(-{s}H)) has order {p}^{k}")),
                            None => skipped += 1,
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{certs} certificates, {brute} brute-force confirmations, {skipped} beyond the bound"))
}

fn witt_serre() -> Outcome {
    let mut certs = 0;
    for dim in 1..=2 {
        for p in [2u64, 3] {
            for s in 1..=10 {
                for n in 1..=3 {
                    for i in 1..=dim {
                        ensure(witt_serre_check(i, dim, s, n, p).holds, || {
                            format!("H^{i}(P^{dim}, W_{n} O({s}H)), p={p}")
                        })?;
                        certs += 1;
                    }
                }
            }
        }
    }
    for dim in 1..=2 {
        let d = RDivisor::multiple_of_h(dim, 2);
        for i in 1..=dim {
            let k = brute_log_order(2, i, &d, 2)?.ok_or("spot check too large")?;
            ensure(k == 0, || format!("H^{i}(P^{dim}, W_2 O(2H)) has order 2^{k}"))?;
        }
    }
    Ok(format!("{certs} certificates, spot checks on P^1 and P^2"))
}

fn growth() -> Outcome {
    let rows = h0_growth_table(&field(2), 1, 2, 0..=5, DEFAULT_BOUND).map_err(err)?;
    for row in &rows {
        let want = 3 * row.s as u64 + 2;
        ensure(row.formula == want && row.enumerated == want, || format!("{row:?}, expected {want}"))?;
    }
    Ok(rows.iter().map(|r| r.enumerated.to_string()).collect::<Vec<_>>().join(", "))
}

fn nonvanishing_oracle() -> Outcome {
    let f2 = field(2);
    let d = RDivisor::multiple_of_h(1, -2);
    let brute = witt_cech_h_total(&f2, 1, &d, 2, Window::Auto, DEFAULT_BOUND).map_err(err)?;
    let classical = classical_h(1, -2)[1] + classical_h(1, -4)[1];
    let les = les_prediction(1, &d, 2, &f2);
    ensure(brute.log_p_order == 4 && classical == 4 && les == Some(4), || {
        format!("brute {}, classical {classical}, les {les:?}", brute.log_p_order)
    })?;
    Ok("|H^1| = 2^4 = 2^(1+3)".into())
}

fn frobenius_verschiebung() -> Outcome {
    let mut checks = 0;
    for dim in 1..=2 {
        for p in [2u64, 3] {
            let f = field(p);
            for s in 1..=6 {
                ensure(frobenius_on_top_h(dim, s, p).map_err(err)?.injective, || {
                    format!("F on H^{dim}(O(-{s})), p={p}")
                })?;
                checks += 1;
                for n in 1..=2 {
                    let d = RDivisor::multiple_of_h(dim, -s);
                    let fr = frobenius_on_witt_top(&f, &d, n, DEFAULT_BOUND).map_err(err)?;
                    ensure(fr.chain_map && fr.injective, || format!("F on W_{n}, P^{dim}, s={s}, p={p}"))?;
                    let v = verschiebung_on_h(&f, dim, s, n, true, DEFAULT_BOUND).map_err(err)?;
                    ensure(v.injective == Some(true), || format!("V into W_{}, P^{dim}, s={s}, p={p}", n + 1))?;
                    checks += 2;
                }
            }
        }
    }
    Ok(format!("{checks} maps injective"))
}

fn trace_splitting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let configs = [
        (4u64, 3u64, RDivisor::new(vec![r(2, 3), r(-1, 2)]).map_err(err)?),
        (3, 2, RDivisor::new(vec![r(1, 2), r(1, 3)]).map_err(err)?),
    ];
    for (q, ell, d) in &configs {
        for n in 1..=3 {
            let rep = trace_split(&field(*q), *ell, n, d, 0, 200, &mut rng).map_err(err)?;
            ensure(rep.pass, || format!("{rep:?}"))?;
        }
    }
    Ok("(2,3,4) and (3,2,3), n <= 3, 200 samples".into())
}

fn teichmuller_identification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut runs = 0;
    for p in [2u64, 3] {
        for dim in 1..=2 {
            for d in -3..=3 {
                for n in 1..=3 {
                    let dv = RDivisor::multiple_of_h(dim, d);
                    ensure(div_vs_teichmuller(&field(p), &dv, n, 200, &mut rng).map_err(err)?, || {
                        format!("D = {d}H on P^{dim}, n = {n}, p = {p}")
                    })?;
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} configurations, every chart, 200 samples each"))
}

fn etale_base_change() -> Outcome {
    let configs = [
        (4u64, 3u64, 2usize, RDivisor::new(vec![r(0, 1)]).map_err(err)?),
        (4, 3, 2, RDivisor::new(vec![r(1, 3)]).map_err(err)?),
        (3, 2, 2, RDivisor::new(vec![r(1, 2)]).map_err(err)?),
        (3, 2, 2, RDivisor::new(vec![r(-2, 3)]).map_err(err)?),
        (2, 3, 2, RDivisor::new(vec![r(1, 2), r(-1, 2)]).map_err(err)?),
    ];
    for (q, ell, n, d) in &configs {
        let rep = etale_pullback_iso_check(&field(*q), *ell, *n, d, 2, DEFAULT_BOUND).map_err(err)?;
        ensure(rep.holds, || format!("{rep:?}"))?;
    }
    Ok(format!("{} configurations", configs.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "1 universal polynomials", budget: Some(Duration::from_secs(10)), run: universal_polynomials },
        Criterion { name: "2 witt ring", budget: Some(Duration::from_secs(30)), run: witt_ring },
        Criterion { name: "3 submodule closure", budget: None, run: submodule_closure },
        Criterion { name: "4 exact sequence orders", budget: None, run: exact_sequences },
        Criterion { name: "5 finite-level vanishing", budget: Some(Duration::from_secs(120)), run: finite_level_vanishing },
        Criterion { name: "6 finite-level witt-serre", budget: None, run: witt_serre },
        Criterion { name: "7 growth", budget: None, run: growth },
        Criterion { name: "8 nonvanishing oracle", budget: Some(Duration::from_secs(60)), run: nonvanishing_oracle },
        Criterion { name: "9 frobenius/verschiebung injectivity", budget: None, run: frobenius_verschiebung },
        Criterion { name: "10 trace splitting", budget: None, run: trace_splitting },
        Criterion { name: "11 teichmuller identification", budget: None, run: teichmuller_identification },
        Criterion { name: "12 etale base change", budget: None, run: etale_base_change },
    ];
    let only: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for c in &criteria {
        if only.as_ref().is_some_and(|o| !c.name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {} ({elapsed:.1?}): {detail}", c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} ({elapsed:.1?}): {detail}", c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
