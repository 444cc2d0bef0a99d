//! WebAssembly bindings for the browser demo. Every entry point returns a
//! JSON string; the plain `*_json` functions are the same computations
//! without the JavaScript error type.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use wittdiv::cech::{
    h0_growth_table, les_prediction, vanishing_certificate, witt_cech_h_total, Method, Window, DEFAULT_BOUND,
};
use wittdiv::rings::{ExtField, Fq};
use wittdiv::witt::{WittRing, WittVector};
use wittdiv::RDivisor;

/// Enumeration cap for the page; smaller than the library default so the
/// tab stays responsive.
const PAGE_BOUND: u64 = DEFAULT_BOUND >> 4;

fn parse_vector(w: &WittRing<ExtField>, s: &str) -> Result<WittVector<Fq>, String> {
    let q = w.base().order();
    let comps = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u32>() {
            Ok(x) if (x as u64) < q => Ok(Fq(x)),
            _ => Err(format!("`{t}` is not an element of F_{q} (use 0..{})", q - 1)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    w.make(comps).map_err(|e| e.to_string())
}

fn show(v: &WittVector<Fq>) -> Vec<u32> {
    v.components().iter().map(|c| c.0).collect()
}

/// `a op b` in `W_n(F_q)`; `op` is one of `add`, `sub`, `mul`, and the
/// unary `neg`, `frobenius`, `verschiebung`, `inverse` act on `a`.
pub fn witt_json(q: u64, n: usize, op: &str, a: &str, b: &str) -> Result<String, String> {
    let f = ExtField::new(q).map_err(|e| e.to_string())?;
    let w = WittRing::new(f, n).map_err(|e| e.to_string())?;
    let x = parse_vector(&w, a)?;
    let y = || parse_vector(&w, b);
    let err = |e: wittdiv::Error| e.to_string();
    let out = match op {
        "add" => w.add(&x, &y()?).map_err(err)?,
        "sub" => w.sub(&x, &y()?).map_err(err)?,
        "mul" => w.mul(&x, &y()?).map_err(err)?,
        "neg" => w.neg(&x).map_err(err)?,
        "frobenius" => w.frobenius(&x).map_err(err)?,
        "verschiebung" => w.verschiebung_trunc(&x, 1).map_err(err)?,
        "inverse" => w.inverse(&x).map_err(err)?.ok_or("not a unit: the first component is zero")?,
        _ => return Err(format!("unknown operation `{op}`")),
    };
    Ok(json!({ "p": w.p(), "q": q, "n": n, "op": op, "result": show(&out) }).to_string())
}

#[derive(Serialize)]
struct CohomologyAnswer {
    divisor: RDivisor,
    j: usize,
    log_p_order: Option<u64>,
    p_rank: Option<u64>,
    method: Option<Method>,
    certificate: Vec<String>,
}

/// `log_p |H^j(P^dim, W_n O(D))|` by enumeration when it fits, otherwise
/// from the exact sequences when they decide it.
pub fn cohomology_json(dim: usize, q: u64, n: usize, divisor: &str, j: usize) -> Result<String, String> {
    let f = ExtField::new(q).map_err(|e| e.to_string())?;
    let d = RDivisor::parse(divisor, dim).map_err(|e| e.to_string())?;
    let cert = vanishing_certificate(j, &d, n, f.p());
    let mut ans = CohomologyAnswer {
        divisor: d.clone(),
        j,
        log_p_order: None,
        p_rank: None,
        method: None,
        certificate: cert.trace,
    };
    match witt_cech_h_total(&f, j, &d, n, Window::Auto, PAGE_BOUND) {
        Ok(rep) => {
            ans.log_p_order = Some(rep.log_p_order);
            ans.p_rank = rep.p_rank;
            ans.method = Some(Method::BruteForce);
        }
        Err(wittdiv::Error::EnumerationBoundExceeded { .. }) => {
            if cert.holds {
                ans.log_p_order = Some(0);
                ans.method = Some(Method::LesCertificate);
            } else if let Some(k) = les_prediction(j, &d, n, &f) {
                ans.log_p_order = Some(k);
                ans.method = Some(Method::Formula);
            }
        }
        Err(e) => return Err(e.to_string()),
    }
    serde_json::to_string(&ans).map_err(|e| e.to_string())
}

/// Rows `s, formula, enumerated` of `log_p |H^0(P^dim, W_n O(sH))|`.
pub fn growth_json(dim: usize, q: u64, n: usize, s_max: i64) -> Result<String, String> {
    let f = ExtField::new(q).map_err(|e| e.to_string())?;
    let rows = h0_growth_table(&f, dim, n, 0..=s_max, PAGE_BOUND).map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn witt(q: u32, n: u32, op: &str, a: &str, b: &str) -> Result<String, JsError> {
    witt_json(q as u64, n as usize, op, a, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cohomology(dim: u32, q: u32, n: u32, divisor: &str, j: u32) -> Result<String, JsError> {
    cohomology_json(dim as usize, q as u64, n as usize, divisor, j as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn growth(dim: u32, q: u32, n: u32, s_max: i32) -> Result<String, JsError> {
    growth_json(dim as usize, q as u64, n as usize, s_max as i64).map_err(|e| JsError::new(&e))
}
