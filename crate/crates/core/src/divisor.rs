//! R-divisors on `P^N` supported on the coordinate hyperplanes.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `D = a_0 H_0 + ... + a_N H_N` with exact rational coefficients, where
/// `H_j = {x_j = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RDivisor {
    coeffs: Vec<Rational64>,
}

impl RDivisor {
    /// One coefficient per hyperplane `H_0..H_N`.
    pub fn new(coeffs: Vec<Rational64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config("a divisor needs at least one hyperplane".into()));
        }
        Ok(RDivisor { coeffs })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Rational64::from_integer(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        RDivisor {
            coeffs: vec![Rational64::zero(); dim + 1],
        }
    }

    /// `c H_j` on `P^dim`.
    pub fn hyperplane(dim: usize, j: usize, c: Rational64) -> Self {
        let mut d = Self::zero(dim);
        d.coeffs[j] = c;
        d
    }

    /// `s H_0` on `P^dim`.
    pub fn multiple_of_h(dim: usize, s: i64) -> Self {
        Self::hyperplane(dim, 0, Rational64::from_integer(s))
    }

    /// Parses `3/2*H0 - 1/3*H1` on `P^dim`.
    pub fn parse(expr: &str, dim: usize) -> Result<Self> {
        let d: RDivisor = expr.parse()?;
        if d.coeffs.len() > dim + 1 {
            return Err(Error::Parse(format!(
                "hyperplane H{} does not exist on P^{dim}",
                d.coeffs.len() - 1
            )));
        }
        let mut coeffs = d.coeffs;
        coeffs.resize(dim + 1, Rational64::zero());
        Ok(RDivisor { coeffs })
    }

    /// The `N` of `P^N`.
    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Rational64 {
        self.coeffs[j]
    }

    /// Coefficient-wise floor.
    pub fn floor(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| c.floor().to_integer()).collect()
    }

    /// Coefficient-wise fractional part `{D} = D - floor(D)`.
    pub fn fract(&self) -> RDivisor {
        RDivisor {
            coeffs: self.coeffs.iter().map(|c| c - c.floor()).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> RDivisor {
        self.scale_by(Rational64::from_integer(k))
    }

    pub fn scale_by(&self, k: Rational64) -> RDivisor {
        RDivisor {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `floor(p^m D)`.
    pub fn level_floor(&self, p: u64, m: usize) -> Vec<i64> {
        self.scale(p.pow(m as u32) as i64).floor()
    }

    pub fn add(&self, other: &RDivisor) -> Result<RDivisor> {
        if self.dim() != other.dim() {
            return Err(Error::LengthMismatch {
                expected: self.coeffs.len(),
                got: other.coeffs.len(),
            });
        }
        Ok(RDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// `D + div(x^u)` for an integral `u`.
    pub fn add_principal(&self, u: &[i64]) -> Result<RDivisor> {
        let div = RDivisor::from_integers(u)?;
        self.add(&div)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Total degree `sum a_j`.
    pub fn degree(&self) -> Rational64 {
        self.coeffs.iter().sum()
    }

    /// Coefficient-wise `self <= other`.
    pub fn le(&self, other: &RDivisor) -> bool {
        self.dim() == other.dim() && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    /// The least common denominator of the coefficients.
    pub fn denominator(&self) -> i64 {
        self.coeffs.iter().fold(1, |acc, c| acc.lcm(c.denom()))
    }
}

impl fmt::Display for RDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if mag.is_one() {
                write!(f, "H{j}")?;
            } else {
                write!(f, "{mag}*H{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for RDivisor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_coeff(s: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("bad coefficient `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a divisor literal; the dimension is the largest hyperplane index.
impl FromStr for RDivisor {
    type Err = Error;

    fn from_str(expr: &str) -> Result<Self> {
        let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty divisor".into()));
        }
        if compact == "0" {
            return Ok(RDivisor::zero(0));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && current.is_empty() {
                negative ^= ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(Error::Parse(format!("dangling sign in `{expr}`")));
        }
        terms.push((negative, current));

        let mut coeffs: Vec<Rational64> = Vec::new();
        for (negative, term) in terms {
            let upper = term.to_ascii_uppercase();
            let h = upper
                .rfind('H')
                .ok_or_else(|| Error::Parse(format!("term `{term}` names no hyperplane")))?;
            let index: usize = upper[h + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad hyperplane index in `{term}`")))?;
            let head = upper[..h].trim_end_matches('*');
            let mut c = if head.is_empty() { Rational64::one() } else { parse_coeff(head)? };
            if negative {
                c = -c;
            }
            if coeffs.len() <= index {
                coeffs.resize(index + 1, Rational64::zero());
            }
            coeffs[index] += c;
        }
        Ok(RDivisor { coeffs })
    }
}
