use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    /// A coefficient of a Witt recursion numerator was not divisible by p^m.
    /// The recursion is integral, so this is always a bug.
    #[error("inexact division by {p}^{m} while computing {kind} polynomial of index {m}")]
    InexactDivision { kind: char, p: u64, m: usize },

    #[error("exponent overflow in packed monomial (arity {arity}, {bits} bits per variable)")]
    ExponentOverflow { arity: usize, bits: u32 },

    #[error("witt vectors over different rings (p = {left} vs p = {right})")]
    RingMismatch { left: u64, right: u64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("exponent vector {exponent:?} lies outside the chart")]
    ExponentOutOfChart { exponent: Vec<i64> },

    #[error("element does not live on chart {chart:?}: {reason}")]
    ChartMismatch { chart: Vec<usize>, reason: String },

    #[error("component {level} of a witt section left the section space")]
    MembershipViolation { level: usize },

    #[error("cochain groups of order p^{log_order} exceed the enumeration bound p^{bound_log}")]
    EnumerationBoundExceeded { log_order: u64, bound_log: u64 },

    #[error("multidegree window misses the cohomology support: {0}")]
    WindowIncomplete(String),

    #[error("divisor not compatible with the cover: {0}")]
    DivisorNotCompatible(String),

    #[error("group order {order} is divisible by p = {p}")]
    OrderDivisibleByP { order: u64, p: u64 },

    #[error("transition functions fail the cocycle condition on ({0}, {1}, {2})")]
    NotACocycle(usize, usize, usize),

    #[error("divisor is not Cartier: {0}")]
    NotCartier(String),

    #[error("configuration rejected: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}
