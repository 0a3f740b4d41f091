//! Crate-wide error type.
//!
//! Every fallible operation in the crate reports one of these variants; the
//! CLI maps them onto its exit codes (malformed input vs. structured failure
//! vs. inconclusive).

use thiserror::Error;

/// Errors raised by field construction, code validation, distinguishers and
/// recovery.
#[derive(Debug, Error)]
pub enum Error {
    /// Field characteristic is not a prime number.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// A requested enumeration or construction exceeds the size guard.
    #[error("size guard exceeded: {what} needs {needed} > {guard} (override with SUMRANK_SIZE_GUARD)")]
    SizeGuardExceeded {
        what: &'static str,
        needed: u64,
        guard: u64,
    },

    /// Division or inversion of the zero element.
    #[error("division by zero in F_{{q^m}}")]
    DivisionByZero,

    /// Conjugation a^c is only defined for c != 0.
    #[error("conjugation by zero is undefined")]
    ZeroConjugator,

    /// Fewer nontrivial conjugacy classes exist than were requested.
    #[error("requested {requested} class representatives but only {available} nontrivial classes exist")]
    NotEnoughClasses { requested: u64, available: u64 },

    /// The automorphism is not admissible for an Ore context.
    #[error("bad automorphism: {0}")]
    BadAutomorphism(String),

    /// Matrix/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A linear system has no solution.
    #[error("linear system is inconsistent")]
    NoSolution,

    /// A composition part exceeds the extension degree m.
    #[error("composition part {part} exceeds extension degree m = {m}")]
    PartExceedsM { part: usize, m: usize },

    /// Evaluation parameters are conjugate or lie in the trivial class.
    #[error("evaluation parameters must be pairwise non-conjugate and nontrivial: {0}")]
    ConjugacyViolation(String),

    /// A locator block is F_q-linearly dependent.
    #[error("locator block {block} is F_q-linearly dependent")]
    DependentLocators { block: usize },

    /// A block multiplier is zero.
    #[error("block multiplier {block} is zero")]
    ZeroMultiplier { block: usize },

    /// Code dimension is out of range for the instance.
    #[error("bad dimension: {0}")]
    BadDimension(String),

    /// Skew polynomial degree is too large for the operation.
    #[error("polynomial degree {degree} too large: {what} requires degree < {bound}")]
    DegreeTooLarge {
        degree: usize,
        bound: usize,
        what: &'static str,
    },

    /// Operation requires the zero derivation.
    #[error("operation requires the zero derivation (gamma = 0)")]
    NonzeroDerivation,

    /// Operation requires all block multipliers equal to one.
    #[error("operation requires trivial block multipliers (v_i = 1)")]
    NontrivialMultipliers,

    /// Operator inversion needs a nonzero evaluation parameter.
    #[error("operator inversion requires a nonzero evaluation parameter")]
    ZeroEvaluationParameter,

    /// A block permutation does not preserve block-length classes.
    #[error("permutation does not preserve block lengths: {0}")]
    LengthClassViolation(String),

    /// A matrix that must be invertible is singular.
    #[error("matrix is singular: {0}")]
    NotInvertible(String),

    /// A distinguisher precondition does not hold.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// No stack depth j satisfies the distinguisher inequality.
    #[error("no valid stack depth j exists for k = {k}, n = {n}")]
    NoValidJ { k: usize, n: usize },

    /// Explicit chain/stack depth out of range.
    #[error("bad depth j = {j}: {why}")]
    BadJ { j: usize, why: String },

    /// Multiplier sweep exhausted its candidate budget.
    #[error("multiplier sweep exhausted after {tried} candidates")]
    BudgetExhausted { tried: u64 },

    /// No code structure was found for the given parameters.
    #[error("no code structure found: {0}")]
    StructureNotFound(String),

    /// A kernel expected to be one-dimensional was not.
    #[error("kernel has dimension {dim}, expected 1 (input is not LRS for these parameters)")]
    KernelNotOneDimensional { dim: usize },

    /// The intersection chain did not end one-dimensional.
    #[error("intersection chain has dimension {dim}, expected 1")]
    IntersectionNotOneDimensional { dim: usize },

    /// A recovered solution is structurally degenerate.
    #[error("degenerate solution: {0}")]
    DegenerateSolution(String),

    /// Recovered parameters failed row-space verification.
    #[error("recovered parameters failed verification against the public code")]
    VerificationFailed,

    /// The parameter regime is outside what recovery supports.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Malformed JSON or inconsistent wire data.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MalformedInput(e.to_string())
    }
}
