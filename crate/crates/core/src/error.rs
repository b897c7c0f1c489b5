use thiserror::Error;

/// Errors raised across field arithmetic, code construction, decoding and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("modulus is reducible, nontrivial factor {factor:?} (coefficients low to high)")]
    ReducibleModulus { factor: Vec<u32> },

    #[error("field order {0} exceeds the 2^16 table bound")]
    FieldTooLarge(u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{erasures} erasures exceed the correction capability {capability}")]
    CapabilityExceeded { erasures: usize, capability: usize },

    #[error("decode failure: non-erased symbols are not the restriction of a codeword")]
    DecodeFailure,

    #[error(
        "local read failure: {erasures} erasures in sub-block {sub_block}, capability {capability}"
    )]
    LocalReadFailure {
        sub_block: usize,
        erasures: usize,
        capability: usize,
    },

    #[error("global decode failure: {reason} (erasure profile {profile:?})")]
    GlobalDecodeFailure { reason: String, profile: [usize; 3] },

    #[error("distance bound not applicable: {0}")]
    BoundNotApplicable(String),

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error(
        "unrecoverable read of block {block} sub-block {sub_block}: erasure profile {profile:?}"
    )]
    Unrecoverable {
        block: u64,
        sub_block: usize,
        profile: [usize; 3],
    },

    #[error("malformed container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
