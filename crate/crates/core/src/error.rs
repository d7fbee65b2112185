use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("player {player} is outside the universe {universe}")]
    PlayerOutOfRange { player: u64, universe: String },

    #[error("player indices start at 1, got 0")]
    ZeroPlayer,

    #[error("cofinite coalitions need an infinite universe")]
    CofiniteInFiniteUniverse,

    #[error("coalitions live in different universes ({left} vs {right})")]
    UniverseMismatch { left: String, right: String },

    #[error("field hull would have {members} members, above the cap of {cap}")]
    HullCapExceeded { members: u128, cap: usize },

    #[error("family is not a field of sets: {0}")]
    NotAField(String),

    #[error("v(∅) must be 0, got {0}")]
    EmptyCoalitionValue(String),

    #[error("value {value} of {coalition} is below the declared lower bound {bound}")]
    BelowLowerBound {
        coalition: String,
        value: String,
        bound: String,
    },

    #[error("coalition {0} is not feasible in this game")]
    Infeasible(String),

    #[error("duplicate coalition {0}")]
    DuplicateCoalition(String),

    #[error("missing value for coalition {0}")]
    MissingValue(String),

    #[error("grand coalition value conflicts: table says {table}, grand value is {grand}")]
    GrandValueConflict { table: String, grand: String },

    #[error("rule `{rule}` is undefined on {coalition}")]
    OutsideRuleDomain { rule: String, coalition: String },

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),

    #[error("linear program dimensions disagree: {0}")]
    Dimension(String),

    #[error("linear program solver failed: {0}")]
    Solver(String),

    #[error("certificate failed re-verification: {0}")]
    Verification(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// Resource caps are reported separately from malformed input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::HullCapExceeded { .. })
    }

    /// Internal errors mean a computed claim did not re-verify.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Verification(_) | Error::Solver(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
