//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// Numerical failures ([`Error::SingularSystem`], [`Error::DegenerateNoise`],
/// [`Error::ZeroMeanField`], [`Error::SearchFailed`]) are distinct from
/// resource refusals ([`Error::BudgetExceeded`], [`Error::TooLarge`]) and
/// from plain input errors; the CLI maps each class to its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Covariance system could not be factorized even after jitter escalation.
    #[error("singular covariance system of dimension {dim} (jitter escalation exhausted)")]
    SingularSystem { dim: usize },

    /// Mutual information requires disjoint location sets.
    #[error("mutual information requires disjoint location sets; {shared} shared location(s) found")]
    OverlappingSets { shared: usize },

    /// Robots-per-column outside `1..=rows`.
    #[error("invalid action arity: k={k} must satisfy 1 <= k <= r={r}")]
    InvalidArity { k: usize, r: usize },

    /// Grid or stage index outside its valid range.
    #[error("index out of range: {what}")]
    OutOfRange { what: String },

    /// Requested enumeration or table size exceeds the configured guard.
    #[error("budget exceeded: {required} entries required, guard allows {guard}")]
    BudgetExceeded { required: u128, guard: u64 },

    /// k = r leaves no unobserved location, so mutual-information
    /// objectives and metrics are undefined.
    #[error("no unobserved locations: every row of every column is sampled (k = r)")]
    NoUnobserved,

    /// Policy lookup with a window that does not index the table.
    #[error("window not present in policy table: {why}")]
    UnknownWindow { why: String },

    /// Text-format parse failure; line and column are 1-indexed.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// Shapes of paths, grids, and fields disagree.
    #[error("dimension mismatch: {msg}")]
    DimensionMismatch { msg: String },

    /// The relative prediction error metric divides by the squared mean of
    /// the unobserved measurements, which is indistinguishable from zero.
    #[error("relative error undefined: mean of unobserved measurements is zero")]
    ZeroMeanField,

    /// Every hyperparameter candidate evaluated to a singular system.
    #[error("hyperparameter search failed: all candidates were singular")]
    SearchFailed,

    /// Full-covariance field sampling guard.
    #[error("grid too large for full-covariance sampling: {cells} cells > {max}")]
    TooLarge { cells: usize, max: usize },

    /// The loss bounds diverge as the noise-to-signal ratio goes to zero.
    #[error("degenerate noise: loss bounds require a positive noise-to-signal ratio")]
    DegenerateNoise,

    /// Any other invalid argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
