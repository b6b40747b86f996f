use thiserror::Error;

/// Everything that can go wrong in the library proper. IO is folded in so the
/// CLI can funnel any failure through one exit path.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs an odd node count of at least 3, got {0}")]
    BadGridSize(usize),

    #[error("value vector has length {got}, grid has {want} nodes")]
    LengthMismatch { got: usize, want: usize },

    #[error("support [{a}, {b}] is not an interval inside [-1, 1]")]
    BadSupport { a: f64, b: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("frequency spacing {0} outside (0, pi/8]")]
    BadSpacing(f64),

    #[error("wave number {re}+{im}i outside the admissible sector |Im| < Re")]
    OutsideSector { re: f64, im: f64 },

    #[error("frequency {k} outside the data band (0, {k_max}]")]
    OutsideBand { k: f64, k_max: f64 },

    #[error("operation is undefined for an identically zero source")]
    ZeroSource,

    #[error("spectral data set is empty")]
    EmptySpectrum,

    #[error("cutoff frequency must exceed 1, got {0}")]
    CutoffNotAboveOne(f64),

    #[error("a-priori bound must be at least 1, got {0}")]
    BoundBelowOne(f64),

    #[error("squared data level must be nonnegative, got {0}")]
    NegativeDataLevel(f64),

    #[error("asymptotic branch unavailable: {0}")]
    BranchUnavailable(&'static str),

    #[error("K ladder must be strictly increasing with every entry > 1")]
    BadLadder,

    #[error("unknown fixture id '{0}'")]
    UnknownFixture(String),

    #[error("config stanza {stanza}: {message}")]
    Config { stanza: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
