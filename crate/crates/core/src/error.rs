use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("negative mixture weight {weight} at position {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("mixture weights sum to {sum}, expected 1")]
    WeightSumMismatch { sum: f64 },
    #[error("{weights} weights given for {boxes} boxes")]
    LengthMismatch { weights: usize, boxes: usize },
    #[error("correlators induce a negative probability {value} at p({a}{b}|{x}{y})")]
    NegativeProbability {
        x: usize,
        y: usize,
        a: usize,
        b: usize,
        value: f64,
    },
    #[error("singular marginal at (x={x}, y={y}): c_xy = {cxy} but c_x * c_y = {product}")]
    SingularMarginal {
        x: usize,
        y: usize,
        cxy: f64,
        product: f64,
    },
    #[error("normalised correlator D_{x}{y} = {value} lies outside [-1, 1]")]
    DOutOfRange { x: usize, y: usize, value: f64 },
    #[error("protocol depth {depth} exceeds the maximum of {max}")]
    DepthTooLarge { depth: u32, max: u32 },
    #[error("protocol depth must be at least 1")]
    ZeroDepth,
    #[error("slice point (alpha={alpha}, beta={beta}) lies outside the weight simplex")]
    OutOfSimplex { alpha: f64, beta: f64 },
    #[error("vertex {0} is co-linear with PR and white noise")]
    ColinearVertex(String),
    #[error("local vertex {0} does not lie on the CHSH facet")]
    NotOnFacet(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("invalid vertex bits {0:?}")]
    InvalidBits(String),
    #[error("malformed box file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
