use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("CFL condition violated: dt*max|k|/dx = {ratio:.4} exceeds {limit}")]
    Cfl { ratio: f64, limit: f64 },

    #[error("numerical blowup at step {step}: max|f| = {max:.3e} exceeds {threshold:.3e}")]
    Blowup { step: usize, max: f64, threshold: f64 },

    #[error("oracle refused: grid {n_x}x{n_k} exceeds the cap of {cap} nodes")]
    OracleCap { n_x: usize, n_k: usize, cap: usize },

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),

    #[error("requested {requested} singular directions but the numerical rank is {rank}")]
    RankDeficient { requested: usize, rank: usize },

    #[error("indeterminate residual: {0}")]
    Indeterminate(String),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("assembly failed for pair ({i}, {j}): {source}")]
    Assembly {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },
}
