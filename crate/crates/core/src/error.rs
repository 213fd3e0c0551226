use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {grid} points cannot resolve frequencies up to {n_max} (need at least {needed})")]
    Aliasing {
        grid: usize,
        n_max: usize,
        needed: usize,
    },
    #[error("{:.2}% of the time-transform mass sits next to the edge of the frequency window", leakage * 100.0)]
    TimeAliasing { leakage: f64 },
    #[error("sample grid is not uniform on [0, 2pi): {0}")]
    NonUniformGrid(String),
    #[error("non-finite coefficient at frequency {0}")]
    NonFinite(i64),
    #[error("frequency {n} outside the band |n| <= {n_max}")]
    OutOfBand { n: i64, n_max: usize },
    #[error("integer overflow evaluating the resonance function at ({0}, {1}, {2})")]
    Overflow(i64, i64, i64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("blow-up at t = {time}: |coefficient| = {magnitude:e} at frequency {frequency}")]
    BlowUp {
        time: f64,
        frequency: i64,
        magnitude: f64,
    },
    #[error("Picard iteration diverged at iterate {iteration} (difference {difference:e})")]
    Diverged { iteration: usize, difference: f64 },
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },
    #[error("not enough time slices for the requested quadrature: {0}")]
    Resolution(String),
    #[error("malformed trajectory: {0}")]
    Trajectory(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
