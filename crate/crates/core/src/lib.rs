//! Spectral simulation and verification toolkit for the periodic complex
//! modified KdV equation
//!
//! ```text
//! u_t + u_xxx = ±|u|² u_x        on T = R/2πZ
//! ```
//!
//! together with its mass-renormalized and mass-and-momentum-renormalized
//! variants. The crate covers Fourier-side representation of fields,
//! the cubic nonlinearity and its resonance decomposition, time
//! integration, the Duhamel-kernel machinery built on a smooth time cutoff,
//! discrete X^{s,b} norms, and a small experiment harness.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod nonlinearity;
pub mod quadrature;
pub mod spectral;
pub mod xsb;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral::{ConservedPair, FLParams, SpectralField};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Japanese bracket `(1 + x²)^{1/2}`.
#[inline]
pub fn jb(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}
