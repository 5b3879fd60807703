//! Reproducing kernels of radially weighted Bergman spaces on the disk and
//! Segal–Bargmann spaces on the plane, with the associated-weight ("star")
//! transform and kernel zeros.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod exact;
pub mod kernels;
pub mod plane;
pub mod quadrature;
pub mod starcalc;
pub mod weights;
pub mod zeros;

pub use error::{Error, Result};
pub use exact::Param;
pub use kernels::KernelSeries;
pub use quadrature::QuadratureConfig;
pub use weights::{Domain, RadialWeight};
pub use zeros::{ZeroConfig, ZeroReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
