pub mod bessel;
pub mod checks;
pub mod kernels;
pub mod quad;

pub use bessel::{bessel_j_real, bessel_jn, bessel_k_real, bessel_y_real};
pub use kernels::{
    bessel_k_imag, bessel_y_imag_pair, f_kernel, voronoi_kernel, whittaker_weight, ArchimedeanParameter, Sign,
    VoronoiKernel,
};

use crate::error::{domain, Result};

/// `J_order(y)` with the domain check of the public interface.
pub fn bessel_j(order: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain("J requires y > 0");
    }
    bessel_j_real(order, y)
}
