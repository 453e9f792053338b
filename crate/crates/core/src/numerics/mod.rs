//! Precision control, quadrature, root finding and special functions.

pub mod bigcomplex;
pub mod precision;
pub mod quad;
pub mod roots;
pub mod special;

pub use bigcomplex::BigComplex;
pub use precision::PrecisionContext;
pub use quad::{
    adaptive_legendre, chebyshev_integral, chebyshev_integral_adaptive, gauss_chebyshev, gauss_legendre, tanh_sinh,
    QuadValue, QuadratureKind, QuadratureRule,
};
pub use roots::{brent_root, BrentRoot};
pub use special::{
    airy_ai, airy_ai_f64, bessel_j0, bessel_j0_f64, jacobi_theta3, log_barnes_g, log_gamma, log_theta3, theta3,
    zeta_prime_minus_one,
};
