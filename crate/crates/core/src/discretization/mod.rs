//! Radial grid on `[1, R]`, angular Fourier transforms, radial stencils and the
//! flat-measure (`dr dtheta`, no Jacobian) quadrature used by every norm.

mod calculus;
mod grid;
mod modes;

pub use calculus::{
    d2_dr2, d_dr, d_dr_into, integrate, norm_l2_flat, physical_norm_l2_flat, profile_norm,
    sup_norm, RadialValue,
};
pub use grid::{build_grid, RadialGrid};
pub use modes::{
    theta_forward, theta_inverse, theta_resolution, ModeField, PhysicalField, ThetaTransform,
};
