//! Limit objects: the zeta function, the GCD limit law and its Mellin
//! transform, moments and draws of the LCM ratio limit, laws of the
//! normalized product, volumes, and spacing laws.

pub mod gcd;
pub mod lcm;
pub mod product;
pub mod spacing;
pub mod zeta;

pub use gcd::{gcd_limit_mellin, gcd_limit_pmf};
pub use lcm::{lcm_ratio_moment, sample_lcm_ratio_limit, LimitModel, MomentEstimate};
pub use product::{
    u12_cdf, u12_density, u_cdf, u_moment, volume, x_star, LatticeProductLaw, ProductLimitLaw,
    VolumeEstimate,
};
pub use spacing::{order_statistic_cdf, spacing_joint_density, spacing_marginal_cdf};
pub use zeta::{zeta, zeta_bounded, zeta_int};
