//! Twisted fourth moment: arithmetic factors, the smooth weight, the
//! contour main term and the direct integral it is compared against.

mod arith;
mod contour;
mod direct;
mod shifts;
mod weight;

pub use arith::{
    big_a, big_b, big_f, big_g_factored, local_b, twist_pair_sum, v_factor_bound,
    window_euler_product, GFactors, WindowEuler, LOCAL_TOL, PAIR_SUM_MAX_SUPPORT,
};
pub use contour::{circle_integral, prop3_main_term, ContourConfig, ContourResult};
pub use direct::{direct_twisted_integral, TwistedIntegral, Weight};
pub use shifts::{sigma_z, vandermonde, RadiusRule, ShiftTuple};
pub use weight::{phi_bump, phi_weighted_power_moment, smoothstep, BumpFunction, MellinMoments};
