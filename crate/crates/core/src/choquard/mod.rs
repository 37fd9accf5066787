//! The nonlocal part of the system: the Riesz pairing, the Kirchhoff
//! coefficient and the exponential nonlinearity.

pub mod kirchhoff;
pub mod nonlinearity;
pub mod riesz;

pub use kirchhoff::KirchhoffModel;
pub use nonlinearity::NonlinearityModel;
pub use riesz::{
    build_riesz, build_riesz_cached, hls_check, nodal_lebesgue_norm, riesz_form, sphere_kernel, DiagonalBehaviour,
    HlsCheck, RieszOperator, DEFAULT_ANGULAR_ORDER,
};
