//! Numerics for a three-dimensional vector field with an exact rotational
//! symmetry of order four and three simultaneous instabilities.
//!
//! The crate provides:
//!
//! * evaluators and analytic Jacobians for the model family in its general
//!   complex form, a concrete polynomial form, a rescaled form whose axis
//!   equilibria sit exactly at `(0, 0, ±1)`, and the Shimizu–Morioka system
//!   that the rescaled form limits onto ([`systems`]);
//! * an adaptive Dormand–Prince 5(4) integrator with dense output, event
//!   location, and tangent-frame propagation ([`integrator`]);
//! * Benettin-style Lyapunov spectra and a resumable, deterministic parameter
//!   sweep engine ([`lyapunov`], [`sweep`]);
//! * the parameter dictionaries between the physical, rescaled, and
//!   Shimizu–Morioka forms, with residual verification ([`normal_form`]);
//! * shooting machinery for the heteroclinic surface connecting the axis
//!   saddles, including split functions, surface location, arrival angles,
//!   and the explicit planar separatrix ([`heteroclinic`]);
//! * the two-dimensional model return map near the heteroclinic cycle, with
//!   cone-field certificates, orientation signs, parameter-region predicates,
//!   and a cubic Henon analysis ([`model_map`]);
//! * attractor classification by visit statistics and symmetry occupancy
//!   ([`classify`]);
//! * small formatting/IO helpers shared by the CLI ([`io`]).
//!
//! All public numeric types are plain data with [`serde`] derives; all
//! computations are deterministic functions of their inputs.

pub mod classify;
pub mod heteroclinic;
pub mod integrator;
pub mod io;
pub mod linalg;
pub mod lyapunov;
pub mod model_map;
pub mod normal_form;
pub mod sweep;
pub mod systems;
pub mod types;

pub use types::{
    ComplexValue, DerivedConstants, IntegratorConfig, LyapunovConfig, PhysParams, RescaledParams,
    SMParams, State3, SystemCoefficients, Trajectory,
};
