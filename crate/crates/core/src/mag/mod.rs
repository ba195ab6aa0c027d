//! Maximal abelian gauge, abelian projection and monopole currents.

pub mod abelian;
pub mod creutz;
pub mod gauge_fix;
pub mod monopole;

pub use abelian::{
    abelian_plaquette_decompose, abelian_project, abelian_wilson_loop, abelian_wilson_loop_table, decompose_angle,
    wrap_angle, AbelianField,
};
pub use creutz::{creutz_ratio, creutz_table};
pub use gauge_fix::{mag_fix, mag_fix_with, mag_functional, MagFixOptions, MagFixReport};
pub use monopole::{monopole_current, monopole_density, MonopoleCurrent};
