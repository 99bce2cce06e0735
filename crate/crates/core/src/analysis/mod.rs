//! Maximal functions, adapted maximal functions, square functions and the
//! auxiliary operators built from them.
//!
//! "Non-dyadic" suprema run over every mesh-aligned cube (or rectangle) of
//! the torus, wrapped cubes included, so they dominate the dyadic maximal
//! function of every shifted grid.

mod adapted;
mod aux;
mod maximal;
mod phi;
mod square;
mod window;

pub use adapted::{adapted_maximal, factor_adapted_maximal, AdaptedMode};
pub use aux::{aux_phi, AuxKind};
pub use maximal::{factor_maximal, maximal, Family, MaximalMode};
pub use phi::{phi_adapted, phi_sharp};
pub use square::{factor_shifted_square, square_function, SquareMode};

pub(crate) use maximal::rectangle_averages;
pub(crate) use window::Windows;
