//! Computer algebra for the mod-2 Steenrod algebra and the module and
//! characteristic-class computations built on it.

pub mod error;
pub mod f2core;
pub mod steenrod;
pub mod milnor;
pub mod cartan;
pub mod presets;
pub mod bundlecalc;
pub mod modcat;
pub mod charclass;
pub mod expr;
pub mod verify;

pub use error::{Error, Result};
pub use f2core::{binom_mod2, F2Matrix, F2Poly, F2Vector, Monomial, PoincareSeries, WeightedPolyRing};
