//! Centrally symmetric convex bodies, enclosing ellipsoids and the
//! circumscribing parallelotope.
//!
//! Floating point is used only to *find* ellipsoids and axes; every claim
//! handed downstream (point membership, slab containment) is re-checked in
//! exact rational arithmetic.

mod body;
mod ellipsoid;
pub mod float;
pub mod lp;
mod parallelotope;

pub use body::{BodyRep, ConvexBody, Facets};
pub use ellipsoid::{DEFAULT_EPS, Ellipsoid, MVEE_MAX_ITER, mvee, unit_ball_volume};
pub use parallelotope::{Parallelotope, circumscribe_parallelotope, sqrt_upper};
