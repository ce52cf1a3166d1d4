//! Orbit counting near the axis of a hyperbolic element of `PSL(2, Z)`.
//!
//! The scheme: a `gamma`-invariant net on the axis cuts horocycle space into
//! cells according to which net point minimises the Busemann function; the
//! cells are squeezed between inner and outer versions; orbit points are
//! sorted into sectors by the cell of the direction in which a net point
//! sees them. Counts grow like `e^R`, as do tube areas.

mod measure;
mod net;
mod orbit;
mod sector;
mod volume;

pub use measure::*;
pub use net::*;
pub use orbit::*;
pub use sector::*;
pub use volume::*;
