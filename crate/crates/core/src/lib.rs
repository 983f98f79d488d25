//! Online and dynamic algorithms for geometric set cover and hitting set
//! with squares, intervals and axis-aligned hyperrectangles, plus exact
//! oracles and adversarial instances for measuring them.

pub mod bbd;
pub mod dyn_geom;
pub mod dyn_sc;
pub mod error;
pub mod eval;
pub mod ext_quadtree;
pub mod geom;
pub mod harness;
pub mod hitset;
pub mod quadtree;
pub mod transforms;

pub use error::{Error, Result};
pub use geom::{AxisBox, Bounds, InstanceMeta, Point};
