//! Extrinsic geometry of closed hypersurfaces immersed in constant-curvature
//! model spaces, with a discrete calculus for verifying curvature identities
//! and integral formulas on a catalog of closed-form examples.

pub mod charts;
pub mod error;
pub mod extrinsic;
pub mod fieldcalc;
pub mod jet;
pub mod spaceform;

pub use charts::{default_catalog, parse_entry, CatalogEntry, Chart};
pub use error::{GeomError, Result};
pub use extrinsic::{point_geometry, PointGeometry};
pub use fieldcalc::{Grid, GridField};
pub use spaceform::SpaceFormModel;
