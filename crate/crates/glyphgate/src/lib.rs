//! Toolkit for finding, auditing, measuring, and repairing information
//! leaks in PDF text redactions caused by residual glyph-positioning
//! metadata: the exact width of excised text and the sub-pixel shifts
//! applied to the glyphs around it.

pub mod data;
pub mod error;
pub mod ir;
pub mod metrics;
pub mod pdf;
pub mod schemes;
pub mod units;

pub use error::{Error, Result};
pub use units::TextSpaceUnit;
