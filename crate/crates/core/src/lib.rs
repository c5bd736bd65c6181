//! Rainbow F-factors in colored (hyper)graph systems.

pub mod absorbers;
pub mod fb;
pub mod generators;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod sweep;
