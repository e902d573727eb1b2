//! Nearest-site, farthest-site and order-k Voronoi diagrams of planar
//! point sets computed under a memory-constrained model: read-only input,
//! a workspace of O(s) words, and write-once output.

pub mod bench;
pub mod delaunay;
pub mod error;
pub mod gen;
pub mod geometry;
pub mod hull;
pub mod input;
pub mod memory;
pub mod num;
pub mod oracle;
pub mod orderk;
pub mod record;
pub mod run;
pub mod scan;
pub mod svg;
pub mod tradeoff;
