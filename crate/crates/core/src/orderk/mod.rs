//! Order-k diagrams for k = 1..K, each built from the one below and run
//! as a pipeline so that the whole tower fits in O(s) words.

pub mod halfedge;
pub mod lemma6;
pub mod lift;
pub mod pipeline;
pub mod successor;

pub use halfedge::{cog_key, CogKey, HalfEdge};
pub use lemma6::{bigbig_halfedges, find_big_k, lemma6_order_step, BigCellTableK, OrderRounds};
pub use lift::{batch_order_diagram, OrderDiagram, OrderEdge};
pub use pipeline::{pipeline_run, EdgeBuffer, PipelineConfig, PipelineReport};
pub use successor::successor_step;
