//! Domain types: grids, metrics, classes, designs, witnesses and trees.

mod class;
mod grid;
mod metric;
mod tree;
mod witness;

pub use class::{FunctionClass, SampleDesign};
pub use grid::{
    fmt_rat, parse_rat, rat, rat_int, rat_to_f64, Alphabet, Rat, ValueGrid, MAX_Q,
};
pub(crate) use grid::require_positive;
pub use metric::Metric;
pub use tree::{heap_slot, LabeledTree, Path, MAX_TREE_DEPTH};
pub use witness::WitnessPair;
