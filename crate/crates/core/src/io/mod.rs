//! File formats: packed sample rows, DIMACS graphs, live intervals.

pub mod dimacs;
pub mod intervals;
pub mod sample;

pub use dimacs::{emit_dimacs, parse_dimacs};
pub use intervals::{build_interference, parse_intervals, LiveInterval};
pub use sample::{pack_adjacency_row, read_csv, unpack_sample, write_csv, SampleRow, PACK_CAPACITY};
