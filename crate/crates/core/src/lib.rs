//! Hybrid graph coloring for register allocation.
//!
//! A stacked LSTM reads a graph one adjacency row at a time and guesses a color per
//! node; a deterministic correction pass then repairs every monochromatic edge. An
//! exact solver provides training labels and ground truth, and DSATUR/RLF serve as
//! classical baselines.
//!
//! ```
//! use hycolor::{correction::color_correct, graph::{Coloring, Graph}};
//!
//! let k3 = Graph::complete(3).unwrap();
//! let (fixed, stats) = color_correct(&k3, &Coloring::uniform(3, 1).unwrap()).unwrap();
//! assert_eq!(fixed.as_slice(), &[2, 3, 1]);
//! assert_eq!(stats.fresh_colors_added, 2);
//! ```

pub mod correction;
pub mod error;
pub mod exact;
pub mod gen;
pub mod graph;
pub mod heuristics;
pub mod hybrid;
pub mod io;
pub mod neural;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{Coloring, ColoringReport, Graph};
