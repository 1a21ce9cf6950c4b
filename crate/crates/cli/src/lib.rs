//! File formats, DOT export and the `ontomerge` command line.

pub mod dot;
pub mod format;
mod run;

pub use format::{parse_alignment, parse_ontology, serialize_ontology, FormatError, Manifest, NamedAlignment};
pub use run::{run, EXIT_INPUT, EXIT_LIMIT, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
