//! Dataset descriptors, CSV / triplet IO, loading into normalized matrices
//! and synthetic data generation.

mod generate;
mod load;
mod schema;
mod tables;

pub use generate::{gen_mn, gen_pkfk, Manifest, SynthParams, MANIFEST_FILE, SCHEMA_FILE};
pub use load::{load, load_with, Dataset, KeyMap};
pub use schema::{EntitySpec, KeyKind, KeySpec, SchemaDescriptor, Storage, TableSpec};
pub use tables::{apply_storage, read_csv, read_triplets, write_csv, write_triplets, CsvColumn, CsvTable};

/// Tables denser than this are stored dense on load (unless overridden).
pub const DENSE_THRESHOLD: f64 = 0.05;
