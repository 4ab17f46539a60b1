//! Output artifacts and file helpers.

pub mod artifacts;
pub mod tables;

pub use artifacts::{read_json, sha256_hex, write_atomic, ArtifactSet, Manifest, ManifestEntry, MANIFEST_NAME};
pub use tables::{boundary_csv, num, pv_loop_csv, snapshot_csv, sweep_csv, trajectory_csv};
