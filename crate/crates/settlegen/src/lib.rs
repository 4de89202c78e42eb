//! Unsupervised settlement generation on voxel terrain maps, plus
//! automated evaluation of the results.
//!
//! The pipeline: load or synthesize a voxel map, analyze its terrain
//! (heights, slopes, water, materials, buildable sites), run a generator
//! that emits an edit set and a settlement manifest, then score the
//! before/after pair against four judging categories with direct and
//! simulation-based metrics.
//!
//! - [`voxel`]: dense world grid, bounded access, atomic edits, diffing.
//! - [`nbt`]: the NBT binary tag format and the classic Schematic
//!   container, for interchange with external map tooling.
//! - [`terrain`]: heightmaps, slopes, material census, site finding, and
//!   seeded synthetic test terrain.
//! - [`casg`]: the simple reference generator (space-partitioned yards,
//!   random buildings, automaton-patterned walls).
//! - [`adaptive`]: the terrain-adaptive generator (site scoring, graded
//!   roads with bridges, grade-matched entrances, local materials).
//! - [`eval`]: walkability, lighting, and diff metrics rolled up into a
//!   four-category scorecard.

pub mod adaptive;
pub mod baseline;
pub mod blocks;
pub mod casg;
pub mod eval;
pub mod manifest;
pub mod nbt;
pub mod rng;
pub mod terrain;
pub mod voxel;

pub use voxel::{BlockState, BoundingBox, EditSet, Rect2, Vec3i, VoxelWorld};
