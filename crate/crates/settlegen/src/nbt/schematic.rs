//! Classic `.schematic` container: a gzip-wrapped NBT compound with Short
//! `Width`/`Height`/`Length` and flat `Blocks`/`Data` byte arrays indexed
//! `(y * Length + z) * Width + x`. This is the legacy interchange format
//! of classic map-editor tooling; modern palette formats are out of
//! scope.

use thiserror::Error;

use super::{parse_nbt, write_nbt, NamedRoot, NbtError, Tag, TagKind};
use crate::voxel::{BlockState, Vec3i, VoxelWorld};

#[derive(Debug, Error, PartialEq)]
pub enum SchematicError {
    #[error(transparent)]
    Nbt(#[from] NbtError),
    #[error("schematic is missing required key {key:?}")]
    MissingKey { key: &'static str },
    #[error("schematic key {key:?} must be a {expected:?} tag")]
    WrongKind { key: &'static str, expected: TagKind },
    #[error("schematic dimension {key:?} is {value}, must be >= 1")]
    InvalidDimension { key: &'static str, value: i16 },
    #[error("schematic array {key:?} holds {actual} bytes but W*H*L = {expected}")]
    SizeMismatch { key: &'static str, expected: usize, actual: usize },
    #[error("world dimension {value} exceeds the schematic Short limit 32767")]
    DimensionOverflow { value: i32 },
}

fn dim(root: &NamedRoot, key: &'static str) -> Result<i16, SchematicError> {
    match root.compound().get(key) {
        None => Err(SchematicError::MissingKey { key }),
        Some(Tag::Short(v)) => Ok(*v),
        Some(_) => Err(SchematicError::WrongKind { key, expected: TagKind::Short }),
    }
}

fn byte_array<'a>(root: &'a NamedRoot, key: &'static str) -> Result<&'a [u8], SchematicError> {
    match root.compound().get(key) {
        None => Err(SchematicError::MissingKey { key }),
        Some(Tag::ByteArray(v)) => Ok(v),
        Some(_) => Err(SchematicError::WrongKind { key, expected: TagKind::ByteArray }),
    }
}

/// Decode a schematic into a world at origin (0, 0, 0). `Data` nibbles
/// are masked to their low 4 bits.
pub fn load_schematic(bytes: &[u8]) -> Result<VoxelWorld, SchematicError> {
    let root = parse_nbt(bytes)?;
    let width = dim(&root, "Width")?;
    let height = dim(&root, "Height")?;
    let length = dim(&root, "Length")?;
    for (key, value) in [("Width", width), ("Height", height), ("Length", length)] {
        if value < 1 {
            return Err(SchematicError::InvalidDimension { key, value });
        }
    }
    let expected = width as usize * height as usize * length as usize;
    let blocks = byte_array(&root, "Blocks")?;
    let data = byte_array(&root, "Data")?;
    if blocks.len() != expected {
        return Err(SchematicError::SizeMismatch { key: "Blocks", expected, actual: blocks.len() });
    }
    if data.len() != expected {
        return Err(SchematicError::SizeMismatch { key: "Data", expected, actual: data.len() });
    }
    let cells = blocks
        .iter()
        .zip(data.iter())
        .map(|(&id, &d)| BlockState::new(id, d & 0x0F))
        .collect();
    Ok(VoxelWorld::from_flat(width as i32, height as i32, length as i32, Vec3i::new(0, 0, 0), cells)
        .expect("dimensions validated above"))
}

/// Encode a world as a gzip-wrapped schematic. Every dimension must fit
/// the format's Short fields.
pub fn save_schematic(world: &VoxelWorld) -> Result<Vec<u8>, SchematicError> {
    for value in [world.width(), world.height(), world.length()] {
        if value > i16::MAX as i32 {
            return Err(SchematicError::DimensionOverflow { value });
        }
    }
    let flat = world.flat_blocks();
    let blocks: Vec<u8> = flat.iter().map(|b| b.id).collect();
    let data: Vec<u8> = flat.iter().map(|b| b.data).collect();
    let tag = Tag::Compound(
        [
            ("Width".to_string(), Tag::Short(world.width() as i16)),
            ("Height".to_string(), Tag::Short(world.height() as i16)),
            ("Length".to_string(), Tag::Short(world.length() as i16)),
            ("Blocks".to_string(), Tag::ByteArray(blocks)),
            ("Data".to_string(), Tag::ByteArray(data)),
        ]
        .into_iter()
        .collect(),
    );
    let root = NamedRoot { name: "Schematic".into(), tag };
    Ok(write_nbt(&root, true)?)
}
