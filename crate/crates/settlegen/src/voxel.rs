//! Dense voxel world storage: bounded block access, atomic edit
//! application, and world diffing.
//!
//! The world is a dense `W x H x L` grid of [`BlockState`]s with a world
//! origin, indexed by the flat convention `(y * L + z) * W + x`. Maps in
//! this domain are bounded (competition footprint is 256 x 256), so dense
//! storage keeps the index contract simple and access O(1).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks;

/// World axis, used to report which coordinate of a position was out of
/// bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VoxelError {
    #[error("position ({x}, {y}, {z}) out of bounds on axis {axis} (world is {w}x{h}x{l} at origin ({ox}, {oy}, {oz}))")]
    OutOfBounds {
        axis: Axis,
        x: i32,
        y: i32,
        z: i32,
        w: i32,
        h: i32,
        l: i32,
        ox: i32,
        oy: i32,
        oz: i32,
    },
    #[error("block data {data} exceeds the metadata nibble range 0..=15")]
    InvalidBlockData { data: u8 },
    #[error("world dimensions {w}x{h}x{l} invalid: every dimension must be >= 1")]
    InvalidDimensions { w: i32, h: i32, l: i32 },
    #[error("bounding box min {min:?} exceeds max {max:?} on axis {axis}")]
    InvalidBox { min: (i32, i32, i32), max: (i32, i32, i32), axis: Axis },
    #[error("worlds differ in shape: {a_w}x{a_h}x{a_l} at {a_origin:?} vs {b_w}x{b_h}x{b_l} at {b_origin:?}")]
    ShapeMismatch {
        a_w: i32,
        a_h: i32,
        a_l: i32,
        a_origin: (i32, i32, i32),
        b_w: i32,
        b_h: i32,
        b_l: i32,
        b_origin: (i32, i32, i32),
    },
}

/// Integer block position. `y` is vertical. Serializes as the JSON
/// triple `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec3i {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Serialize for Vec3i {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.x, self.y, self.z).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vec3i {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (x, y, z) = <(i32, i32, i32)>::deserialize(deserializer)?;
        Ok(Vec3i { x, y, z })
    }
}

impl Vec3i {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Self { x, y, z }
    }

    pub fn manhattan(self, other: Self) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) + self.z.abs_diff(other.z)
    }
}

/// A block: legacy numeric id plus the 4-bit metadata nibble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockState {
    pub id: u8,
    pub data: u8,
}

impl BlockState {
    pub const AIR: BlockState = BlockState { id: blocks::AIR, data: 0 };

    pub const fn new(id: u8, data: u8) -> Self {
        Self { id, data }
    }

    /// Shorthand for a block with zero metadata.
    pub const fn of(id: u8) -> Self {
        Self { id, data: 0 }
    }

    pub fn is_air(self) -> bool {
        self.id == blocks::AIR
    }

    /// The metadata nibble must fit in 4 bits.
    pub fn validate(self) -> Result<(), VoxelError> {
        if self.data > 0x0F {
            Err(VoxelError::InvalidBlockData { data: self.data })
        } else {
            Ok(())
        }
    }
}

/// Axis-aligned box, inclusive on all axes. Inclusive bounds match the
/// "selection over a map subsection" semantics and avoid off-by-one in
/// fence and wall perimeters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Vec3i,
    pub max: Vec3i,
}

impl BoundingBox {
    pub fn new(min: Vec3i, max: Vec3i) -> Result<Self, VoxelError> {
        let axis = if min.x > max.x {
            Some(Axis::X)
        } else if min.y > max.y {
            Some(Axis::Y)
        } else if min.z > max.z {
            Some(Axis::Z)
        } else {
            None
        };
        if let Some(axis) = axis {
            return Err(VoxelError::InvalidBox {
                min: (min.x, min.y, min.z),
                max: (max.x, max.y, max.z),
                axis,
            });
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> i32 {
        self.max.x - self.min.x + 1
    }

    pub fn height(&self) -> i32 {
        self.max.y - self.min.y + 1
    }

    pub fn length(&self) -> i32 {
        self.max.z - self.min.z + 1
    }

    /// Number of (x, z) columns covered.
    pub fn footprint(&self) -> i64 {
        self.width() as i64 * self.length() as i64
    }

    pub fn contains(&self, p: Vec3i) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }

    /// Center column of the box in (x, z).
    pub fn center_xz(&self) -> (i32, i32) {
        ((self.min.x + self.max.x) / 2, (self.min.z + self.max.z) / 2)
    }
}

/// Inclusive 2D rectangle in the (x, z) plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect2 {
    pub min_x: i32,
    pub min_z: i32,
    pub max_x: i32,
    pub max_z: i32,
}

impl Rect2 {
    pub fn new(min_x: i32, min_z: i32, max_x: i32, max_z: i32) -> Self {
        debug_assert!(min_x <= max_x && min_z <= max_z);
        Self { min_x, min_z, max_x, max_z }
    }

    pub fn width(&self) -> i32 {
        self.max_x - self.min_x + 1
    }

    pub fn depth(&self) -> i32 {
        self.max_z - self.min_z + 1
    }

    pub fn area(&self) -> i64 {
        self.width() as i64 * self.depth() as i64
    }

    pub fn contains(&self, x: i32, z: i32) -> bool {
        (self.min_x..=self.max_x).contains(&x) && (self.min_z..=self.max_z).contains(&z)
    }

    /// Rectangle grown by `n` cells on every side.
    pub fn expand(&self, n: i32) -> Rect2 {
        Rect2 {
            min_x: self.min_x - n,
            min_z: self.min_z - n,
            max_x: self.max_x + n,
            max_z: self.max_z + n,
        }
    }

    /// Rectangle shrunk by `n` cells on every side, if that leaves at
    /// least one cell.
    pub fn shrink(&self, n: i32) -> Option<Rect2> {
        let r = Rect2 {
            min_x: self.min_x + n,
            min_z: self.min_z + n,
            max_x: self.max_x - n,
            max_z: self.max_z - n,
        };
        (r.min_x <= r.max_x && r.min_z <= r.max_z).then_some(r)
    }

    pub fn intersects(&self, other: &Rect2) -> bool {
        self.min_x <= other.max_x
            && other.min_x <= self.max_x
            && self.min_z <= other.max_z
            && other.min_z <= self.max_z
    }

    /// Cells on the rectangle outline, row-by-row in (z, x) order.
    pub fn perimeter_cells(&self) -> Vec<(i32, i32)> {
        let mut cells = Vec::new();
        for z in self.min_z..=self.max_z {
            for x in self.min_x..=self.max_x {
                if x == self.min_x || x == self.max_x || z == self.min_z || z == self.max_z {
                    cells.push((x, z));
                }
            }
        }
        cells
    }

    pub fn cells(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (self.min_z..=self.max_z)
            .flat_map(move |z| (self.min_x..=self.max_x).map(move |x| (x, z)))
    }
}

/// An ordered list of block writes. The atomic output unit of every
/// generator: later writes to the same position win.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditSet {
    edits: Vec<(Vec3i, BlockState)>,
}

impl EditSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, pos: Vec3i, state: BlockState) {
        self.edits.push((pos, state));
    }

    pub fn set(&mut self, x: i32, y: i32, z: i32, state: BlockState) {
        self.push(Vec3i::new(x, y, z), state);
    }

    pub fn extend(&mut self, other: EditSet) {
        self.edits.extend(other.edits);
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Vec3i, BlockState)> {
        self.edits.iter()
    }
}

impl FromIterator<(Vec3i, BlockState)> for EditSet {
    fn from_iter<T: IntoIterator<Item = (Vec3i, BlockState)>>(iter: T) -> Self {
        Self { edits: iter.into_iter().collect() }
    }
}

/// Dense block grid with a world-space origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelWorld {
    width: i32,
    height: i32,
    length: i32,
    origin: Vec3i,
    blocks: Vec<BlockState>,
}

impl VoxelWorld {
    /// Create a world filled with `fill`. Dimensions must all be >= 1.
    pub fn filled(
        width: i32,
        height: i32,
        length: i32,
        origin: Vec3i,
        fill: BlockState,
    ) -> Result<Self, VoxelError> {
        if width < 1 || height < 1 || length < 1 {
            return Err(VoxelError::InvalidDimensions { w: width, h: height, l: length });
        }
        fill.validate()?;
        let cells = width as usize * height as usize * length as usize;
        Ok(Self { width, height, length, origin, blocks: vec![fill; cells] })
    }

    /// Create an all-air world.
    pub fn air(width: i32, height: i32, length: i32, origin: Vec3i) -> Result<Self, VoxelError> {
        Self::filled(width, height, length, origin, BlockState::AIR)
    }

    /// Build a world directly from a flat block array laid out as
    /// `(y * L + z) * W + x`. The array length must be exactly `W*H*L`.
    pub(crate) fn from_flat(
        width: i32,
        height: i32,
        length: i32,
        origin: Vec3i,
        blocks: Vec<BlockState>,
    ) -> Result<Self, VoxelError> {
        if width < 1 || height < 1 || length < 1 {
            return Err(VoxelError::InvalidDimensions { w: width, h: height, l: length });
        }
        assert_eq!(blocks.len(), width as usize * height as usize * length as usize);
        Ok(Self { width, height, length, origin, blocks })
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn length(&self) -> i32 {
        self.length
    }

    pub fn origin(&self) -> Vec3i {
        self.origin
    }

    /// The box covering the whole world, in world coordinates.
    pub fn bounds(&self) -> BoundingBox {
        BoundingBox {
            min: self.origin,
            max: Vec3i::new(
                self.origin.x + self.width - 1,
                self.origin.y + self.height - 1,
                self.origin.z + self.length - 1,
            ),
        }
    }

    /// Flat index of a local position: `(y * L + z) * W + x`.
    #[inline]
    pub fn flat_index(&self, lx: i32, ly: i32, lz: i32) -> usize {
        debug_assert!(lx >= 0 && ly >= 0 && lz >= 0);
        (ly as usize * self.length as usize + lz as usize) * self.width as usize + lx as usize
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn unflatten(&self, index: usize) -> (i32, i32, i32) {
        let w = self.width as usize;
        let l = self.length as usize;
        let x = index % w;
        let rest = index / w;
        let z = rest % l;
        let y = rest / l;
        (x as i32, y as i32, z as i32)
    }

    fn local(&self, pos: Vec3i) -> Result<(i32, i32, i32), VoxelError> {
        let lx = pos.x - self.origin.x;
        let ly = pos.y - self.origin.y;
        let lz = pos.z - self.origin.z;
        let axis = if lx < 0 || lx >= self.width {
            Some(Axis::X)
        } else if ly < 0 || ly >= self.height {
            Some(Axis::Y)
        } else if lz < 0 || lz >= self.length {
            Some(Axis::Z)
        } else {
            None
        };
        match axis {
            Some(axis) => Err(VoxelError::OutOfBounds {
                axis,
                x: pos.x,
                y: pos.y,
                z: pos.z,
                w: self.width,
                h: self.height,
                l: self.length,
                ox: self.origin.x,
                oy: self.origin.y,
                oz: self.origin.z,
            }),
            None => Ok((lx, ly, lz)),
        }
    }

    /// Read the block at a world position.
    pub fn block_at(&self, pos: Vec3i) -> Result<BlockState, VoxelError> {
        let (lx, ly, lz) = self.local(pos)?;
        Ok(self.blocks[self.flat_index(lx, ly, lz)])
    }

    /// Write the block at a world position.
    pub fn set_block(&mut self, pos: Vec3i, state: BlockState) -> Result<(), VoxelError> {
        state.validate()?;
        let (lx, ly, lz) = self.local(pos)?;
        let idx = self.flat_index(lx, ly, lz);
        self.blocks[idx] = state;
        Ok(())
    }

    /// Apply a whole edit set atomically: every edit is validated first,
    /// and on any error the world is left untouched. Evaluation depends on
    /// clean before/after pairs, so partial application is forbidden.
    pub fn apply_edit_set(&mut self, edits: &EditSet) -> Result<(), VoxelError> {
        let mut resolved = Vec::with_capacity(edits.len());
        for &(pos, state) in edits.iter() {
            state.validate()?;
            let (lx, ly, lz) = self.local(pos)?;
            resolved.push((self.flat_index(lx, ly, lz), state));
        }
        for (idx, state) in resolved {
            self.blocks[idx] = state;
        }
        Ok(())
    }

    /// Raw access to the flat block array (schematic serialization).
    pub(crate) fn flat_blocks(&self) -> &[BlockState] {
        &self.blocks
    }

    /// Debug text dump: one line per non-air block, `x y z id data` in
    /// world coordinates, ascending flat-index order.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if b.is_air() {
                continue;
            }
            let (lx, ly, lz) = self.unflatten(i);
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                self.origin.x + lx,
                self.origin.y + ly,
                self.origin.z + lz,
                b.id,
                b.data
            );
        }
        out
    }
}

/// Minimal edit set turning `before` into `after`, in ascending flat-index
/// order. Both worlds must have identical dimensions and origin.
pub fn diff_worlds(before: &VoxelWorld, after: &VoxelWorld) -> Result<EditSet, VoxelError> {
    if before.width != after.width
        || before.height != after.height
        || before.length != after.length
        || before.origin != after.origin
    {
        return Err(VoxelError::ShapeMismatch {
            a_w: before.width,
            a_h: before.height,
            a_l: before.length,
            a_origin: (before.origin.x, before.origin.y, before.origin.z),
            b_w: after.width,
            b_h: after.height,
            b_l: after.length,
            b_origin: (after.origin.x, after.origin.y, after.origin.z),
        });
    }
    let mut edits = EditSet::new();
    for (i, (b, a)) in before.blocks.iter().zip(after.blocks.iter()).enumerate() {
        if b != a {
            let (lx, ly, lz) = before.unflatten(i);
            edits.push(
                Vec3i::new(before.origin.x + lx, before.origin.y + ly, before.origin.z + lz),
                *a,
            );
        }
    }
    Ok(edits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks;

    fn flat_world() -> VoxelWorld {
        // 4x8x4, grass surface at y=3, stone below, air above.
        let mut w = VoxelWorld::air(4, 8, 4, Vec3i::new(0, 0, 0)).unwrap();
        for x in 0..4 {
            for z in 0..4 {
                for y in 0..3 {
                    w.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::STONE)).unwrap();
                }
                w.set_block(Vec3i::new(x, 3, z), BlockState::of(blocks::GRASS)).unwrap();
            }
        }
        w
    }

    #[test]
    fn block_at_reads_fixture() {
        let w = flat_world();
        assert_eq!(w.block_at(Vec3i::new(1, 3, 1)).unwrap(), BlockState::of(blocks::GRASS));
        assert_eq!(w.block_at(Vec3i::new(1, 4, 1)).unwrap(), BlockState::AIR);
    }

    #[test]
    fn block_at_out_of_bounds_names_axis() {
        let w = flat_world();
        let err = w.block_at(Vec3i::new(4, 0, 0)).unwrap_err();
        match err {
            VoxelError::OutOfBounds { axis, .. } => assert_eq!(axis, Axis::X),
            other => panic!("unexpected error: {other:?}"),
        }
        let err = w.block_at(Vec3i::new(0, -1, 0)).unwrap_err();
        match err {
            VoxelError::OutOfBounds { axis, .. } => assert_eq!(axis, Axis::Y),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn set_block_read_your_write() {
        let mut w = flat_world();
        let p = Vec3i::new(1, 1, 1);
        w.set_block(p, BlockState::of(blocks::STONE)).unwrap();
        assert_eq!(w.block_at(p).unwrap().id, blocks::STONE);
        // Last write wins.
        w.set_block(p, BlockState::of(blocks::GLASS)).unwrap();
        assert_eq!(w.block_at(p).unwrap().id, blocks::GLASS);
    }

    #[test]
    fn set_block_rejects_wide_data() {
        let mut w = flat_world();
        let err = w.set_block(Vec3i::new(0, 0, 0), BlockState::new(1, 16)).unwrap_err();
        assert_eq!(err, VoxelError::InvalidBlockData { data: 16 });
    }

    #[test]
    fn apply_empty_edit_set_is_identity() {
        let mut w = flat_world();
        let before = w.clone();
        w.apply_edit_set(&EditSet::new()).unwrap();
        assert_eq!(w, before);
        assert!(diff_worlds(&before, &w).unwrap().is_empty());
    }

    #[test]
    fn apply_edit_set_order_semantics() {
        let mut w = flat_world();
        let p = Vec3i::new(2, 5, 2);
        let mut edits = EditSet::new();
        edits.push(p, BlockState::of(blocks::STONE));
        edits.push(p, BlockState::of(blocks::GLASS));
        w.apply_edit_set(&edits).unwrap();
        assert_eq!(w.block_at(p).unwrap().id, blocks::GLASS);
    }

    #[test]
    fn apply_edit_set_is_atomic() {
        let mut w = flat_world();
        let before = w.clone();
        let mut edits = EditSet::new();
        edits.push(Vec3i::new(0, 0, 0), BlockState::of(blocks::GLASS));
        edits.push(Vec3i::new(99, 0, 0), BlockState::of(blocks::GLASS));
        assert!(w.apply_edit_set(&edits).is_err());
        assert_eq!(w, before, "world must be untouched after a failed apply");
    }

    #[test]
    fn diff_identity_and_single_change() {
        let a = flat_world();
        assert!(diff_worlds(&a, &a).unwrap().is_empty());

        let mut b = a.clone();
        let p = Vec3i::new(3, 6, 0);
        b.set_block(p, BlockState::of(blocks::TORCH)).unwrap();
        let d = diff_worlds(&a, &b).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.iter().next().unwrap(), &(p, BlockState::of(blocks::TORCH)));
    }

    #[test]
    fn diff_requires_same_shape() {
        let a = flat_world();
        let b = VoxelWorld::air(4, 8, 5, Vec3i::new(0, 0, 0)).unwrap();
        assert!(matches!(diff_worlds(&a, &b), Err(VoxelError::ShapeMismatch { .. })));
    }

    #[test]
    fn dump_lists_non_air_in_flat_order() {
        let mut w = VoxelWorld::air(2, 2, 2, Vec3i::new(10, 0, -5)).unwrap();
        w.set_block(Vec3i::new(11, 1, -4), BlockState::new(blocks::FENCE, 0)).unwrap();
        w.set_block(Vec3i::new(10, 0, -5), BlockState::new(blocks::STONE, 3)).unwrap();
        assert_eq!(w.dump_text(), "10 0 -5 1 3\n11 1 -4 85 0\n");
    }

    #[test]
    fn flat_index_round_trip() {
        let w = VoxelWorld::air(5, 7, 3, Vec3i::new(0, 0, 0)).unwrap();
        for y in 0..7 {
            for z in 0..3 {
                for x in 0..5 {
                    let idx = w.flat_index(x, y, z);
                    assert_eq!(w.unflatten(idx), (x, y, z));
                }
            }
        }
    }
}
