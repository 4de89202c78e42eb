//! The reference settlement generator: recursive space partitioning cuts
//! the selection into fenced yards, each yard gets a randomly sized
//! building with stone corner columns of random heights, a plank ceiling
//! at the floored average column top, and walls whose glass/stone pattern
//! comes from a few generations of a cellular automaton.
//!
//! Deliberately terrain-naive apart from per-cell grounding of fences and
//! columns; the adaptive generator is the one that reads the map.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks;
use crate::manifest::{Building, SettlementManifest, Yard};
use crate::rng::{derive_seed, SplitMix64};
use crate::terrain::{compute_heightmap, HeightField};
use crate::voxel::{BlockState, BoundingBox, EditSet, Rect2, Vec3i, VoxelError, VoxelWorld};

#[derive(Debug, Error)]
pub enum CasgError {
    #[error("selection {width}x{length} is smaller than one {min_yard}x{min_yard} yard")]
    BoxTooSmall { width: i32, length: i32, min_yard: i32 },
    #[error("invalid config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    World(#[from] VoxelError),
}

/// Generator parameters. Mirrored 1:1 by the JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CasgConfig {
    /// Minimum side length of a yard.
    pub min_yard: i32,
    /// Inclusive range the four corner column heights are drawn from.
    pub wall_height_range: (i32, i32),
    /// Automaton generations applied to each wall grid.
    pub ca_generations: u32,
    /// Probability that a wall cell starts as glass.
    pub glass_init_p: f64,
    pub seed: u64,
}

impl Default for CasgConfig {
    fn default() -> Self {
        Self {
            min_yard: 9,
            wall_height_range: (4, 7),
            ca_generations: 3,
            glass_init_p: 0.5,
            seed: 0,
        }
    }
}

impl CasgConfig {
    pub fn validate(&self) -> Result<(), CasgError> {
        if self.min_yard < 5 {
            return Err(CasgError::BadConfig(format!("min_yard {} < 5", self.min_yard)));
        }
        if self.wall_height_range.0 > self.wall_height_range.1 || self.wall_height_range.0 < 1 {
            return Err(CasgError::BadConfig(format!(
                "wall_height_range {:?} is empty or non-positive",
                self.wall_height_range
            )));
        }
        if !(0.0..=1.0).contains(&self.glass_init_p) {
            return Err(CasgError::BadConfig(format!(
                "glass_init_p {} outside [0, 1]",
                self.glass_init_p
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Binary space partitioning
// ---------------------------------------------------------------------------

/// Recursively split `rect` into yards.
///
/// Each split cuts the longer side (ties prefer x) at an offset drawn
/// uniformly from the middle third, clamped so both children keep sides
/// of at least `min_size`. A rectangle whose longer side is shorter
/// than `2 * min_size` is a leaf. Leaves are returned in depth-first
/// order (low-coordinate child first) and the whole walk is
/// deterministic for a given seed. A rectangle already smaller than
/// `min_size` is returned unsplit.
pub fn bsp_partition(rect: Rect2, min_size: i32, seed: u64) -> Vec<Yard> {
    let mut rng = SplitMix64::new(seed);
    let mut leaves = Vec::new();
    split(rect, min_size, &mut rng, &mut leaves);
    leaves
}

fn split(rect: Rect2, min_size: i32, rng: &mut SplitMix64, out: &mut Vec<Yard>) {
    let w = rect.width();
    let d = rect.depth();
    let along_x = w >= d;
    let side = if along_x { w } else { d };
    if side < 2 * min_size {
        out.push(Yard { rect, parent_site: 0 });
        return;
    }
    // Offset of the cut from the rectangle's low edge: the low child gets
    // `offset` cells. Middle third, intersected with legality.
    let lo = min_size.max(side / 3);
    let hi = (side - min_size).min(2 * side / 3);
    debug_assert!(lo <= hi);
    let offset = rng.next_range_i32(lo, hi);
    let (a, b) = if along_x {
        (
            Rect2::new(rect.min_x, rect.min_z, rect.min_x + offset - 1, rect.max_z),
            Rect2::new(rect.min_x + offset, rect.min_z, rect.max_x, rect.max_z),
        )
    } else {
        (
            Rect2::new(rect.min_x, rect.min_z, rect.max_x, rect.min_z + offset - 1),
            Rect2::new(rect.min_x, rect.min_z + offset, rect.max_x, rect.max_z),
        )
    };
    split(a, min_size, rng, out);
    split(b, min_size, rng, out);
}

// ---------------------------------------------------------------------------
// Cellular automaton walls
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallCell {
    Stone,
    Glass,
}

/// A building's wall lattice: columns are perimeter positions, rows are
/// height levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallGrid {
    width: usize,
    height: usize,
    cells: Vec<WallCell>,
}

impl WallGrid {
    pub fn new(width: usize, height: usize, fill: WallCell) -> Self {
        Self { width, height, cells: vec![fill; width * height] }
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<WallCell>) -> Self {
        assert_eq!(cells.len(), width * height);
        Self { width, height, cells }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> WallCell {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, cell: WallCell) {
        self.cells[y * self.width + x] = cell;
    }

    /// Seeded random fill: each cell is glass with probability `p`,
    /// consumed row-major from the stream.
    pub fn random(width: usize, height: usize, p: f64, rng: &mut SplitMix64) -> Self {
        let cells = (0..width * height)
            .map(|_| if rng.chance(p) { WallCell::Glass } else { WallCell::Stone })
            .collect();
        Self { width, height, cells }
    }
}

/// One synchronous automaton generation over the Moore-8 neighborhood,
/// with out-of-grid neighbors treated as stone. A cell becomes glass
/// with 5 or more glass neighbors, stone with 3 or fewer, and keeps its
/// state at exactly 4. All-stone and all-glass interiors are fixed
/// points, and repeated steps clump scattered glass into window-like
/// patches.
pub fn ca_step(grid: &WallGrid) -> WallGrid {
    let mut next = grid.clone();
    for y in 0..grid.height {
        for x in 0..grid.width {
            let mut glass = 0;
            for dy in -1i32..=1 {
                for dx in -1i32..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = x as i32 + dx;
                    let ny = y as i32 + dy;
                    if nx < 0 || ny < 0 || nx >= grid.width as i32 || ny >= grid.height as i32 {
                        continue; // stone padding
                    }
                    if grid.get(nx as usize, ny as usize) == WallCell::Glass {
                        glass += 1;
                    }
                }
            }
            let cell = match glass {
                0..=3 => WallCell::Stone,
                4 => grid.get(x, y),
                _ => WallCell::Glass,
            };
            next.set(x, y, cell);
        }
    }
    next
}

/// Random-initialized wall grid evolved for the configured generations.
pub fn ca_walls(
    width: usize,
    height: usize,
    cfg: &CasgConfig,
    rng: &mut SplitMix64,
) -> WallGrid {
    let mut grid = WallGrid::random(width, height, cfg.glass_init_p, rng);
    for _ in 0..cfg.ca_generations {
        grid = ca_step(&grid);
    }
    grid
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Ceiling level for four corner column tops: the floored arithmetic
/// mean.
pub fn ceiling_level(corner_tops: [i32; 4]) -> i32 {
    let sum: i64 = corner_tops.iter().map(|&t| t as i64).sum();
    sum.div_euclid(4) as i32
}

/// Fence posts around a yard's perimeter, one per cell at that cell's
/// `surface + 1`. Bottomless cells are skipped.
pub fn build_fence(yard: &Yard, hf: &HeightField) -> EditSet {
    let mut edits = EditSet::new();
    for (x, z) in yard.rect.perimeter_cells() {
        if !hf.contains(x, z) || hf.is_sentinel(x, z) {
            continue;
        }
        edits.set(x, hf.surface(x, z) + 1, z, BlockState::of(blocks::FENCE));
    }
    edits
}

/// Perimeter cells of `rect` excluding the four corners, walked
/// clockwise from the north-west corner: north edge west-to-east, east
/// edge north-to-south, south edge east-to-west, west edge
/// south-to-north.
fn wall_cells(rect: Rect2) -> Vec<(i32, i32)> {
    let mut cells = Vec::new();
    for x in rect.min_x + 1..rect.max_x {
        cells.push((x, rect.min_z));
    }
    for z in rect.min_z + 1..rect.max_z {
        cells.push((rect.max_x, z));
    }
    for x in (rect.min_x + 1..rect.max_x).rev() {
        cells.push((x, rect.max_z));
    }
    for z in (rect.min_z + 1..rect.max_z).rev() {
        cells.push((rect.min_x, z));
    }
    cells
}

/// Build one yard's building.
///
/// The footprint is a randomly sized rectangle (sides >= 3) placed
/// uniformly inside the yard interior (the yard shrunk by 2 to keep
/// clear of the fence). Four corner columns rise to independently drawn
/// heights above their own ground, a plank ceiling sits at the floored
/// mean of the column tops, walls fill in between with the automaton's
/// stone/glass pattern, and a doorway is cut at grade on the wall whose
/// outside ground is closest to the interior floor.
///
/// Returns `None` when the yard interior cannot hold a 3x3 footprint or
/// has no ground to build on.
pub fn build_building(
    yard: &Yard,
    hf: &HeightField,
    cfg: &CasgConfig,
    seed: u64,
) -> Option<(EditSet, Building)> {
    let interior = yard.rect.shrink(2)?;
    if interior.width() < 3 || interior.depth() < 3 {
        return None;
    }
    let mut rng = SplitMix64::new(seed);
    let w = rng.next_range_i32(3, interior.width());
    let d = rng.next_range_i32(3, interior.depth());
    let x0 = rng.next_range_i32(interior.min_x, interior.max_x - w + 1);
    let z0 = rng.next_range_i32(interior.min_z, interior.max_z + 1 - d);
    let rect = Rect2::new(x0, z0, x0 + w - 1, z0 + d - 1);

    if rect.cells().any(|(x, z)| !hf.contains(x, z) || hf.is_sentinel(x, z)) {
        return None;
    }

    let mut edits = EditSet::new();
    let corners = [
        (rect.min_x, rect.min_z),
        (rect.max_x, rect.min_z),
        (rect.min_x, rect.max_z),
        (rect.max_x, rect.max_z),
    ];
    let (h_lo, h_hi) = cfg.wall_height_range;
    let mut tops = [0i32; 4];
    let mut bottoms = [0i32; 4];
    for (i, &(cx, cz)) in corners.iter().enumerate() {
        let h = rng.next_range_i32(h_lo, h_hi);
        let ground = hf.surface(cx, cz);
        bottoms[i] = ground + 1;
        tops[i] = ground + h;
    }
    let ceiling_y = ceiling_level(tops);
    for (i, &(cx, cz)) in corners.iter().enumerate() {
        for y in bottoms[i]..=tops[i] {
            edits.set(cx, y, cz, BlockState::of(blocks::STONE));
        }
    }

    // Walls between the columns, patterned by the automaton. Grid rows
    // are absolute y levels from the lowest wall base up to just below
    // the ceiling.
    let cells = wall_cells(rect);
    let base = cells
        .iter()
        .map(|&(x, z)| hf.surface(x, z) + 1)
        .min()
        .unwrap_or(ceiling_y);
    let rows = ceiling_y - base; // wall occupies base..=ceiling_y-1
    if rows > 0 && !cells.is_empty() {
        let grid = ca_walls(cells.len(), rows as usize, cfg, &mut rng);
        for (i, &(x, z)) in cells.iter().enumerate() {
            let start = hf.surface(x, z) + 1;
            for y in start..ceiling_y {
                let material = match grid.get(i, (y - base) as usize) {
                    WallCell::Stone => blocks::STONE,
                    WallCell::Glass => blocks::GLASS,
                };
                edits.set(x, y, z, BlockState::of(material));
            }
        }
    }

    // Ceiling slab over the whole footprint.
    for (x, z) in rect.cells() {
        edits.set(x, ceiling_y, z, BlockState::of(blocks::PLANKS));
    }

    // Doorway on the wall whose outside ground is closest to the
    // interior floor level.
    let floor = {
        let sum: i64 = rect.cells().map(|(x, z)| hf.surface(x, z) as i64).sum();
        sum.div_euclid(rect.area()) as i32
    };
    let mid_x = (rect.min_x + rect.max_x) / 2;
    let mid_z = (rect.min_z + rect.max_z) / 2;
    let candidates = [
        ((mid_x, rect.min_z), (mid_x, rect.min_z - 1)),
        ((mid_x, rect.max_z), (mid_x, rect.max_z + 1)),
        ((rect.min_x, mid_z), (rect.min_x - 1, mid_z)),
        ((rect.max_x, mid_z), (rect.max_x + 1, mid_z)),
    ];
    let mut door = None;
    let mut best = i64::MAX;
    for &(cell, ext) in &candidates {
        if !hf.contains(ext.0, ext.1) || hf.is_sentinel(ext.0, ext.1) {
            continue;
        }
        let diff = (hf.surface(ext.0, ext.1) as i64 - floor as i64).abs();
        if diff < best {
            best = diff;
            door = Some((cell, hf.surface(ext.0, ext.1)));
        }
    }
    let ((door_x, door_z), ext_surface) = door.unwrap_or(((mid_x, rect.min_z), floor));
    let door_y = ext_surface + 1;
    edits.set(door_x, door_y, door_z, BlockState::new(blocks::WOODEN_DOOR, 0));
    edits.set(door_x, door_y + 1, door_z, BlockState::new(blocks::WOODEN_DOOR, 8));

    // Bounds cover every written block: column bottoms, wall bases in
    // dips, the ceiling, and the doorway.
    let min_y = edits.iter().map(|(p, _)| p.y).min().expect("building always writes");
    let max_y = edits.iter().map(|(p, _)| p.y).max().expect("building always writes");
    let building = Building {
        bounds: BoundingBox::new(
            Vec3i::new(rect.min_x, min_y, rect.min_z),
            Vec3i::new(rect.max_x, max_y, rect.max_z),
        )
        .expect("corner order is constructed"),
        entrance: Vec3i::new(door_x, door_y, door_z),
        role: "casg-house".into(),
        materials: vec![blocks::STONE, blocks::GLASS, blocks::PLANKS],
    };
    Some((edits, building))
}

/// Run the whole generator over a selection box.
///
/// Pipeline: heightmap the box, partition its footprint into yards, then
/// per yard build a fence and (interior permitting) a building, seeding
/// each yard's randomness as `derive_seed(cfg.seed, yard_index)`. Edits
/// never leave the box; the manifest records buildings, yards and the
/// spawn column at the box center. Deterministic for a given
/// `(world, box, cfg)`.
pub fn casg_generate(
    world: &VoxelWorld,
    bx: BoundingBox,
    cfg: &CasgConfig,
) -> Result<(EditSet, SettlementManifest), CasgError> {
    cfg.validate()?;
    if bx.width() < cfg.min_yard || bx.length() < cfg.min_yard {
        return Err(CasgError::BoxTooSmall {
            width: bx.width(),
            length: bx.length(),
            min_yard: cfg.min_yard,
        });
    }
    let hf = compute_heightmap(world, bx)?;
    let rect = Rect2::new(bx.min.x, bx.min.z, bx.max.x, bx.max.z);
    let yards = bsp_partition(rect, cfg.min_yard, cfg.seed);

    let mut edits = EditSet::new();
    let mut buildings = Vec::new();
    for (i, yard) in yards.iter().enumerate() {
        let yard_seed = derive_seed(cfg.seed, i as u64);
        let mut yard_edits = build_fence(yard, &hf);
        if let Some((building_edits, building)) = build_building(yard, &hf, cfg, yard_seed) {
            yard_edits.extend(building_edits);
            buildings.push(building);
        }
        edits.extend(yard_edits);
    }

    // Clip to the box: nothing the generator emits may leave the
    // selection.
    let edits: EditSet = edits.iter().filter(|(p, _)| bx.contains(*p)).copied().collect();

    // Spawn at the box center, standing on whatever ends up there (a
    // fence post under the feet is a valid perch).
    let (cx, cz) = bx.center_xz();
    let mut preview = world.clone();
    preview.apply_edit_set(&edits)?;
    let spawn_y = crate::eval::top_standing_y(&preview, cx, cz).unwrap_or_else(|| {
        if hf.is_sentinel(cx, cz) {
            bx.min.y
        } else {
            hf.surface(cx, cz) + 1
        }
    });
    let manifest = SettlementManifest {
        buildings,
        roads: Vec::new(),
        yards,
        unconnected: Vec::new(),
        spawn: Vec3i::new(cx, spawn_y, cz),
    };
    Ok((edits, manifest))
}
