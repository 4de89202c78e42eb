//! Terrain analysis and synthesis: the facts a generator adapts to.
//!
//! [`compute_heightmap`] projects the world onto a per-column surface
//! elevation with water/lava flags, [`compute_slope`] derives local
//! steepness, [`material_census`] counts what the ground is made of, and
//! [`find_build_sites`] extracts the flat, dry, connected regions worth
//! settling. [`synth_terrain`] produces seeded value-noise fixtures for
//! tests and experiments.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::blocks;
use crate::rng::{derive_seed, mix64};
use crate::voxel::{BlockState, BoundingBox, Rect2, Vec3i, VoxelError, VoxelWorld};

/// Slope value marking a column that cannot be built on (no solid
/// surface in the column at all).
pub const SLOPE_UNBUILDABLE: i32 = i32::MAX;

/// Per-(x, z) surface elevation with water/lava flags, covering one
/// analyzed box. Columns with no solid surface hold the sentinel
/// elevation `box.min.y - 1`.
#[derive(Debug, Clone)]
pub struct HeightField {
    bounds: BoundingBox,
    surface: Vec<i32>,
    water: Vec<bool>,
    lava: Vec<bool>,
}

impl HeightField {
    pub fn bounds(&self) -> BoundingBox {
        self.bounds
    }

    pub fn width(&self) -> i32 {
        self.bounds.width()
    }

    pub fn length(&self) -> i32 {
        self.bounds.length()
    }

    /// Sentinel elevation for bottomless columns.
    pub fn sentinel(&self) -> i32 {
        self.bounds.min.y - 1
    }

    #[inline]
    fn index(&self, x: i32, z: i32) -> usize {
        debug_assert!(self.contains(x, z));
        ((z - self.bounds.min.z) as usize) * self.width() as usize
            + (x - self.bounds.min.x) as usize
    }

    pub fn contains(&self, x: i32, z: i32) -> bool {
        (self.bounds.min.x..=self.bounds.max.x).contains(&x)
            && (self.bounds.min.z..=self.bounds.max.z).contains(&z)
    }

    /// Surface elevation of a column (world y of the highest solid
    /// non-foliage block), or the sentinel.
    pub fn surface(&self, x: i32, z: i32) -> i32 {
        self.surface[self.index(x, z)]
    }

    pub fn is_sentinel(&self, x: i32, z: i32) -> bool {
        self.surface(x, z) == self.sentinel()
    }

    pub fn water(&self, x: i32, z: i32) -> bool {
        self.water[self.index(x, z)]
    }

    pub fn lava(&self, x: i32, z: i32) -> bool {
        self.lava[self.index(x, z)]
    }

    /// Iterate all columns as `(x, z)` world coordinates, row-major in z
    /// then x.
    pub fn columns(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        let b = self.bounds;
        (b.min.z..=b.max.z).flat_map(move |z| (b.min.x..=b.max.x).map(move |x| (x, z)))
    }
}

/// Per-(x, z) steepness: max absolute surface difference to the existing
/// 4-neighbors. Bottomless columns carry [`SLOPE_UNBUILDABLE`].
#[derive(Debug, Clone)]
pub struct SlopeField {
    bounds: BoundingBox,
    slope: Vec<i32>,
}

impl SlopeField {
    pub fn bounds(&self) -> BoundingBox {
        self.bounds
    }

    #[inline]
    fn index(&self, x: i32, z: i32) -> usize {
        ((z - self.bounds.min.z) as usize) * self.bounds.width() as usize
            + (x - self.bounds.min.x) as usize
    }

    pub fn slope(&self, x: i32, z: i32) -> i32 {
        self.slope[self.index(x, z)]
    }
}

/// Counts of block ids over each column's surface block and the three
/// blocks beneath it. Air is never counted; absent ids are absent keys.
pub type MaterialCensus = BTreeMap<u8, u64>;

/// A buildable region: a maximal 4-connected set of dry, shallow-sloped
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    /// Member cells as (x, z), sorted ascending by (z, x).
    pub cells: Vec<(i32, i32)>,
    pub area: usize,
    pub mean_slope: f64,
    pub bounds: Rect2,
}

impl Site {
    pub fn contains(&self, x: i32, z: i32) -> bool {
        self.cells.binary_search_by(|&(cx, cz)| (cz, cx).cmp(&(z, x))).is_ok()
    }
}

/// Compute the surface field of `bx` within `world`.
///
/// Surface = highest y whose block is solid and not foliage (logs count,
/// leaves do not). The water flag is set when any water block sits above
/// the surface in the column, and likewise for lava. A column with no
/// solid block gets the sentinel `bx.min.y - 1` and clear flags.
pub fn compute_heightmap(world: &VoxelWorld, bx: BoundingBox) -> Result<HeightField, VoxelError> {
    for corner in [bx.min, bx.max] {
        world.block_at(corner)?;
    }
    let sentinel = bx.min.y - 1;
    let cols = bx.footprint() as usize;
    let mut surface = vec![sentinel; cols];
    let mut water = vec![false; cols];
    let mut lava = vec![false; cols];
    let width = bx.width() as usize;
    for z in bx.min.z..=bx.max.z {
        for x in bx.min.x..=bx.max.x {
            let idx = ((z - bx.min.z) as usize) * width + (x - bx.min.x) as usize;
            let mut col_water = false;
            let mut col_lava = false;
            for y in (bx.min.y..=bx.max.y).rev() {
                let b = world.block_at(Vec3i::new(x, y, z)).expect("column within checked box");
                if blocks::is_surface_solid(b.id) {
                    surface[idx] = y;
                    water[idx] = col_water;
                    lava[idx] = col_lava;
                    break;
                }
                col_water |= blocks::is_water(b.id);
                col_lava |= blocks::is_lava(b.id);
            }
        }
    }
    Ok(HeightField { bounds: bx, surface, water, lava })
}

/// Max absolute surface difference to each existing 4-neighbor. Boundary
/// columns use only the neighbors they have; bottomless columns are
/// marked [`SLOPE_UNBUILDABLE`].
pub fn compute_slope(hf: &HeightField) -> SlopeField {
    let b = hf.bounds();
    let mut slope = vec![0i32; b.footprint() as usize];
    for (x, z) in hf.columns() {
        let idx = hf.index(x, z);
        if hf.is_sentinel(x, z) {
            slope[idx] = SLOPE_UNBUILDABLE;
            continue;
        }
        let here = hf.surface(x, z);
        let mut worst = 0;
        for (nx, nz) in [(x - 1, z), (x + 1, z), (x, z - 1), (x, z + 1)] {
            if hf.contains(nx, nz) {
                worst = worst.max((here - hf.surface(nx, nz)).abs());
            }
        }
        slope[idx] = worst;
    }
    SlopeField { bounds: b, slope }
}

/// Count the materials available near the surface: each column's surface
/// block plus the three blocks directly beneath it, clipped to the box,
/// air excluded. Bottomless columns contribute nothing.
pub fn material_census(
    world: &VoxelWorld,
    bx: BoundingBox,
    hf: &HeightField,
) -> MaterialCensus {
    let mut census = MaterialCensus::new();
    for (x, z) in hf.columns() {
        if hf.is_sentinel(x, z) {
            continue;
        }
        let top = hf.surface(x, z);
        for y in (top - 3)..=top {
            if y < bx.min.y {
                continue;
            }
            let b = world.block_at(Vec3i::new(x, y, z)).expect("column within analyzed box");
            if !b.is_air() {
                *census.entry(b.id).or_insert(0) += 1;
            }
        }
    }
    census
}

/// Maximal 4-connected components of columns with `slope <= max_slope`,
/// no water, no lava, and a real surface. Components smaller than
/// `min_area` are dropped. Sites are sorted by area descending, ties by
/// the bounding rectangle's (min x, then min z).
pub fn find_build_sites(
    hf: &HeightField,
    sf: &SlopeField,
    min_area: usize,
    max_slope: i32,
) -> Vec<Site> {
    let b = hf.bounds();
    let qualifies = |x: i32, z: i32| {
        !hf.is_sentinel(x, z)
            && !hf.water(x, z)
            && !hf.lava(x, z)
            && sf.slope(x, z) != SLOPE_UNBUILDABLE
            && sf.slope(x, z) <= max_slope
    };
    let width = b.width() as usize;
    let mut seen = vec![false; b.footprint() as usize];
    let mut sites = Vec::new();
    for (x, z) in hf.columns() {
        let idx = ((z - b.min.z) as usize) * width + (x - b.min.x) as usize;
        if seen[idx] || !qualifies(x, z) {
            continue;
        }
        // Flood fill one component.
        let mut cells = Vec::new();
        let mut stack = vec![(x, z)];
        seen[idx] = true;
        while let Some((cx, cz)) = stack.pop() {
            cells.push((cx, cz));
            for (nx, nz) in [(cx - 1, cz), (cx + 1, cz), (cx, cz - 1), (cx, cz + 1)] {
                if !hf.contains(nx, nz) || !qualifies(nx, nz) {
                    continue;
                }
                let nidx = ((nz - b.min.z) as usize) * width + (nx - b.min.x) as usize;
                if !seen[nidx] {
                    seen[nidx] = true;
                    stack.push((nx, nz));
                }
            }
        }
        if cells.len() < min_area {
            continue;
        }
        cells.sort_by_key(|&(cx, cz)| (cz, cx));
        let min_x = cells.iter().map(|c| c.0).min().unwrap();
        let max_x = cells.iter().map(|c| c.0).max().unwrap();
        let min_z = cells.iter().map(|c| c.1).min().unwrap();
        let max_z = cells.iter().map(|c| c.1).max().unwrap();
        let mean_slope = cells.iter().map(|&(cx, cz)| sf.slope(cx, cz) as f64).sum::<f64>()
            / cells.len() as f64;
        sites.push(Site {
            area: cells.len(),
            mean_slope,
            bounds: Rect2::new(min_x, min_z, max_x, max_z),
            cells,
        });
    }
    sites.sort_by(|a, b| {
        b.area
            .cmp(&a.area)
            .then(a.bounds.min_x.cmp(&b.bounds.min_x))
            .then(a.bounds.min_z.cmp(&b.bounds.min_z))
    });
    sites
}

// ---------------------------------------------------------------------------
// Synthetic terrain
// ---------------------------------------------------------------------------

/// Parameters for [`synth_terrain`].
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct TerrainParams {
    /// Ground elevation around which noise oscillates.
    pub base_height: i32,
    /// Peak-to-base swing of the noise, in blocks, at roughness 1.
    pub amplitude: f64,
    /// 0 = perfectly flat, 1 = full amplitude. Scales the noise.
    pub roughness: f64,
    /// Number of value-noise octaves; 0 yields a flat world.
    pub octaves: u32,
    /// Lattice spacing of the lowest octave, in blocks.
    pub lattice: i32,
    /// Columns with surface below this level are flooded up to it.
    pub water_level: i32,
    /// World height (y dimension) of the produced world.
    pub world_height: i32,
}

impl Default for TerrainParams {
    fn default() -> Self {
        Self {
            base_height: 40,
            amplitude: 14.0,
            roughness: 0.5,
            octaves: 4,
            lattice: 24,
            water_level: 36,
            world_height: 96,
        }
    }
}

/// Deterministic lattice value in [0, 1) for one octave corner.
fn lattice_value(seed: u64, octave: u32, xi: i64, zi: i64) -> f64 {
    let h = mix64(
        derive_seed(seed, octave as u64)
            ^ mix64(xi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ mix64(zi as u64).rotate_left(23),
    );
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Bilinear value noise in [-1, 1] at one octave.
fn value_noise(seed: u64, octave: u32, x: f64, z: f64) -> f64 {
    let xi = x.floor() as i64;
    let zi = z.floor() as i64;
    let fx = smoothstep(x - xi as f64);
    let fz = smoothstep(z - zi as f64);
    let v00 = lattice_value(seed, octave, xi, zi);
    let v10 = lattice_value(seed, octave, xi + 1, zi);
    let v01 = lattice_value(seed, octave, xi, zi + 1);
    let v11 = lattice_value(seed, octave, xi + 1, zi + 1);
    let top = v00 + (v10 - v00) * fx;
    let bot = v01 + (v11 - v01) * fx;
    (top + (bot - top) * fz) * 2.0 - 1.0
}

/// Fractal height offset in [-1, 1]: octaves at doubling frequency and
/// halving amplitude, normalized.
fn fbm(seed: u64, x: f64, z: f64, octaves: u32, lattice: f64) -> f64 {
    let mut sum = 0.0;
    let mut norm = 0.0;
    let mut amp = 1.0;
    let mut freq = 1.0 / lattice;
    for octave in 0..octaves {
        sum += amp * value_noise(seed, octave, x * freq, z * freq);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    if norm == 0.0 {
        0.0
    } else {
        sum / norm
    }
}

/// Synthesize a seeded test terrain: multi-octave value noise heights,
/// stone beneath a grass (dry) or dirt (flooded) surface, and still water
/// filling columns below the configured water level. Identical
/// `(seed, params)` always produce cell-identical worlds.
pub fn synth_terrain(
    seed: u64,
    width: i32,
    length: i32,
    params: &TerrainParams,
) -> Result<VoxelWorld, VoxelError> {
    let h = params.world_height.max(8);
    let mut world = VoxelWorld::air(width, h, length, Vec3i::new(0, 0, 0))?;
    let flat = params.octaves == 0 || params.roughness <= 0.0;
    for z in 0..length {
        for x in 0..width {
            let offset = if flat {
                0.0
            } else {
                params.roughness
                    * params.amplitude
                    * fbm(seed, x as f64, z as f64, params.octaves, params.lattice as f64)
            };
            let surface = (params.base_height + offset.round() as i32).clamp(1, h - 2);
            let wet = surface < params.water_level;
            for y in 0..surface {
                world.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::STONE))?;
            }
            let top = if wet { blocks::DIRT } else { blocks::GRASS };
            world.set_block(Vec3i::new(x, surface, z), BlockState::of(top))?;
            if wet {
                let flood_top = params.water_level.min(h - 1);
                for y in (surface + 1)..=flood_top {
                    world.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::WATER))?;
                }
            }
        }
    }
    Ok(world)
}

// ---------------------------------------------------------------------------
// Analysis summary (the `analyze` command's JSON document)
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct HeightmapStats {
    pub min: i32,
    pub max: i32,
    pub mean: f64,
}

#[derive(Debug, Serialize)]
pub struct SiteSummary {
    pub area: usize,
    pub mean_slope: f64,
    pub bounds: Rect2,
}

/// JSON document summarizing one analyzed box.
#[derive(Debug, Serialize)]
pub struct AnalyzeSummary {
    pub heightmap_stats: HeightmapStats,
    pub water_fraction: f64,
    pub census: BTreeMap<u8, u64>,
    pub sites: Vec<SiteSummary>,
}

/// Run the full analysis pass and summarize it.
pub fn analyze(
    world: &VoxelWorld,
    bx: BoundingBox,
    min_area: usize,
    max_slope: i32,
) -> Result<AnalyzeSummary, VoxelError> {
    let hf = compute_heightmap(world, bx)?;
    let sf = compute_slope(&hf);
    let census = material_census(world, bx, &hf);
    let sites = find_build_sites(&hf, &sf, min_area, max_slope);
    let mut min = i32::MAX;
    let mut max = i32::MIN;
    let mut sum = 0i64;
    let mut n = 0i64;
    let mut wet = 0i64;
    for (x, z) in hf.columns() {
        if hf.water(x, z) {
            wet += 1;
        }
        if hf.is_sentinel(x, z) {
            continue;
        }
        let s = hf.surface(x, z);
        min = min.min(s);
        max = max.max(s);
        sum += s as i64;
        n += 1;
    }
    let stats = if n == 0 {
        HeightmapStats { min: 0, max: 0, mean: 0.0 }
    } else {
        HeightmapStats { min, max, mean: sum as f64 / n as f64 }
    };
    Ok(AnalyzeSummary {
        heightmap_stats: stats,
        water_fraction: wet as f64 / bx.footprint() as f64,
        census,
        sites: sites
            .iter()
            .map(|s| SiteSummary { area: s.area, mean_slope: s.mean_slope, bounds: s.bounds })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    /// Build a world from a surface height function, stone below a grass
    /// top. Height < 0 leaves the column empty (air).
    pub(crate) fn world_from_heights(
        width: i32,
        length: i32,
        world_h: i32,
        mut f: impl FnMut(i32, i32) -> i32,
    ) -> VoxelWorld {
        let mut w = VoxelWorld::air(width, world_h, length, Vec3i::new(0, 0, 0)).unwrap();
        for z in 0..length {
            for x in 0..width {
                let h = f(x, z);
                if h < 0 {
                    continue;
                }
                for y in 0..h {
                    w.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::STONE)).unwrap();
                }
                w.set_block(Vec3i::new(x, h, z), BlockState::of(blocks::GRASS)).unwrap();
            }
        }
        w
    }

    #[test]
    fn flat_world_heightmap() {
        let w = world_from_heights(8, 8, 70, |_, _| 64);
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        for (x, z) in hf.columns() {
            assert_eq!(hf.surface(x, z), 64);
            assert!(!hf.water(x, z));
        }
    }

    #[test]
    fn water_column_surface_is_the_bed() {
        let mut w = world_from_heights(4, 4, 70, |_, _| 60);
        for y in 61..=62 {
            w.set_block(Vec3i::new(2, y, 2), BlockState::of(blocks::WATER)).unwrap();
        }
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        assert_eq!(hf.surface(2, 2), 60);
        assert!(hf.water(2, 2));
        assert!(!hf.water(1, 1));
    }

    #[test]
    fn all_air_column_gets_sentinel() {
        let w = world_from_heights(3, 3, 16, |x, z| if (x, z) == (1, 1) { -1 } else { 5 });
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        assert!(hf.is_sentinel(1, 1));
        assert_eq!(hf.surface(1, 1), -1);
        assert!(!hf.water(1, 1) && !hf.lava(1, 1));
    }

    #[test]
    fn leaves_do_not_count_as_surface_but_logs_do() {
        let mut w = world_from_heights(3, 3, 32, |_, _| 10);
        w.set_block(Vec3i::new(0, 14, 0), BlockState::of(blocks::LEAVES)).unwrap();
        w.set_block(Vec3i::new(1, 14, 1), BlockState::of(blocks::LOG)).unwrap();
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        assert_eq!(hf.surface(0, 0), 10, "leaves are not surface");
        assert_eq!(hf.surface(1, 1), 14, "logs are surface");
    }

    #[test]
    fn slope_flat_and_step() {
        let flat = world_from_heights(6, 6, 32, |_, _| 10);
        let hf = compute_heightmap(&flat, flat.bounds()).unwrap();
        let sf = compute_slope(&hf);
        for (x, z) in hf.columns() {
            assert_eq!(sf.slope(x, z), 0);
        }

        // Step of 3 between x<3 and x>=3.
        let stepped = world_from_heights(6, 6, 32, |x, _| if x < 3 { 10 } else { 13 });
        let hf = compute_heightmap(&stepped, stepped.bounds()).unwrap();
        let sf = compute_slope(&hf);
        assert_eq!(sf.slope(2, 0), 3);
        assert_eq!(sf.slope(3, 0), 3);
        assert_eq!(sf.slope(1, 0), 0);
    }

    #[test]
    fn slope_matches_naive_recomputation() {
        let mut rng = SplitMix64::new(77);
        let w = world_from_heights(12, 12, 40, |_, _| 8 + (rng.next_below(6) as i32));
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let sf = compute_slope(&hf);
        for (x, z) in hf.columns() {
            let mut expect = 0;
            for (nx, nz) in [(x - 1, z), (x + 1, z), (x, z - 1), (x, z + 1)] {
                if hf.contains(nx, nz) {
                    expect = expect.max((hf.surface(x, z) - hf.surface(nx, nz)).abs());
                }
            }
            assert_eq!(sf.slope(x, z), expect, "slope mismatch at ({x}, {z})");
        }
    }

    #[test]
    fn census_counts_four_deep() {
        let w = world_from_heights(4, 4, 32, |_, _| 10);
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let census = material_census(&w, w.bounds(), &hf);
        // Surface grass + 3 stone per column.
        assert_eq!(census.get(&blocks::GRASS), Some(&16));
        assert_eq!(census.get(&blocks::STONE), Some(&48));
        let total: u64 = census.values().sum();
        assert_eq!(total, 16 * 4);
    }

    #[test]
    fn census_on_sand_desert_is_sand_dominated() {
        let mut w = VoxelWorld::air(6, 16, 6, Vec3i::new(0, 0, 0)).unwrap();
        for z in 0..6 {
            for x in 0..6 {
                for y in 0..4 {
                    w.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::SANDSTONE)).unwrap();
                }
                for y in 4..=8 {
                    w.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::SAND)).unwrap();
                }
            }
        }
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let census = material_census(&w, w.bounds(), &hf);
        let sand = census.get(&blocks::SAND).copied().unwrap_or(0);
        assert!(census.values().all(|&c| c <= sand), "sand must dominate: {census:?}");
    }

    #[test]
    fn census_matches_full_scan_oracle() {
        let mut rng = SplitMix64::new(3);
        let w = world_from_heights(9, 7, 40, |_, _| 6 + rng.next_below(8) as i32);
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let census = material_census(&w, w.bounds(), &hf);
        let mut oracle: MaterialCensus = MaterialCensus::new();
        for (x, z) in hf.columns() {
            let top = hf.surface(x, z);
            for y in (top - 3)..=top {
                if y < 0 {
                    continue;
                }
                let b = w.block_at(Vec3i::new(x, y, z)).unwrap();
                if !b.is_air() {
                    *oracle.entry(b.id).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(census, oracle);
    }

    #[test]
    fn whole_flat_field_is_one_site() {
        let w = world_from_heights(16, 16, 32, |_, _| 10);
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let sf = compute_slope(&hf);
        let sites = find_build_sites(&hf, &sf, 9, 1);
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].area, 256);
        assert_eq!(sites[0].bounds, Rect2::new(0, 0, 15, 15));
    }

    #[test]
    fn river_splits_field_into_two_sites() {
        let mut w = world_from_heights(16, 8, 32, |_, _| 10);
        // Water channel at x = 7..=8 spanning all z.
        for z in 0..8 {
            for x in 7..=8 {
                w.set_block(Vec3i::new(x, 11, z), BlockState::of(blocks::WATER)).unwrap();
            }
        }
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let sf = compute_slope(&hf);
        let sites = find_build_sites(&hf, &sf, 4, 1);
        assert_eq!(sites.len(), 2);
        assert_eq!(sites[0].area + sites[1].area, 16 * 8 - 2 * 8);
    }

    #[test]
    fn sites_match_bfs_labeling_oracle() {
        let mut rng = SplitMix64::new(123);
        let w = world_from_heights(20, 20, 48, |_, _| 8 + rng.next_below(7) as i32);
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let sf = compute_slope(&hf);
        let max_slope = 2;
        let sites = find_build_sites(&hf, &sf, 1, max_slope);

        // Independent BFS labeling.
        use std::collections::{HashSet, VecDeque};
        let qualifies = |x: i32, z: i32| {
            !hf.is_sentinel(x, z) && !hf.water(x, z) && !hf.lava(x, z) && sf.slope(x, z) <= max_slope
        };
        let mut unvisited: HashSet<(i32, i32)> =
            hf.columns().filter(|&(x, z)| qualifies(x, z)).collect();
        let mut oracle_components: Vec<HashSet<(i32, i32)>> = Vec::new();
        while let Some(&start) = unvisited.iter().next() {
            let mut comp = HashSet::new();
            let mut queue = VecDeque::from([start]);
            unvisited.remove(&start);
            while let Some((x, z)) = queue.pop_front() {
                comp.insert((x, z));
                for n in [(x - 1, z), (x + 1, z), (x, z - 1), (x, z + 1)] {
                    if unvisited.remove(&n) {
                        queue.push_back(n);
                    }
                }
            }
            oracle_components.push(comp);
        }
        assert_eq!(sites.len(), oracle_components.len());
        for site in &sites {
            let set: HashSet<(i32, i32)> = site.cells.iter().copied().collect();
            assert!(
                oracle_components.contains(&set),
                "site not found among oracle components"
            );
        }
    }

    #[test]
    fn site_cells_satisfy_constraints_and_are_maximal() {
        let params = TerrainParams { roughness: 0.8, ..TerrainParams::default() };
        let w = synth_terrain(5150, 48, 48, &params).unwrap();
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        let sf = compute_slope(&hf);
        let max_slope = 1;
        let sites = find_build_sites(&hf, &sf, 9, max_slope);
        for site in &sites {
            for &(x, z) in &site.cells {
                assert!(sf.slope(x, z) <= max_slope);
                assert!(!hf.water(x, z));
            }
            // Maximality: no qualifying neighbor outside the site.
            for &(x, z) in &site.cells {
                for (nx, nz) in [(x - 1, z), (x + 1, z), (x, z - 1), (x, z + 1)] {
                    if !hf.contains(nx, nz) || site.contains(nx, nz) {
                        continue;
                    }
                    let qualifies = !hf.is_sentinel(nx, nz)
                        && !hf.water(nx, nz)
                        && !hf.lava(nx, nz)
                        && sf.slope(nx, nz) <= max_slope;
                    assert!(!qualifies, "qualifying neighbor ({nx}, {nz}) left out of site");
                }
            }
        }
        // Pairwise disjoint.
        let mut all: Vec<(i32, i32)> = sites.iter().flat_map(|s| s.cells.iter().copied()).collect();
        let before = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(before, all.len());
    }

    #[test]
    fn synth_is_deterministic() {
        let params = TerrainParams::default();
        let a = synth_terrain(99, 32, 32, &params).unwrap();
        let b = synth_terrain(99, 32, 32, &params).unwrap();
        assert_eq!(a, b);
        let c = synth_terrain(100, 32, 32, &params).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_roughness_is_flat() {
        let params = TerrainParams { roughness: 0.0, ..TerrainParams::default() };
        let w = synth_terrain(7, 16, 16, &params).unwrap();
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        for (x, z) in hf.columns() {
            assert_eq!(hf.surface(x, z), params.base_height);
        }
        // Zero octaves behaves the same way.
        let params = TerrainParams { octaves: 0, ..TerrainParams::default() };
        let w = synth_terrain(7, 16, 16, &params).unwrap();
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        assert_eq!(hf.surface(3, 3), params.base_height);
    }

    #[test]
    fn water_level_above_everything_drowns_all_sites() {
        let params = TerrainParams { water_level: 95, world_height: 96, ..TerrainParams::default() };
        let w = synth_terrain(11, 24, 24, &params).unwrap();
        let hf = compute_heightmap(&w, w.bounds()).unwrap();
        for (x, z) in hf.columns() {
            assert!(hf.water(x, z), "column ({x}, {z}) should be flooded");
        }
        let sf = compute_slope(&hf);
        assert!(find_build_sites(&hf, &sf, 1, 99).is_empty());
    }

    #[test]
    fn heightmap_reflects_edits() {
        let mut w = world_from_heights(5, 5, 32, |_, _| 10);
        let before = compute_heightmap(&w, w.bounds()).unwrap();
        w.set_block(Vec3i::new(2, 11, 2), BlockState::of(blocks::STONE)).unwrap();
        let after = compute_heightmap(&w, w.bounds()).unwrap();
        assert_eq!(after.surface(2, 2), 11);
        for (x, z) in before.columns() {
            if (x, z) != (2, 2) {
                assert_eq!(before.surface(x, z), after.surface(x, z));
            }
        }
    }
}
