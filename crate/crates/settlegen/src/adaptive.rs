//! The terrain-adaptive generator.
//!
//! Where the reference generator ignores the map, this one reads it:
//! sites are scored by size, flatness and water access; buildings get
//! grade-matched foundations (median floor, per-column fill) and a
//! doorway on the wall closest to outside ground; roads follow
//! cost-optimal A* routes that never step more than one block and cross
//! water on plank bridges; materials come from the local census; torches
//! keep the roads lit. After assembling everything the generator walks
//! its own settlement from spawn and drops any building whose entrance
//! cannot be reached, so the emitted manifest is self-verified.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks;
use crate::eval::{is_standing, top_standing_y, walk_bfs};
use crate::manifest::{Building, RoadPlan, SettlementManifest};
use crate::rng::{derive_seed, SplitMix64};
use crate::terrain::{
    compute_heightmap, compute_slope, find_build_sites, material_census, HeightField,
    MaterialCensus, Site, SLOPE_UNBUILDABLE,
};
use crate::voxel::{
    diff_worlds, BlockState, BoundingBox, EditSet, Rect2, Vec3i, VoxelError, VoxelWorld,
};

#[derive(Debug, Error)]
pub enum AdaptiveError {
    #[error("invalid config: {0}")]
    BadConfig(String),
    #[error("no buildable site: found {sites} site(s) of at least {min_area} cells (water fraction {water_fraction:.2})")]
    NoBuildableSite { sites: usize, min_area: usize, water_fraction: f64 },
    #[error("no building entrance is walkable from spawn on this terrain")]
    NothingReachable,
    #[error(transparent)]
    World(#[from] VoxelError),
}

/// Road cost weights: the cost of entering a cell is
/// `base + slope_penalty * slope + water_penalty * water`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RoadWeights {
    pub base: f64,
    pub slope_penalty: f64,
    pub water_penalty: f64,
}

impl Default for RoadWeights {
    fn default() -> Self {
        Self { base: 1.0, slope_penalty: 4.0, water_penalty: 25.0 }
    }
}

/// Material selection rules: each override, when set, replaces the
/// census-driven choice for that part.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MaterialRules {
    pub wall: Option<u8>,
    pub roof: Option<u8>,
    pub foundation: Option<u8>,
}

impl MaterialRules {
    fn apply(&self, chosen: MaterialSet) -> MaterialSet {
        MaterialSet {
            wall: self.wall.unwrap_or(chosen.wall),
            roof: self.roof.unwrap_or(chosen.roof),
            foundation: self.foundation.unwrap_or(chosen.foundation),
        }
    }
}

/// Site score weights: `area * ln(area) - slope * mean_slope + water *
/// adjacency`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SiteWeights {
    pub area: f64,
    pub slope: f64,
    pub water: f64,
}

impl Default for SiteWeights {
    fn default() -> Self {
        Self { area: 1.0, slope: 0.5, water: 0.25 }
    }
}

/// Generator parameters, mirrored 1:1 by the JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveConfig {
    /// Buildings to place (best effort; rough maps may hold fewer).
    pub building_count: usize,
    /// Steepest slope a site cell may have.
    pub max_slope: i32,
    /// Smallest connected region considered a site.
    pub min_site_area: usize,
    pub road_weights: RoadWeights,
    pub site_weights: SiteWeights,
    pub material_rules: MaterialRules,
    pub seed: u64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            building_count: 8,
            max_slope: 1,
            min_site_area: 25,
            road_weights: RoadWeights::default(),
            site_weights: SiteWeights::default(),
            material_rules: MaterialRules::default(),
            seed: 0,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<(), AdaptiveError> {
        if self.building_count < 1 {
            return Err(AdaptiveError::BadConfig("building_count must be >= 1".into()));
        }
        if self.max_slope < 0 {
            return Err(AdaptiveError::BadConfig("max_slope must be >= 0".into()));
        }
        for (name, w) in [
            ("road_weights.base", self.road_weights.base),
            ("road_weights.slope_penalty", self.road_weights.slope_penalty),
            ("road_weights.water_penalty", self.road_weights.water_penalty),
            ("site_weights.area", self.site_weights.area),
            ("site_weights.slope", self.site_weights.slope),
            ("site_weights.water", self.site_weights.water),
        ] {
            if w < 0.0 || !w.is_finite() {
                return Err(AdaptiveError::BadConfig(format!("{name} must be >= 0, got {w}")));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

/// Per-cell entering costs over an (x, z) rectangle. `f64::INFINITY`
/// marks an impassable cell.
#[derive(Debug, Clone)]
pub struct CostGrid {
    min_x: i32,
    min_z: i32,
    width: i32,
    length: i32,
    costs: Vec<f64>,
}

impl CostGrid {
    pub fn new(min_x: i32, min_z: i32, width: i32, length: i32, fill: f64) -> Self {
        assert!(width >= 1 && length >= 1);
        Self {
            min_x,
            min_z,
            width,
            length,
            costs: vec![fill; width as usize * length as usize],
        }
    }

    pub fn contains(&self, x: i32, z: i32) -> bool {
        (self.min_x..self.min_x + self.width).contains(&x)
            && (self.min_z..self.min_z + self.length).contains(&z)
    }

    fn index(&self, x: i32, z: i32) -> usize {
        ((z - self.min_z) as usize) * self.width as usize + (x - self.min_x) as usize
    }

    pub fn cost(&self, x: i32, z: i32) -> f64 {
        self.costs[self.index(x, z)]
    }

    pub fn set_cost(&mut self, x: i32, z: i32, cost: f64) {
        let i = self.index(x, z);
        self.costs[i] = cost;
    }

    fn min_finite_cost(&self) -> f64 {
        self.costs.iter().copied().filter(|c| c.is_finite()).fold(f64::INFINITY, f64::min)
    }
}

/// A found route and its total cost (sum of entered cell costs; the
/// start cell is free).
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<(i32, i32)>,
    pub cost: f64,
}

#[derive(PartialEq)]
struct HeapEntry {
    f: f64,
    idx: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Equal f-scores break toward the smaller flat index, which makes
        // expansion order (and therefore the found path) deterministic.
        self.f.total_cmp(&other.f).then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn astar_with_rule(
    grid: &CostGrid,
    start: (i32, i32),
    goal: (i32, i32),
    edge_ok: impl Fn((i32, i32), (i32, i32)) -> bool,
) -> Option<GridPath> {
    if !grid.contains(start.0, start.1) || !grid.contains(goal.0, goal.1) {
        return None;
    }
    let n = grid.costs.len();
    let h_unit = {
        let m = grid.min_finite_cost();
        if m.is_finite() {
            m
        } else {
            0.0
        }
    };
    let manhattan =
        |x: i32, z: i32| ((x - goal.0).abs() + (z - goal.1).abs()) as f64 * h_unit;
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let start_idx = grid.index(start.0, start.1);
    let goal_idx = grid.index(goal.0, goal.1);
    g[start_idx] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(HeapEntry { f: manhattan(start.0, start.1), idx: start_idx }));
    while let Some(Reverse(HeapEntry { idx, .. })) = heap.pop() {
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        if idx == goal_idx {
            let mut cells = Vec::new();
            let mut cur = idx;
            while cur != usize::MAX {
                let x = grid.min_x + (cur % grid.width as usize) as i32;
                let z = grid.min_z + (cur / grid.width as usize) as i32;
                cells.push((x, z));
                cur = parent[cur];
            }
            cells.reverse();
            return Some(GridPath { cells, cost: g[idx] });
        }
        let x = grid.min_x + (idx % grid.width as usize) as i32;
        let z = grid.min_z + (idx / grid.width as usize) as i32;
        for (dx, dz) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (nx, nz) = (x + dx, z + dz);
            if !grid.contains(nx, nz) {
                continue;
            }
            let nidx = grid.index(nx, nz);
            if closed[nidx] {
                continue;
            }
            let step = grid.cost(nx, nz);
            if !step.is_finite() || !edge_ok((x, z), (nx, nz)) {
                continue;
            }
            let ng = g[idx] + step;
            if ng < g[nidx] {
                g[nidx] = ng;
                parent[nidx] = idx;
                heap.push(Reverse(HeapEntry { f: ng + manhattan(nx, nz), idx: nidx }));
            }
        }
    }
    None
}

/// Cost-optimal 4-connected route from `start` to `goal`, or `None` when
/// the goal is unreachable. The heuristic (Manhattan distance times the
/// cheapest cell) is admissible, so returned costs are minimal; ties
/// break toward smaller flat indices.
pub fn astar(grid: &CostGrid, start: (i32, i32), goal: (i32, i32)) -> Option<GridPath> {
    astar_with_rule(grid, start, goal, |_, _| true)
}

// ---------------------------------------------------------------------------
// Site scoring and materials
// ---------------------------------------------------------------------------

/// Rank sites for settlement: big flat regions first, with a bonus for
/// water access. Ties order by site bounds so the ranking is total.
pub fn score_sites(
    sites: &[Site],
    hf: &HeightField,
    _census: &MaterialCensus,
    cfg: &AdaptiveConfig,
) -> Vec<(Site, f64)> {
    let mut scored: Vec<(Site, f64)> = sites
        .iter()
        .map(|site| {
            let water_bonus = if site_touches_water(site, hf) { 1.0 } else { 0.0 };
            let score = cfg.site_weights.area * (site.area as f64).ln()
                - cfg.site_weights.slope * site.mean_slope
                + cfg.site_weights.water * water_bonus;
            (site.clone(), score)
        })
        .collect();
    scored.sort_by(|(a, sa), (b, sb)| {
        sb.total_cmp(sa).then_with(|| {
            (a.bounds.min_x, a.bounds.min_z, a.bounds.max_x, a.bounds.max_z).cmp(&(
                b.bounds.min_x,
                b.bounds.min_z,
                b.bounds.max_x,
                b.bounds.max_z,
            ))
        })
    });
    scored
}

fn site_touches_water(site: &Site, hf: &HeightField) -> bool {
    site.cells.iter().any(|&(x, z)| {
        [(x - 1, z), (x + 1, z), (x, z - 1), (x, z + 1)]
            .into_iter()
            .any(|(nx, nz)| hf.contains(nx, nz) && hf.water(nx, nz))
    })
}

/// The materials a building is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaterialSet {
    pub wall: u8,
    pub roof: u8,
    pub foundation: u8,
}

/// Pick building materials from what the terrain offers.
///
/// Walls use the most frequent structural product of the census (stone
/// family beats wood on ties, then lower id); the foundation is
/// cobblestone when any stone-family material is around, otherwise the
/// wall material; roofs are planks when timber exists, otherwise the
/// wall material. A census with nothing structural falls back to planks
/// throughout. The rule table is role-independent today; the role is
/// part of the interface so it can stop being ignored without a
/// signature change.
pub fn choose_materials(census: &MaterialCensus, _role: &str) -> MaterialSet {
    let mut product_counts: Vec<(u8, u64)> = Vec::new();
    for (&id, &count) in census {
        if let Some(product) = blocks::structural_material(id) {
            match product_counts.iter_mut().find(|(p, _)| *p == product) {
                Some((_, c)) => *c += count,
                None => product_counts.push((product, count)),
            }
        }
    }
    let family_rank = |id: u8| if blocks::is_stone_family(id) || id == blocks::SANDSTONE { 0 } else { 1 };
    product_counts.sort_by(|&(ida, ca), &(idb, cb)| {
        cb.cmp(&ca).then(family_rank(ida).cmp(&family_rank(idb))).then(ida.cmp(&idb))
    });
    let wall = product_counts.first().map(|&(id, _)| id).unwrap_or(blocks::PLANKS);
    let stone_around = census.keys().any(|&id| blocks::is_stone_family(id));
    let foundation = if stone_around { blocks::COBBLESTONE } else { wall };
    let timber_around = census.keys().any(|&id| blocks::is_wood_family(id));
    let roof = if timber_around || wall == blocks::PLANKS { blocks::PLANKS } else { wall };
    MaterialSet { wall, roof, foundation }
}

// ---------------------------------------------------------------------------
// Building placement
// ---------------------------------------------------------------------------

/// Build one terrain-matched building on `region`.
///
/// The floor sits at the median surface of the footprint; columns below
/// it are filled with foundation material so no edge floats; terrain
/// above it inside the walls is cut away. The doorway goes on the
/// perimeter cell whose outside ground is closest to the floor, with its
/// bottom exactly one block above that ground, so the entrance is at
/// grade by construction. Returns `None` if the region has bottomless
/// columns or is smaller than 5x5.
pub fn place_adaptive_building(
    region: Rect2,
    hf: &HeightField,
    materials: &MaterialSet,
    role: &str,
    seed: u64,
) -> Option<(EditSet, Building)> {
    if region.width() < 5 || region.depth() < 5 {
        return None;
    }
    if region.cells().any(|(x, z)| !hf.contains(x, z) || hf.is_sentinel(x, z)) {
        return None;
    }
    let mut rng = SplitMix64::new(seed);
    let wall_h = rng.next_range_i32(4, 6);

    let mut surfaces: Vec<i32> = region.cells().map(|(x, z)| hf.surface(x, z)).collect();
    surfaces.sort_unstable();
    let floor = surfaces[(surfaces.len() - 1) / 2];
    let roof_y = floor + wall_h + 1;

    let mut edits = EditSet::new();
    let mut min_y = floor;
    let mut max_y = roof_y;
    let mut emit = |x: i32, y: i32, z: i32, state: BlockState, min_y: &mut i32, max_y: &mut i32| {
        *min_y = (*min_y).min(y);
        *max_y = (*max_y).max(y);
        edits.set(x, y, z, state);
    };

    // Foundation fill and floor slab.
    for (x, z) in region.cells() {
        let surface = hf.surface(x, z);
        for y in (surface + 1)..floor {
            emit(x, y, z, BlockState::of(materials.foundation), &mut min_y, &mut max_y);
        }
        emit(x, floor, z, BlockState::of(materials.foundation), &mut min_y, &mut max_y);
    }
    // Clear the interior volume and any terrain poking above the floor,
    // up to the roof underside or the old surface, whichever is higher.
    for (x, z) in region.cells() {
        let surface = hf.surface(x, z);
        let on_perimeter =
            x == region.min_x || x == region.max_x || z == region.min_z || z == region.max_z;
        let clear_top = surface.max(roof_y - 1);
        for y in (floor + 1)..=clear_top {
            let inside_wall_band = on_perimeter && y <= floor + wall_h;
            if !inside_wall_band {
                emit(x, y, z, BlockState::AIR, &mut min_y, &mut max_y);
            }
        }
    }
    // Walls.
    for (x, z) in region.perimeter_cells() {
        for y in (floor + 1)..=(floor + wall_h) {
            emit(x, y, z, BlockState::of(materials.wall), &mut min_y, &mut max_y);
        }
    }
    // Roof.
    for (x, z) in region.cells() {
        emit(x, roof_y, z, BlockState::of(materials.roof), &mut min_y, &mut max_y);
    }

    // Doorway: the non-corner perimeter cell whose exterior ground is
    // closest to the floor, walked in perimeter order for a stable tie
    // break.
    let mut door: Option<((i32, i32), i32)> = None;
    let mut best = i64::MAX;
    for (x, z) in region.perimeter_cells() {
        let corner = (x == region.min_x || x == region.max_x)
            && (z == region.min_z || z == region.max_z);
        if corner {
            continue;
        }
        let (ex, ez) = if x == region.min_x {
            (x - 1, z)
        } else if x == region.max_x {
            (x + 1, z)
        } else if z == region.min_z {
            (x, z - 1)
        } else {
            (x, z + 1)
        };
        if !hf.contains(ex, ez) || hf.is_sentinel(ex, ez) || hf.water(ex, ez) || hf.lava(ex, ez) {
            continue;
        }
        let ext = hf.surface(ex, ez);
        let diff = (ext as i64 - floor as i64).abs();
        if diff < best {
            best = diff;
            door = Some(((x, z), ext));
        }
    }
    let ((door_x, door_z), ext_surface) = door?;
    let door_y = ext_surface + 1;
    emit(door_x, door_y, door_z, BlockState::new(blocks::WOODEN_DOOR, 0), &mut min_y, &mut max_y);
    emit(
        door_x,
        door_y + 1,
        door_z,
        BlockState::new(blocks::WOODEN_DOOR, 8),
        &mut min_y,
        &mut max_y,
    );

    let building = Building {
        bounds: BoundingBox::new(
            Vec3i::new(region.min_x, min_y, region.min_z),
            Vec3i::new(region.max_x, max_y, region.max_z),
        )
        .expect("min <= max by construction"),
        entrance: Vec3i::new(door_x, door_y, door_z),
        role: role.to_string(),
        materials: vec![materials.wall, materials.roof, materials.foundation],
    };
    Some((edits, building))
}

// ---------------------------------------------------------------------------
// Road planning
// ---------------------------------------------------------------------------

/// The approach cell: the ground column just outside a building's
/// entrance.
fn approach_cell(b: &Building) -> Option<(i32, i32)> {
    let e = b.entrance;
    let r = &b.bounds;
    [(e.x - 1, e.z), (e.x + 1, e.z), (e.x, e.z - 1), (e.x, e.z + 1)]
        .into_iter()
        .find(|&(x, z)| x < r.min.x || x > r.max.x || z < r.min.z || z > r.max.z)
}

fn build_cost_grid(hf: &HeightField, sf: &crate::terrain::SlopeField, w: &RoadWeights) -> CostGrid {
    let b = hf.bounds();
    let mut grid = CostGrid::new(b.min.x, b.min.z, b.width(), b.length(), f64::INFINITY);
    for (x, z) in hf.columns() {
        if hf.is_sentinel(x, z) || hf.lava(x, z) {
            continue;
        }
        let slope = sf.slope(x, z);
        if slope == SLOPE_UNBUILDABLE {
            continue;
        }
        let cost = w.base
            + w.slope_penalty * slope as f64
            + if hf.water(x, z) { w.water_penalty } else { 0.0 };
        grid.set_cost(x, z, cost);
    }
    grid
}

/// Route one road between two land cells, keeping every transition
/// within one block of height. Water stretches become flat bridge decks
/// at `max(bank surfaces) + 1`; a crossing is only accepted when both
/// banks sit at the same height (otherwise the deck would break the
/// stair rule), so mismatched shore pairs are banned and the route is
/// retried elsewhere.
fn route_road(
    grid: &CostGrid,
    hf: &HeightField,
    start: (i32, i32),
    goal: (i32, i32),
) -> Option<RoadPlan> {
    if hf.water(start.0, start.1) || hf.water(goal.0, goal.1) {
        return None;
    }
    let mut banned: HashSet<((i32, i32), (i32, i32))> = HashSet::new();
    for _attempt in 0..8 {
        let path = astar_with_rule(grid, start, goal, |a, b| {
            let key = if a <= b { (a, b) } else { (b, a) };
            if banned.contains(&key) {
                return false;
            }
            let aw = hf.water(a.0, a.1);
            let bw = hf.water(b.0, b.1);
            if !aw && !bw {
                (hf.surface(a.0, a.1) - hf.surface(b.0, b.1)).abs() <= 1
            } else {
                true
            }
        })?;

        // Validate each water run: banks must match for a legal deck.
        let cells = &path.cells;
        let mut new_bans = Vec::new();
        let mut i = 0;
        while i < cells.len() {
            if !hf.water(cells[i].0, cells[i].1) {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < cells.len() && hf.water(cells[i].0, cells[i].1) {
                i += 1;
            }
            // Start and goal are land, so both banks exist.
            let entry = cells[run_start - 1];
            let exit = cells[i];
            if hf.surface(entry.0, entry.1) != hf.surface(exit.0, exit.1) {
                let first = cells[run_start];
                let last = cells[i - 1];
                new_bans.push(if entry <= first { (entry, first) } else { (first, entry) });
                new_bans.push(if exit <= last { (exit, last) } else { (last, exit) });
            }
        }
        if !new_bans.is_empty() {
            banned.extend(new_bans);
            continue;
        }

        // Assign walked heights: land cells at their surface, water runs
        // at their fixed deck level.
        let mut ys = vec![0i32; cells.len()];
        let mut bridge = vec![false; cells.len()];
        let mut i = 0;
        while i < cells.len() {
            let (x, z) = cells[i];
            if !hf.water(x, z) {
                ys[i] = hf.surface(x, z);
                i += 1;
                continue;
            }
            let run_start = i;
            while i < cells.len() && hf.water(cells[i].0, cells[i].1) {
                i += 1;
            }
            let entry = cells[run_start - 1];
            let exit = cells[i];
            let deck =
                hf.surface(entry.0, entry.1).max(hf.surface(exit.0, exit.1)) + 1;
            for j in run_start..i {
                ys[j] = deck;
                bridge[j] = true;
            }
        }
        let plan = RoadPlan {
            cells: cells
                .iter()
                .zip(&ys)
                .map(|(&(x, z), &y)| Vec3i::new(x, y, z))
                .collect(),
            bridge,
        };
        debug_assert!(
            plan.cells.windows(2).all(|p| (p[0].y - p[1].y).abs() <= 1),
            "road breaks the stair rule"
        );
        return Some(plan);
    }
    None
}

/// Connect every building to the road network: each one routes to the
/// nearest already-connected approach cell (falling back to the next
/// nearest if that fails). Returns the plans plus the indices of
/// buildings that could not be connected.
pub fn plan_roads(
    buildings: &[Building],
    hf: &HeightField,
    cfg: &AdaptiveConfig,
) -> (Vec<RoadPlan>, Vec<usize>) {
    if buildings.len() < 2 {
        return (Vec::new(), Vec::new());
    }
    let sf = compute_slope(hf);
    let grid = build_cost_grid(hf, &sf, &cfg.road_weights);
    let approaches: Vec<Option<(i32, i32)>> = buildings.iter().map(approach_cell).collect();

    let mut plans = Vec::new();
    let mut unconnected = Vec::new();
    let mut connected: Vec<usize> = Vec::new();
    if approaches[0].is_some() {
        connected.push(0);
    } else {
        unconnected.push(0);
    }
    for i in 1..buildings.len() {
        let Some(target) = approaches[i] else {
            unconnected.push(i);
            continue;
        };
        // Candidate anchors, nearest first.
        let mut anchors: Vec<(u32, usize)> = connected
            .iter()
            .filter_map(|&j| {
                approaches[j].map(|a| {
                    let d = (a.0 - target.0).unsigned_abs() + (a.1 - target.1).unsigned_abs();
                    (d, j)
                })
            })
            .collect();
        anchors.sort_unstable();
        let mut plan = None;
        for (_, j) in anchors {
            let anchor = approaches[j].expect("filtered above");
            if let Some(p) = route_road(&grid, hf, anchor, target) {
                plan = Some(p);
                break;
            }
        }
        match plan {
            Some(p) => {
                plans.push(p);
                connected.push(i);
            }
            None => unconnected.push(i),
        }
    }
    (plans, unconnected)
}

// ---------------------------------------------------------------------------
// Full generation
// ---------------------------------------------------------------------------

/// Spacing kept between buildings, in cells.
const BUILDING_SPACING: i32 = 2;
/// Half-size of the clear zone kept around the spawn column.
const SPAWN_CLEARANCE: i32 = 3;
/// A torch every this many road cells.
const TORCH_SPACING: usize = 6;

struct Placement {
    region: Rect2,
    role: String,
}

/// Fast rect-in-site tests over one site's bounding rectangle.
struct SiteMask {
    bounds: Rect2,
    prefix: Vec<u32>,
}

impl SiteMask {
    fn new(site: &Site) -> Self {
        let b = site.bounds;
        let w = b.width() as usize;
        let d = b.depth() as usize;
        let mut grid = vec![0u32; w * d];
        for &(x, z) in &site.cells {
            grid[(z - b.min_z) as usize * w + (x - b.min_x) as usize] = 1;
        }
        // 2D prefix sums, one row/col of padding.
        let mut prefix = vec![0u32; (w + 1) * (d + 1)];
        for zi in 0..d {
            for xi in 0..w {
                prefix[(zi + 1) * (w + 1) + (xi + 1)] = grid[zi * w + xi]
                    + prefix[zi * (w + 1) + (xi + 1)]
                    + prefix[(zi + 1) * (w + 1) + xi]
                    - prefix[zi * (w + 1) + xi];
            }
        }
        Self { bounds: b, prefix }
    }

    /// Does the site contain every cell of `r`?
    fn covers(&self, r: Rect2) -> bool {
        let b = self.bounds;
        if r.min_x < b.min_x || r.min_z < b.min_z || r.max_x > b.max_x || r.max_z > b.max_z {
            return false;
        }
        let w = b.width() as usize + 1;
        let x0 = (r.min_x - b.min_x) as usize;
        let z0 = (r.min_z - b.min_z) as usize;
        let x1 = (r.max_x - b.min_x) as usize + 1;
        let z1 = (r.max_z - b.min_z) as usize + 1;
        let sum = self.prefix[z1 * w + x1] + self.prefix[z0 * w + x0]
            - self.prefix[z0 * w + x1]
            - self.prefix[z1 * w + x0];
        sum as i64 == r.area()
    }
}

/// Greedy packing: place up to `want` building footprints in ranked
/// sites, keeping [`BUILDING_SPACING`] cells between them and a clear
/// zone around the spawn column. Positions prefer proximity to spawn.
fn pack_buildings(
    ranked: &[(Site, f64)],
    hf: &HeightField,
    cfg: &AdaptiveConfig,
    spawn_xz: (i32, i32),
    reachable: &HashSet<(i32, i32)>,
) -> Vec<Placement> {
    let spawn_zone = Rect2::new(
        spawn_xz.0 - SPAWN_CLEARANCE,
        spawn_xz.1 - SPAWN_CLEARANCE,
        spawn_xz.0 + SPAWN_CLEARANCE,
        spawn_xz.1 + SPAWN_CLEARANCE,
    );
    // Sites the spawn can walk to come first, in rank order.
    let mut ordered: Vec<&(Site, f64)> = Vec::new();
    for pass in [true, false] {
        for entry in ranked {
            let touches = entry.0.cells.iter().any(|c| reachable.contains(c));
            if touches == pass {
                ordered.push(entry);
            }
        }
    }

    let mut placements: Vec<Placement> = Vec::new();
    let mut occupied: Vec<Rect2> = Vec::new();
    for (site, _) in ordered {
        if placements.len() >= cfg.building_count {
            break;
        }
        let mask = SiteMask::new(site);
        'slot: while placements.len() < cfg.building_count {
            let idx = placements.len();
            let mut rng = SplitMix64::new(derive_seed(cfg.seed, 0x4000 + idx as u64));
            let max_w = site.bounds.width().clamp(5, 9);
            let max_d = site.bounds.depth().clamp(5, 9);
            let want_w = rng.next_range_i32(5, max_w);
            let want_d = rng.next_range_i32(5, max_d);
            for (w, d) in [(want_w, want_d), (5, 5)] {
                let mut best: Option<(u32, i32, i32)> = None;
                for z0 in site.bounds.min_z..=(site.bounds.max_z - d + 1) {
                    for x0 in site.bounds.min_x..=(site.bounds.max_x - w + 1) {
                        let rect = Rect2::new(x0, z0, x0 + w - 1, z0 + d - 1);
                        if !mask.covers(rect) {
                            continue;
                        }
                        let padded = rect.expand(BUILDING_SPACING);
                        if padded.intersects(&spawn_zone)
                            || occupied.iter().any(|o| padded.intersects(o))
                        {
                            continue;
                        }
                        let cx = x0 + w / 2;
                        let cz = z0 + d / 2;
                        let dist =
                            (cx - spawn_xz.0).unsigned_abs() + (cz - spawn_xz.1).unsigned_abs();
                        if best.map(|(bd, _, _)| dist < bd).unwrap_or(true) {
                            best = Some((dist, x0, z0));
                        }
                    }
                }
                if let Some((_, x0, z0)) = best {
                    let rect = Rect2::new(x0, z0, x0 + w - 1, z0 + d - 1);
                    let near_water = rect
                        .expand(3)
                        .cells()
                        .any(|(x, z)| hf.contains(x, z) && hf.water(x, z));
                    let role = if idx == 0 {
                        "hall"
                    } else if near_water {
                        "farm-plot"
                    } else {
                        "house"
                    };
                    occupied.push(rect);
                    placements.push(Placement { region: rect, role: role.to_string() });
                    continue 'slot;
                }
            }
            break; // site exhausted for both sizes
        }
    }
    placements
}

/// Connected components of the dry terrain under the one-block step
/// rule: two columns share a component when an avatar can walk between
/// them over raw ground. Sites are internally flat, so every site lies
/// inside exactly one component.
struct WalkComponents {
    min_x: i32,
    min_z: i32,
    width: i32,
    labels: Vec<u32>,
}

const NO_COMPONENT: u32 = u32::MAX;

impl WalkComponents {
    fn label(&self, x: i32, z: i32) -> Option<u32> {
        let idx = ((z - self.min_z) as usize) * self.width as usize + (x - self.min_x) as usize;
        match self.labels[idx] {
            NO_COMPONENT => None,
            l => Some(l),
        }
    }
}

fn walk_components(hf: &HeightField) -> WalkComponents {
    let b = hf.bounds();
    let width = b.width();
    let mut comps = WalkComponents {
        min_x: b.min.x,
        min_z: b.min.z,
        width,
        labels: vec![NO_COMPONENT; b.footprint() as usize],
    };
    let walkable = |x: i32, z: i32| {
        hf.contains(x, z) && !hf.is_sentinel(x, z) && !hf.water(x, z) && !hf.lava(x, z)
    };
    let mut next = 0u32;
    for (x, z) in hf.columns() {
        let idx = ((z - b.min.z) as usize) * width as usize + (x - b.min.x) as usize;
        if comps.labels[idx] != NO_COMPONENT || !walkable(x, z) {
            continue;
        }
        comps.labels[idx] = next;
        let mut queue = std::collections::VecDeque::from([(x, z)]);
        while let Some((qx, qz)) = queue.pop_front() {
            for (nx, nz) in [(qx - 1, qz), (qx + 1, qz), (qx, qz - 1), (qx, qz + 1)] {
                if !walkable(nx, nz) {
                    continue;
                }
                if (hf.surface(qx, qz) - hf.surface(nx, nz)).abs() > 1 {
                    continue;
                }
                let nidx =
                    ((nz - b.min.z) as usize) * width as usize + (nx - b.min.x) as usize;
                if comps.labels[nidx] == NO_COMPONENT {
                    comps.labels[nidx] = next;
                    queue.push_back((nx, nz));
                }
            }
        }
        next += 1;
    }
    comps
}

/// Run the adaptive generator over a selection box.
///
/// Pipeline: analyze the box, rank its sites, pack building footprints
/// (preferring ground the spawn can walk to), raise grade-matched
/// buildings with census materials, route stair-legal roads with plank
/// bridges, light the roads and entrances with torches, and finally walk
/// the finished settlement from spawn, dropping any building whose
/// entrance is unreachable and replanning until the manifest is
/// self-consistent. Deterministic for a given `(world, box, cfg)`.
pub fn adaptive_generate(
    world: &VoxelWorld,
    bx: BoundingBox,
    cfg: &AdaptiveConfig,
) -> Result<(EditSet, SettlementManifest), AdaptiveError> {
    cfg.validate()?;
    world.block_at(bx.min)?;
    world.block_at(bx.max)?;

    let hf = compute_heightmap(world, bx)?;
    let sf = compute_slope(&hf);
    let census = material_census(world, bx, &hf);
    let sites = find_build_sites(&hf, &sf, cfg.min_site_area, cfg.max_slope);
    if sites.is_empty() {
        let wet = hf.columns().filter(|&(x, z)| hf.water(x, z)).count();
        return Err(AdaptiveError::NoBuildableSite {
            sites: 0,
            min_area: cfg.min_site_area,
            water_fraction: wet as f64 / bx.footprint() as f64,
        });
    }
    let ranked = score_sites(&sites, &hf, &census, cfg);

    // The settlement lives in the walk component of the best site: the
    // spawn column is the component cell nearest the box center, and
    // placement prefers sites an avatar can already walk to from there.
    let comps = walk_components(&hf);
    let best_cell = ranked[0].0.cells[0];
    let target = comps.label(best_cell.0, best_cell.1).expect("site cells are dry ground");
    let (cx, cz) = bx.center_xz();
    let mut spawn_candidates: Vec<(u32, i32, i32)> = hf
        .columns()
        .filter(|&(x, z)| comps.label(x, z) == Some(target))
        .map(|(x, z)| ((x - cx).unsigned_abs() + (z - cz).unsigned_abs(), x, z))
        .collect();
    spawn_candidates.sort_unstable();
    let spawn_col = spawn_candidates
        .iter()
        .find(|&&(_, x, z)| top_standing_y(world, x, z).is_some())
        .map(|&(_, x, z)| (x, z))
        .ok_or(AdaptiveError::NothingReachable)?;
    let reachable: HashSet<(i32, i32)> = hf
        .columns()
        .filter(|&(x, z)| comps.label(x, z) == Some(target))
        .collect();

    let placements = pack_buildings(&ranked, &hf, cfg, spawn_col, &reachable);
    if placements.is_empty() {
        let wet = hf.columns().filter(|&(x, z)| hf.water(x, z)).count();
        return Err(AdaptiveError::NoBuildableSite {
            sites: sites.len(),
            min_area: cfg.min_site_area,
            water_fraction: wet as f64 / bx.footprint() as f64,
        });
    }

    // Build everything on a working copy, then self-verify by walking,
    // dropping unreachable buildings and replanning.
    let mut active = vec![true; placements.len()];
    loop {
        let mut working = world.clone();
        let mut buildings = Vec::new();
        for (i, p) in placements.iter().enumerate() {
            if !active[i] {
                continue;
            }
            let materials = cfg.material_rules.apply(choose_materials(&census, &p.role));
            let seed = derive_seed(cfg.seed, 0x8000 + i as u64);
            if let Some((edits, building)) =
                place_adaptive_building(p.region, &hf, &materials, &p.role, seed)
            {
                let edits: EditSet =
                    edits.iter().filter(|(pos, _)| bx.contains(*pos)).copied().collect();
                working.apply_edit_set(&edits)?;
                buildings.push(building);
            } else {
                active[i] = false;
            }
        }
        if buildings.is_empty() {
            return Err(AdaptiveError::NothingReachable);
        }

        let hf_built = compute_heightmap(&working, bx)?;
        let (roads, unconnected) = plan_roads(&buildings, &hf_built, cfg);
        let mut road_edits = EditSet::new();
        for plan in &roads {
            for (i, cell) in plan.cells.iter().enumerate() {
                road_edits.push(*cell, BlockState::of(plan.block_id(i)));
                if i % TORCH_SPACING == 0 {
                    road_edits.set(cell.x, cell.y + 1, cell.z, BlockState::of(blocks::TORCH));
                }
            }
        }
        // Torches at every entrance approach.
        for b in &buildings {
            if let Some((x, z)) = approach_cell(b) {
                if hf_built.contains(x, z) && !hf_built.is_sentinel(x, z) {
                    road_edits.set(
                        x,
                        hf_built.surface(x, z) + 1,
                        z,
                        BlockState::of(blocks::TORCH),
                    );
                }
            }
        }
        let road_edits: EditSet =
            road_edits.iter().filter(|(pos, _)| bx.contains(*pos)).copied().collect();
        working.apply_edit_set(&road_edits)?;

        // The spawn column was kept clear of buildings; roads may pave
        // it, which leaves its height unchanged.
        let spawn = spawn_candidates
            .iter()
            .find_map(|&(_, x, z)| top_standing_y(&working, x, z).map(|y| Vec3i::new(x, y, z)))
            .ok_or(AdaptiveError::NothingReachable)?;
        let walk = walk_bfs(&working, spawn);
        let mut dropped_any = false;
        let mut survivor = 0usize;
        for (i, p) in placements.iter().enumerate() {
            if !active[i] {
                continue;
            }
            let b = &buildings[survivor];
            debug_assert_eq!(
                (b.bounds.min.x, b.bounds.min.z),
                (p.region.min_x, p.region.min_z)
            );
            if !walk.reaches(b.entrance) {
                active[i] = false;
                dropped_any = true;
            }
            survivor += 1;
        }
        if dropped_any {
            continue;
        }

        let edits = diff_worlds(world, &working)?;
        debug_assert!(is_standing(&working, spawn));
        let manifest = SettlementManifest {
            buildings,
            roads,
            yards: Vec::new(),
            unconnected,
            spawn,
        };
        return Ok((edits, manifest));
    }
}
