//! Automated settlement evaluation: direct and simulation-based metric
//! functions over a (before-world, after-world, manifest) triple, rolled
//! up into a four-category 0-10 scorecard.
//!
//! The simulation side models an avatar that steps at most one block up
//! or down, needs two passable blocks of headroom and solid footing
//! ([`walk_bfs`]), and a block-light field with emission 14 attenuating
//! one level per step ([`light_field`], spawn threshold 8). The direct
//! side diffs worlds, scans road grades, checks entrances against the
//! exterior grade, and measures building variety. All metrics land in
//! [0, 1]; [`scorecard`] maps them into the four judging categories.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks;
use crate::manifest::SettlementManifest;
use crate::terrain::{compute_heightmap, material_census, MaterialCensus};
use crate::voxel::{diff_worlds, BoundingBox, Vec3i, VoxelError, VoxelWorld};

/// Maximum step up or down between adjacent standing positions.
pub const STEP_HEIGHT: i32 = 1;
/// Block-light level at a torch.
pub const LIGHT_EMISSION: u8 = 14;
/// Cells darker than this can spawn hostiles.
pub const SPAWN_LIGHT_THRESHOLD: u8 = 8;
/// Distinct building roles the narrative proxy considers "full variety".
pub const EXPECTED_ROLES: usize = 3;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("metric {name} is {value}, outside [0, 1]")]
    MetricOutOfRange { name: &'static str, value: f64 },
    #[error("weight {name} is {value}, must be >= 0")]
    NegativeWeight { name: &'static str, value: f64 },
    #[error(transparent)]
    World(#[from] VoxelError),
}

// ---------------------------------------------------------------------------
// Walk graph
// ---------------------------------------------------------------------------

/// Can an avatar stand with its feet at `feet`? Requires passable feet
/// and head cells and solid (non-liquid, non-fixture) support below.
/// A head cell above the world ceiling counts as open sky.
pub fn is_standing(world: &VoxelWorld, feet: Vec3i) -> bool {
    let Ok(feet_block) = world.block_at(feet) else { return false };
    if !blocks::is_passable(feet_block.id) {
        return false;
    }
    let head = Vec3i::new(feet.x, feet.y + 1, feet.z);
    match world.block_at(head) {
        Ok(b) if !blocks::is_passable(b.id) => return false,
        _ => {}
    }
    let below = Vec3i::new(feet.x, feet.y - 1, feet.z);
    match world.block_at(below) {
        Ok(b) => blocks::is_support(b.id) && !b.is_air(),
        Err(_) => false,
    }
}

/// Breadth-first reachability over standing positions: every known state
/// maps to its step distance from the start.
pub struct WalkMap {
    dist: HashMap<(i32, i32, i32), u32>,
}

impl WalkMap {
    pub fn distance(&self, feet: Vec3i) -> Option<u32> {
        self.dist.get(&(feet.x, feet.y, feet.z)).copied()
    }

    pub fn reaches(&self, feet: Vec3i) -> bool {
        self.distance(feet).is_some()
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }
}

/// BFS over the walk graph from a spawn state. Neighbors are the four
/// horizontal cells at a step of at most [`STEP_HEIGHT`], each requiring
/// a valid standing position. An invalid spawn yields an empty map.
pub fn walk_bfs(world: &VoxelWorld, spawn_feet: Vec3i) -> WalkMap {
    let mut dist = HashMap::new();
    if !is_standing(world, spawn_feet) {
        return WalkMap { dist };
    }
    let mut queue = VecDeque::new();
    dist.insert((spawn_feet.x, spawn_feet.y, spawn_feet.z), 0u32);
    queue.push_back(spawn_feet);
    while let Some(cur) = queue.pop_front() {
        let d = dist[&(cur.x, cur.y, cur.z)];
        for (dx, dz) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            for dy in -STEP_HEIGHT..=STEP_HEIGHT {
                let next = Vec3i::new(cur.x + dx, cur.y + dy, cur.z + dz);
                if dist.contains_key(&(next.x, next.y, next.z)) {
                    continue;
                }
                if is_standing(world, next) {
                    dist.insert((next.x, next.y, next.z), d + 1);
                    queue.push_back(next);
                }
            }
        }
    }
    WalkMap { dist }
}

/// The topmost standing position in a column, if any.
pub fn top_standing_y(world: &VoxelWorld, x: i32, z: i32) -> Option<i32> {
    let b = world.bounds();
    if x < b.min.x || x > b.max.x || z < b.min.z || z > b.max.z {
        return None;
    }
    (b.min.y..=b.max.y).rev().find(|&y| is_standing(world, Vec3i::new(x, y, z)))
}

// ---------------------------------------------------------------------------
// Light field
// ---------------------------------------------------------------------------

/// Per-cell block light over a box. Cells outside the box are dark.
pub struct LightField {
    bounds: BoundingBox,
    level: Vec<u8>,
}

impl LightField {
    pub fn bounds(&self) -> BoundingBox {
        self.bounds
    }

    fn index(&self, p: Vec3i) -> Option<usize> {
        if !self.bounds.contains(p) {
            return None;
        }
        let w = self.bounds.width() as usize;
        let l = self.bounds.length() as usize;
        let lx = (p.x - self.bounds.min.x) as usize;
        let ly = (p.y - self.bounds.min.y) as usize;
        let lz = (p.z - self.bounds.min.z) as usize;
        Some((ly * l + lz) * w + lx)
    }

    pub fn level(&self, p: Vec3i) -> u8 {
        self.index(p).map(|i| self.level[i]).unwrap_or(0)
    }
}

/// Multi-source BFS from every torch in the box: level 14 at a source,
/// minus one per step through passable cells (6-connected), floored at
/// zero, max over sources.
pub fn light_field(world: &VoxelWorld, bx: BoundingBox) -> LightField {
    let cells = bx.footprint() as usize * bx.height() as usize;
    let mut field = LightField { bounds: bx, level: vec![0; cells] };
    let mut queue = VecDeque::new();
    for y in bx.min.y..=bx.max.y {
        for z in bx.min.z..=bx.max.z {
            for x in bx.min.x..=bx.max.x {
                let p = Vec3i::new(x, y, z);
                if world.block_at(p).map(|b| b.id) == Ok(blocks::TORCH) {
                    let idx = field.index(p).expect("in box");
                    field.level[idx] = LIGHT_EMISSION;
                    queue.push_back(p);
                }
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        let here = field.level(p);
        if here <= 1 {
            continue;
        }
        for (dx, dy, dz) in [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)] {
            let n = Vec3i::new(p.x + dx, p.y + dy, p.z + dz);
            let Some(idx) = field.index(n) else { continue };
            let Ok(b) = world.block_at(n) else { continue };
            if !blocks::is_passable(b.id) {
                continue;
            }
            if field.level[idx] < here - 1 {
                field.level[idx] = here - 1;
                queue.push_back(n);
            }
        }
    }
    field
}

// ---------------------------------------------------------------------------
// Metric functions
// ---------------------------------------------------------------------------

/// Per-building reachability and the overall accessibility fraction.
#[derive(Debug, Clone)]
pub struct AccessibilityReport {
    /// Reachable entrances / total entrances (0 when no buildings).
    pub score: f64,
    /// One flag per manifest building, in manifest order.
    pub reachable: Vec<bool>,
    /// Mean BFS path length to the reachable entrances.
    pub mean_path_len: f64,
}

/// Walk from the spawn point and check which building entrances can be
/// reached.
pub fn accessibility_score(
    after: &VoxelWorld,
    manifest: &SettlementManifest,
) -> AccessibilityReport {
    if manifest.buildings.is_empty() {
        return AccessibilityReport { score: 0.0, reachable: Vec::new(), mean_path_len: 0.0 };
    }
    let walk = walk_bfs(after, manifest.spawn);
    let mut reachable = Vec::with_capacity(manifest.buildings.len());
    let mut lengths = Vec::new();
    for b in &manifest.buildings {
        match walk.distance(b.entrance) {
            Some(d) => {
                reachable.push(true);
                lengths.push(d as f64);
            }
            None => reachable.push(false),
        }
    }
    let score = lengths.len() as f64 / manifest.buildings.len() as f64;
    let mean_path_len =
        if lengths.is_empty() { 0.0 } else { lengths.iter().sum::<f64>() / lengths.len() as f64 };
    AccessibilityReport { score, reachable, mean_path_len }
}

/// 1 minus the fraction of walkable standing cells (within the manifest
/// footprint) dark enough to spawn hostiles. No walkable cells scores 0.
pub fn spawn_safety_score(
    after: &VoxelWorld,
    manifest: &SettlementManifest,
    lf: &LightField,
) -> f64 {
    let fp = manifest.footprint();
    let wb = after.bounds();
    let mut walkable = 0u64;
    let mut spawnable = 0u64;
    for z in fp.min_z.max(wb.min.z)..=fp.max_z.min(wb.max.z) {
        for x in fp.min_x.max(wb.min.x)..=fp.max_x.min(wb.max.x) {
            for y in wb.min.y..=wb.max.y {
                let feet = Vec3i::new(x, y, z);
                if is_standing(after, feet) {
                    walkable += 1;
                    if lf.level(feet) < SPAWN_LIGHT_THRESHOLD {
                        spawnable += 1;
                    }
                }
            }
        }
    }
    if walkable == 0 {
        0.0
    } else {
        1.0 - spawnable as f64 / walkable as f64
    }
}

fn building_feature_vector(b: &crate::manifest::Building) -> Vec<f64> {
    let mut v = vec![
        b.bounds.width() as f64,
        b.bounds.length() as f64,
        b.bounds.height() as f64,
    ];
    let mut hist = [0.0f64; 256];
    for &m in &b.materials {
        hist[m as usize] += 1.0;
    }
    if !b.materials.is_empty() {
        let n = b.materials.len() as f64;
        for h in hist.iter_mut() {
            *h /= n;
        }
    }
    v.extend_from_slice(&hist);
    v
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// 1 minus the mean pairwise cosine similarity of building feature
/// vectors (width, depth, height, normalized material histogram). Fewer
/// than two buildings scores 0.
pub fn diversity_score(manifest: &SettlementManifest) -> f64 {
    let n = manifest.buildings.len();
    if n < 2 {
        return 0.0;
    }
    let vectors: Vec<Vec<f64>> = manifest.buildings.iter().map(building_feature_vector).collect();
    let mut sum = 0.0;
    let mut pairs = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += cosine(&vectors[i], &vectors[j]);
            pairs += 1;
        }
    }
    (1.0 - sum / pairs as f64).clamp(0.0, 1.0)
}

/// Triangular remap peaking at diversity 0.5: clone-towns and grab-bag
/// chaos both score low, a balanced mix scores high.
pub fn diversity_in_band(diversity: f64) -> f64 {
    (1.0 - (diversity - 0.5).abs() * 2.0).clamp(0.0, 1.0)
}

/// How gently the settlement sits on the terrain: cell changes outside
/// building bounds and road cells, as a fraction of the map footprint,
/// mapped through `max(0, 1 - 4 * ratio)`.
pub fn terrain_impact_score(
    before: &VoxelWorld,
    after: &VoxelWorld,
    manifest: &SettlementManifest,
) -> Result<f64, VoxelError> {
    let diff = diff_worlds(before, after)?;
    let road_cells: std::collections::HashSet<(i32, i32, i32)> = manifest
        .roads
        .iter()
        .flat_map(|r| r.cells.iter().map(|c| (c.x, c.y, c.z)))
        .collect();
    let mut changed = 0u64;
    'edit: for (pos, _) in diff.iter() {
        if road_cells.contains(&(pos.x, pos.y, pos.z)) {
            continue;
        }
        for b in &manifest.buildings {
            if b.bounds.contains(*pos) {
                continue 'edit;
            }
        }
        changed += 1;
    }
    let ratio = changed as f64 / before.bounds().footprint() as f64;
    Ok((1.0 - 4.0 * ratio).max(0.0))
}

/// Fraction of consecutive road cell pairs obeying the one-block stair
/// rule. Vacuously 1 with no roads.
pub fn road_grade_score(manifest: &SettlementManifest) -> f64 {
    let mut ok = 0u64;
    let mut total = 0u64;
    for road in &manifest.roads {
        for pair in road.cells.windows(2) {
            total += 1;
            if (pair[0].y - pair[1].y).abs() <= 1 {
                ok += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        ok as f64 / total as f64
    }
}

/// The exterior ground column just outside a building's entrance.
fn entrance_exterior(b: &crate::manifest::Building) -> Option<(i32, i32)> {
    let e = b.entrance;
    let r = &b.bounds;
    [(e.x - 1, e.z), (e.x + 1, e.z), (e.x, e.z - 1), (e.x, e.z + 1)]
        .into_iter()
        .find(|&(x, z)| x < r.min.x || x > r.max.x || z < r.min.z || z > r.max.z)
}

/// Fraction of buildings whose doorway bottom is within one block of the
/// ground just outside it, measured on the after-world surface. The
/// floating-door failure mode, as a hard check.
pub fn entrance_grade_fraction(after: &VoxelWorld, manifest: &SettlementManifest) -> f64 {
    if manifest.buildings.is_empty() {
        return 0.0;
    }
    let hf = match compute_heightmap(after, after.bounds()) {
        Ok(hf) => hf,
        Err(_) => return 0.0,
    };
    let mut ok = 0usize;
    for b in &manifest.buildings {
        let Some((x, z)) = entrance_exterior(b) else { continue };
        if !hf.contains(x, z) || hf.is_sentinel(x, z) {
            continue;
        }
        if (b.entrance.y - hf.surface(x, z)).abs() <= 1 {
            ok += 1;
        }
    }
    ok as f64 / manifest.buildings.len() as f64
}

/// Fraction of declared building materials derivable from what the
/// original terrain offered (census ids, their structural products, and
/// cobblestone wherever stone-family material exists).
pub fn material_localness(manifest: &SettlementManifest, census_before: &MaterialCensus) -> f64 {
    if manifest.buildings.is_empty() {
        return 0.0;
    }
    let mut derivable: std::collections::HashSet<u8> = census_before.keys().copied().collect();
    for id in census_before.keys() {
        if let Some(product) = blocks::structural_material(*id) {
            derivable.insert(product);
        }
    }
    if census_before.keys().any(|&id| blocks::is_stone_family(id)) {
        derivable.insert(blocks::COBBLESTONE);
    }
    let mut sum = 0.0;
    for b in &manifest.buildings {
        if b.materials.is_empty() {
            continue;
        }
        let local = b.materials.iter().filter(|m| derivable.contains(m)).count();
        sum += local as f64 / b.materials.len() as f64;
    }
    sum / manifest.buildings.len() as f64
}

/// Structural completeness: are yards actually fenced and roofs actually
/// closed? Mean of the available components; 0 with nothing to check.
pub fn completeness_score(after: &VoxelWorld, manifest: &SettlementManifest) -> f64 {
    let wb = after.bounds();
    let mut parts = Vec::new();
    if !manifest.yards.is_empty() {
        let mut total = 0u64;
        let mut fenced = 0u64;
        for yard in &manifest.yards {
            for (x, z) in yard.rect.perimeter_cells() {
                total += 1;
                for y in wb.min.y..=wb.max.y {
                    if after.block_at(Vec3i::new(x, y, z)).map(|b| b.id) == Ok(blocks::FENCE) {
                        fenced += 1;
                        break;
                    }
                }
            }
        }
        if total > 0 {
            parts.push(fenced as f64 / total as f64);
        }
    }
    if !manifest.buildings.is_empty() {
        let mut sum = 0.0;
        for b in &manifest.buildings {
            let mut cells = 0u64;
            let mut roofed = 0u64;
            let top = b.bounds.max.y;
            for z in b.bounds.min.z..=b.bounds.max.z {
                for x in b.bounds.min.x..=b.bounds.max.x {
                    cells += 1;
                    if let Ok(blk) = after.block_at(Vec3i::new(x, top, z)) {
                        if !blk.is_air() {
                            roofed += 1;
                        }
                    }
                }
            }
            sum += if cells == 0 { 0.0 } else { roofed as f64 / cells as f64 };
        }
        parts.push(sum / manifest.buildings.len() as f64);
    }
    if parts.is_empty() {
        0.0
    } else {
        parts.iter().sum::<f64>() / parts.len() as f64
    }
}

/// Narrative proxy: distinct building roles over [`EXPECTED_ROLES`],
/// capped at 1. A declared weak stand-in for real narrative judgment.
pub fn role_variety(manifest: &SettlementManifest) -> f64 {
    let roles: std::collections::HashSet<&str> =
        manifest.buildings.iter().map(|b| b.role.as_str()).collect();
    (roles.len() as f64 / EXPECTED_ROLES as f64).min(1.0)
}

// ---------------------------------------------------------------------------
// Scorecard
// ---------------------------------------------------------------------------

/// Every category input, each in [0, 1].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Metrics {
    pub terrain_impact: f64,
    pub entrance_at_grade: f64,
    pub material_localness: f64,
    pub accessibility: f64,
    pub spawn_safety: f64,
    pub road_grade: f64,
    pub role_variety: f64,
    pub diversity: f64,
    pub diversity_in_band: f64,
    pub completeness: f64,
}

impl Metrics {
    fn named(&self) -> [(&'static str, f64); 10] {
        [
            ("terrain_impact", self.terrain_impact),
            ("entrance_at_grade", self.entrance_at_grade),
            ("material_localness", self.material_localness),
            ("accessibility", self.accessibility),
            ("spawn_safety", self.spawn_safety),
            ("road_grade", self.road_grade),
            ("role_variety", self.role_variety),
            ("diversity", self.diversity),
            ("diversity_in_band", self.diversity_in_band),
            ("completeness", self.completeness),
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptabilityWeights {
    pub terrain_impact: f64,
    pub entrance_at_grade: f64,
    pub material_localness: f64,
}

impl Default for AdaptabilityWeights {
    fn default() -> Self {
        Self { terrain_impact: 0.5, entrance_at_grade: 0.3, material_localness: 0.2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FunctionalityWeights {
    pub accessibility: f64,
    pub spawn_safety: f64,
    pub road_grade: f64,
}

impl Default for FunctionalityWeights {
    fn default() -> Self {
        Self { accessibility: 0.5, spawn_safety: 0.3, road_grade: 0.2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NarrativeWeights {
    pub role_variety: f64,
}

impl Default for NarrativeWeights {
    fn default() -> Self {
        Self { role_variety: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AestheticsWeights {
    pub diversity_in_band: f64,
    pub completeness: f64,
}

impl Default for AestheticsWeights {
    fn default() -> Self {
        Self { diversity_in_band: 0.6, completeness: 0.4 }
    }
}

/// Category weights, overridable via the `--weights` JSON document.
/// These defaults are declared judgment calls, not measurements.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreWeights {
    pub adaptability: AdaptabilityWeights,
    pub functionality: FunctionalityWeights,
    pub narrative: NarrativeWeights,
    pub aesthetics: AestheticsWeights,
}

impl ScoreWeights {
    fn validate(&self) -> Result<(), EvalError> {
        let named = [
            ("adaptability.terrain_impact", self.adaptability.terrain_impact),
            ("adaptability.entrance_at_grade", self.adaptability.entrance_at_grade),
            ("adaptability.material_localness", self.adaptability.material_localness),
            ("functionality.accessibility", self.functionality.accessibility),
            ("functionality.spawn_safety", self.functionality.spawn_safety),
            ("functionality.road_grade", self.functionality.road_grade),
            ("narrative.role_variety", self.narrative.role_variety),
            ("aesthetics.diversity_in_band", self.aesthetics.diversity_in_band),
            ("aesthetics.completeness", self.aesthetics.completeness),
        ];
        for (name, value) in named {
            if value < 0.0 || !value.is_finite() {
                return Err(EvalError::NegativeWeight { name, value });
            }
        }
        Ok(())
    }
}

/// Per-category 0-10 scores with the metric breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct Scorecard {
    pub adaptability: f64,
    pub functionality: f64,
    pub narrative: f64,
    pub aesthetics: f64,
    pub total: f64,
    pub breakdown: BTreeMap<String, f64>,
}

/// Combine validated metrics into the four category scores: a weighted
/// blend per category, scaled to 10 and clamped to [0, 10]. Raising any
/// single metric can never lower any category.
pub fn scorecard(metrics: &Metrics, weights: &ScoreWeights) -> Result<Scorecard, EvalError> {
    for (name, value) in metrics.named() {
        if !(0.0..=1.0).contains(&value) || !value.is_finite() {
            return Err(EvalError::MetricOutOfRange { name, value });
        }
    }
    weights.validate()?;
    let clamp10 = |v: f64| v.clamp(0.0, 10.0);
    let adaptability = clamp10(
        10.0 * (weights.adaptability.terrain_impact * metrics.terrain_impact
            + weights.adaptability.entrance_at_grade * metrics.entrance_at_grade
            + weights.adaptability.material_localness * metrics.material_localness),
    );
    let functionality = clamp10(
        10.0 * (weights.functionality.accessibility * metrics.accessibility
            + weights.functionality.spawn_safety * metrics.spawn_safety
            + weights.functionality.road_grade * metrics.road_grade),
    );
    let narrative = clamp10(10.0 * weights.narrative.role_variety * metrics.role_variety);
    let aesthetics = clamp10(
        10.0 * (weights.aesthetics.diversity_in_band * metrics.diversity_in_band
            + weights.aesthetics.completeness * metrics.completeness),
    );
    let breakdown = metrics.named().iter().map(|&(k, v)| (k.to_string(), v)).collect();
    Ok(Scorecard {
        adaptability,
        functionality,
        narrative,
        aesthetics,
        total: adaptability + functionality + narrative + aesthetics,
        breakdown,
    })
}

// ---------------------------------------------------------------------------
// Full evaluation and the report document
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Categories {
    pub adaptability: f64,
    pub functionality: f64,
    pub narrative: f64,
    pub aesthetics: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapReport {
    pub name: String,
    pub metrics: BTreeMap<String, f64>,
    pub categories: Categories,
    pub total: f64,
}

/// The report document: one entry per evaluated map plus the grand
/// total and wall-clock time.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub maps: Vec<MapReport>,
    pub grand_total: f64,
    pub runtime_seconds: f64,
    /// Criteria the model deliberately does not cover.
    pub notes: Vec<String>,
}

impl Report {
    pub fn assemble(maps: Vec<MapReport>, runtime_seconds: f64) -> Report {
        let grand_total = maps.iter().map(|m| m.total).sum();
        Report {
            maps,
            grand_total,
            runtime_seconds,
            notes: vec![
                "food availability is not modeled; functionality covers access, lighting safety, and road grade".into(),
                "narrative is scored by role variety only; history and culture are out of computable scope".into(),
                "lighting ignores skylight, making spawn safety a conservative night-time bound".into(),
            ],
        }
    }
}

/// Evaluate one before/after pair against a manifest and produce its
/// report entry. Worlds are read-only throughout.
pub fn evaluate(
    name: &str,
    before: &VoxelWorld,
    after: &VoxelWorld,
    manifest: &SettlementManifest,
    weights: &ScoreWeights,
) -> Result<MapReport, EvalError> {
    let impact = terrain_impact_score(before, after, manifest)?;
    let hf_before = compute_heightmap(before, before.bounds())?;
    let census_before = material_census(before, before.bounds(), &hf_before);
    let lf = light_field(after, after.bounds());
    let access = accessibility_score(after, manifest);
    let diversity = diversity_score(manifest);
    let metrics = Metrics {
        terrain_impact: impact,
        entrance_at_grade: entrance_grade_fraction(after, manifest),
        material_localness: material_localness(manifest, &census_before),
        accessibility: access.score,
        spawn_safety: spawn_safety_score(after, manifest, &lf),
        road_grade: road_grade_score(manifest),
        role_variety: role_variety(manifest),
        diversity,
        diversity_in_band: diversity_in_band(diversity),
        completeness: completeness_score(after, manifest),
    };
    let card = scorecard(&metrics, weights)?;
    let mut metric_map = card.breakdown.clone();
    metric_map.insert("mean_path_len".into(), access.mean_path_len);
    Ok(MapReport {
        name: name.to_string(),
        metrics: metric_map,
        categories: Categories {
            adaptability: card.adaptability,
            functionality: card.functionality,
            narrative: card.narrative,
            aesthetics: card.aesthetics,
        },
        total: card.total,
    })
}
