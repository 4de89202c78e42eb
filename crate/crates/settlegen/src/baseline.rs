//! A deliberately naive generator used as the comparison baseline: it
//! bulldozes a large central pad flat and stamps identical template
//! houses onto it in a grid. Everything the adaptive generator tries to
//! avoid, in one package.

use crate::blocks;
use crate::manifest::{Building, RoadPlan, SettlementManifest};
use crate::terrain::compute_heightmap;
use crate::voxel::{BlockState, BoundingBox, EditSet, Rect2, Vec3i, VoxelError, VoxelWorld};

const HOUSE: i32 = 7;
const GAP: i32 = 3;

/// Flatten-and-stamp generation: level the central 60% of the box to the
/// mean surface height, then lay out up to `building_count` identical
/// 7x7 plank houses with straight roads between the rows.
pub fn flatten_generate(
    world: &VoxelWorld,
    bx: BoundingBox,
    building_count: usize,
) -> Result<(EditSet, SettlementManifest), VoxelError> {
    let hf = compute_heightmap(world, bx)?;

    // Mean surface height over the box, sentinel columns excluded.
    let mut sum = 0i64;
    let mut n = 0i64;
    for (x, z) in hf.columns() {
        if !hf.is_sentinel(x, z) {
            sum += hf.surface(x, z) as i64;
            n += 1;
        }
    }
    let level = if n == 0 { bx.min.y } else { (sum / n) as i32 }.clamp(bx.min.y, bx.max.y - 8);

    let pad = Rect2::new(
        bx.min.x + bx.width() / 5,
        bx.min.z + bx.length() / 5,
        bx.max.x - bx.width() / 5,
        bx.max.z - bx.length() / 5,
    );

    let mut edits = EditSet::new();
    for (x, z) in pad.cells() {
        let surface = if hf.is_sentinel(x, z) { bx.min.y - 1 } else { hf.surface(x, z) };
        // Cut everything above the pad level.
        for y in (level + 1)..=surface.min(bx.max.y) {
            edits.set(x, y, z, BlockState::AIR);
        }
        // Fill up to it.
        for y in (surface + 1).max(bx.min.y)..level {
            edits.set(x, y, z, BlockState::of(blocks::DIRT));
        }
        edits.set(x, level, z, BlockState::of(blocks::GRASS));
    }

    // Identical template houses in a grid over the pad.
    let mut buildings = Vec::new();
    let stride = HOUSE + GAP;
    let per_row = ((pad.width() - 1) / stride).max(1);
    for i in 0..building_count {
        let gx = i as i32 % per_row;
        let gz = i as i32 / per_row;
        let x0 = pad.min_x + 1 + gx * stride;
        let z0 = pad.min_z + 1 + gz * stride;
        if x0 + HOUSE - 1 > pad.max_x || z0 + HOUSE - 1 > pad.max_z {
            break;
        }
        let rect = Rect2::new(x0, z0, x0 + HOUSE - 1, z0 + HOUSE - 1);
        for (x, z) in rect.perimeter_cells() {
            for y in (level + 1)..=(level + 4) {
                edits.set(x, y, z, BlockState::of(blocks::PLANKS));
            }
        }
        for (x, z) in rect.cells() {
            edits.set(x, level + 5, z, BlockState::of(blocks::PLANKS));
        }
        let door_x = x0 + HOUSE / 2;
        edits.set(door_x, level + 1, z0, BlockState::new(blocks::WOODEN_DOOR, 0));
        edits.set(door_x, level + 2, z0, BlockState::new(blocks::WOODEN_DOOR, 8));
        buildings.push(Building {
            bounds: BoundingBox::new(
                Vec3i::new(rect.min_x, level, rect.min_z),
                Vec3i::new(rect.max_x, level + 5, rect.max_z),
            )
            .expect("ordered corners"),
            entrance: Vec3i::new(door_x, level + 1, z0),
            role: "house".into(),
            materials: vec![blocks::PLANKS, blocks::PLANKS, blocks::PLANKS],
        });
    }

    // One straight road along each house row, one block in front of the
    // doors.
    let mut roads = Vec::new();
    if !buildings.is_empty() {
        let rows: std::collections::BTreeSet<i32> =
            buildings.iter().map(|b| b.bounds.min.z - 1).collect();
        for z in rows {
            if z < pad.min_z {
                continue;
            }
            let cells: Vec<Vec3i> =
                (pad.min_x..=pad.max_x).map(|x| Vec3i::new(x, level, z)).collect();
            for c in &cells {
                edits.set(c.x, c.y, c.z, BlockState::of(blocks::GRAVEL));
            }
            let len = cells.len();
            roads.push(RoadPlan { cells, bridge: vec![false; len] });
        }
    }

    let edits: EditSet = edits.iter().filter(|(p, _)| bx.contains(*p)).copied().collect();
    let (cx, cz) = bx.center_xz();
    let spawn_y = if pad.contains(cx, cz) {
        level + 1
    } else if hf.is_sentinel(cx, cz) {
        bx.min.y
    } else {
        hf.surface(cx, cz) + 1
    };
    let manifest = SettlementManifest {
        buildings,
        roads,
        yards: Vec::new(),
        unconnected: Vec::new(),
        spawn: Vec3i::new(cx, spawn_y, cz),
    };
    Ok((edits, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{synth_terrain, TerrainParams};

    #[test]
    fn baseline_flattens_heavily() {
        let params = TerrainParams { roughness: 0.7, ..TerrainParams::default() };
        let world = synth_terrain(11, 64, 64, &params).unwrap();
        let (edits, manifest) = flatten_generate(&world, world.bounds(), 6).unwrap();
        assert!(!manifest.buildings.is_empty());
        // The whole point of this generator: it rewrites a lot of map.
        assert!(edits.len() as i64 > world.bounds().footprint() / 4);
        let mut after = world.clone();
        after.apply_edit_set(&edits).unwrap();
        // Identical templates score zero diversity.
        assert_eq!(crate::eval::diversity_score(&manifest), 0.0);
    }
}
