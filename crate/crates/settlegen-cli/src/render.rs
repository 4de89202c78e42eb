//! Top-down map renders as binary PPM (P6): one pixel per column, block
//! color from a fixed table, brightness shaded by relative elevation.
//! PPM keeps the output bit-exact and diffable with no image library.

use settlegen::blocks;
use settlegen::terrain::compute_heightmap;
use settlegen::voxel::{Vec3i, VoxelError, VoxelWorld};

/// Top-color table for the ids this toolkit reads and writes; anything
/// else renders magenta so it stands out.
fn id_color(id: u8) -> [u8; 3] {
    match id {
        blocks::STONE => [128, 128, 128],
        blocks::GRASS => [96, 160, 66],
        blocks::DIRT => [134, 96, 67],
        blocks::COBBLESTONE => [110, 110, 110],
        blocks::PLANKS => [172, 140, 88],
        blocks::SAND => [219, 211, 160],
        blocks::GRAVEL => [136, 126, 126],
        blocks::LOG => [102, 81, 50],
        blocks::LEAVES => [44, 112, 44],
        blocks::GLASS => [205, 232, 240],
        blocks::SANDSTONE => [226, 216, 173],
        blocks::TORCH => [255, 220, 120],
        blocks::WOODEN_DOOR => [150, 110, 60],
        blocks::FENCE => [120, 96, 54],
        blocks::STONE_BRICKS => [122, 122, 122],
        blocks::AIR => [0, 0, 0],
        _ => [200, 60, 200],
    }
}

/// Water columns render in this blue before shading.
const WATER_COLOR: [u8; 3] = [52, 86, 201];

/// Render a whole map from above. Pixel (x, z) takes the color of the
/// surface block (water columns take the water blue), scaled by
/// `0.6 + 0.4 * (surface_y - min) / (max - min + 1)`. Bottomless columns
/// stay black.
pub fn render_top(world: &VoxelWorld) -> Result<Vec<u8>, VoxelError> {
    let bx = world.bounds();
    let hf = compute_heightmap(world, bx)?;
    let mut min = i32::MAX;
    let mut max = i32::MIN;
    for (x, z) in hf.columns() {
        if !hf.is_sentinel(x, z) {
            min = min.min(hf.surface(x, z));
            max = max.max(hf.surface(x, z));
        }
    }
    if min > max {
        // All-void map: render it black with a unit range.
        min = bx.min.y;
        max = bx.min.y;
    }

    let mut out = format!("P6\n{} {}\n255\n", bx.width(), bx.length()).into_bytes();
    for z in bx.min.z..=bx.max.z {
        for x in bx.min.x..=bx.max.x {
            if hf.is_sentinel(x, z) {
                out.extend_from_slice(&[0, 0, 0]);
                continue;
            }
            let surface = hf.surface(x, z);
            let base = if hf.water(x, z) {
                WATER_COLOR
            } else {
                let id = world
                    .block_at(Vec3i::new(x, surface, z))
                    .expect("surface cell is in bounds")
                    .id;
                id_color(id)
            };
            let shade = 0.6 + 0.4 * (surface - min) as f64 / (max - min + 1) as f64;
            let px = base.map(|c| ((c as f64 * shade).round() as i64).clamp(0, 255) as u8);
            out.extend_from_slice(&px);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use settlegen::voxel::BlockState;

    fn flat_2x2() -> VoxelWorld {
        let mut w = VoxelWorld::air(2, 4, 2, Vec3i::new(0, 0, 0)).unwrap();
        for z in 0..2 {
            for x in 0..2 {
                w.set_block(Vec3i::new(x, 0, z), BlockState::of(blocks::GRASS)).unwrap();
            }
        }
        w
    }

    #[test]
    fn header_and_uniform_pixels() {
        let img = render_top(&flat_2x2()).unwrap();
        assert!(img.starts_with(b"P6\n2 2\n255\n"));
        let body = &img[b"P6\n2 2\n255\n".len()..];
        assert_eq!(body.len(), 2 * 2 * 3);
        let first = &body[0..3];
        for px in body.chunks(3) {
            assert_eq!(px, first, "flat world renders 4 identical pixels");
        }
        // Flat world: shade is exactly 0.6.
        let expect = id_color(blocks::GRASS).map(|c| (c as f64 * 0.6).round() as u8);
        assert_eq!(first, expect);
    }

    #[test]
    fn water_renders_blue() {
        let mut w = flat_2x2();
        w.set_block(Vec3i::new(1, 1, 1), BlockState::of(blocks::WATER)).unwrap();
        let img = render_top(&w).unwrap();
        let body = &img[b"P6\n2 2\n255\n".len()..];
        // Pixel (1, 1) is the 4th pixel.
        let px = &body[9..12];
        let expect = WATER_COLOR.map(|c| (c as f64 * 0.6).round() as u8);
        assert_eq!(px, expect);
    }
}
