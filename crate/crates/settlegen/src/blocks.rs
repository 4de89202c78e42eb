//! Legacy numeric block ids and the classification sets the rest of the
//! crate agrees on: what counts as terrain surface, what an avatar can
//! occupy, and which found materials map to which building materials.

pub const AIR: u8 = 0;
pub const STONE: u8 = 1;
pub const GRASS: u8 = 2;
pub const DIRT: u8 = 3;
pub const COBBLESTONE: u8 = 4;
pub const PLANKS: u8 = 5;
pub const SAPLING: u8 = 6;
pub const FLOWING_WATER: u8 = 8;
pub const WATER: u8 = 9;
pub const FLOWING_LAVA: u8 = 10;
pub const LAVA: u8 = 11;
pub const SAND: u8 = 12;
pub const GRAVEL: u8 = 13;
pub const LOG: u8 = 17;
pub const LEAVES: u8 = 18;
pub const GLASS: u8 = 20;
pub const SANDSTONE: u8 = 24;
pub const TALL_GRASS: u8 = 31;
pub const DEAD_BUSH: u8 = 32;
pub const DANDELION: u8 = 37;
pub const POPPY: u8 = 38;
pub const BROWN_MUSHROOM: u8 = 39;
pub const RED_MUSHROOM: u8 = 40;
pub const TORCH: u8 = 50;
pub const FIRE: u8 = 51;
pub const WOODEN_DOOR: u8 = 64;
pub const SNOW_LAYER: u8 = 78;
pub const FENCE: u8 = 85;
pub const STONE_BRICKS: u8 = 98;

/// Water or lava, in either still or flowing form.
pub fn is_liquid(id: u8) -> bool {
    matches!(id, FLOWING_WATER | WATER | FLOWING_LAVA | LAVA)
}

pub fn is_water(id: u8) -> bool {
    matches!(id, FLOWING_WATER | WATER)
}

pub fn is_lava(id: u8) -> bool {
    matches!(id, FLOWING_LAVA | LAVA)
}

/// Blocks an avatar can stand *in* (feet or head cell).
pub fn is_passable(id: u8) -> bool {
    matches!(id, AIR | TORCH | WOODEN_DOOR)
}

/// Blocks that do not define the terrain surface: air, liquids, foliage,
/// and fixtures. A house founded on a tree canopy or a torch is exactly
/// the kind of error the heightmap has to rule out, so leaves and all
/// plant-like ids are excluded while logs stay solid.
pub fn is_surface_solid(id: u8) -> bool {
    !matches!(
        id,
        AIR | FLOWING_WATER
            | WATER
            | FLOWING_LAVA
            | LAVA
            | SAPLING
            | LEAVES
            | TALL_GRASS
            | DEAD_BUSH
            | DANDELION
            | POPPY
            | BROWN_MUSHROOM
            | RED_MUSHROOM
            | TORCH
            | FIRE
            | WOODEN_DOOR
            | SNOW_LAYER
    )
}

/// Solid enough to stand on: a support block must be real matter, not a
/// passable fixture and not a liquid.
pub fn is_support(id: u8) -> bool {
    !is_passable(id) && !is_liquid(id)
}

/// The stone family for material decisions: censused ids that indicate
/// quarryable stone nearby.
pub fn is_stone_family(id: u8) -> bool {
    matches!(id, STONE | COBBLESTONE | GRAVEL | STONE_BRICKS)
}

/// The wood family: censused ids that indicate harvestable timber.
pub fn is_wood_family(id: u8) -> bool {
    matches!(id, PLANKS | LOG)
}

/// Map a censused terrain id to the structural material it yields, or
/// `None` if the id is not a usable construction source (dirt, grass,
/// foliage, liquids, ...).
pub fn structural_material(id: u8) -> Option<u8> {
    match id {
        STONE => Some(STONE),
        COBBLESTONE => Some(COBBLESTONE),
        STONE_BRICKS => Some(STONE_BRICKS),
        SANDSTONE => Some(SANDSTONE),
        SAND => Some(SANDSTONE),
        GRAVEL => Some(COBBLESTONE),
        LOG => Some(PLANKS),
        PLANKS => Some(PLANKS),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_is_consistent() {
        // Liquids are never surface, never passable, never support.
        for id in [FLOWING_WATER, WATER, FLOWING_LAVA, LAVA] {
            assert!(is_liquid(id));
            assert!(!is_surface_solid(id));
            assert!(!is_passable(id));
            assert!(!is_support(id));
        }
        // Logs carry buildings, leaves do not.
        assert!(is_surface_solid(LOG));
        assert!(!is_surface_solid(LEAVES));
        // Doors and torches can be walked through but not stood on.
        assert!(is_passable(WOODEN_DOOR));
        assert!(is_passable(TORCH));
        assert!(!is_support(TORCH));
        assert!(is_support(STONE));
    }

    #[test]
    fn material_table() {
        assert_eq!(structural_material(SAND), Some(SANDSTONE));
        assert_eq!(structural_material(GRAVEL), Some(COBBLESTONE));
        assert_eq!(structural_material(LOG), Some(PLANKS));
        assert_eq!(structural_material(DIRT), None);
        assert_eq!(structural_material(GRASS), None);
    }
}
