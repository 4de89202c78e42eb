//! The settlement manifest: the structured record a generator hands to
//! the evaluator. Buildings with bounds, entrance, role and materials;
//! roads as graded waypoint chains with bridge flags; fenced yards; and
//! the spawn point.
//!
//! Serialized as JSON with positions as `[x, y, z]` triples:
//! `{"buildings":[{"bounds":{"min":[x,y,z],"max":[x,y,z]},"entrance":[x,y,z],
//! "role":str,"materials":[ids]}],"roads":[{"cells":[[x,y,z],...],
//! "bridge":[bool,...]}],"yards":[...],"spawn":[x,y,z]}`.

use serde::{Deserialize, Serialize};

use crate::blocks;
use crate::voxel::{BoundingBox, Rect2, Vec3i};

/// One generated building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub bounds: BoundingBox,
    /// Doorway bottom cell, on the building perimeter.
    pub entrance: Vec3i,
    pub role: String,
    /// Block ids the building is made of (wall, roof, foundation, ...).
    pub materials: Vec<u8>,
}

/// One planned road: waypoints whose `y` is the walked surface, with a
/// per-cell bridge flag. Consecutive cells are 4-adjacent in (x, z) and
/// differ by at most 1 in y (the stair rule).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadPlan {
    pub cells: Vec<Vec3i>,
    pub bridge: Vec<bool>,
}

impl RoadPlan {
    /// Paving block for cell `i`: planks on bridge decks, gravel on land.
    pub fn block_id(&self, i: usize) -> u8 {
        if self.bridge[i] {
            blocks::PLANKS
        } else {
            blocks::GRAVEL
        }
    }
}

/// A fenced lot allotted to one building.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Yard {
    pub rect: Rect2,
    /// Index of the site (or partition) the yard was carved from.
    pub parent_site: usize,
}

/// Everything the evaluator needs to know about a generated settlement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementManifest {
    pub buildings: Vec<Building>,
    pub roads: Vec<RoadPlan>,
    #[serde(default)]
    pub yards: Vec<Yard>,
    /// Indices of buildings the road planner could not connect.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unconnected: Vec<usize>,
    pub spawn: Vec3i,
}

impl SettlementManifest {
    /// The (x, z) rectangle covering all manifest geometry: building
    /// bounds, road cells, yards, and the spawn point.
    pub fn footprint(&self) -> Rect2 {
        let mut min_x = self.spawn.x;
        let mut max_x = self.spawn.x;
        let mut min_z = self.spawn.z;
        let mut max_z = self.spawn.z;
        let mut grow = |x: i32, z: i32| {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_z = min_z.min(z);
            max_z = max_z.max(z);
        };
        for b in &self.buildings {
            grow(b.bounds.min.x, b.bounds.min.z);
            grow(b.bounds.max.x, b.bounds.max.z);
        }
        for r in &self.roads {
            for c in &r.cells {
                grow(c.x, c.z);
            }
        }
        for y in &self.yards {
            grow(y.rect.min_x, y.rect.min_z);
            grow(y.rect.max_x, y.rect.max_z);
        }
        Rect2::new(min_x, min_z, max_x, max_z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SettlementManifest {
        SettlementManifest {
            buildings: vec![Building {
                bounds: BoundingBox::new(Vec3i::new(2, 10, 3), Vec3i::new(8, 16, 9)).unwrap(),
                entrance: Vec3i::new(2, 11, 6),
                role: "house".into(),
                materials: vec![blocks::STONE, blocks::PLANKS, blocks::COBBLESTONE],
            }],
            roads: vec![RoadPlan {
                cells: vec![Vec3i::new(0, 10, 6), Vec3i::new(1, 10, 6)],
                bridge: vec![false, false],
            }],
            yards: vec![Yard { rect: Rect2::new(0, 0, 12, 12), parent_site: 0 }],
            unconnected: vec![],
            spawn: Vec3i::new(5, 11, 5),
        }
    }

    #[test]
    fn json_uses_position_triples() {
        let m = sample();
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["spawn"], serde_json::json!([5, 11, 5]));
        assert_eq!(json["buildings"][0]["bounds"]["min"], serde_json::json!([2, 10, 3]));
        assert_eq!(json["buildings"][0]["entrance"], serde_json::json!([2, 11, 6]));
        assert_eq!(json["roads"][0]["cells"][0], serde_json::json!([0, 10, 6]));
        assert_eq!(json["roads"][0]["bridge"], serde_json::json!([false, false]));
    }

    #[test]
    fn json_round_trips() {
        let m = sample();
        let text = serde_json::to_string(&m).unwrap();
        let back: SettlementManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn footprint_covers_all_geometry() {
        let m = sample();
        let fp = m.footprint();
        assert_eq!(fp, Rect2::new(0, 0, 12, 12));
    }
}
