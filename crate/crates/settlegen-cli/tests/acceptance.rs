//! Acceptance suite: every release criterion as one test, each printing
//! a single PASS line (run with `--nocapture` to see them). Tolerances
//! are pinned in the assertions, not configurable.

use std::collections::HashMap;
use std::time::Instant;

use settlegen::adaptive::{adaptive_generate, astar, AdaptiveConfig, CostGrid};
use settlegen::baseline::flatten_generate;
use settlegen::blocks;
use settlegen::casg::{bsp_partition, ca_step, ceiling_level, WallCell, WallGrid};
use settlegen::eval::{
    self, accessibility_score, entrance_grade_fraction, evaluate, light_field, road_grade_score,
    scorecard, terrain_impact_score, AdaptabilityWeights, AestheticsWeights, FunctionalityWeights,
    Metrics, NarrativeWeights, Report, ScoreWeights,
};
use settlegen::nbt::{load_schematic, parse_nbt, save_schematic, write_nbt, NamedRoot, NbtList, Tag, TagKind};
use settlegen::rng::SplitMix64;
use settlegen::terrain::{synth_terrain, TerrainParams};
use settlegen::voxel::{BlockState, Rect2, Vec3i, VoxelWorld};

fn competition_terrain(seed: u64) -> VoxelWorld {
    let params = TerrainParams {
        base_height: 40,
        amplitude: 14.0,
        roughness: 0.55,
        octaves: 4,
        lattice: 24,
        water_level: 36,
        world_height: 128,
    };
    synth_terrain(seed, 256, 256, &params).unwrap()
}

fn medium_terrain(seed: u64, roughness: f64) -> VoxelWorld {
    let params = TerrainParams {
        base_height: 40,
        amplitude: 14.0,
        roughness,
        octaves: 4,
        lattice: 24,
        water_level: 36,
        world_height: 96,
    };
    synth_terrain(seed, 96, 96, &params).unwrap()
}

/// Criterion 1: the full pipeline (load, generate, save) on a seeded
/// 256x256x128 map finishes inside the 600 s budget; 60 s is the desk
/// target.
#[test]
fn acceptance_1_runtime_budget() {
    let dir = tempfile::tempdir().unwrap();
    let world = competition_terrain(0xC0FFEE);
    let input = dir.path().join("in.schematic");
    std::fs::write(&input, save_schematic(&world).unwrap()).unwrap();
    let output = dir.path().join("out.schematic");

    let started = Instant::now();
    let got = std::process::Command::new(env!("CARGO_BIN_EXE_settlegen"))
        .args([
            "generate",
            "--input",
            input.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
            "--generator",
            "adaptive",
            "--seed",
            "42",
            "--time-limit",
            "600",
        ])
        .output()
        .unwrap();
    let end_to_end = started.elapsed().as_secs_f64();
    assert_eq!(got.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&got.stderr));

    let record: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&got.stdout).trim()).unwrap();
    let generate_seconds = record["wall_clock_seconds"].as_f64().unwrap();
    assert!(
        end_to_end < 600.0,
        "end-to-end took {end_to_end:.1}s, budget is 600s"
    );
    // Output must reload.
    load_schematic(&std::fs::read(&output).unwrap()).unwrap();
    println!(
        "acceptance 1 (runtime budget): PASS - end-to-end {end_to_end:.2}s, generate {generate_seconds:.2}s, budget 600s, desk target 60s {}",
        if end_to_end < 60.0 { "met" } else { "missed" }
    );
}

/// Criterion 2: the evaluation protocol over 3 unseen seeded maps:
/// exactly four categories, each in [0, 10], grand total equal to the
/// sum across maps.
#[test]
fn acceptance_2_protocol_conformance() {
    let started = Instant::now();
    let mut maps = Vec::new();
    for (i, seed) in [9001u64, 9002, 9003].iter().enumerate() {
        let before = medium_terrain(*seed, 0.45);
        let cfg = AdaptiveConfig { seed: *seed, ..AdaptiveConfig::default() };
        let (edits, manifest) = adaptive_generate(&before, before.bounds(), &cfg).unwrap();
        let mut after = before.clone();
        after.apply_edit_set(&edits).unwrap();
        let report = evaluate(
            &format!("map-{}", i + 1),
            &before,
            &after,
            &manifest,
            &ScoreWeights::default(),
        )
        .unwrap();
        maps.push(report);
    }
    let report = Report::assemble(maps, started.elapsed().as_secs_f64());
    let json: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();

    assert_eq!(json["maps"].as_array().unwrap().len(), 3);
    let mut sum = 0.0;
    for map in json["maps"].as_array().unwrap() {
        let categories = map["categories"].as_object().unwrap();
        assert_eq!(categories.len(), 4, "exactly four categories");
        for name in ["adaptability", "functionality", "narrative", "aesthetics"] {
            let v = categories[name].as_f64().unwrap();
            assert!((0.0..=10.0).contains(&v), "{name} = {v} outside [0, 10]");
        }
        sum += map["total"].as_f64().unwrap();
    }
    let grand = json["grand_total"].as_f64().unwrap();
    assert_eq!(grand, sum, "grand total must equal the sum across maps");
    println!(
        "acceptance 2 (protocol conformance): PASS - 3 maps, 4 categories each, grand total {grand:.2}"
    );
}

/// Criterion 3: generator fidelity. BSP tiling exactness on 1,000
/// random rectangles, floor-of-mean ceilings on 1,000 random draws, and
/// the wall automaton against a brute-force oracle on all 512 3x3
/// configurations.
#[test]
fn acceptance_3_casg_fidelity() {
    let mut rng = SplitMix64::new(333);
    for case in 0..1000 {
        let w = 9 + rng.next_below(88) as i32;
        let d = 9 + rng.next_below(88) as i32;
        let rect = Rect2::new(0, 0, w - 1, d - 1);
        let yards = bsp_partition(rect, 9, rng.next_u64());
        let area: i64 = yards.iter().map(|y| y.rect.area()).sum();
        assert_eq!(area, rect.area(), "case {case}: area sum");
        let mut covered = vec![false; (w * d) as usize];
        for yard in &yards {
            for (x, z) in yard.rect.cells() {
                let idx = (z * w + x) as usize;
                assert!(!covered[idx], "case {case}: overlap at ({x}, {z})");
                covered[idx] = true;
            }
        }
    }

    for case in 0..1000 {
        let tops: [i32; 4] = std::array::from_fn(|_| 40 + rng.next_range_i32(-20, 20));
        let want = ((tops.iter().map(|&t| t as f64).sum::<f64>()) / 4.0).floor() as i32;
        assert_eq!(ceiling_level(tops), want, "case {case}: {tops:?}");
    }

    // All 2^9 configurations of a 3x3 grid against an independent
    // neighborhood count.
    for bits in 0u32..512 {
        let cells: Vec<WallCell> = (0..9)
            .map(|i| if bits >> i & 1 == 1 { WallCell::Glass } else { WallCell::Stone })
            .collect();
        let grid = WallGrid::from_cells(3, 3, cells.clone());
        let got = ca_step(&grid);
        for y in 0..3i32 {
            for x in 0..3i32 {
                let mut glass = 0;
                for dy in -1..=1i32 {
                    for dx in -1..=1i32 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if (0..3).contains(&nx) && (0..3).contains(&ny) {
                            let bit = (ny * 3 + nx) as usize;
                            if cells[bit] == WallCell::Glass {
                                glass += 1;
                            }
                        }
                    }
                }
                let want = if glass >= 5 {
                    WallCell::Glass
                } else if glass <= 3 {
                    WallCell::Stone
                } else {
                    cells[(y * 3 + x) as usize]
                };
                assert_eq!(
                    got.get(x as usize, y as usize),
                    want,
                    "config {bits}: cell ({x}, {y}), {glass} glass neighbors"
                );
            }
        }
    }
    println!("acceptance 3 (generator fidelity): PASS - 1000 partitions tiled, 1000 ceilings exact, 512 automaton configs exact");
}

fn arbitrary_tag(rng: &mut SplitMix64, depth: u32) -> Tag {
    let choices = if depth == 0 { 10 } else { 13 };
    match rng.next_below(choices) {
        0 => Tag::Byte(rng.next_u64() as i8),
        1 => Tag::Short(rng.next_u64() as i16),
        2 => Tag::Int(rng.next_u64() as i32),
        3 => Tag::Long(rng.next_u64() as i64),
        4 => Tag::Float((rng.next_range_i32(-4000, 4000) as f32) * 0.5),
        5 => Tag::Double((rng.next_range_i32(-4000, 4000) as f64) * 0.25),
        6 => Tag::ByteArray((0..rng.next_below(24)).map(|_| rng.next_u64() as u8).collect()),
        7 => {
            let len = rng.next_below(16) as usize;
            let s: String =
                (0..len).map(|_| (b'a' + rng.next_below(26) as u8) as char).collect();
            Tag::String(s)
        }
        8 => Tag::IntArray((0..rng.next_below(12)).map(|_| rng.next_u64() as i32).collect()),
        9 => Tag::LongArray((0..rng.next_below(12)).map(|_| rng.next_u64() as i64).collect()),
        10 => {
            let n = rng.next_below(5) as usize;
            Tag::List(NbtList {
                elem: TagKind::Int,
                items: (0..n).map(|_| Tag::Int(rng.next_u64() as i32)).collect(),
            })
        }
        11 => {
            let n = rng.next_below(4) as usize;
            Tag::List(NbtList {
                elem: TagKind::Compound,
                items: (0..n)
                    .map(|_| {
                        Tag::Compound(
                            [("v".to_string(), arbitrary_tag(rng, depth - 1))]
                                .into_iter()
                                .collect(),
                        )
                    })
                    .collect(),
            })
        }
        _ => {
            let n = rng.next_below(5) as usize;
            Tag::Compound(
                (0..n)
                    .map(|i| (format!("k{i}"), arbitrary_tag(rng, depth - 1)))
                    .collect(),
            )
        }
    }
}

/// Criterion 4: the parser suite. Write/parse identity on 10,000
/// generated trees, schematic identity at 256x128x256, and 10,000
/// corrupted inputs producing typed errors only, in under 60 s.
#[test]
fn acceptance_4_parser_suite() {
    let mut rng = SplitMix64::new(444);
    for case in 0..10_000u32 {
        let n = rng.next_below(5) as usize;
        let root = NamedRoot {
            name: format!("r{}", case % 7),
            tag: Tag::Compound(
                (0..n).map(|i| (format!("k{i}"), arbitrary_tag(&mut rng, 3))).collect(),
            ),
        };
        let compress = case % 5 == 0;
        let bytes = write_nbt(&root, compress).unwrap();
        let back = parse_nbt(&bytes).unwrap();
        assert_eq!(back, root, "case {case}");
    }

    // Competition-scale schematic identity.
    let mut world = VoxelWorld::air(256, 128, 256, Vec3i::new(0, 0, 0)).unwrap();
    let ids = [blocks::AIR, blocks::STONE, blocks::GRASS, blocks::DIRT, blocks::WATER, blocks::SAND];
    for z in 0..256 {
        for x in 0..256 {
            let h = 30 + ((x * 7 + z * 13) % 40);
            for y in 0..h {
                let id = ids[(x + y + z) as usize % ids.len()];
                world
                    .set_block(Vec3i::new(x, y, z), BlockState::new(id, ((x + z) % 16) as u8))
                    .unwrap();
            }
        }
    }
    let bytes = save_schematic(&world).unwrap();
    let back = load_schematic(&bytes).unwrap();
    assert_eq!(back, world, "256x128x256 schematic identity");

    // Corruption fuzzing: typed errors only, never a crash, under 60 s.
    let fuzz_started = Instant::now();
    let seed_raw = write_nbt(
        &NamedRoot {
            name: "seed".into(),
            tag: Tag::Compound(
                (0..4).map(|i| (format!("k{i}"), arbitrary_tag(&mut rng, 3))).collect(),
            ),
        },
        false,
    )
    .unwrap();
    let seed_gz = {
        let small = VoxelWorld::air(4, 4, 4, Vec3i::new(0, 0, 0)).unwrap();
        save_schematic(&small).unwrap()
    };
    let mut errors = 0u32;
    let mut parses = 0u32;
    for case in 0..10_000u32 {
        let base = if case % 2 == 0 { &seed_raw } else { &seed_gz };
        let mut bytes = base.clone();
        match rng.next_below(4) {
            0 => {
                // Byte flips.
                for _ in 0..=rng.next_below(8) {
                    let i = rng.next_below(bytes.len() as u64) as usize;
                    bytes[i] ^= rng.next_u64() as u8;
                }
            }
            1 => {
                // Truncation.
                let keep = rng.next_below(bytes.len() as u64) as usize;
                bytes.truncate(keep);
            }
            2 => {
                // Splice garbage into the middle.
                let at = rng.next_below(bytes.len() as u64 + 1) as usize;
                let junk: Vec<u8> =
                    (0..rng.next_below(16)).map(|_| rng.next_u64() as u8).collect();
                bytes.splice(at..at, junk);
            }
            _ => {
                // Pure noise.
                bytes = (0..rng.next_below(256)).map(|_| rng.next_u64() as u8).collect();
            }
        }
        match parse_nbt(&bytes) {
            Ok(_) => parses += 1,
            Err(e) => {
                let _ = e.to_string();
                errors += 1;
            }
        }
    }
    let fuzz_seconds = fuzz_started.elapsed().as_secs_f64();
    assert_eq!(parses + errors, 10_000);
    assert!(fuzz_seconds < 60.0, "fuzzing took {fuzz_seconds:.1}s, budget 60s");
    println!(
        "acceptance 4 (parser suite): PASS - 10000 trees round-tripped, 256x128x256 identity, 10000 corrupt inputs ({errors} typed errors, {parses} clean parses) in {fuzz_seconds:.1}s"
    );
}

/// Criterion 5: route costs equal a Dijkstra reference on 500 random
/// 32x32 grids, including unreachable pairs, with exact cost equality.
#[test]
fn acceptance_5_search_oracle() {
    fn dijkstra(grid: &CostGrid, start: (i32, i32), goal: (i32, i32)) -> Option<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        #[derive(PartialEq)]
        struct E(f64, (i32, i32));
        impl Eq for E {}
        impl Ord for E {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
            }
        }
        impl PartialOrd for E {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        let mut dist: HashMap<(i32, i32), f64> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(start, 0.0);
        heap.push(Reverse(E(0.0, start)));
        while let Some(Reverse(E(d, cell))) = heap.pop() {
            if d > dist.get(&cell).copied().unwrap_or(f64::INFINITY) {
                continue;
            }
            if cell == goal {
                return Some(d);
            }
            for (dx, dz) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let n = (cell.0 + dx, cell.1 + dz);
                if !grid.contains(n.0, n.1) {
                    continue;
                }
                let c = grid.cost(n.0, n.1);
                if !c.is_finite() {
                    continue;
                }
                let nd = d + c;
                if nd < dist.get(&n).copied().unwrap_or(f64::INFINITY) {
                    dist.insert(n, nd);
                    heap.push(Reverse(E(nd, n)));
                }
            }
        }
        None
    }

    let mut rng = SplitMix64::new(555);
    let mut unreachable = 0u32;
    for case in 0..500 {
        let mut grid = CostGrid::new(0, 0, 32, 32, 1.0);
        let wall_p = 0.1 + 0.3 * rng.next_f64();
        for z in 0..32 {
            for x in 0..32 {
                let cost = if rng.chance(wall_p) {
                    f64::INFINITY
                } else {
                    (1 + rng.next_below(9)) as f64
                };
                grid.set_cost(x, z, cost);
            }
        }
        let start = (rng.next_range_i32(0, 31), rng.next_range_i32(0, 31));
        let goal = (rng.next_range_i32(0, 31), rng.next_range_i32(0, 31));
        let got = astar(&grid, start, goal);
        let want = dijkstra(&grid, start, goal);
        match (&got, &want) {
            (None, None) => unreachable += 1,
            (Some(p), Some(c)) => {
                assert_eq!(p.cost, *c, "case {case}: cost mismatch");
                // The reported path must really cost what it claims.
                let mut walked = 0.0;
                for cell in p.cells.iter().skip(1) {
                    walked += grid.cost(cell.0, cell.1);
                }
                assert_eq!(walked, p.cost, "case {case}: path sums to its cost");
            }
            _ => panic!("case {case}: reachability disagreement: {got:?} vs {want:?}"),
        }
    }
    println!(
        "acceptance 5 (search oracle): PASS - 500 grids, exact cost equality, {unreachable} unreachable cases included"
    );
}

/// Criterion 6: the two figure anti-goals as hard invariants over 100
/// random terrains from flat to mountainous: entrance-at-grade fraction
/// and road grade exactly 1.0, accessibility mean >= 0.95 and min >=
/// 0.90.
#[test]
fn acceptance_6_anti_goal_invariants() {
    let mut access_scores = Vec::new();
    for i in 0..100u64 {
        let roughness = i as f64 / 99.0;
        let before = medium_terrain(7000 + i, roughness);
        let cfg = AdaptiveConfig { seed: 7000 + i, ..AdaptiveConfig::default() };
        let (edits, manifest) =
            adaptive_generate(&before, before.bounds(), &cfg).unwrap_or_else(|e| {
                panic!("terrain {i} (roughness {roughness:.2}): generation failed: {e}")
            });
        let mut after = before.clone();
        after.apply_edit_set(&edits).unwrap();

        let entrance = entrance_grade_fraction(&after, &manifest);
        assert_eq!(entrance, 1.0, "terrain {i}: entrance-at-grade must be exact");
        let grade = road_grade_score(&manifest);
        assert_eq!(grade, 1.0, "terrain {i}: road grade must be exact");
        let access = accessibility_score(&after, &manifest);
        assert!(
            access.score >= 0.90,
            "terrain {i}: accessibility {} below the 0.90 floor",
            access.score
        );
        access_scores.push(access.score);
    }
    let mean = access_scores.iter().sum::<f64>() / access_scores.len() as f64;
    let min = access_scores.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(mean >= 0.95, "mean accessibility {mean} below 0.95");
    assert!(min >= 0.90, "min accessibility {min} below 0.90");
    println!(
        "acceptance 6 (anti-goal invariants): PASS - 100 terrains, entrance-at-grade 1.0, road grade 1.0, accessibility mean {mean:.3} min {min:.3}"
    );
}

/// Criterion 7: the adaptive generator disturbs the terrain strictly
/// less than the flattening baseline on at least 9 of 10 paired
/// terrains.
#[test]
fn acceptance_7_comparative_adaptivity() {
    let mut wins = 0u32;
    let mut rows = Vec::new();
    for i in 0..10u64 {
        let roughness = 0.25 + 0.07 * i as f64;
        let before = medium_terrain(8800 + i, roughness);
        let cfg = AdaptiveConfig { seed: 8800 + i, ..AdaptiveConfig::default() };
        let (edits_a, manifest_a) = adaptive_generate(&before, before.bounds(), &cfg).unwrap();
        let mut after_a = before.clone();
        after_a.apply_edit_set(&edits_a).unwrap();
        let impact_a = terrain_impact_score(&before, &after_a, &manifest_a).unwrap();

        let (edits_b, manifest_b) =
            flatten_generate(&before, before.bounds(), cfg.building_count).unwrap();
        let mut after_b = before.clone();
        after_b.apply_edit_set(&edits_b).unwrap();
        let impact_b = terrain_impact_score(&before, &after_b, &manifest_b).unwrap();

        if impact_a > impact_b {
            wins += 1;
        }
        rows.push(format!("{impact_a:.3}>{impact_b:.3}"));
    }
    assert!(wins >= 9, "adaptive won only {wins}/10 impact comparisons: {rows:?}");
    println!(
        "acceptance 7 (comparative adaptivity): PASS - adaptive beat the flattening baseline on {wins}/10 terrains"
    );
}

/// Criterion 8: a fixed seed produces byte-identical schematics across
/// three runs and across thread-count settings.
#[test]
fn acceptance_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let world = medium_terrain(1212, 0.5);
    let input = dir.path().join("in.schematic");
    std::fs::write(&input, save_schematic(&world).unwrap()).unwrap();

    let mut outputs: Vec<Vec<u8>> = Vec::new();
    for (run, threads) in [(0, "1"), (1, "4"), (2, "16")] {
        let output = dir.path().join(format!("out{run}.schematic"));
        let manifest = dir.path().join(format!("m{run}.json"));
        let got = std::process::Command::new(env!("CARGO_BIN_EXE_settlegen"))
            .args([
                "generate",
                "--input",
                input.to_str().unwrap(),
                "--output",
                output.to_str().unwrap(),
                "--generator",
                "adaptive",
                "--seed",
                "606",
                "--manifest",
                manifest.to_str().unwrap(),
            ])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(got.status.code(), Some(0));
        outputs.push(std::fs::read(&output).unwrap());
    }
    let hash = |bytes: &[u8]| -> u64 {
        // FNV-1a, good enough to print a fingerprint.
        bytes.iter().fold(0xcbf29ce484222325u64, |h, &b| {
            (h ^ b as u64).wrapping_mul(0x100000001b3)
        })
    };
    let h0 = hash(&outputs[0]);
    for (i, out) in outputs.iter().enumerate() {
        assert_eq!(out, &outputs[0], "run {i} diverged");
        assert_eq!(hash(out), h0);
    }
    // Manifests agree too.
    let m0 = std::fs::read(dir.path().join("m0.json")).unwrap();
    for run in 1..3 {
        assert_eq!(std::fs::read(dir.path().join(format!("m{run}.json"))).unwrap(), m0);
    }
    println!(
        "acceptance 8 (determinism): PASS - 3 runs across thread settings, schematic hash {h0:016x}"
    );
}

fn oracle_passable(id: u8) -> bool {
    id == 0 || id == 50 || id == 64
}

fn oracle_standing(world: &VoxelWorld, x: i32, y: i32, z: i32) -> bool {
    let Ok(feet) = world.block_at(Vec3i::new(x, y, z)) else { return false };
    if !oracle_passable(feet.id) {
        return false;
    }
    if let Ok(head) = world.block_at(Vec3i::new(x, y + 1, z)) {
        if !oracle_passable(head.id) {
            return false;
        }
    }
    match world.block_at(Vec3i::new(x, y - 1, z)) {
        Ok(below) => {
            below.id != 0
                && !oracle_passable(below.id)
                && !matches!(below.id, 8..=11)
        }
        Err(_) => false,
    }
}

/// Criterion 9: the simulation metrics against brute-force oracles on 50
/// random small worlds, and scorecard monotonicity over 10,000 random
/// metric/weight vectors.
#[test]
fn acceptance_9_evaluation_oracles() {
    let mut rng = SplitMix64::new(999);
    for case in 0..50u64 {
        // A random world no larger than 32^3 with torches and obstacles.
        let params = TerrainParams {
            base_height: 8,
            amplitude: 5.0,
            roughness: rng.next_f64(),
            octaves: 3,
            lattice: 9,
            water_level: 7,
            world_height: 32,
        };
        let mut world = synth_terrain(case, 28, 28, &params).unwrap();
        let bounds = world.bounds();
        for _ in 0..12 {
            let x = rng.next_range_i32(0, 27);
            let z = rng.next_range_i32(0, 27);
            for dy in 0..=rng.next_range_i32(0, 2) {
                let y = (10 + dy).min(bounds.max.y);
                world.set_block(Vec3i::new(x, y, z), BlockState::of(blocks::STONE)).unwrap();
            }
        }
        let mut torches = 0;
        while torches < 6 {
            let x = rng.next_range_i32(0, 27);
            let z = rng.next_range_i32(0, 27);
            let y = rng.next_range_i32(5, 16);
            let p = Vec3i::new(x, y, z);
            if world.block_at(p).unwrap().is_air() {
                world.set_block(p, BlockState::of(blocks::TORCH)).unwrap();
                torches += 1;
            }
        }

        // Light oracle: independent BFS per torch, cell-wise max.
        let lf = light_field(&world, bounds);
        let mut expect: HashMap<(i32, i32, i32), u8> = HashMap::new();
        for y in bounds.min.y..=bounds.max.y {
            for z in bounds.min.z..=bounds.max.z {
                for x in bounds.min.x..=bounds.max.x {
                    if world.block_at(Vec3i::new(x, y, z)).unwrap().id == blocks::TORCH {
                        let mut level: HashMap<(i32, i32, i32), u8> = HashMap::new();
                        let mut queue = std::collections::VecDeque::from([(x, y, z)]);
                        level.insert((x, y, z), 14);
                        while let Some((cx, cy, cz)) = queue.pop_front() {
                            let here = level[&(cx, cy, cz)];
                            if here <= 1 {
                                continue;
                            }
                            for (dx, dy, dz) in
                                [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)]
                            {
                                let n = Vec3i::new(cx + dx, cy + dy, cz + dz);
                                if !bounds.contains(n) {
                                    continue;
                                }
                                if !oracle_passable(world.block_at(n).unwrap().id) {
                                    continue;
                                }
                                let k = (n.x, n.y, n.z);
                                if level.get(&k).copied().unwrap_or(0) < here - 1 {
                                    level.insert(k, here - 1);
                                    queue.push_back(k);
                                }
                            }
                        }
                        for (k, v) in level {
                            let e = expect.entry(k).or_insert(0);
                            *e = (*e).max(v);
                        }
                    }
                }
            }
        }
        for y in bounds.min.y..=bounds.max.y {
            for z in bounds.min.z..=bounds.max.z {
                for x in bounds.min.x..=bounds.max.x {
                    let got = lf.level(Vec3i::new(x, y, z));
                    let want = expect.get(&(x, y, z)).copied().unwrap_or(0);
                    assert_eq!(got, want, "case {case}: light mismatch at ({x}, {y}, {z})");
                }
            }
        }

        // Walkability oracle: fixed-point expansion with its own
        // standing rule.
        let spawn_col = (14, 14);
        let spawn_y = (bounds.min.y..=bounds.max.y)
            .rev()
            .find(|&y| oracle_standing(&world, spawn_col.0, y, spawn_col.1));
        if let Some(sy) = spawn_y {
            let spawn = Vec3i::new(spawn_col.0, sy, spawn_col.1);
            let walk = eval::walk_bfs(&world, spawn);
            let mut reach: std::collections::HashSet<(i32, i32, i32)> = Default::default();
            reach.insert((spawn.x, spawn.y, spawn.z));
            loop {
                let mut grew = false;
                for (x, y, z) in reach.iter().copied().collect::<Vec<_>>() {
                    for (dx, dz) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                        for dy in -1..=1 {
                            let n = (x + dx, y + dy, z + dz);
                            if !reach.contains(&n) && oracle_standing(&world, n.0, n.1, n.2) {
                                reach.insert(n);
                                grew = true;
                            }
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            assert_eq!(walk.len(), reach.len(), "case {case}: reachable set size");
            for &(x, y, z) in &reach {
                assert!(walk.reaches(Vec3i::new(x, y, z)), "case {case}: missing ({x},{y},{z})");
            }
        }
    }

    // Scorecard monotonicity across random metric and weight vectors.
    let mut checked = 0u32;
    for case in 0..10_000u32 {
        let m: [f64; 10] = std::array::from_fn(|_| rng.next_f64());
        let mk = |v: [f64; 10]| Metrics {
            terrain_impact: v[0],
            entrance_at_grade: v[1],
            material_localness: v[2],
            accessibility: v[3],
            spawn_safety: v[4],
            road_grade: v[5],
            role_variety: v[6],
            diversity: v[7],
            diversity_in_band: v[8],
            completeness: v[9],
        };
        let weights = ScoreWeights {
            adaptability: AdaptabilityWeights {
                terrain_impact: rng.next_f64(),
                entrance_at_grade: rng.next_f64(),
                material_localness: rng.next_f64(),
            },
            functionality: FunctionalityWeights {
                accessibility: rng.next_f64(),
                spawn_safety: rng.next_f64(),
                road_grade: rng.next_f64(),
            },
            narrative: NarrativeWeights { role_variety: rng.next_f64() },
            aesthetics: AestheticsWeights {
                diversity_in_band: rng.next_f64(),
                completeness: rng.next_f64(),
            },
        };
        let before = scorecard(&mk(m), &weights).unwrap();
        let mut raised = m;
        let idx = rng.next_below(10) as usize;
        raised[idx] = (raised[idx] + rng.next_f64()).min(1.0);
        let after = scorecard(&mk(raised), &weights).unwrap();
        assert!(after.adaptability >= before.adaptability - 1e-12, "case {case}");
        assert!(after.functionality >= before.functionality - 1e-12, "case {case}");
        assert!(after.narrative >= before.narrative - 1e-12, "case {case}");
        assert!(after.aesthetics >= before.aesthetics - 1e-12, "case {case}");
        for v in [after.adaptability, after.functionality, after.narrative, after.aesthetics] {
            assert!((0.0..=10.0).contains(&v), "case {case}: category out of range");
        }
        checked += 1;
    }
    println!(
        "acceptance 9 (evaluation oracles): PASS - 50 worlds light+walk exact, {checked} monotonicity vectors"
    );
}
