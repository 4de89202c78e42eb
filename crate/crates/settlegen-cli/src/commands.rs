//! Subcommand wiring and the competition run protocol: seeded,
//! time-budgeted generation with a machine-readable run record.
//!
//! Exit codes are part of the interface: 0 success, 2 unreadable or
//! mismatched input, 3 generation failure, 4 time budget exceeded.

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use settlegen::adaptive::{adaptive_generate, AdaptiveConfig};
use settlegen::casg::{casg_generate, CasgConfig};
use settlegen::eval::{evaluate, Report, ScoreWeights};
use settlegen::manifest::SettlementManifest;
use settlegen::nbt::{load_schematic, save_schematic};
use settlegen::voxel::{BoundingBox, EditSet, Vec3i, VoxelWorld};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;

#[derive(Parser)]
#[command(
    name = "settlegen",
    version,
    about = "Generate and evaluate settlements on voxel terrain maps",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a map: heights, water, materials, buildable sites.
    Analyze(AnalyzeArgs),
    /// Run a generator on a map under the competition protocol.
    Generate(GenerateArgs),
    /// Score a before/after map pair against a settlement manifest.
    Evaluate(EvaluateArgs),
    /// Render a top-down image of a map.
    Render(RenderArgs),
    /// Synthesize a seeded value-noise terrain map.
    Synth(SynthArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input map (.schematic).
    #[arg(long)]
    input: PathBuf,
    /// Selection box `x0,y0,z0,x1,y1,z1` (default: whole map).
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    r#box: Option<BoundingBox>,
    /// Smallest connected region reported as a site.
    #[arg(long, default_value_t = 25)]
    min_area: usize,
    /// Steepest slope a site cell may have.
    #[arg(long, default_value_t = 1)]
    max_slope: i32,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Generator {
    Casg,
    Adaptive,
}

#[derive(Args)]
struct GenerateArgs {
    /// Input map (.schematic).
    #[arg(long)]
    input: PathBuf,
    /// Output map (.schematic).
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    generator: Generator,
    /// Generation seed (falls back to $GDMC_SEED, then the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Selection box `x0,y0,z0,x1,y1,z1` (default: whole map).
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    r#box: Option<BoundingBox>,
    /// Generator config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the settlement manifest JSON here.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Wall-clock budget for the generation call, in seconds.
    #[arg(long, default_value_t = 600)]
    time_limit: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// The map before generation (.schematic).
    #[arg(long)]
    before: PathBuf,
    /// The map after generation (.schematic).
    #[arg(long)]
    after: PathBuf,
    /// Settlement manifest JSON produced by the generator.
    #[arg(long)]
    manifest: PathBuf,
    /// Where to write the report JSON.
    #[arg(long)]
    report: PathBuf,
    /// Optional category weight overrides (JSON).
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RenderMode {
    Top,
}

#[derive(Args)]
struct RenderArgs {
    /// Input map (.schematic).
    #[arg(long)]
    input: PathBuf,
    /// Output image (binary PPM).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "top")]
    mode: RenderMode,
}

#[derive(Args)]
struct SynthArgs {
    /// Output map (.schematic).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 128)]
    width: i32,
    #[arg(long, default_value_t = 128)]
    length: i32,
    /// 0 = flat, 1 = full amplitude.
    #[arg(long, default_value_t = 0.5)]
    roughness: f64,
    #[arg(long, default_value_t = 40)]
    base_height: i32,
    #[arg(long, default_value_t = 14.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 4)]
    octaves: u32,
    #[arg(long, default_value_t = 24)]
    lattice: i32,
    #[arg(long, default_value_t = 36)]
    water_level: i32,
    /// World height (y dimension).
    #[arg(long, default_value_t = 96)]
    height: i32,
}

/// One generation run, as printed to stdout.
#[derive(Serialize)]
struct RunRecord {
    generator: String,
    seed: u64,
    r#box: [i32; 6],
    /// Wall-clock seconds around the generate call only; I/O excluded.
    wall_clock_seconds: f64,
    edit_count: usize,
    manifest_path: Option<String>,
    exit_status: i32,
}

fn parse_box(s: &str) -> Result<BoundingBox, String> {
    let parts: Vec<i32> = s
        .split(',')
        .map(|p| p.trim().parse::<i32>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("box components must be integers: {e}"))?;
    if parts.len() != 6 {
        return Err(format!("expected 6 comma-separated values, got {}", parts.len()));
    }
    BoundingBox::new(
        Vec3i::new(parts[0], parts[1], parts[2]),
        Vec3i::new(parts[3], parts[4], parts[5]),
    )
    .map_err(|e| e.to_string())
}

fn load_world(path: &Path) -> Result<VoxelWorld, String> {
    let bytes =
        std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    load_schematic(&bytes).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Render(args) => cmd_render(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn cmd_synth(args: SynthArgs) -> i32 {
    let params = settlegen::terrain::TerrainParams {
        base_height: args.base_height,
        amplitude: args.amplitude,
        roughness: args.roughness,
        octaves: args.octaves,
        lattice: args.lattice,
        water_level: args.water_level,
        world_height: args.height,
    };
    let world = match settlegen::terrain::synth_terrain(args.seed, args.width, args.length, &params)
    {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let bytes = match save_schematic(&world) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = std::fs::write(&args.out, bytes) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_INPUT;
    }
    EXIT_OK
}

fn cmd_analyze(args: AnalyzeArgs) -> i32 {
    let world = match load_world(&args.input) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let bx = args.r#box.unwrap_or_else(|| world.bounds());
    let summary = match settlegen::terrain::analyze(&world, bx, args.min_area, args.max_slope) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    match args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => println!("{json}"),
    }
    EXIT_OK
}

fn cmd_generate(args: GenerateArgs) -> i32 {
    let world = match load_world(&args.input) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let bx = args.r#box.unwrap_or_else(|| world.bounds());
    let env_seed = std::env::var("GDMC_SEED").ok().and_then(|s| s.parse::<u64>().ok());

    // Resolve configs up front so bad input fails before the clock runs.
    enum Job {
        Casg(CasgConfig),
        Adaptive(AdaptiveConfig),
    }
    let job = match args.generator {
        Generator::Casg => {
            let mut cfg: CasgConfig = match &args.config {
                Some(p) => match read_json(p) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                },
                None => CasgConfig::default(),
            };
            if let Some(seed) = args.seed.or(env_seed) {
                cfg.seed = seed;
            }
            Job::Casg(cfg)
        }
        Generator::Adaptive => {
            let mut cfg: AdaptiveConfig = match &args.config {
                Some(p) => match read_json(p) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                },
                None => AdaptiveConfig::default(),
            };
            if let Some(seed) = args.seed.or(env_seed) {
                cfg.seed = seed;
            }
            Job::Adaptive(cfg)
        }
    };
    let (generator_name, seed) = match &job {
        Job::Casg(c) => ("casg", c.seed),
        Job::Adaptive(c) => ("adaptive", c.seed),
    };

    // The budget is enforced here, outside the generator: the worker is
    // abandoned on timeout and no output is written.
    type GenResult = Result<(EditSet, SettlementManifest), String>;
    let (tx, rx) = mpsc::channel::<(GenResult, f64)>();
    let worker_world = world.clone();
    std::thread::spawn(move || {
        let started = Instant::now();
        let result: GenResult = match job {
            Job::Casg(cfg) => casg_generate(&worker_world, bx, &cfg).map_err(|e| e.to_string()),
            Job::Adaptive(cfg) => {
                adaptive_generate(&worker_world, bx, &cfg).map_err(|e| e.to_string())
            }
        };
        let elapsed = started.elapsed().as_secs_f64();
        let _ = tx.send((result, elapsed));
    });

    let received = if args.time_limit == 0 {
        None
    } else {
        rx.recv_timeout(Duration::from_secs(args.time_limit)).ok()
    };
    let (result, wall_clock_seconds) = match received {
        Some(r) => r,
        None => {
            eprintln!("error: generation exceeded the {}s time limit", args.time_limit);
            return EXIT_TIMEOUT;
        }
    };
    let (edits, manifest) = match result {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_GENERATION;
        }
    };

    let mut out_world = world;
    if let Err(e) = out_world.apply_edit_set(&edits) {
        eprintln!("error: {e}");
        return EXIT_GENERATION;
    }
    let bytes = match save_schematic(&out_world) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_GENERATION;
        }
    };
    if let Err(e) = std::fs::write(&args.output, bytes) {
        eprintln!("error: cannot write {}: {e}", args.output.display());
        return EXIT_INPUT;
    }
    if let Some(path) = &args.manifest {
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        if let Err(e) = std::fs::write(path, json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    let record = RunRecord {
        generator: generator_name.to_string(),
        seed,
        r#box: [bx.min.x, bx.min.y, bx.min.z, bx.max.x, bx.max.y, bx.max.z],
        wall_clock_seconds,
        edit_count: edits.len(),
        manifest_path: args.manifest.as_ref().map(|p| p.display().to_string()),
        exit_status: EXIT_OK,
    };
    println!("{}", serde_json::to_string(&record).expect("record serializes"));
    EXIT_OK
}

fn cmd_evaluate(args: EvaluateArgs) -> i32 {
    let started = Instant::now();
    let before = match load_world(&args.before) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let after = match load_world(&args.after) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let manifest: SettlementManifest = match read_json(&args.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let weights: ScoreWeights = match &args.weights {
        Some(p) => match read_json(p) {
            Ok(w) => w,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        },
        None => ScoreWeights::default(),
    };
    let name = args
        .after
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "map".into());
    let map_report = match evaluate(&name, &before, &after, &manifest, &weights) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = Report::assemble(vec![map_report], started.elapsed().as_secs_f64());
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = std::fs::write(&args.report, json) {
        eprintln!("error: cannot write {}: {e}", args.report.display());
        return EXIT_INPUT;
    }
    EXIT_OK
}

fn cmd_render(args: RenderArgs) -> i32 {
    let world = match load_world(&args.input) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let RenderMode::Top = args.mode;
    let image = match crate::render::render_top(&world) {
        Ok(img) => img,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = std::fs::write(&args.out, image) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_INPUT;
    }
    EXIT_OK
}
