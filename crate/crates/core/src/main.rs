use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chrono::DateTime;
use clap::{Parser, Subcommand};

use floodvibe::io::{read_mask, read_raster, write_mask, write_raster, write_water_map};
use floodvibe::manifest::{load_manifest_unchecked, parse_manifest, run_manifest_with, FrameRef};
use floodvibe::evaluation::{format_report, json_report};
use floodvibe::{
    confusion_counts, generate_sequence, segment_water, summary_metrics, validate_sequence, DetectorParams, Error,
    FloodMask, Polarization, SarFrame, SceneSpec, SequenceManifest,
};

const THREADS_ENV: &str = "FLOODVIBE_THREADS";

#[derive(Parser)]
#[command(name = "floodvibe", version, about = "Flood mapping over SAR time series by temporal anomaly detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one raster into a water mask (water = 255).
    Segment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        kernel_size: usize,
        #[arg(long, default_value_t = 0.03)]
        threshold: f64,
        #[arg(long, default_value_t = 20)]
        min_components: usize,
        #[arg(long, default_value = "VV")]
        channel: Polarization,
    },
    /// Run the detector over a manifest, writing `<frame_id>.flood.pgm` per scored frame.
    Detect {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write all-zero masks for the warm-up frames.
        #[arg(long)]
        emit_warmup_zeros: bool,
        /// Overrides the manifest seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a synthetic sequence with truth masks and a ready manifest.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score predicted masks against truth masks with matching file names.
    Eval {
        #[arg(long)]
        pred_dir: PathBuf,
        #[arg(long)]
        truth_dir: PathBuf,
        /// First 1-based frame index (position in the sorted truth directory) to score.
        #[arg(long, default_value_t = 1)]
        score_from: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check a manifest and all of its frames.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
}

/// Process outcome with its exit code.
enum Failure {
    Validation(String),
    Io(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Io(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e.root() {
            Error::Io { .. } => Failure::Io(message),
            _ => Failure::Validation(message),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Validation(format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn segment(input: &Path, output: &Path, params: DetectorParams) -> Result<(), Failure> {
    let raster = read_raster(input)?;
    let id = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let frame = SarFrame::new(raster, DateTime::UNIX_EPOCH, id)?;
    let map = segment_water(&frame, &params)?;
    write_water_map(&map, output)?;
    println!("water_pixels={}", map.water_count());
    Ok(())
}

fn mask_path(dir: &Path, frame: &FrameRef) -> PathBuf {
    dir.join(format!("{}.flood.pgm", frame.id))
}

fn detect(manifest: &Path, out_dir: &Path, emit_warmup_zeros: bool, seed: Option<u64>) -> Result<(), Failure> {
    let mut manifest = parse_manifest(manifest)?;
    if let Some(seed) = seed {
        manifest.seed = seed;
    }
    std::fs::create_dir_all(out_dir).map_err(|e| io_failure(out_dir, e))?;
    let start = Instant::now();
    let mut written = 0usize;
    run_manifest_with(&manifest, |index, frame, mask| {
        match mask {
            Some(mask) => write_mask(mask, &mask_path(out_dir, frame))?,
            None if emit_warmup_zeros => {
                // Dimensions are only known once a frame has been read.
                let raster = read_raster(&frame.path)?;
                let empty = FloodMask::empty(raster.width(), raster.height(), index);
                write_mask(&empty, &mask_path(out_dir, frame))?;
            }
            None => return Ok(()),
        }
        written += 1;
        Ok(())
    })?;
    let secs = start.elapsed().as_secs_f64();
    eprintln!(
        "processed {} frames ({} masks written) in {secs:.2}s, {:.1} frames/s",
        manifest.frames.len(),
        written,
        manifest.frames.len() as f64 / secs.max(1e-9)
    );
    Ok(())
}

fn simulate(scene: &Path, out_dir: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(scene).map_err(|e| io_failure(scene, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let spec: SceneSpec = serde_path_to_error::deserialize(de)
        .map_err(|e| Failure::Validation(format!("scene schema error at {}: {}", e.path(), e.inner())))?;
    let params = DetectorParams::default();
    spec.check_against(&params)?;
    let (frames, truth) = generate_sequence::<f32>(&spec)?;

    let frames_dir = out_dir.join("frames");
    let truth_dir = out_dir.join("truth");
    let water_dir = out_dir.join("water");
    for dir in [&frames_dir, &truth_dir, &water_dir] {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    let mut refs = Vec::with_capacity(frames.len());
    for ((frame, flood), water) in frames.iter().zip(&truth.flood).zip(&truth.water) {
        let rel = PathBuf::from("frames").join(format!("{}.fr32", frame.frame_id()));
        write_raster(frame.raster(), &out_dir.join(&rel))?;
        write_mask(flood, &truth_dir.join(format!("{}.flood.pgm", frame.frame_id())))?;
        write_water_map(water, &water_dir.join(format!("{}.water.pgm", frame.frame_id())))?;
        refs.push(FrameRef {
            id: frame.frame_id().to_string(),
            path: rel,
            timestamp: frame.timestamp(),
        });
    }
    let manifest = SequenceManifest {
        frames: refs,
        params,
        seed: spec.seed,
    };
    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Internal(e.to_string()))?;
    std::fs::write(&manifest_path, json + "\n").map_err(|e| io_failure(&manifest_path, e))?;
    println!("wrote {} frames to {}", frames.len(), out_dir.display());
    Ok(())
}

/// `name -> path` for every `*.flood.pgm` in `dir`, sorted by name.
fn list_masks(dir: &Path) -> Result<BTreeMap<String, PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_failure(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| io_failure(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".flood.pgm") {
            out.insert(name, entry.path());
        }
    }
    Ok(out)
}

fn eval(pred_dir: &Path, truth_dir: &Path, score_from: usize, json: bool) -> Result<(), Failure> {
    let preds = list_masks(pred_dir)?;
    let truths = list_masks(truth_dir)?;
    if let Some(orphan) = preds.keys().find(|k| !truths.contains_key(*k)) {
        return Err(Failure::Validation(format!("prediction {orphan} has no matching truth mask")));
    }
    let mut pred_masks = Vec::new();
    let mut truth_masks = Vec::new();
    for (index, (name, truth_path)) in (1..).zip(&truths) {
        let Some(pred_path) = preds.get(name) else { continue };
        if index < score_from {
            continue;
        }
        pred_masks.push(read_mask(pred_path)?.with_frame_index(index));
        truth_masks.push(read_mask(truth_path)?.with_frame_index(index));
    }
    let counts = confusion_counts(&pred_masks, &truth_masks)?;
    let metrics = summary_metrics(&counts);
    if json {
        println!("{}", json_report(&counts, &metrics, pred_masks.len()));
    } else {
        print!("{}", format_report(&counts, &metrics, pred_masks.len()));
    }
    Ok(())
}

fn validate(manifest: &Path) -> Result<(), Failure> {
    let manifest = load_manifest_unchecked(manifest)?;
    let report = validate_sequence(&manifest);
    print!("{report}");
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{} violation(s)", report.violations.len())))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Segment {
            input,
            output,
            kernel_size,
            threshold,
            min_components,
            channel,
        } => {
            let params = DetectorParams {
                kernel_size,
                threshold,
                num_components: min_components,
                channel,
                ..Default::default()
            };
            segment(&input, &output, params)
        }
        Command::Detect {
            manifest,
            out_dir,
            emit_warmup_zeros,
            seed,
        } => detect(&manifest, &out_dir, emit_warmup_zeros, seed),
        Command::Simulate { scene, out_dir } => simulate(&scene, &out_dir),
        Command::Eval {
            pred_dir,
            truth_dir,
            score_from,
            json,
        } => eval(&pred_dir, &truth_dir, score_from, json),
        Command::Validate { manifest } => validate(&manifest),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli))
        .unwrap_or_else(|_| Err(Failure::Internal("internal invariant violated".into())));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
