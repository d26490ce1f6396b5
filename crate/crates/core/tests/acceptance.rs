//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use floodvibe::io::write_raster;
use floodvibe::manifest::FrameRef;
use floodvibe::synthetic::{FloodEvent, Region, SceneSpec};
use floodvibe::{
    boxcar_filter, generate_sequence, label_components, parse_manifest, remove_small_water_components, run_detector,
    segment_water, BinaryMap, Class, DetectorParams, Plane, Polarization, SarFrame, SequenceManifest,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn single_threaded<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

// 1. Permanent lake is not reported as flood.
fn permanent_water_suppression() -> Outcome {
    const MAX_FP_RATE: f64 = 0.001;
    const MAX_SECONDS: f64 = 5.0;
    let spec = lake_scene(1);
    let params = DetectorParams::default();
    let (frames, truth) = generate_sequence::<f32>(&spec).unwrap();
    let (run, elapsed) = single_threaded(|| timed(|| run_detector(&params, 7, frames).unwrap()));

    let lake: Vec<usize> = (0..256 * 256).filter(|&px| truth.water[0].as_slice()[px].is_water()).collect();
    // Pixels more than one window away from the shoreline.
    let interior: Vec<usize> = lake
        .iter()
        .copied()
        .filter(|&px| {
            let (r, c) = ((px / 256) as f64 - 80.0, (px % 256) as f64 - 80.0);
            (r * r + c * c).sqrt() < LAKE_RADIUS - params.kernel_size as f64
        })
        .collect();
    let rate = |pixels: &[usize], mask: &floodvibe::FloodMask| {
        pixels.iter().filter(|&&px| mask.as_slice()[px]).count() as f64 / pixels.len() as f64
    };
    let mut worst = (0.0, 0);
    let mut worst_interior = 0.0f64;
    for mask in &run.masks {
        assert!((31..=45).contains(&mask.frame_index()));
        let r = rate(&lake, mask);
        if r > worst.0 {
            worst = (r, mask.frame_index());
        }
        worst_interior = worst_interior.max(rate(&interior, mask));
    }
    Outcome {
        pass: run.masks.len() == 15 && worst.0 <= MAX_FP_RATE && elapsed.as_secs_f64() < MAX_SECONDS,
        detail: format!(
            "max lake FP rate {:.4}% (frame {}, limit {:.1}%), interior-only max {:.4}%, runtime {:.3}s (limit {MAX_SECONDS}s)",
            worst.0 * 100.0,
            worst.1,
            MAX_FP_RATE * 100.0,
            worst_interior * 100.0,
            elapsed.as_secs_f64()
        ),
    }
}

// 2. Flood rectangle recovered, then forgotten.
fn flood_recovery() -> Outcome {
    const MIN_IOU: f64 = 0.90;
    const MAX_POST_FLOOD: f64 = 0.005;
    let spec = flood_scene(1);
    let params = DetectorParams::default();
    let seed = 7;
    let (frames, truth) = generate_sequence::<f32>(&spec).unwrap();
    let segs: Vec<BinaryMap> = frames.iter().map(|f| segment_water(f, &params).unwrap()).collect();
    let run = run_detector(&params, seed, frames).unwrap();

    let mut min_iou = f64::INFINITY;
    let mut max_post = 0.0f64;
    for mask in &run.masks {
        let t = mask.frame_index();
        if (35..=40).contains(&t) {
            min_iou = min_iou.min(iou(mask.as_slice(), truth.flood[t - 1].as_slice()));
        }
        if (41..=45).contains(&t) {
            max_post = max_post.max(mask.flooded_count() as f64 / (256.0 * 256.0));
        }
    }

    // Post-flood behaviour must equal the scalar per-pixel replay exactly.
    let mut mismatches = 0;
    for px in 0..256 * 256 {
        let stream: Vec<bool> = segs.iter().map(|s| s.as_slice()[px].is_water()).collect();
        let expected = scalar_detector(&stream, params.n_init, params.samples, params.k_min, seed, px as u64);
        for (mask, &e) in run.masks.iter().zip(&expected) {
            mismatches += (mask.as_slice()[px] != e) as usize;
        }
    }
    Outcome {
        pass: min_iou >= MIN_IOU && max_post <= MAX_POST_FLOOD && mismatches == 0,
        detail: format!(
            "min IoU frames 35-40 {min_iou:.4} (limit {MIN_IOU}), max flagged frames 41-45 {:.4}% (limit {:.1}%), oracle mismatches {mismatches}",
            max_post * 100.0,
            MAX_POST_FLOOD * 100.0
        ),
    }
}

// 3. Grid detector equals scalar straight-line replay.
fn scalar_oracle_equivalence() -> Outcome {
    const SCENARIOS: usize = 1000;
    let (w, h) = (4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatched = 0;
    let mut streams = 0;
    let mut flagged = 0;
    for _ in 0..SCENARIOS {
        let samples = rng.gen_range(1..=6);
        let k_min = rng.gen_range(1..=samples);
        let n_init = rng.gen_range(1..=12);
        let n_frames = n_init + rng.gen_range(1..=25);
        let seed: u64 = rng.gen();
        let params = DetectorParams {
            samples,
            k_min,
            n_init,
            ..Default::default()
        };
        let warm_p: Vec<f64> = (0..w * h).map(|_| rng.gen()).collect();
        let later_p: Vec<f64> = (0..w * h).map(|_| rng.gen()).collect();
        let maps: Vec<BinaryMap> = (0..n_frames)
            .map(|t| {
                let values = (0..w * h)
                    .map(|px| {
                        let p = if t < n_init { warm_p[px] } else { later_p[px] };
                        if rng.gen_bool(p) { Class::Water } else { Class::Ground }
                    })
                    .collect();
                BinaryMap::new(w, h, values).unwrap()
            })
            .collect();
        let run = run_detector::<f32, _>(&params, seed, maps.clone()).unwrap();
        let mut bad = false;
        for px in 0..w * h {
            let stream: Vec<bool> = maps.iter().map(|m| m.as_slice()[px].is_water()).collect();
            let expected = scalar_detector(&stream, n_init, samples, k_min, seed, px as u64);
            let got: Vec<bool> = run.masks.iter().map(|m| m.as_slice()[px]).collect();
            flagged += got.iter().filter(|&&f| f).count();
            bad |= got != expected;
            streams += 1;
        }
        mismatched += bad as usize;
    }
    Outcome {
        pass: mismatched == 0 && flagged > 0,
        detail: format!("{SCENARIOS} scenarios ({streams} pixel streams, {flagged} flood flags), {mismatched} mismatching"),
    }
}

// 4. Labeling and pruning against BFS.
fn component_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut label_fail = 0;
    let mut prune_fail = 0;
    for i in 0..500 {
        let density = (i % 10) as f64 / 9.0;
        let values = (0..64 * 64)
            .map(|_| if rng.gen_bool(density) { Class::Water } else { Class::Ground })
            .collect();
        let map = BinaryMap::new(64, 64, values).unwrap();
        for target in [Class::Water, Class::Ground] {
            let fast = label_components(&map, target);
            if !same_partition(fast.labels(), &bfs_labels(&map, target)) {
                label_fail += 1;
            }
        }
        let min_size = rng.gen_range(1..=40);
        if remove_small_water_components(&map, min_size) != prune_oracle(&map, min_size) {
            prune_fail += 1;
        }
    }
    Outcome {
        pass: label_fail == 0 && prune_fail == 0,
        detail: format!("500 maps 64x64: {label_fail} labeling mismatches, {prune_fail} pruning mismatches"),
    }
}

// 5. Fast boxcar against the naive window mean.
fn boxcar_oracle() -> Outcome {
    const REL_TOL: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for _ in 0..100 {
        let w = rng.gen_range(1..=48);
        let h = rng.gen_range(1..=48);
        let plane32 = Plane::from_fn(w, h, |_, _| rng.gen_range(0.0f32..0.5));
        let plane64 = Plane::from_fn(w, h, |_, _| rng.gen_range(1e-4f64..10.0));
        for k in [1, 2, 3, 7, 8, 15] {
            let naive = naive_boxcar(&plane_to_f64(&plane32), w, h, k);
            let fast = boxcar_filter(&plane32, k).unwrap();
            for (a, b) in fast.as_slice().iter().zip(&naive) {
                let err = (*a as f64 - b).abs() / b.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(if *b == 0.0 { (*a as f64).abs() } else { err });
            }
            let naive = naive_boxcar(plane64.as_slice(), w, h, k);
            let fast = boxcar_filter(&plane64, k).unwrap();
            for (a, b) in fast.as_slice().iter().zip(&naive) {
                worst = worst.max((a - b).abs() / b.abs());
            }
            checked += 2 * w * h;
        }
    }
    Outcome {
        pass: worst <= REL_TOL,
        detail: format!("{checked} pixels over 200 planes (f32 and f64), kernels 1,2,3,7,8,15: max rel err {worst:.3e} (limit {REL_TOL:e})"),
    }
}

fn write_scene(dir: &Path, spec: &SceneSpec, seed: u64) {
    let (frames, _) = generate_sequence::<f32>(spec).unwrap();
    std::fs::create_dir_all(dir.join("frames")).unwrap();
    let refs: Vec<FrameRef> = frames
        .iter()
        .map(|f| {
            let rel = Path::new("frames").join(format!("{}.fr32", f.frame_id()));
            write_raster(f.raster(), &dir.join(&rel)).unwrap();
            FrameRef {
                id: f.frame_id().into(),
                path: rel,
                timestamp: f.timestamp(),
            }
        })
        .collect();
    let manifest = SequenceManifest {
        frames: refs,
        params: DetectorParams::default(),
        seed,
    };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

// 6. `detect` output is byte-identical across runs and thread counts.
fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = SceneSpec::new(96, 96, 40);
    spec.speckle_looks = Some(2.0);
    spec.seed = 11;
    spec.permanent_regions.push(Region::Disc {
        center_row: 30.0,
        center_col: 30.0,
        radius: 15.0,
    });
    spec.flood_events.push(FloodEvent {
        region: Region::Rect {
            row: 55,
            col: 40,
            height: 25,
            width: 40,
        },
        start_frame: 33,
        end_frame: 37,
    });
    write_scene(tmp.path(), &spec, 99);
    let mut outputs = Vec::new();
    for (run, threads) in [(0, "1"), (1, "1"), (2, "8"), (3, "8")] {
        let out = tmp.path().join(format!("out{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_floodvibe"))
            .args(["detect", "--manifest"])
            .arg(tmp.path().join("manifest.json"))
            .arg("--out-dir")
            .arg(&out)
            .env("FLOODVIBE_THREADS", threads)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(read_outputs(&out));
    }
    let identical = outputs.windows(2).all(|p| p[0] == p[1]);
    let nonempty = outputs[0].iter().filter(|(_, bytes)| bytes.contains(&255)).count();
    Outcome {
        pass: identical && outputs[0].len() == 10 && nonempty > 0,
        detail: format!(
            "{} mask files per run, {nonempty} with flooded pixels, 4 runs (threads 1,1,8,8) byte-identical: {identical}",
            outputs[0].len()
        ),
    }
}

// 7. Omitted params take the published defaults.
fn default_params() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"frames": [
            {"id": "a", "path": "a.fr32", "timestamp": "2019-05-10T00:00:00Z"},
            {"id": "b", "path": "b.fr32", "timestamp": "2019-05-16T00:00:00Z"}],
           "seed": 3}"#,
    )
    .unwrap();
    let p = parse_manifest(&path).unwrap().params;
    let pass = p.kernel_size == 8
        && p.threshold == 0.03
        && p.num_components == 20
        && p.samples == 5
        && p.k_min == 1
        && p.n_init == 30
        && p.channel == Polarization::VV;
    Outcome {
        pass,
        detail: format!(
            "kernel_size={} threshold={} num_components={} K={} k_min={} n_init={} channel={}",
            p.kernel_size, p.threshold, p.num_components, p.samples, p.k_min, p.n_init, p.channel
        ),
    }
}

// 8. Throughput at desk scale.
fn throughput() -> Outcome {
    const MAX_SECONDS: f64 = 10.0;
    let mut spec = SceneSpec::new(512, 512, 45);
    spec.speckle_looks = Some(4.0);
    spec.seed = 8;
    spec.permanent_regions.push(Region::Disc {
        center_row: 160.0,
        center_col: 160.0,
        radius: 80.0,
    });
    spec.flood_events.push(FloodEvent {
        region: Region::Rect {
            row: 300,
            col: 240,
            height: 120,
            width: 160,
        },
        start_frame: 35,
        end_frame: 40,
    });
    let (frames, _): (Vec<SarFrame<f32>>, _) = generate_sequence(&spec).unwrap();
    let params = DetectorParams::default();
    let (run, elapsed) = single_threaded(|| timed(|| run_detector(&params, 1, frames).unwrap()));
    let secs = elapsed.as_secs_f64();
    Outcome {
        pass: run.masks.len() == 15 && secs < MAX_SECONDS,
        detail: format!("45 frames 512x512 in {secs:.3}s single-threaded ({:.1} frames/s, limit {MAX_SECONDS}s)", 45.0 / secs),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("permanent-water suppression", permanent_water_suppression),
        ("flood recovery", flood_recovery),
        ("classification oracle equivalence", scalar_oracle_equivalence),
        ("component-labeling oracle", component_oracle),
        ("boxcar oracle", boxcar_oracle),
        ("detect determinism", cli_determinism),
        ("published defaults", default_params),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()).unwrap_or("?")
            ),
        });
        failed += !outcome.pass as usize;
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
