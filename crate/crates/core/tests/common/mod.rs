//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use floodvibe::synthetic::{FloodEvent, Region, SceneSpec};
use floodvibe::{BinaryMap, Class, Plane};

/// Direct window mean over the window ∩ image, window rows/cols
/// `[r - (k-1)/2, r + k/2]`.
pub fn naive_boxcar(plane: &[f64], width: usize, height: usize, k: usize) -> Vec<f64> {
    let before = (k as isize - 1) / 2;
    let after = k as isize / 2;
    let mut out = Vec::with_capacity(width * height);
    for r in 0..height as isize {
        for c in 0..width as isize {
            let mut sum = 0.0;
            let mut n = 0;
            for rr in (r - before)..=(r + after) {
                for cc in (c - before)..=(c + after) {
                    if rr >= 0 && cc >= 0 && rr < height as isize && cc < width as isize {
                        sum += plane[rr as usize * width + cc as usize];
                        n += 1;
                    }
                }
            }
            out.push(sum / n as f64);
        }
    }
    out
}

pub fn plane_to_f64<T: floodvibe::Backscatter>(plane: &Plane<T>) -> Vec<f64> {
    plane.as_slice().iter().map(|v| v.to_f64().unwrap()).collect()
}

/// BFS flood fill with 4-neighbours; ids in raster order of first pixel.
pub fn bfs_labels(map: &BinaryMap, target: Class) -> Vec<u32> {
    let (w, h) = map.dims();
    let cells = map.as_slice();
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    for start in 0..w * h {
        if cells[start] != target || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            let mut neighbours = Vec::with_capacity(4);
            if r > 0 {
                neighbours.push(i - w);
            }
            if r + 1 < h {
                neighbours.push(i + w);
            }
            if c > 0 {
                neighbours.push(i - 1);
            }
            if c + 1 < w {
                neighbours.push(i + 1);
            }
            for j in neighbours {
                if cells[j] == target && labels[j] == 0 {
                    labels[j] = next;
                    queue.push_back(j);
                }
            }
        }
    }
    labels
}

/// True when both labelings induce the same partition.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.len() == b.len()
        && a.iter().zip(b).all(|(&x, &y)| {
            (x == 0) == (y == 0) && *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x
        })
}

pub fn prune_oracle(map: &BinaryMap, min_size: usize) -> BinaryMap {
    let labels = bfs_labels(map, Class::Water);
    let max = labels.iter().copied().max().unwrap_or(0) as usize;
    let mut sizes = vec![0usize; max + 1];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    let values = labels
        .iter()
        .zip(map.as_slice())
        .map(|(&l, &c)| if l != 0 && sizes[l as usize] < min_size { Class::Ground } else { c })
        .collect();
    BinaryMap::new(map.width(), map.height(), values).unwrap()
}

// Slot selection, re-derived from its documented definition: SplitMix64
// finalizer chained over (seed, frame_index, pixel), then multiply-shift.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

pub fn oracle_slot(seed: u64, frame: u64, pixel: u64, k: usize) -> usize {
    const G: u64 = 0x9E3779B97F4A7C15;
    let h = mix(seed.wrapping_add(G));
    let h = mix(h ^ frame.wrapping_mul(G).wrapping_add(0x632BE59BD9B4E019));
    let h = mix(h ^ pixel.wrapping_mul(0xD6E8FEB86659FD93).wrapping_add(G));
    ((h as u128 * k as u128) >> 64) as usize
}

/// Straight-line single-pixel detector: `water[t]` is true when frame
/// `t + 1` observed water. Returns one flood flag per frame after warm-up.
pub fn scalar_detector(water: &[bool], n_init: usize, k: usize, k_min: usize, seed: u64, pixel: u64) -> Vec<bool> {
    let warm_water = water[..n_init].iter().filter(|&&w| w).count();
    // temporal median, ties to ground
    let init = warm_water * 2 > n_init;
    let mut samples = vec![init; k];
    let mut out = Vec::new();
    for (t, &obs) in water.iter().enumerate().skip(n_init) {
        let frame_index = t as u64 + 1;
        let stored_water = samples.iter().filter(|&&s| s).count();
        let flood = obs && stored_water < k_min;
        if !flood {
            samples[oracle_slot(seed, frame_index, pixel, k)] = obs;
        }
        out.push(flood);
    }
    out
}

pub const LAKE_RADIUS: f64 = 40.0;

/// 256x256, 45 frames, one permanent lake, L = 4 speckle.
pub fn lake_scene(seed: u64) -> SceneSpec {
    let mut spec = SceneSpec::new(256, 256, 45);
    spec.speckle_looks = Some(4.0);
    spec.seed = seed;
    spec.permanent_regions.push(Region::Disc {
        center_row: 80.0,
        center_col: 80.0,
        radius: LAKE_RADIUS,
    });
    spec
}

/// The lake scene plus a 60x80 flood over dry land on frames 35-40.
pub fn flood_scene(seed: u64) -> SceneSpec {
    let mut spec = lake_scene(seed);
    spec.flood_events.push(FloodEvent {
        region: Region::Rect {
            row: 150,
            col: 120,
            height: 60,
            width: 80,
        },
        start_frame: 35,
        end_frame: 40,
    });
    spec
}

pub fn iou(pred: &[bool], truth: &[bool]) -> f64 {
    let inter = pred.iter().zip(truth).filter(|(&a, &b)| a && b).count();
    let union = pred.iter().zip(truth).filter(|(&a, &b)| a || b).count();
    inter as f64 / union as f64
}
