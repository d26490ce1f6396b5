//! 4-connected component labeling of binary maps (two-pass union-find).

use crate::raster::{BinaryMap, Class};

/// Connected components of one class of a [`BinaryMap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLabeling {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentLabeling {
    /// Component id at `(row, col)`, 0 when the pixel is not in the target class.
    #[inline]
    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Pixel count of component `label` (ids start at 1).
    pub fn size(&self, label: u32) -> Option<usize> {
        (label as usize).checked_sub(1).and_then(|i| self.sizes.get(i)).copied()
    }

    /// Sizes indexed by `label - 1`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let ra = find(parent, a);
    let rb = find(parent, b);
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Labels the 4-connected regions of `target` pixels. Ids are dense,
/// starting at 1, in raster-scan order of each component's first pixel.
pub fn label_components(map: &BinaryMap, target: Class) -> ComponentLabeling {
    let (width, height) = map.dims();
    let cells = map.as_slice();
    let mut labels = vec![0u32; width * height];
    // parent[0] is a placeholder for the background label.
    let mut parent: Vec<u32> = vec![0];

    for row in 0..height {
        for col in 0..width {
            let i = row * width + col;
            if cells[i] != target {
                continue;
            }
            let up = if row > 0 { labels[i - width] } else { 0 };
            let left = if col > 0 { labels[i - 1] } else { 0 };
            labels[i] = match (up, left) {
                (0, 0) => {
                    let next = parent.len() as u32;
                    parent.push(next);
                    next
                }
                (l, 0) | (0, l) => l,
                (u, l) if u == l => u,
                (u, l) => union(&mut parent, u, l),
            };
        }
    }

    let mut dense = vec![0u32; parent.len()];
    let mut sizes = Vec::new();
    for label in labels.iter_mut().filter(|l| **l != 0) {
        let root = find(&mut parent, *label) as usize;
        if dense[root] == 0 {
            sizes.push(0);
            dense[root] = sizes.len() as u32;
        }
        *label = dense[root];
        sizes[*label as usize - 1] += 1;
    }

    ComponentLabeling {
        width,
        height,
        labels,
        sizes,
    }
}

/// Reclassifies every water component with fewer than `num_components`
/// pixels as ground. Ground pixels are never changed.
pub fn remove_small_water_components(map: &BinaryMap, num_components: usize) -> BinaryMap {
    let labeling = label_components(map, Class::Water);
    let mut out = map.clone();
    for (cell, &label) in out.as_mut_slice().iter_mut().zip(labeling.labels()) {
        if label != 0 && labeling.sizes[label as usize - 1] < num_components {
            *cell = Class::Ground;
        }
    }
    out
}
