//! Greedy region merging over a region adjacency graph: start from a
//! fine partition and repeatedly merge the adjacent pair whose error
//! increase per unit of removed boundary is smallest, while that gain
//! stays below the rate-distortion weight.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, BTreeSet, HashMap};

use crate::mask::GridValues;
use crate::operators::{region_sse, Known, MaskData, OperatorId, RegionView};
use crate::{Error, Image, Quantizer, Result};

#[derive(Debug, Clone)]
pub struct MergeParams {
    pub op: OperatorId,
    pub lambda: f64,
    pub quantizer: Quantizer,
    pub grid: Option<GridValues>,
    pub block: usize,
}

#[derive(Debug)]
pub struct Region {
    pub pixels: Vec<u32>,
    pub sse: f64,
    pub first_pixel: u32,
    version: u64,
    alive: bool,
    neighbors: BTreeSet<u32>,
}

/// One accepted merge, enough to audit the energy descent.
#[derive(Debug, Clone, Copy)]
pub struct MergeEvent {
    pub gain: f64,
    pub boundary_len: u64,
    pub sse_increase: f64,
}

#[derive(Debug)]
pub struct Segmentation {
    pub width: usize,
    pub height: usize,
    /// region slot per pixel (slots are storage handles, not canonical ids)
    pub labels: Vec<u32>,
    regions: Vec<Region>,
    pair_len: HashMap<(u32, u32), u64>,
    pub trace: Vec<MergeEvent>,
}

struct Candidate {
    gain: f64,
    /// first pixels of both regions, (min, max): the deterministic tie-break
    key: (u32, u32),
    slots: (u32, u32),
    versions: (u64, u64),
    sse_union: f64,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.gain == other.gain && self.key == other.key
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // BinaryHeap is a max-heap: invert so the smallest gain pops first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .gain
            .partial_cmp(&self.gain)
            .unwrap()
            .then_with(|| other.key.cmp(&self.key))
    }
}

fn norm(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Segmentation {
    pub fn region(&self, slot: u32) -> &Region {
        &self.regions[slot as usize]
    }

    pub fn region_count(&self) -> usize {
        self.regions.iter().filter(|r| r.alive).count()
    }

    /// Alive slots sorted by row-major first pixel: the canonical region
    /// order shared with the decoder.
    pub fn canonical_slots(&self) -> Vec<u32> {
        let mut slots: Vec<u32> = (0..self.regions.len() as u32)
            .filter(|&s| self.regions[s as usize].alive)
            .collect();
        slots.sort_by_key(|&s| self.regions[s as usize].first_pixel);
        slots
    }

    pub fn joint_boundary_len(&self, a: u32, b: u32) -> Option<u64> {
        self.pair_len.get(&norm(a, b)).copied()
    }

    pub fn adjacent_pairs(&self) -> impl Iterator<Item = (&(u32, u32), &u64)> {
        self.pair_len.iter()
    }

    pub fn total_boundary_len(&self) -> u64 {
        self.pair_len.values().sum()
    }

    pub fn total_sse(&self) -> f64 {
        self.regions.iter().filter(|r| r.alive).map(|r| r.sse).sum()
    }

    /// The discrete energy: total sse plus lambda times internal boundary length.
    pub fn energy(&self, lambda: f64) -> f64 {
        self.total_sse() + lambda * self.total_boundary_len() as f64
    }

    fn sse_of_pixels(&self, pixels: &[u32], f: &Image, params: &MergeParams) -> f64 {
        let region = RegionView::new(self.width, self.height, pixels);
        match params.op.poly_degree() {
            Some(deg) => region_sse(params.op, &region, f, &Known::Degree(deg), params.quantizer),
            None => {
                let grid = params.grid.as_ref().expect("inpainting operator without grid");
                let positions = grid.region_positions(pixels);
                let values: Vec<f64> =
                    positions.iter().map(|&p| grid.values[p as usize]).collect();
                let mask = MaskData { positions, values, density: grid.density };
                region_sse(params.op, &region, f, &Known::Mask(&mask), params.quantizer)
            }
        }
    }

    fn pair_candidate(&self, a: u32, b: u32, f: &Image, params: &MergeParams) -> Candidate {
        let ra = &self.regions[a as usize];
        let rb = &self.regions[b as usize];
        let mut union: Vec<u32> = Vec::with_capacity(ra.pixels.len() + rb.pixels.len());
        union.extend_from_slice(&ra.pixels);
        union.extend_from_slice(&rb.pixels);
        let sse_union = self.sse_of_pixels(&union, f, params);
        let len = self.pair_len[&norm(a, b)] as f64;
        Candidate {
            gain: (sse_union - ra.sse - rb.sse) / len,
            key: norm(ra.first_pixel, rb.first_pixel),
            slots: (a, b),
            versions: (ra.version, rb.version),
            sse_union,
        }
    }

    /// The minimal lambda that lets the pair merge (Algorithm 1's gain).
    pub fn merge_gain(&self, a: u32, b: u32, f: &Image, params: &MergeParams) -> Result<f64> {
        if !self.pair_len.contains_key(&norm(a, b)) {
            return Err(Error::NotAdjacent);
        }
        Ok(self.pair_candidate(a, b, f, params).gain)
    }
}

/// Total internal boundary length of a label map plus per-pair joint
/// lengths, counted in 4-neighbor crack edges. The image border adds
/// nothing.
pub fn boundary_length(labels: &[u32], width: usize, height: usize) -> (u64, HashMap<(u32, u32), u64>) {
    let mut pairs: HashMap<(u32, u32), u64> = HashMap::new();
    let mut total = 0u64;
    for y in 0..height {
        for x in 0..width {
            let a = labels[y * width + x];
            if x + 1 < width {
                let b = labels[y * width + x + 1];
                if a != b {
                    total += 1;
                    *pairs.entry(norm(a, b)).or_insert(0) += 1;
                }
            }
            if y + 1 < height {
                let b = labels[(y + 1) * width + x];
                if a != b {
                    total += 1;
                    *pairs.entry(norm(a, b)).or_insert(0) += 1;
                }
            }
        }
    }
    (total, pairs)
}

/// Runs the greedy merge loop to completion for the given weight.
pub fn region_merge(f: &Image, params: &MergeParams) -> Result<Segmentation> {
    if params.lambda < 0.0 {
        return Err(Error::InvalidConfig("lambda must be nonnegative".into()));
    }
    if params.block == 0 {
        return Err(Error::InvalidConfig("block size must be at least 1".into()));
    }
    if params.op.is_inpainting() && params.grid.is_none() {
        return Err(Error::InvalidConfig("inpainting operator requires a grid mask".into()));
    }

    let (w, h) = (f.width, f.height);
    let b = params.block;
    let bw = (w + b - 1) / b;
    let bh = (h + b - 1) / b;

    let mut labels = vec![0u32; w * h];
    for y in 0..h {
        for x in 0..w {
            labels[y * w + x] = ((y / b) * bw + x / b) as u32;
        }
    }
    let nslots = bw * bh;
    let mut pixel_lists: Vec<Vec<u32>> = vec![Vec::new(); nslots];
    for (i, &l) in labels.iter().enumerate() {
        pixel_lists[l as usize].push(i as u32);
    }

    let (_, pair_len) = boundary_length(&labels, w, h);
    let mut regions: Vec<Region> = pixel_lists
        .into_iter()
        .map(|pixels| Region {
            first_pixel: pixels[0],
            pixels,
            sse: 0.0,
            version: 0,
            alive: true,
            neighbors: BTreeSet::new(),
        })
        .collect();
    for &(a, b) in pair_len.keys() {
        regions[a as usize].neighbors.insert(b);
        regions[b as usize].neighbors.insert(a);
    }

    let mut seg = Segmentation {
        width: w,
        height: h,
        labels,
        regions,
        pair_len,
        trace: Vec::new(),
    };
    for slot in 0..nslots as u32 {
        seg.regions[slot as usize].sse =
            seg.sse_of_pixels(&seg.regions[slot as usize].pixels.clone(), f, params);
    }

    let mut heap = BinaryHeap::new();
    let keys: Vec<(u32, u32)> = seg.pair_len.keys().copied().collect();
    for (a, b) in keys {
        heap.push(seg.pair_candidate(a, b, f, params));
    }

    while let Some(c) = heap.pop() {
        let (a, b) = c.slots;
        let (ra, rb) = (&seg.regions[a as usize], &seg.regions[b as usize]);
        if !ra.alive || !rb.alive || ra.version != c.versions.0 || rb.version != c.versions.1 {
            continue; // stale candidate, lazily discarded
        }
        if c.gain >= params.lambda {
            break; // minimal valid gain no longer below lambda
        }
        let len = seg.pair_len[&norm(a, b)];
        seg.trace.push(MergeEvent {
            gain: c.gain,
            boundary_len: len,
            sse_increase: c.sse_union - ra.sse - rb.sse,
        });

        // relabel the smaller pixel list into the bigger slot
        let (big, small) = if ra.pixels.len() >= rb.pixels.len() { (a, b) } else { (b, a) };
        let small_pixels = std::mem::take(&mut seg.regions[small as usize].pixels);
        for &p in &small_pixels {
            seg.labels[p as usize] = big;
        }
        let first = seg.regions[big as usize]
            .first_pixel
            .min(seg.regions[small as usize].first_pixel);
        seg.regions[big as usize].pixels.extend_from_slice(&small_pixels);
        seg.regions[big as usize].first_pixel = first;
        seg.regions[big as usize].sse = c.sse_union;
        seg.regions[big as usize].version += 1;
        seg.regions[small as usize].alive = false;

        seg.pair_len.remove(&norm(big, small));
        seg.regions[big as usize].neighbors.remove(&small);
        let small_neighbors: Vec<u32> = seg.regions[small as usize]
            .neighbors
            .iter()
            .copied()
            .filter(|&n| n != big)
            .collect();
        seg.regions[small as usize].neighbors.clear();
        for n in small_neighbors {
            let l = seg.pair_len.remove(&norm(small, n)).unwrap();
            *seg.pair_len.entry(norm(big, n)).or_insert(0) += l;
            seg.regions[n as usize].neighbors.remove(&small);
            seg.regions[n as usize].neighbors.insert(big);
            seg.regions[big as usize].neighbors.insert(n);
        }

        let neighbors: Vec<u32> = seg.regions[big as usize].neighbors.iter().copied().collect();
        for n in neighbors {
            heap.push(seg.pair_candidate(big, n, f, params));
        }
    }
    Ok(seg)
}
