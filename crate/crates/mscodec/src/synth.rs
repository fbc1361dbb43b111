//! Seeded generators for piecewise smooth test images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Image, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// piecewise-constant vertical bands
    Steps,
    /// two linear ramps split by a curved boundary
    Ramps,
    /// Voronoi cells filled with smooth quadratic patches
    VoronoiSmooth,
}

impl SynthKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "steps" => Some(SynthKind::Steps),
            "ramps" => Some(SynthKind::Ramps),
            "voronoi-smooth" => Some(SynthKind::VoronoiSmooth),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Steps => "steps",
            SynthKind::Ramps => "ramps",
            SynthKind::VoronoiSmooth => "voronoi-smooth",
        }
    }
}

pub fn synthesize(kind: SynthKind, width: usize, height: usize, seed: u64) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidConfig("synth dimensions must be positive".into()));
    }
    Ok(match kind {
        SynthKind::Steps => steps(width, height, seed),
        SynthKind::Ramps => ramps(width, height, seed),
        SynthKind::VoronoiSmooth => voronoi_smooth(width, height, seed),
    })
}

fn steps(w: usize, h: usize, seed: u64) -> Image {
    let max_bands = (w / 2).clamp(1, 8);
    let bands = 2 + (seed as usize % max_bands.max(1)).min(max_bands - 1);
    let bands = bands.min(max_bands.max(2));
    let mut values: Vec<f64> = (0..bands)
        .map(|i| (255.0 * i as f64 / (bands - 1) as f64).round())
        .collect();
    if bands > 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..values.len()).rev() {
            values.swap(i, rng.gen_range(0..=i));
        }
    }
    let samples = (0..w * h)
        .map(|i| {
            let x = i % w;
            let band = (x * bands / w).min(bands - 1);
            values[band]
        })
        .collect();
    Image::new(w, h, samples)
}

fn ramps(w: usize, h: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x52414d50);
    let amp = rng.gen_range(0.05..0.2) * w as f64;
    let freq = rng.gen_range(1.0..3.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let planes: Vec<[f64; 3]> = (0..2)
        .map(|_| {
            [
                rng.gen_range(40.0..215.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            ]
        })
        .collect();
    let samples = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let split = w as f64 * 0.5
                + amp * (std::f64::consts::TAU * freq * y / h as f64 + phase).sin();
            let p = &planes[usize::from(x >= split)];
            (p[0] + p[1] * (x - w as f64 / 2.0) + p[2] * (y - h as f64 / 2.0)).clamp(0.0, 255.0)
        })
        .collect();
    Image::new(w, h, samples)
}

fn voronoi_smooth(w: usize, h: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x564f524f);
    let cells = ((w * h) / 2048).clamp(4, 16);
    struct Cell {
        site: (f64, f64),
        coeffs: [f64; 6],
    }
    let cells: Vec<Cell> = (0..cells)
        .map(|_| Cell {
            site: (rng.gen_range(0.0..w as f64), rng.gen_range(0.0..h as f64)),
            coeffs: [
                rng.gen_range(30.0..225.0),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.01..0.01),
                rng.gen_range(-0.01..0.01),
                rng.gen_range(-0.01..0.01),
            ],
        })
        .collect();
    let samples = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let cell = cells
                .iter()
                .min_by(|a, b| {
                    let da = (a.site.0 - x).powi(2) + (a.site.1 - y).powi(2);
                    let db = (b.site.0 - x).powi(2) + (b.site.1 - y).powi(2);
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            let (dx, dy) = (x - cell.site.0, y - cell.site.1);
            let c = &cell.coeffs;
            (c[0] + c[1] * dx + c[2] * dy + c[3] * dx * dx + c[4] * dx * dy + c[5] * dy * dy)
                .clamp(0.0, 255.0)
        })
        .collect();
    Image::new(w, h, samples)
}
