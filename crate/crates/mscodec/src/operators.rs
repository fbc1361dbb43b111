//! Per-segment reconstruction operators: bivariate polynomial
//! approximation (degrees 0-2), homogeneous diffusion inpainting and
//! Shepard interpolation.
//!
//! Every operator maps (region pixel set, known data) to reconstruction
//! values in the order of the region's pixel list, plus a sum of squared
//! errors against the original image.

use std::collections::HashMap;

use crate::{Image, Quantizer};

/// Identifier of a reconstruction operator, also used on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorId {
    P0,
    P1,
    P2,
    Diffusion,
    Shepard,
}

impl OperatorId {
    pub const ALL: [OperatorId; 5] = [
        OperatorId::P0,
        OperatorId::P1,
        OperatorId::P2,
        OperatorId::Diffusion,
        OperatorId::Shepard,
    ];

    pub fn is_inpainting(self) -> bool {
        matches!(self, OperatorId::Diffusion | OperatorId::Shepard)
    }

    pub fn poly_degree(self) -> Option<u8> {
        match self {
            OperatorId::P0 => Some(0),
            OperatorId::P1 => Some(1),
            OperatorId::P2 => Some(2),
            _ => None,
        }
    }

    pub fn to_byte(self) -> u8 {
        match self {
            OperatorId::P0 => 0,
            OperatorId::P1 => 1,
            OperatorId::P2 => 2,
            OperatorId::Diffusion => 3,
            OperatorId::Shepard => 4,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(OperatorId::P0),
            1 => Some(OperatorId::P1),
            2 => Some(OperatorId::P2),
            3 => Some(OperatorId::Diffusion),
            4 => Some(OperatorId::Shepard),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorId::P0 => "p0",
            OperatorId::P1 => "p1",
            OperatorId::P2 => "p2",
            OperatorId::Diffusion => "diffusion",
            OperatorId::Shepard => "shepard",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "p0" => Some(OperatorId::P0),
            "p1" => Some(OperatorId::P1),
            "p2" => Some(OperatorId::P2),
            "diffusion" => Some(OperatorId::Diffusion),
            "shepard" => Some(OperatorId::Shepard),
            _ => None,
        }
    }
}

/// One segment's pixel set as linear raster indices, plus raster shape.
#[derive(Debug, Clone, Copy)]
pub struct RegionView<'a> {
    pub width: usize,
    pub height: usize,
    pub pixels: &'a [u32],
}

impl<'a> RegionView<'a> {
    pub fn new(width: usize, height: usize, pixels: &'a [u32]) -> Self {
        RegionView { width, height, pixels }
    }

    #[inline]
    pub fn coords(&self, idx: u32) -> (usize, usize) {
        (idx as usize % self.width, idx as usize / self.width)
    }

    pub fn centroid(&self) -> (f64, f64) {
        let mut sx = 0.0;
        let mut sy = 0.0;
        for &p in self.pixels {
            let (x, y) = self.coords(p);
            sx += x as f64;
            sy += y as f64;
        }
        let n = self.pixels.len() as f64;
        (sx / n, sy / n)
    }
}

/// The stored samples of one segment: grid positions inside the region
/// and their dequantized values, plus the global grid density.
#[derive(Debug, Clone)]
pub struct MaskData {
    pub positions: Vec<u32>,
    pub values: Vec<f64>,
    pub density: f64,
}

impl MaskData {
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

pub const COEFF_COUNTS: [usize; 3] = [1, 3, 6];

/// Monomial basis `1, x, y, x^2, xy, y^2` evaluated at centered coords.
#[inline]
fn monomials(dx: f64, dy: f64, out: &mut [f64; 6]) {
    out[0] = 1.0;
    out[1] = dx;
    out[2] = dy;
    out[3] = dx * dx;
    out[4] = dx * dy;
    out[5] = dy * dy;
}

/// Least-squares polynomial of one segment, monomials centered at the
/// region centroid (decoder-reconstructible, improves conditioning).
#[derive(Debug, Clone)]
pub struct PolyCoefficients {
    pub degree: u8,
    pub coeffs: Vec<f64>,
    pub center: (f64, f64),
}

/// Cholesky solve of the symmetric system `a x = b` (`a` row-major k*k).
/// Returns None when a pivot collapses (rank-deficient Gram matrix).
fn cholesky_solve(a: &[f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; k * k];
    let scale = (0..k).map(|i| a[i * k + i]).fold(0.0f64, f64::max).max(1.0);
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for m in 0..j {
                s -= l[i * k + m] * l[j * k + m];
            }
            if i == j {
                if s <= 1e-12 * scale {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    // forward then backward substitution
    let mut y = vec![0.0f64; k];
    for i in 0..k {
        let mut s = b[i];
        for m in 0..i {
            s -= l[i * k + m] * y[m];
        }
        y[i] = s / l[i * k + i];
    }
    let mut x = vec![0.0f64; k];
    for i in (0..k).rev() {
        let mut s = y[i];
        for m in i + 1..k {
            s -= l[m * k + i] * x[m];
        }
        x[i] = s / l[i * k + i];
    }
    Some(x)
}

/// Fits the degree-`n` bivariate polynomial minimizing the squared error
/// over the region via the normal equations. Falls back to the largest
/// degree with independent monomials on tiny or degenerate regions,
/// zero-padding the remaining coefficients.
pub fn fit_polynomial(region: &RegionView, f: &Image, degree: u8) -> (PolyCoefficients, f64) {
    assert!(!region.pixels.is_empty(), "region must be nonempty");
    assert!(degree <= 2);
    let center = region.centroid();
    let full = COEFF_COUNTS[degree as usize];

    // full normal-equation accumulation once; lower degrees use prefixes
    let mut a = [0.0f64; 36];
    let mut b = [0.0f64; 6];
    let mut m = [0.0f64; 6];
    for &p in region.pixels {
        let (x, y) = region.coords(p);
        monomials(x as f64 - center.0, y as f64 - center.1, &mut m);
        let fv = f.samples[p as usize];
        for i in 0..full {
            b[i] += fv * m[i];
            for j in 0..=i {
                a[i * 6 + j] += m[i] * m[j];
            }
        }
    }
    for i in 0..full {
        for j in i + 1..full {
            a[i * 6 + j] = a[j * 6 + i];
        }
    }

    let mut solved = None;
    let mut deg = degree;
    loop {
        let k = COEFF_COUNTS[deg as usize];
        let mut ak = vec![0.0f64; k * k];
        for i in 0..k {
            for j in 0..k {
                ak[i * k + j] = a[i * 6 + j];
            }
        }
        if let Some(x) = cholesky_solve(&ak, &b[..k], k) {
            solved = Some(x);
            break;
        }
        if deg == 0 {
            break;
        }
        deg -= 1;
    }
    let mut coeffs = vec![0.0f64; full];
    match solved {
        Some(x) => coeffs[..x.len()].copy_from_slice(&x),
        // all-zero Gram matrix cannot occur (constant monomial), keep zeros
        None => {}
    }

    let poly = PolyCoefficients { degree, coeffs, center };
    let recon = eval_polynomial(&poly, region);
    let sse = region
        .pixels
        .iter()
        .zip(&recon)
        .map(|(&p, &u)| {
            let d = u - f.samples[p as usize];
            d * d
        })
        .sum();
    (poly, sse)
}

/// Evaluates the polynomial at every region pixel (centered coords).
/// No clamping here; clamping happens at final image assembly.
pub fn eval_polynomial(c: &PolyCoefficients, region: &RegionView) -> Vec<f64> {
    let k = c.coeffs.len();
    let mut m = [0.0f64; 6];
    region
        .pixels
        .iter()
        .map(|&p| {
            let (x, y) = region.coords(p);
            monomials(x as f64 - c.center.0, y as f64 - c.center.1, &mut m);
            (0..k).map(|i| c.coeffs[i] * m[i]).sum()
        })
        .collect()
}

pub const CG_DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct DiffusionResult {
    pub values: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Homogeneous diffusion inpainting on one segment: 5-point Laplace
/// stencil with Dirichlet data at mask pixels and reflecting conditions
/// across the segment boundary (out-of-region neighbors dropped).
/// Matrix-free conjugate gradients; `init` optionally warm-starts the
/// solve with values aligned to the region pixel order.
pub fn diffusion_reconstruct(
    region: &RegionView,
    mask: &MaskData,
    tol: f64,
    max_iter: usize,
    init: Option<&[f64]>,
) -> DiffusionResult {
    assert!(!mask.is_empty(), "diffusion requires a nonempty mask");
    let mut mask_val: HashMap<u32, f64> = HashMap::with_capacity(mask.positions.len());
    for (&p, &v) in mask.positions.iter().zip(&mask.values) {
        mask_val.insert(p, v);
    }

    // canonical (sorted) unknown ordering keeps the solve independent of
    // the caller's pixel order
    let mut sorted: Vec<u32> = region.pixels.to_vec();
    sorted.sort_unstable();
    let in_region: HashMap<u32, usize> =
        sorted.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let unknowns: Vec<u32> = sorted
        .iter()
        .copied()
        .filter(|p| !mask_val.contains_key(p))
        .collect();
    let local: HashMap<u32, usize> =
        unknowns.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = unknowns.len();

    let w = region.width as isize;
    let h = region.height as isize;
    let neighbors = |p: u32| {
        let x = p as isize % w;
        let y = p as isize / w;
        let mut out = [None; 4];
        let cand = [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)];
        for (k, &(nx, ny)) in cand.iter().enumerate() {
            if nx >= 0 && nx < w && ny >= 0 && ny < h {
                let q = (ny * w + nx) as u32;
                if in_region.contains_key(&q) {
                    out[k] = Some(q);
                }
            }
        }
        out
    };

    // A u = b with A[p][p] = region-neighbor count, off-diagonal -1
    let mut diag = vec![0.0f64; n];
    let mut rhs = vec![0.0f64; n];
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &p) in unknowns.iter().enumerate() {
        for q in neighbors(p).into_iter().flatten() {
            diag[i] += 1.0;
            if let Some(&j) = local.get(&q) {
                links[i].push(j);
            } else {
                rhs[i] += mask_val[&q];
            }
        }
    }

    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let mut s = diag[i] * x[i];
            for &j in &links[i] {
                s -= x[j];
            }
            out[i] = s;
        }
    };

    let mut u = vec![0.0f64; n];
    if let Some(init) = init {
        assert_eq!(init.len(), region.pixels.len());
        let mut by_pixel: HashMap<u32, f64> = HashMap::with_capacity(init.len());
        for (&p, &v) in region.pixels.iter().zip(init) {
            by_pixel.insert(p, v);
        }
        for (i, &p) in unknowns.iter().enumerate() {
            u[i] = by_pixel[&p];
        }
    }

    let bnorm: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut converged = true;
    let mut iterations = 0;
    if n > 0 && bnorm > 0.0 {
        let mut r = vec![0.0f64; n];
        let mut tmp = vec![0.0f64; n];
        apply(&u, &mut tmp);
        for i in 0..n {
            r[i] = rhs[i] - tmp[i];
        }
        let mut p = r.clone();
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        converged = rr.sqrt() <= tol * bnorm;
        while !converged && iterations < max_iter {
            apply(&p, &mut tmp);
            let pap: f64 = p.iter().zip(&tmp).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rr / pap;
            for i in 0..n {
                u[i] += alpha * p[i];
                r[i] -= alpha * tmp[i];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            iterations += 1;
            if rr_new.sqrt() <= tol * bnorm {
                converged = true;
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
    } else if n > 0 {
        // zero right-hand side: all Dirichlet links are zero, u = 0
        u.iter_mut().for_each(|v| *v = 0.0);
    }

    let values = region
        .pixels
        .iter()
        .map(|p| match mask_val.get(p) {
            Some(&v) => v,
            None => u[local[p]],
        })
        .collect();
    DiffusionResult { values, converged, iterations }
}

/// Gaussian standard deviation adapted to the mask density.
pub fn shepard_sigma(density: f64) -> f64 {
    1.0 / (std::f64::consts::PI * density).sqrt()
}

/// Half-width of the truncation window centered at the target pixel.
pub fn shepard_half_width(density: f64) -> isize {
    (2.0 * shepard_sigma(density)).ceil() as isize
}

/// Shepard interpolation: truncated-Gaussian weighted average of the
/// segment's mask values. Mask pixels reconstruct to their own values;
/// a pixel whose window holds no mask pixel takes the nearest one
/// (Euclidean, ties by row-major order).
pub fn shepard_reconstruct(region: &RegionView, mask: &MaskData) -> Vec<f64> {
    assert!(!mask.is_empty(), "shepard requires a nonempty mask");
    let sigma = shepard_sigma(mask.density);
    let half = shepard_half_width(mask.density);
    let inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    // Raster of mask values (NaN = not a mask pixel): the window scan in
    // the inner loop is far hotter than the one-time fill.
    let mut mask_val = vec![f64::NAN; region.width * region.height];
    for (&p, &v) in mask.positions.iter().zip(&mask.values) {
        mask_val[p as usize] = v;
    }
    // mask positions in row-major order for deterministic tie-breaking
    let mut sorted_mask: Vec<u32> = mask.positions.to_vec();
    sorted_mask.sort_unstable();

    // kernel weights depend only on the pixel offset: tabulate them once
    let side = (2 * half + 1) as usize;
    let kernel: Vec<f64> = (0..side * side)
        .map(|i| {
            let dx = (i % side) as isize - half;
            let dy = (i / side) as isize - half;
            (-((dx * dx + dy * dy) as f64) * inv_two_sigma2).exp()
        })
        .collect();

    let w = region.width as isize;
    let h = region.height as isize;
    region
        .pixels
        .iter()
        .map(|&p| {
            let own = mask_val[p as usize];
            if !own.is_nan() {
                return own;
            }
            let x = p as isize % w;
            let y = p as isize / w;
            let mut num = 0.0;
            let mut den = 0.0;
            for ny in (y - half).max(0)..=(y + half).min(h - 1) {
                for nx in (x - half).max(0)..=(x + half).min(w - 1) {
                    let v = mask_val[(ny * w + nx) as usize];
                    if !v.is_nan() {
                        let ki = ((ny - y + half) * side as isize + (nx - x + half)) as usize;
                        let wgt = kernel[ki];
                        num += wgt * v;
                        den += wgt;
                    }
                }
            }
            if den > 0.0 {
                num / den
            } else {
                // empty window: nearest mask sample of the same segment
                let mut best = f64::INFINITY;
                let mut val = 0.0;
                for &q in &sorted_mask {
                    let qx = q as isize % w;
                    let qy = q as isize / w;
                    let d2 = ((qx - x) * (qx - x) + (qy - y) * (qy - y)) as f64;
                    if d2 < best {
                        best = d2;
                        val = mask_val[q as usize];
                    }
                }
                val
            }
        })
        .collect()
}

/// Constant fallback for regions whose grid mask is empty: the region is
/// reconstructed at the quantized region mean.
pub fn fallback_index(region: &RegionView, f: &Image, q: Quantizer) -> u8 {
    let mean: f64 =
        region.pixels.iter().map(|&p| f.samples[p as usize]).sum::<f64>()
            / region.pixels.len() as f64;
    q.quantize(mean)
}

pub fn constant_sse(region: &RegionView, f: &Image, value: f64) -> f64 {
    region
        .pixels
        .iter()
        .map(|&p| {
            let d = value - f.samples[p as usize];
            d * d
        })
        .sum()
}

/// Known data handed to `region_sse`.
pub enum Known<'a> {
    Degree(u8),
    Mask(&'a MaskData),
}

/// Reconstructs the region with the named operator and returns the sum
/// of squared errors against `f`. Empty inpainting masks fall back to a
/// constant at the quantized region mean (`q` from the mask's quantizer
/// is resolved by the caller via `fallback`).
pub fn region_sse(
    op: OperatorId,
    region: &RegionView,
    f: &Image,
    known: &Known,
    fallback_quantizer: Quantizer,
) -> f64 {
    match (op, known) {
        (OperatorId::P0, Known::Degree(_)) => fit_polynomial(region, f, 0).1,
        (OperatorId::P1, Known::Degree(_)) => fit_polynomial(region, f, 1).1,
        (OperatorId::P2, Known::Degree(_)) => fit_polynomial(region, f, 2).1,
        (OperatorId::Diffusion, Known::Mask(mask)) => {
            if mask.is_empty() {
                let idx = fallback_index(region, f, fallback_quantizer);
                return constant_sse(region, f, fallback_quantizer.dequantize(idx));
            }
            let max_iter = 10 * region.pixels.len().max(1);
            let res = diffusion_reconstruct(region, mask, CG_DEFAULT_TOL, max_iter, None);
            sse_of(region, f, &res.values)
        }
        (OperatorId::Shepard, Known::Mask(mask)) => {
            if mask.is_empty() {
                let idx = fallback_index(region, f, fallback_quantizer);
                return constant_sse(region, f, fallback_quantizer.dequantize(idx));
            }
            let values = shepard_reconstruct(region, mask);
            sse_of(region, f, &values)
        }
        _ => panic!("operator/known-data mismatch"),
    }
}

pub fn sse_of(region: &RegionView, f: &Image, values: &[f64]) -> f64 {
    region
        .pixels
        .iter()
        .zip(values)
        .map(|(&p, &u)| {
            let d = u - f.samples[p as usize];
            d * d
        })
        .sum()
}
