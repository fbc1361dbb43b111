//! Container format and the end-to-end encoder/decoder pipeline:
//! segmentation -> chain codes -> per-region payload -> entropy stage,
//! and the reverse.
//!
//! Header (plain, big-endian): magic "MSCC", version 1, width u16,
//! height u16, operator byte, q byte (0 encodes 256), density as
//! fixed-point d*10000 u16, chain count u32, region count u32,
//! uncompressed body length u32. Body: entropy-coded chains section
//! followed by per-region payload records in canonical region order.

use crate::chaincode::{self, Chain, ChainSet, Direction, Move};
use crate::entropy;
use crate::mask::{self, GridValues};
use crate::operators::{
    diffusion_reconstruct, eval_polynomial, fallback_index, fit_polynomial, shepard_reconstruct,
    MaskData, OperatorId, PolyCoefficients, RegionView, CG_DEFAULT_TOL, COEFF_COUNTS,
};
use crate::segmentation::{region_merge, MergeParams, Segmentation};
use crate::{Error, Image, Quantizer, Result};

pub const MAGIC: &[u8; 4] = b"MSCC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 25;
pub const DENSITY_FIXED_POINT: f64 = 10000.0;

#[derive(Debug, Clone)]
pub struct EncoderConfig {
    pub op: OperatorId,
    pub lambda: f64,
    /// inpainting operators only
    pub density: Option<f64>,
    /// inpainting operators only, 2..=256
    pub q: Option<u16>,
    pub tonal_budget: usize,
    pub block: usize,
}

impl EncoderConfig {
    fn validate(&self) -> Result<(Option<f64>, Quantizer)> {
        if self.lambda < 0.0 {
            return Err(Error::InvalidConfig("lambda must be nonnegative".into()));
        }
        if self.block == 0 {
            return Err(Error::InvalidConfig("block size must be at least 1".into()));
        }
        if self.op.is_inpainting() {
            let d = self.density.ok_or_else(|| {
                Error::InvalidConfig(format!("--density is required for {}", self.op.name()))
            })?;
            let q = self.q.ok_or_else(|| {
                Error::InvalidConfig(format!("--q is required for {}", self.op.name()))
            })?;
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidConfig(format!("density {d} outside (0, 1]")));
            }
            if !(2..=256).contains(&q) {
                return Err(Error::InvalidConfig(format!("q {q} outside [2, 256]")));
            }
            // the format carries d as fixed-point; encode with the value
            // the decoder will see so both sides build the same grid
            let d_fp = (d * DENSITY_FIXED_POINT).round();
            if d_fp < 1.0 {
                return Err(Error::InvalidConfig(format!("density {d} rounds to zero")));
            }
            Ok((Some(d_fp / DENSITY_FIXED_POINT), Quantizer::new(q)))
        } else {
            if self.density.is_some() || self.q.is_some() {
                return Err(Error::InvalidConfig(
                    "density/q only apply to inpainting operators".into(),
                ));
            }
            Ok((None, Quantizer::new(256)))
        }
    }
}

fn push_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn serialize_chains(chains: &ChainSet, out: &mut Vec<u8>) {
    for c in &chains.chains {
        push_u16(out, c.start.0);
        push_u16(out, c.start.1);
        out.push(c.dir.to_byte());
        push_u32(out, c.moves.len() as u32);
        out.extend(c.moves.iter().map(|m| m.to_byte()));
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::PayloadExhausted);
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }
}

fn parse_chains(r: &mut Reader, count: usize, width: usize, height: usize) -> Result<ChainSet> {
    let mut chains = Vec::with_capacity(count);
    for _ in 0..count {
        let cx = r.u16()?;
        let cy = r.u16()?;
        let dir = Direction::from_byte(r.u8()?).ok_or(Error::BodyLength)?;
        let n = r.u32()? as usize;
        let mut moves = Vec::with_capacity(n);
        for &b in r.take(n)? {
            moves.push(Move::from_byte(b).ok_or(Error::BodyLength)?);
        }
        chains.push(Chain { start: (cx, cy), dir, moves });
    }
    Ok(ChainSet { width, height, chains })
}

/// Encodes an image into container bytes.
pub fn encode(img: &Image, cfg: &EncoderConfig) -> Result<Vec<u8>> {
    let (density, quantizer) = cfg.validate()?;
    if img.width == 0 || img.height == 0 || img.width > u16::MAX as usize || img.height > u16::MAX as usize
    {
        return Err(Error::Oversized);
    }

    let grid = match density {
        Some(d) => Some(GridValues::new(img, d, quantizer)?),
        None => None,
    };
    let params = MergeParams {
        op: cfg.op,
        lambda: cfg.lambda,
        quantizer,
        grid: grid.clone(),
        block: cfg.block,
    };
    let seg = region_merge(img, &params)?;

    let regions = seg.region_count();
    if regions > img.pixels() / 4 {
        return Err(Error::DegenerateRate { regions, pixels: img.pixels() });
    }

    let chains = chaincode::encode_boundaries(&seg.labels, img.width, img.height);
    let mut body = Vec::new();
    serialize_chains(&chains, &mut body);

    for slot in seg.canonical_slots() {
        let pixels = &seg.region(slot).pixels;
        let region = RegionView::new(img.width, img.height, pixels);
        match cfg.op.poly_degree() {
            Some(deg) => {
                let (poly, _) = fit_polynomial(&region, img, deg);
                for &c in &poly.coeffs {
                    body.extend_from_slice(&(c as f32).to_be_bytes());
                }
            }
            None => {
                let grid = grid.as_ref().unwrap();
                let positions = grid.region_positions(pixels);
                if positions.is_empty() {
                    body.push(1);
                    body.push(fallback_index(&region, img, quantizer));
                } else {
                    body.push(0);
                    let res = mask::tonal_optimize(
                        cfg.op,
                        &region,
                        img,
                        &positions,
                        quantizer,
                        cfg.tonal_budget,
                        grid.density,
                    );
                    body.extend_from_slice(&res.indices);
                }
            }
        }
    }

    let compressed = entropy::entropy_encode(&body);
    let mut out = Vec::with_capacity(HEADER_LEN + compressed.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    push_u16(&mut out, img.width as u16);
    push_u16(&mut out, img.height as u16);
    out.push(cfg.op.to_byte());
    out.push(match quantizer.levels() {
        256 => 0,
        q => q as u8,
    });
    let d_fp = density.map_or(0u16, |d| (d * DENSITY_FIXED_POINT).round() as u16);
    push_u16(&mut out, d_fp);
    push_u32(&mut out, chains.chains.len() as u32);
    push_u32(&mut out, regions as u32);
    push_u32(&mut out, body.len() as u32);
    out.extend_from_slice(&compressed);
    Ok(out)
}

/// Decodes container bytes back into an image. Deterministic: identical
/// bytes always yield the identical image.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < HEADER_LEN {
        return Err(if bytes.len() < 4 || &bytes[..4] != MAGIC {
            Error::BadMagic
        } else {
            Error::BodyLength
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(Error::BadVersion(bytes[4]));
    }
    let mut r = Reader { data: bytes, pos: 5 };
    let width = r.u16()? as usize;
    let height = r.u16()? as usize;
    let op = OperatorId::from_byte(r.u8()?)
        .ok_or_else(|| Error::InvalidConfig("unknown operator id".into()))?;
    let q_byte = r.u8()?;
    let d_fp = r.u16()?;
    let chain_count = r.u32()? as usize;
    let region_count = r.u32()? as usize;
    let body_len = r.u32()? as usize;
    if width == 0 || height == 0 {
        return Err(Error::BodyLength);
    }

    let body = entropy::entropy_decode(&bytes[HEADER_LEN..], body_len)?;
    let mut br = Reader { data: &body, pos: 0 };
    let chains = parse_chains(&mut br, chain_count, width, height)?;
    let labels = chaincode::decode_boundaries(&chains, width, height)?;

    let nregions = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    if nregions != region_count {
        return Err(Error::BodyLength);
    }
    let mut region_pixels: Vec<Vec<u32>> = vec![Vec::new(); nregions];
    for (i, &l) in labels.iter().enumerate() {
        region_pixels[l as usize].push(i as u32);
    }

    if q_byte == 1 {
        return Err(Error::InvalidConfig("q byte 1 is not a valid level count".into()));
    }
    let quantizer = Quantizer::new(if q_byte == 0 { 256 } else { q_byte as u16 });
    let grid_flags = if op.is_inpainting() {
        if d_fp == 0 {
            return Err(Error::BodyLength);
        }
        let d = d_fp as f64 / DENSITY_FIXED_POINT;
        let positions = mask::build_grid_mask(width, height, d)?;
        let mut flags = vec![false; width * height];
        for p in positions {
            flags[p as usize] = true;
        }
        Some((flags, d))
    } else {
        None
    };

    let mut samples = vec![0.0f64; width * height];
    for pixels in &region_pixels {
        let region = RegionView::new(width, height, pixels);
        let values = match op.poly_degree() {
            Some(deg) => {
                let k = COEFF_COUNTS[deg as usize];
                let mut coeffs = Vec::with_capacity(k);
                for _ in 0..k {
                    coeffs.push(br.f32()? as f64);
                }
                let poly =
                    PolyCoefficients { degree: deg, coeffs, center: region.centroid() };
                eval_polynomial(&poly, &region)
            }
            None => {
                let (flags, d) = grid_flags.as_ref().unwrap();
                let flag = br.u8()?;
                if flag == 1 {
                    let idx = br.u8()?;
                    vec![quantizer.dequantize(idx); pixels.len()]
                } else if flag == 0 {
                    let positions: Vec<u32> = pixels
                        .iter()
                        .copied()
                        .filter(|&p| flags[p as usize])
                        .collect();
                    let idx_bytes = br.take(positions.len())?;
                    let mask = MaskData {
                        values: idx_bytes.iter().map(|&i| quantizer.dequantize(i)).collect(),
                        positions,
                        density: *d,
                    };
                    match op {
                        OperatorId::Shepard => shepard_reconstruct(&region, &mask),
                        OperatorId::Diffusion => {
                            let max_iter = 10 * pixels.len().max(1);
                            diffusion_reconstruct(&region, &mask, CG_DEFAULT_TOL, max_iter, None)
                                .values
                        }
                        _ => unreachable!(),
                    }
                } else {
                    return Err(Error::BodyLength);
                }
            }
        };
        for (&p, &v) in pixels.iter().zip(&values) {
            samples[p as usize] = v.clamp(0.0, 255.0);
        }
    }
    if br.pos != body.len() {
        return Err(Error::BodyLength);
    }
    Ok(Image::new(width, height, samples))
}

/// Re-runs the encoder's segmentation for a config; exposed so tests and
/// the sweep harness can audit region counts and energies.
pub fn segment_only(img: &Image, cfg: &EncoderConfig) -> Result<Segmentation> {
    let (density, quantizer) = cfg.validate()?;
    let grid = match density {
        Some(d) => Some(GridValues::new(img, d, quantizer)?),
        None => None,
    };
    let params = MergeParams {
        op: cfg.op,
        lambda: cfg.lambda,
        quantizer,
        grid,
        block: cfg.block,
    };
    region_merge(img, &params)
}
