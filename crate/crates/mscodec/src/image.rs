use crate::{Error, Result};

/// Grayscale raster with real-valued intensities in `[0, 255]`.
///
/// Intensities stay real internally; rounding happens only at PGM
/// output and quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub samples: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Self {
        assert_eq!(samples.len(), width * height, "sample count mismatch");
        Image { width, height, samples }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Image { width, height, samples: vec![value; width * height] }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }
}

/// PSNR outcome; identical images have no finite dB value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Lossless,
    Db(f64),
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let n = a.samples.len() as f64;
    let sum: f64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    Ok(sum / n)
}

pub fn psnr(a: &Image, b: &Image) -> Result<Psnr> {
    let m = mse(a, b)?;
    if m == 0.0 {
        Ok(Psnr::Lossless)
    } else {
        Ok(Psnr::Db(10.0 * (255.0 * 255.0 / m).log10()))
    }
}

/// Bits per pixel of a container, counting the whole stream including header.
pub fn bits_per_pixel(stream_length_bytes: usize, img: &Image) -> f64 {
    8.0 * stream_length_bytes as f64 / img.pixels() as f64
}
