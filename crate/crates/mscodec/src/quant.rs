//! Uniform gray-value quantization with `q` levels.

/// Quantizer over `[0, 255]` with `levels` in `[2, 256]`.
/// Levels 0 and `q-1` always map to 0 and 255.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantizer {
    levels: u16,
}

impl Quantizer {
    pub fn new(levels: u16) -> Self {
        assert!((2..=256).contains(&levels), "levels must be in [2, 256]");
        Quantizer { levels }
    }

    pub fn levels(&self) -> u16 {
        self.levels
    }

    pub fn quantize(&self, v: f64) -> u8 {
        let v = v.clamp(0.0, 255.0);
        let q = self.levels as f64;
        (v * (q - 1.0) / 255.0).round() as u8
    }

    pub fn dequantize(&self, i: u8) -> f64 {
        let q = self.levels as f64;
        let i = (i as f64).min(q - 1.0);
        (i * 255.0 / (q - 1.0)).round()
    }
}
