//! Lossy compression for piecewise smooth grayscale images.
//!
//! The codec segments an image by greedy region merging under a
//! boundary-length-penalized error energy, stores segment boundaries as
//! crack-edge chain codes, and reconstructs each segment independently
//! with a pluggable operator: bivariate polynomial approximation
//! (degrees 0-2), homogeneous diffusion inpainting, or Shepard
//! interpolation on a regular sparse grid.

pub mod chaincode;
pub mod codec;
pub mod entropy;
pub mod error;
pub mod image;
pub mod mask;
pub mod operators;
pub mod pgm;
pub mod quant;
pub mod segmentation;
pub mod sweep;
pub mod synth;

pub use error::Error;
pub use image::Image;
pub use quant::Quantizer;

pub type Result<T> = std::result::Result<T, Error>;
