//! Python bindings: encode/decode PGM bytes, quality metrics and the
//! synthetic image generators.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use mscodec::codec::{decode as msc_decode, encode as msc_encode, EncoderConfig};
use mscodec::image::{bits_per_pixel, psnr as img_psnr, Psnr};
use mscodec::operators::OperatorId;
use mscodec::pgm::{read_pgm, write_pgm};
use mscodec::synth::{synthesize, SynthKind};

fn err(e: mscodec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_op(op: &str) -> PyResult<OperatorId> {
    OperatorId::parse(op)
        .ok_or_else(|| PyValueError::new_err(format!("unknown operator {op:?}")))
}

/// Encode binary PGM bytes into a container.
#[pyfunction]
#[pyo3(signature = (pgm, op, lam, density=None, q=None, block=1, tonal_budget=5))]
#[allow(clippy::too_many_arguments)]
fn encode<'py>(
    py: Python<'py>,
    pgm: &[u8],
    op: &str,
    lam: f64,
    density: Option<f64>,
    q: Option<u16>,
    block: usize,
    tonal_budget: usize,
) -> PyResult<Bound<'py, PyBytes>> {
    let img = read_pgm(pgm).map_err(err)?;
    let cfg = EncoderConfig {
        op: parse_op(op)?,
        lambda: lam,
        density,
        q,
        tonal_budget,
        block,
    };
    let bytes = msc_encode(&img, &cfg).map_err(err)?;
    Ok(PyBytes::new_bound(py, &bytes))
}

/// Decode a container back to binary PGM bytes.
#[pyfunction]
fn decode<'py>(py: Python<'py>, container: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    let img = msc_decode(container).map_err(err)?;
    Ok(PyBytes::new_bound(py, &write_pgm(&img)))
}

/// PSNR in dB between two PGM images; None means identical (lossless).
#[pyfunction]
fn psnr(a: &[u8], b: &[u8]) -> PyResult<Option<f64>> {
    let ia = read_pgm(a).map_err(err)?;
    let ib = read_pgm(b).map_err(err)?;
    match img_psnr(&ia, &ib).map_err(err)? {
        Psnr::Lossless => Ok(None),
        Psnr::Db(v) => Ok(Some(v)),
    }
}

/// Bits per pixel of a container for the given PGM image.
#[pyfunction]
fn bpp(container_len: usize, pgm: &[u8]) -> PyResult<f64> {
    let img = read_pgm(pgm).map_err(err)?;
    Ok(bits_per_pixel(container_len, &img))
}

/// Seeded synthetic test image as PGM bytes.
/// kind is one of "steps", "ramps", "voronoi-smooth".
#[pyfunction]
fn synth<'py>(
    py: Python<'py>,
    kind: &str,
    width: usize,
    height: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyBytes>> {
    let k = SynthKind::parse(kind)
        .ok_or_else(|| PyValueError::new_err(format!("unknown synth kind {kind:?}")))?;
    let img = synthesize(k, width, height, seed).map_err(err)?;
    Ok(PyBytes::new_bound(py, &write_pgm(&img)))
}

#[pymodule]
fn mscodec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(bpp, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    Ok(())
}
