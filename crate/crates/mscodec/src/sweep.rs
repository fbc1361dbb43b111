//! Rate-distortion grid search: encode/decode every grid point, collect
//! bpp and PSNR, and render CSV plus a minimal SVG line chart.

use std::time::Instant;

use crate::codec::{decode, encode, EncoderConfig};
use crate::image::{bits_per_pixel, psnr, Psnr};
use crate::operators::OperatorId;
use crate::Image;

#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub ops: Vec<OperatorId>,
    pub lambdas: Vec<f64>,
    pub densities: Vec<f64>,
    pub qs: Vec<u16>,
    pub block: usize,
    pub tonal_budget: usize,
}

impl SweepGrid {
    /// All grid points in declaration order. Polynomial operators do not
    /// take density/q, so they contribute one point per lambda.
    pub fn points(&self) -> Vec<EncoderConfig> {
        let mut out = Vec::new();
        for &op in &self.ops {
            for &lambda in &self.lambdas {
                if op.is_inpainting() {
                    for &density in &self.densities {
                        for &q in &self.qs {
                            out.push(EncoderConfig {
                                op,
                                lambda,
                                density: Some(density),
                                q: Some(q),
                                tonal_budget: self.tonal_budget,
                                block: self.block,
                            });
                        }
                    }
                } else {
                    out.push(EncoderConfig {
                        op,
                        lambda,
                        density: None,
                        q: None,
                        tonal_budget: self.tonal_budget,
                        block: self.block,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub op: OperatorId,
    pub lambda: f64,
    pub density: Option<f64>,
    pub q: Option<u16>,
    pub bpp: Option<f64>,
    pub psnr: Option<Psnr>,
    pub encode_ms: Option<u128>,
    pub decode_ms: Option<u128>,
    pub status: String,
}

pub fn run_sweep(img: &Image, grid: &SweepGrid) -> Vec<SweepRow> {
    grid.points()
        .iter()
        .map(|cfg| {
            let mut row = SweepRow {
                op: cfg.op,
                lambda: cfg.lambda,
                density: cfg.density,
                q: cfg.q,
                bpp: None,
                psnr: None,
                encode_ms: None,
                decode_ms: None,
                status: "ok".into(),
            };
            let t0 = Instant::now();
            let bytes = match encode(img, cfg) {
                Ok(b) => b,
                Err(e) => {
                    row.status = format!("encode-failed: {e}");
                    return row;
                }
            };
            row.encode_ms = Some(t0.elapsed().as_millis());
            row.bpp = Some(bits_per_pixel(bytes.len(), img));
            let t1 = Instant::now();
            match decode(&bytes) {
                Ok(out) => {
                    row.decode_ms = Some(t1.elapsed().as_millis());
                    row.psnr = Some(psnr(img, &out).expect("dimensions preserved"));
                }
                Err(e) => row.status = format!("decode-failed: {e}"),
            }
            row
        })
        .collect()
}

fn fmt_psnr(p: Option<Psnr>) -> String {
    match p {
        Some(Psnr::Lossless) => "lossless".into(),
        Some(Psnr::Db(v)) => format!("{v:.4}"),
        None => String::new(),
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("operator,lambda,density,q,bpp,psnr,encode_ms,decode_ms,status\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.op.name(),
            r.lambda,
            r.density.map_or(String::new(), |d| d.to_string()),
            r.q.map_or(String::new(), |q| q.to_string()),
            r.bpp.map_or(String::new(), |b| format!("{b:.6}")),
            fmt_psnr(r.psnr),
            r.encode_ms.map_or(String::new(), |t| t.to_string()),
            r.decode_ms.map_or(String::new(), |t| t.to_string()),
            r.status,
        ));
    }
    out
}

const PLOT_PSNR_CAP: f64 = 99.0;
const BPP_BUCKET: f64 = 0.01;

/// Per-operator upper envelope: best PSNR within each bpp bucket, made
/// nondecreasing by a running maximum over increasing bpp.
pub fn envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    use std::collections::BTreeMap;
    let mut buckets: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for &(bpp, ps) in points {
        let key = (bpp / BPP_BUCKET).floor() as i64;
        let e = buckets.entry(key).or_insert((bpp, ps));
        if ps > e.1 {
            *e = (bpp, ps);
        }
    }
    let mut best = f64::NEG_INFINITY;
    buckets
        .into_values()
        .map(|(bpp, ps)| {
            best = best.max(ps);
            (bpp, best)
        })
        .collect()
}

fn op_points(rows: &[SweepRow], op: OperatorId) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.op == op && r.status == "ok")
        .filter_map(|r| {
            let bpp = r.bpp?;
            let ps = match r.psnr? {
                Psnr::Lossless => PLOT_PSNR_CAP,
                Psnr::Db(v) => v.min(PLOT_PSNR_CAP),
            };
            Some((bpp, ps))
        })
        .collect()
}

const SVG_COLORS: [&str; 5] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"];

/// Minimal SVG 1.1 line chart: one PSNR-vs-bpp envelope polyline per operator.
pub fn to_svg(rows: &[SweepRow]) -> String {
    let (w, h, ml, mb, mt, mr) = (640.0, 480.0, 60.0, 50.0, 20.0, 150.0);
    let mut series: Vec<(OperatorId, Vec<(f64, f64)>)> = Vec::new();
    for op in OperatorId::ALL {
        let env = envelope(&op_points(rows, op));
        if !env.is_empty() {
            series.push((op, env));
        }
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, e)| e.iter().copied()).collect();
    let (x0, x1) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(x, _)| (a.min(x), b.max(x)));
    let (y0, y1) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, y)| (a.min(y), b.max(y)));
    let (x0, x1) = if all.is_empty() { (0.0, 1.0) } else { (x0, (x1).max(x0 + 1e-9)) };
    let (y0, y1) = if all.is_empty() { (0.0, 1.0) } else { (y0 - 1.0, y1 + 1.0) };

    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| (h - mb) - (y - y0) / (y1 - y0) * (h - mb - mt);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"13\">bits per pixel</text>\n\
         <text x=\"14\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 14 {})\">PSNR [dB]</text>\n",
        h - mb,
        w - mr,
        h - mb,
        h - mb,
        (w - mr + ml) / 2.0 - 40.0,
        h - 12.0,
        h / 2.0,
        h / 2.0,
    );
    for (i, (op, env)) in series.iter().enumerate() {
        let color = SVG_COLORS[i % SVG_COLORS.len()];
        let pts: Vec<String> =
            env.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        let ly = mt + 18.0 * i as f64 + 10.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"13\">{}</text>\n",
            w - mr + 10.0,
            w - mr + 34.0,
            w - mr + 40.0,
            ly + 4.0,
            op.name(),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
