use mscodec::mask::GridValues;
use mscodec::operators::{shepard_reconstruct, MaskData, RegionView};
use mscodec::{Image, Quantizer};

fn main() {
    let w = 128usize;
    let h = 128usize;
    // plain ramp: no discontinuities at all
    let samples: Vec<f64> = (0..w * h)
        .map(|i| (((i % w) as f64) * 1.2 + ((i / w) as f64) * 0.4 + 10.0).clamp(0.0, 255.0))
        .collect();
    let f = Image { width: w, height: h, samples };
    let pixels: Vec<u32> = (0..(w * h) as u32).collect();
    let region = RegionView::new(w, h, &pixels);
    for (d, qq) in [(0.05, 256u16), (0.1, 256), (0.1, 32)] {
        let q = Quantizer::new(qq);
        let grid = GridValues::new(&f, d, q).unwrap();
        let positions = grid.region_positions(&pixels);
        println!("d={d} mask pixels = {} (expect ~{})", positions.len(), (d * (w * h) as f64) as usize);
        let values: Vec<f64> = positions.iter().map(|&p| grid.values[p as usize]).collect();
        let mask = MaskData { positions, values, density: d };
        let recon = shepard_reconstruct(&region, &mask);
        let mse: f64 = recon
            .iter()
            .zip(&f.samples)
            .map(|(&r, &o)| (r - o) * (r - o))
            .sum::<f64>()
            / (w * h) as f64;
        println!("  linear image, q={qq}: rmse={:.3}", mse.sqrt());
    }
}
