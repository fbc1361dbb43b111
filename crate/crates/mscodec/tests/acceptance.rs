//! Acceptance gate: one test per shipping criterion, each printing a
//! single PASS line (run with `--nocapture` to see them). Tolerances are
//! pinned in the constants next to each test.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use mscodec::chaincode::{canonicalize, decode_boundaries, encode_boundaries};
use mscodec::codec::{decode, encode, segment_only, EncoderConfig};
use mscodec::entropy::{entropy_decode, entropy_encode};
use mscodec::image::{bits_per_pixel, psnr, Psnr};
use mscodec::mask::{build_grid_mask, tonal_optimize, GridValues};
use mscodec::operators::{
    diffusion_reconstruct, fit_polynomial, region_sse, shepard_reconstruct, Known, MaskData,
    OperatorId, RegionView, CG_DEFAULT_TOL, COEFF_COUNTS,
};
use mscodec::pgm::{read_pgm, write_pgm};
use mscodec::segmentation::{boundary_length, region_merge, MergeParams};
use mscodec::sweep::{run_sweep, SweepGrid};
use mscodec::synth::{synthesize, SynthKind};
use mscodec::{Image, Quantizer};

const ALL_OPS: [OperatorId; 5] = [
    OperatorId::P0,
    OperatorId::P1,
    OperatorId::P2,
    OperatorId::Diffusion,
    OperatorId::Shepard,
];

fn noise_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..width * height).map(|_| rng.gen_range(0u32..=255) as f64).collect();
    Image { width, height, samples }
}

fn merge_params(op: OperatorId, lambda: f64, f: &Image) -> MergeParams {
    let q = Quantizer::new(16);
    let grid = if op.is_inpainting() {
        Some(GridValues::new(f, 0.25, q).unwrap())
    } else {
        None
    };
    MergeParams { op, lambda, quantizer: q, grid, block: 1 }
}

/// Criterion 1: on random images, every merge the greedy pass accepts
/// strictly decreases the discrete segmentation energy.
#[test]
fn energy_monotonicity() {
    let lambda = 10_000.0;
    let mut merges_checked = 0usize;
    for seed in 0..20 {
        let f = noise_image(16, 16, 1000 + seed);
        for op in ALL_OPS {
            let params = merge_params(op, lambda, &f);
            let seg = region_merge(&f, &params).unwrap();
            assert!(!seg.trace.is_empty(), "{}: no merges accepted on seed {seed}", op.name());
            for ev in &seg.trace {
                let delta = ev.sse_increase - lambda * ev.boundary_len as f64;
                assert!(
                    delta < 0.0,
                    "{}: merge raised energy by {delta} (seed {seed})",
                    op.name()
                );
                assert!(ev.gain < lambda);
            }
            merges_checked += seg.trace.len();
        }
    }
    println!("PASS energy monotonicity: {merges_checked} accepted merges, all strict decreases");
}

fn scratch_energy(
    labels: &[u32],
    f: &Image,
    params: &MergeParams,
) -> f64 {
    let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i as u32);
    }
    let sse: f64 = groups.values().map(|px| pixels_sse(px, f, params)).sum();
    let (len, _) = boundary_length(labels, f.width, f.height);
    sse + params.lambda * len as f64
}

fn pixels_sse(pixels: &[u32], f: &Image, params: &MergeParams) -> f64 {
    let region = RegionView::new(f.width, f.height, pixels);
    match params.op.poly_degree() {
        Some(deg) => region_sse(params.op, &region, f, &Known::Degree(deg), params.quantizer),
        None => {
            let grid = params.grid.as_ref().unwrap();
            let positions = grid.region_positions(pixels);
            let values = positions.iter().map(|&p| grid.values[p as usize]).collect();
            let mask = MaskData { positions, values, density: grid.density };
            region_sse(params.op, &region, f, &Known::Mask(&mask), params.quantizer)
        }
    }
}

/// Criterion 2: the local merge gain equals the global energy difference
/// of the full functional, recomputed from scratch, to 1e-9 relative.
#[test]
fn localization_equivalence() {
    const REL_TOL: f64 = 1e-9;
    let lambda = 800.0;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut pairs_checked = 0usize;
    for op in ALL_OPS {
        let mut per_op = 0usize;
        let mut seed = 0u64;
        while per_op < 100 {
            let f = noise_image(10, 10, 5000 + seed);
            seed += 1;
            let params = merge_params(op, lambda, &f);
            let seg = region_merge(&f, &params).unwrap();
            let pairs: Vec<(u32, u32)> = seg.adjacent_pairs().map(|(&p, _)| p).collect();
            if pairs.is_empty() {
                continue;
            }
            for _ in 0..4.min(pairs.len()) {
                let &(a, b) = pairs.choose(&mut rng).unwrap();
                let len = seg.joint_boundary_len(a, b).unwrap() as f64;

                // local form: lambda*len minus the sse increase of the union
                let ra = seg.region(a);
                let rb = seg.region(b);
                let mut union = ra.pixels.clone();
                union.extend_from_slice(&rb.pixels);
                union.sort_unstable();
                let sse_union = pixels_sse(&union, &f, &params);
                let local = lambda * len - (sse_union - ra.sse - rb.sse);

                // global form: energy before minus energy after, from scratch
                let before = scratch_energy(&seg.labels, &f, &params);
                let merged: Vec<u32> =
                    seg.labels.iter().map(|&l| if l == b { a } else { l }).collect();
                let after = scratch_energy(&merged, &f, &params);
                let global = before - after;

                let err = (global - local).abs();
                assert!(
                    err <= REL_TOL * global.abs().max(1.0),
                    "{}: local {local} vs global {global} (err {err})",
                    op.name()
                );
                per_op += 1;
            }
        }
        pairs_checked += per_op;
    }
    println!(
        "PASS localization equivalence: {pairs_checked} adjacent pairs match to 1e-9 relative"
    );
}

/// Connected random partition: multi-source BFS from k random seeds.
fn random_partition(width: usize, height: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let n = width * height;
    let mut labels = vec![u32::MAX; n];
    let mut queue: Vec<usize> = Vec::new();
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.shuffle(rng);
    for (lab, &s) in seeds.iter().take(k).enumerate() {
        labels[s] = lab as u32;
        queue.push(s);
    }
    let mut head = 0;
    while head < queue.len() {
        // random pick among the frontier keeps region shapes irregular
        let j = rng.gen_range(head..queue.len());
        queue.swap(head, j);
        let p = queue[head];
        head += 1;
        let (x, y) = (p % width, p / width);
        let mut push = |q: usize| {
            if labels[q] == u32::MAX {
                labels[q] = labels[p];
                queue.push(q);
            }
        };
        if x > 0 {
            push(p - 1);
        }
        if x + 1 < width {
            push(p + 1);
        }
        if y > 0 {
            push(p - width);
        }
        if y + 1 < height {
            push(p + width);
        }
    }
    labels
}

/// Criterion 3: chain-code round trip over random partitions, including
/// exact conservation of the crack-edge count.
#[test]
fn chaincode_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..200 {
        let width = rng.gen_range(1..=64);
        let height = rng.gen_range(1..=64);
        let k = rng.gen_range(1..=(width * height).min(40));
        let labels = random_partition(width, height, k, &mut rng);
        let canon = canonicalize(&labels);

        let chains = encode_boundaries(&labels, width, height);
        let (expected_edges, _) = boundary_length(&labels, width, height);
        assert_eq!(
            chains.total_edges() as u64,
            expected_edges,
            "case {case}: traversed edges != boundary length"
        );
        let decoded = decode_boundaries(&chains, width, height).unwrap();
        assert_eq!(decoded, canon, "case {case}: partition not recovered");
    }
    println!("PASS chain-code round trip: 200 random partitions recovered, edge counts exact");
}

/// Criterion 4: the range coder round-trips randomized payloads of every
/// size class up to 64 KiB.
#[test]
fn entropy_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for case in 0..1000 {
        let len = match case % 4 {
            0 => rng.gen_range(0..64),
            1 => rng.gen_range(64..4096),
            2 => rng.gen_range(4096..65536),
            _ => rng.gen_range(0..65536),
        };
        let data: Vec<u8> = match case % 3 {
            // uniform random
            0 => (0..len).map(|_| rng.gen()).collect(),
            // low-entropy: few symbols
            1 => (0..len).map(|_| [0u8, 7, 255][rng.gen_range(0..3)]).collect(),
            // runs
            _ => {
                let mut v = Vec::with_capacity(len);
                while v.len() < len {
                    let b: u8 = rng.gen();
                    let run = rng.gen_range(1..=32).min(len - v.len());
                    v.extend(std::iter::repeat(b).take(run));
                }
                v
            }
        };
        let coded = entropy_encode(&data);
        let back = entropy_decode(&coded, data.len()).unwrap();
        assert_eq!(back, data, "case {case} (len {len})");
    }
    println!("PASS entropy round trip: 1000 randomized streams up to 64 KiB");
}

/// Criterion 5: a constant image at q=256 comes back bit-exact under
/// every operator, and repeated encodes/decodes are byte-stable.
#[test]
fn constant_image_lossless_and_deterministic() {
    let f = Image { width: 16, height: 16, samples: vec![137.0; 256] };
    let original_pgm = write_pgm(&f);
    for op in ALL_OPS {
        let cfg = EncoderConfig {
            op,
            lambda: 1.0,
            density: if op.is_inpainting() { Some(0.1) } else { None },
            q: if op.is_inpainting() { Some(256) } else { None },
            tonal_budget: 5,
            block: 1,
        };
        let bytes = encode(&f, &cfg).unwrap();
        assert_eq!(bytes, encode(&f, &cfg).unwrap(), "{}: encode not stable", op.name());
        let g = decode(&bytes).unwrap();
        let g2 = decode(&bytes).unwrap();
        assert_eq!(write_pgm(&g), write_pgm(&g2), "{}: decode not stable", op.name());
        assert_eq!(write_pgm(&g), original_pgm, "{}: constant image not bit-exact", op.name());
        // losslessness is judged on the 8-bit output domain
        let g8 = read_pgm(&write_pgm(&g)).unwrap();
        assert!(matches!(psnr(&f, &g8).unwrap(), Psnr::Lossless));
    }
    println!("PASS determinism/losslessness: constant image bit-exact under all 5 operators");
}

/// Independent dense solve of the least-squares normal equations:
/// Gaussian elimination with partial pivoting, built from explicitly
/// enumerated monomials.
fn oracle_fit(pixels: &[u32], f: &Image, width: usize, degree: usize) -> (Vec<f64>, f64) {
    let k = COEFF_COUNTS[degree];
    let n = pixels.len();
    let cx = pixels.iter().map(|&p| (p as usize % width) as f64).sum::<f64>() / n as f64;
    let cy = pixels.iter().map(|&p| (p as usize / width) as f64).sum::<f64>() / n as f64;
    let basis = |p: u32| {
        let dx = (p as usize % width) as f64 - cx;
        let dy = (p as usize / width) as f64 - cy;
        [1.0, dx, dy, dx * dx, dx * dy, dy * dy]
    };
    let mut a = vec![0.0f64; k * k];
    let mut b = vec![0.0f64; k];
    for &p in pixels {
        let m = basis(p);
        let fv = f.samples[p as usize];
        for i in 0..k {
            for j in 0..k {
                a[i * k + j] += m[i] * m[j];
            }
            b[i] += m[i] * fv;
        }
    }
    // Gaussian elimination with partial pivoting
    let mut aug: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = a[i * k..(i + 1) * k].to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| aug[r][col].abs().total_cmp(&aug[s][col].abs())).unwrap();
        aug.swap(col, piv);
        let pv = aug[col][col];
        assert!(pv.abs() > 1e-9, "oracle system is singular");
        for r in 0..k {
            if r != col {
                let factor = aug[r][col] / pv;
                for c in col..=k {
                    aug[r][c] -= factor * aug[col][c];
                }
            }
        }
    }
    let coeffs: Vec<f64> = (0..k).map(|i| aug[i][k] / aug[i][i]).collect();
    let sse = pixels
        .iter()
        .map(|&p| {
            let m = basis(p);
            let u: f64 = (0..k).map(|i| coeffs[i] * m[i]).sum();
            let d = u - f.samples[p as usize];
            d * d
        })
        .sum();
    (coeffs, sse)
}

/// Criterion 6: polynomial fits agree with an independent dense solver
/// (coefficients to 1e-6, sse to 1e-9, both relative).
#[test]
fn polynomial_fit_oracle() {
    const COEFF_TOL: f64 = 1e-6;
    const SSE_TOL: f64 = 1e-9;
    let width = 32usize;
    let height = 32usize;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for degree in 0..=2u8 {
        for case in 0..100 {
            let f = noise_image(width, height, 9000 + case);
            let rw = rng.gen_range(3..=8);
            let rh = rng.gen_range(3..=8);
            let x0 = rng.gen_range(0..=width - rw);
            let y0 = rng.gen_range(0..=height - rh);
            let pixels: Vec<u32> = (y0..y0 + rh)
                .flat_map(|y| (x0..x0 + rw).map(move |x| (y * width + x) as u32))
                .collect();

            let region = RegionView::new(width, height, &pixels);
            let (fit, sse) = fit_polynomial(&region, &f, degree);
            assert_eq!(fit.degree, degree, "rectangles must be full rank");
            let (oracle_coeffs, oracle_sse) = oracle_fit(&pixels, &f, width, degree as usize);

            for (i, (&c, &o)) in fit.coeffs.iter().zip(&oracle_coeffs).enumerate() {
                assert!(
                    (c - o).abs() <= COEFF_TOL * o.abs().max(1.0),
                    "degree {degree} case {case}: coeff {i}: {c} vs oracle {o}"
                );
            }
            assert!(
                (sse - oracle_sse).abs() <= SSE_TOL * oracle_sse.max(1.0),
                "degree {degree} case {case}: sse {sse} vs oracle {oracle_sse}"
            );
        }
    }
    println!("PASS polynomial oracle: 300 fits match an independent dense solver");
}

/// Criterion 7: on a piecewise smooth test image, the best inpainting
/// operator beats the best polynomial operator by at least 3 dB at
/// matched bitrates inside the shared bpp window of a sweep.
#[test]
fn inpainting_beats_polynomials() {
    let start = Instant::now();
    let f = synthesize(SynthKind::VoronoiSmooth, 128, 128, 11).unwrap();
    let grid = SweepGrid {
        ops: vec![OperatorId::Shepard, OperatorId::P0, OperatorId::P1, OperatorId::P2],
        lambdas: vec![300.0, 3_000.0, 30_000.0],
        densities: vec![0.05, 0.10],
        qs: vec![64],
        block: 4,
        tonal_budget: 1,
    };
    let rows = run_sweep(&f, &grid);
    let mut inpaint: Vec<(f64, f64)> = Vec::new();
    let mut poly: Vec<(f64, f64)> = Vec::new();
    for row in &rows {
        assert_eq!(row.status, "ok", "{} lambda {} failed: {}", row.op.name(), row.lambda, row.status);
        let db = match row.psnr.unwrap() {
            Psnr::Lossless => f64::INFINITY,
            Psnr::Db(v) => v,
        };
        let pt = (row.bpp.unwrap(), db);
        if row.op.is_inpainting() {
            inpaint.push(pt);
        } else {
            poly.push(pt);
        }
    }
    // shared window: intersection of the two classes' bpp ranges
    let range = |pts: &[(f64, f64)]| {
        let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (ilo, ihi) = range(&inpaint);
    let (plo, phi) = range(&poly);
    let (lo, hi) = (ilo.max(plo), ihi.min(phi));
    assert!(lo <= hi, "bpp windows do not overlap: inpainting [{ilo}, {ihi}] poly [{plo}, {phi}]");
    let best = |pts: &[(f64, f64)]| {
        pts.iter()
            .filter(|p| p.0 >= lo && p.0 <= hi)
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let best_inpaint = best(&inpaint);
    let best_poly = best(&poly);
    assert!(best_inpaint.is_finite() && best_poly.is_finite(), "no points in shared window");
    assert!(
        best_inpaint >= best_poly + 3.0,
        "inpainting {best_inpaint:.2} dB vs polynomial {best_poly:.2} dB in [{lo:.3}, {hi:.3}] bpp"
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 600.0, "sweep took {secs:.0}s, budget is 600s");
    println!(
        "PASS operator ordering: inpainting {best_inpaint:.2} dB vs polynomial {best_poly:.2} dB \
         in shared window [{lo:.3}, {hi:.3}] bpp ({secs:.0}s)"
    );
}

/// Criterion 8: full-image Shepard reconstruction at d=0.05 runs at
/// least twice as fast as the diffusion solve at its default tolerance.
#[test]
fn shepard_faster_than_diffusion() {
    let width = 256usize;
    let height = 256usize;
    let f = synthesize(SynthKind::VoronoiSmooth, width, height, 3).unwrap();
    let pixels: Vec<u32> = (0..(width * height) as u32).collect();
    let region = RegionView::new(width, height, &pixels);
    let q = Quantizer::new(256);
    let positions = build_grid_mask(width, height, 0.05).unwrap();
    let values: Vec<f64> = positions
        .iter()
        .map(|&p| q.dequantize(q.quantize(f.samples[p as usize])))
        .collect();
    let mask = MaskData { positions, values, density: 0.05 };

    let t0 = Instant::now();
    let shepard = shepard_reconstruct(&region, &mask);
    let shepard_time = t0.elapsed();

    let t1 = Instant::now();
    let diff = diffusion_reconstruct(&region, &mask, CG_DEFAULT_TOL, 10 * pixels.len(), None);
    let diffusion_time = t1.elapsed();

    assert!(diff.converged, "diffusion solve did not converge");
    assert_eq!(shepard.len(), diff.values.len());
    assert!(
        shepard_time * 2 <= diffusion_time,
        "shepard {shepard_time:?} not 2x faster than diffusion {diffusion_time:?}"
    );
    println!(
        "PASS speed ordering: shepard {:.1} ms vs diffusion {:.1} ms on 256x256 at d=0.05",
        shepard_time.as_secs_f64() * 1e3,
        diffusion_time.as_secs_f64() * 1e3
    );
}

/// Criterion 9: region count is nonincreasing in lambda over a 6-point
/// log ladder, per synthetic image and operator.
#[test]
fn granularity_monotone_in_lambda() {
    let ladder = [1.0, 10.0, 100.0, 1_000.0, 10_000.0, 100_000.0];
    for kind in [SynthKind::Steps, SynthKind::Ramps, SynthKind::VoronoiSmooth] {
        let f = synthesize(kind, 24, 24, 7).unwrap();
        for op in ALL_OPS {
            let mut prev = usize::MAX;
            for &lambda in &ladder {
                let params = merge_params(op, lambda, &f);
                let seg = region_merge(&f, &params).unwrap();
                let count = seg.region_count();
                assert!(
                    count <= prev,
                    "{} {}: {count} regions at lambda {lambda}, {prev} at the previous rung",
                    kind.name(),
                    op.name()
                );
                prev = count;
            }
        }
    }
    println!("PASS granularity: region count nonincreasing in lambda (3 images x 5 operators)");
}

/// Criterion 10: tonal optimization never worsens the region sse, and
/// the reported final sse matches an independent recomputation.
#[test]
fn tonal_optimization_soundness() {
    const REL_TOL: f64 = 1e-6;
    let q = Quantizer::new(32);
    let density = 0.1;
    let mut regions_checked = 0usize;
    for kind in [SynthKind::Steps, SynthKind::Ramps, SynthKind::VoronoiSmooth] {
        let f = synthesize(kind, 32, 32, 21).unwrap();
        for op in [OperatorId::Diffusion, OperatorId::Shepard] {
            let cfg = EncoderConfig {
                op,
                lambda: 2_000.0,
                density: Some(density),
                q: Some(32),
                tonal_budget: 3,
                block: 1,
            };
            let seg = segment_only(&f, &cfg).unwrap();
            let grid = GridValues::new(&f, density, q).unwrap();
            for slot in seg.canonical_slots() {
                let pixels = &seg.region(slot).pixels;
                let mut sorted = pixels.clone();
                sorted.sort_unstable();
                let positions = grid.region_positions(&sorted);
                if positions.is_empty() {
                    continue;
                }
                let region = RegionView::new(f.width, f.height, &sorted);
                let res = tonal_optimize(op, &region, &f, &positions, q, 3, density);
                assert!(
                    res.final_sse <= res.initial_sse + REL_TOL * res.initial_sse.max(1.0),
                    "{} {}: tonal pass worsened sse ({} -> {})",
                    kind.name(),
                    op.name(),
                    res.initial_sse,
                    res.final_sse
                );
                // independent recomputation from the returned indices
                let values: Vec<f64> = res.indices.iter().map(|&i| q.dequantize(i)).collect();
                let mask = MaskData { positions, values, density };
                let recomputed = region_sse(op, &region, &f, &Known::Mask(&mask), q);
                assert!(
                    (recomputed - res.final_sse).abs() <= REL_TOL * recomputed.max(1.0),
                    "{} {}: reported sse {} vs recomputed {}",
                    kind.name(),
                    op.name(),
                    res.final_sse,
                    recomputed
                );
                regions_checked += 1;
            }
        }
    }
    assert!(regions_checked > 0);
    println!("PASS tonal soundness: {regions_checked} regions, final sse <= initial and verified");
}

/// Criterion 11: reconstructions respect the maximum principle. Shepard
/// values are convex combinations of mask values (exact up to float
/// round-off); diffusion values stay inside the mask range within
/// 10x the solver tolerance.
#[test]
fn maximum_principles() {
    const SHEPARD_EPS: f64 = 1e-12;
    let diffusion_eps = 10.0 * CG_DEFAULT_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(1717);
    let width = 48usize;
    let height = 48usize;
    for case in 0..50 {
        let f = noise_image(width, height, 12_000 + case);
        // one random connected region out of a coarse random partition
        let labels = random_partition(width, height, rng.gen_range(2..8), &mut rng);
        let target = labels[rng.gen_range(0..labels.len())];
        let mut pixels: Vec<u32> = (0..labels.len() as u32)
            .filter(|&p| labels[p as usize] == target)
            .collect();
        pixels.sort_unstable();
        let region = RegionView::new(width, height, &pixels);

        let density = [0.05, 0.1, 0.25][case as usize % 3];
        let grid = build_grid_mask(width, height, density).unwrap();
        let q = Quantizer::new(64);
        let positions: Vec<u32> = {
            let in_region: std::collections::HashSet<u32> = pixels.iter().copied().collect();
            grid.into_iter().filter(|p| in_region.contains(p)).collect()
        };
        if positions.is_empty() {
            continue;
        }
        let values: Vec<f64> = positions
            .iter()
            .map(|&p| q.dequantize(q.quantize(f.samples[p as usize])))
            .collect();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mask = MaskData { positions, values, density };

        for v in shepard_reconstruct(&region, &mask) {
            assert!(
                v >= lo - SHEPARD_EPS && v <= hi + SHEPARD_EPS,
                "case {case}: shepard value {v} outside [{lo}, {hi}]"
            );
        }
        let diff = diffusion_reconstruct(&region, &mask, CG_DEFAULT_TOL, 10 * pixels.len(), None);
        assert!(diff.converged, "case {case}: diffusion did not converge");
        for v in diff.values {
            assert!(
                v >= lo - diffusion_eps && v <= hi + diffusion_eps,
                "case {case}: diffusion value {v} outside [{lo}, {hi}] by more than {diffusion_eps}"
            );
        }
    }
    println!("PASS maximum principles: 50 random regions, shepard exact, diffusion within 1e-5");
}

/// Sanity companion to the gate: a full encode/decode of each synthetic
/// image produces a parseable container with consistent bpp accounting.
#[test]
fn end_to_end_synthetic_images() {
    for kind in [SynthKind::Steps, SynthKind::Ramps, SynthKind::VoronoiSmooth] {
        let f = synthesize(kind, 48, 48, 2).unwrap();
        let cfg = EncoderConfig {
            op: OperatorId::Shepard,
            lambda: 5_000.0,
            density: Some(0.1),
            q: Some(64),
            tonal_budget: 2,
            block: 1,
        };
        let bytes = encode(&f, &cfg).unwrap();
        let g = decode(&bytes).unwrap();
        assert_eq!((g.width, g.height), (f.width, f.height));
        let bpp = bits_per_pixel(bytes.len(), &f);
        assert!(bpp > 0.0 && bpp < 8.0, "{}: bpp {bpp} out of range", kind.name());
        if let Psnr::Db(db) = psnr(&f, &g).unwrap() {
            assert!(db > 15.0, "{}: psnr {db:.2} dB unreasonably low", kind.name());
        }
    }
    println!("PASS end-to-end: synthetic images round-trip through the container");
}
