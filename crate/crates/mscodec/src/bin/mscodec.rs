//! Command-line front end: encode, decode, evaluate, synthesize test
//! images and run rate-distortion sweeps.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use mscodec::codec::{decode, encode, EncoderConfig};
use mscodec::image::{bits_per_pixel, psnr, Psnr};
use mscodec::operators::OperatorId;
use mscodec::pgm::{read_pgm, write_pgm};
use mscodec::sweep::{run_sweep, to_csv, to_svg, SweepGrid};
use mscodec::synth::{synthesize, SynthKind};
use mscodec::Error;

#[derive(Parser)]
#[command(name = "mscodec", about = "Segmentation-based codec for piecewise smooth images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a PGM image into a .msc container
    Encode(EncodeArgs),
    /// Decode a .msc container into a PGM image
    Decode {
        input: PathBuf,
        output: PathBuf,
    },
    /// Report bpp and PSNR for an original/decoded pair and its container
    Eval {
        original: PathBuf,
        decoded: PathBuf,
        container: PathBuf,
    },
    /// Generate a seeded synthetic test image
    Synth {
        /// steps | ramps | voronoi-smooth
        kind: String,
        width: usize,
        height: usize,
        seed: u64,
        output: PathBuf,
    },
    /// Rate-distortion grid search with CSV and SVG output
    Sweep(SweepArgs),
}

#[derive(Args)]
struct EncodeArgs {
    input: PathBuf,
    output: PathBuf,
    /// p0 | p1 | p2 | diffusion | shepard
    #[arg(long)]
    op: String,
    #[arg(long)]
    lambda: f64,
    /// mask density in (0,1] (inpainting operators only)
    #[arg(long)]
    density: Option<f64>,
    /// quantization levels in [2,256] (inpainting operators only)
    #[arg(long)]
    q: Option<u16>,
    /// initial block size for the merge loop
    #[arg(long, default_value_t = 1)]
    block: usize,
    /// maximum tonal-optimization sweeps per region
    #[arg(long, default_value_t = 5)]
    tonal_budget: usize,
}

#[derive(Args)]
struct SweepArgs {
    input: PathBuf,
    out_csv: PathBuf,
    out_svg: PathBuf,
    /// comma-separated operators
    #[arg(long, value_delimiter = ',', default_value = "p0,p1,p2,diffusion,shepard")]
    ops: Vec<String>,
    /// comma-separated lambda ladder
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    lambdas: Vec<f64>,
    /// comma-separated densities (inpainting operators)
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
    densities: Vec<f64>,
    /// comma-separated quantization levels (inpainting operators)
    #[arg(long, value_delimiter = ',', default_value = "32,64")]
    qs: Vec<u16>,
    #[arg(long, default_value_t = 1)]
    block: usize,
    #[arg(long, default_value_t = 3)]
    tonal_budget: usize,
}

// exit 2 for usage-level mistakes, 1 for pipeline failures
fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::InvalidConfig(_) => ExitCode::from(2),
        _ => ExitCode::FAILURE,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    exit_code_for(&e)
}

fn parse_op(s: &str) -> Result<OperatorId, Error> {
    OperatorId::parse(s).ok_or_else(|| Error::InvalidConfig(format!("unknown operator '{s}'")))
}

fn cmd_encode(args: &EncodeArgs) -> Result<(), Error> {
    let op = parse_op(&args.op)?;
    let img = read_pgm(&std::fs::read(&args.input)?)?;
    let cfg = EncoderConfig {
        op,
        lambda: args.lambda,
        density: args.density,
        q: args.q,
        tonal_budget: args.tonal_budget,
        block: args.block,
    };
    let t0 = Instant::now();
    let bytes = encode(&img, &cfg)?;
    let ms = t0.elapsed().as_millis();
    std::fs::write(&args.output, &bytes)?;
    println!("bpp={:.6} time_ms={ms}", bits_per_pixel(bytes.len(), &img));
    Ok(())
}

fn cmd_decode(input: &PathBuf, output: &PathBuf) -> Result<(), Error> {
    let img = decode(&std::fs::read(input)?)?;
    std::fs::write(output, write_pgm(&img))?;
    Ok(())
}

fn cmd_eval(original: &PathBuf, decoded: &PathBuf, container: &PathBuf) -> Result<(), Error> {
    let orig = read_pgm(&std::fs::read(original)?)?;
    let dec = read_pgm(&std::fs::read(decoded)?)?;
    let size = std::fs::metadata(container)?.len() as usize;
    let p = match psnr(&orig, &dec)? {
        Psnr::Lossless => "lossless".to_string(),
        Psnr::Db(v) => format!("{v:.4}"),
    };
    println!("bpp={:.6} psnr={p}", bits_per_pixel(size, &orig));
    Ok(())
}

fn cmd_synth(
    kind: &str,
    width: usize,
    height: usize,
    seed: u64,
    output: &PathBuf,
) -> Result<(), Error> {
    let kind = SynthKind::parse(kind)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown synth kind '{kind}'")))?;
    let img = synthesize(kind, width, height, seed)?;
    std::fs::write(output, write_pgm(&img))?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let img = read_pgm(&std::fs::read(&args.input)?)?;
    let ops = args
        .ops
        .iter()
        .map(|s| parse_op(s))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = SweepGrid {
        ops,
        lambdas: args.lambdas.clone(),
        densities: args.densities.clone(),
        qs: args.qs.clone(),
        block: args.block,
        tonal_budget: args.tonal_budget,
    };
    let rows = run_sweep(&img, &grid);
    std::fs::write(&args.out_csv, to_csv(&rows))?;
    std::fs::write(&args.out_svg, to_svg(&rows))?;
    let ok = rows.iter().filter(|r| r.status == "ok").count();
    println!("sweep: {}/{} grid points ok", ok, rows.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode { input, output } => cmd_decode(input, output),
        Command::Eval { original, decoded, container } => cmd_eval(original, decoded, container),
        Command::Synth { kind, width, height, seed, output } => {
            cmd_synth(kind, *width, *height, *seed, output)
        }
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
