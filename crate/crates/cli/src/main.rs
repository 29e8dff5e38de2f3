//! `digiangle`: digitized angle shapes from the command line.
//!
//! Exit status is 0 on success, 1 on a domain error (parallel slopes, a
//! pixel-center hit, a failed verification) and 2 on a usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use digiangle::numerics::gcd;
use digiangle::render::{render_partition, render_pixelset, Format, RenderOptions};
use digiangle::shapes::{default_window, spec_shape, ShapeClass};
use digiangle::{
    class_index, digitize_segment, enumerate_shapes, partition_unit_square, region_params,
    sample_class_frequencies, theorem_sweep, trace_region_boundary, AngleSpec, GridPath, Point,
    Rational, Slopes,
};

/// Environment variable naming the directory for relative `--out` paths.
const OUT_DIR_ENV: &str = "DIGIANGLE_OUT_DIR";

#[derive(Parser)]
#[command(name = "digiangle", version, about = "Shapes of digitized angles on the pixel grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digitize a segment (--from/--to) or the boundary of an angle.
    Digitize(DigitizeArgs),
    /// Class index of the angle at a corner point.
    Classify(ClassifyArgs),
    /// List every shape class of a slope pair.
    Enumerate(EnumerateArgs),
    /// The partition of the unit square of corner positions.
    Partition(PartitionArgs),
    /// Monte Carlo uniformity check of the class frequencies.
    Verify(VerifyArgs),
    /// Exhaustive check of class counts and cell areas over small slopes.
    Sweep(SweepArgs),
    /// Draw one shape class.
    Render(RenderArgs),
}

#[derive(Args)]
struct Common {
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// ascii, pbm, svg or json (not every command takes every format).
    #[arg(long, default_value = "ascii", value_parser = parse_format)]
    format: Format,
}

#[derive(Args)]
struct SlopeArgs {
    /// First slope as a/b; signs are kept where written, e.g. 3/-1.
    #[arg(long, value_parser = parse_slope, allow_hyphen_values = true)]
    slope1: (i64, i64),
    /// Second slope as c/d.
    #[arg(long, value_parser = parse_slope, allow_hyphen_values = true)]
    slope2: (i64, i64),
}

impl SlopeArgs {
    fn slopes(&self) -> Result<Slopes> {
        let ((a, b), (c, d)) = (self.slope1, self.slope2);
        Ok(Slopes::new(a, b, c, d)?)
    }
}

#[derive(Args)]
struct DigitizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_slope, allow_hyphen_values = true, requires = "slope2")]
    slope1: Option<(i64, i64)>,
    #[arg(long, value_parser = parse_slope, allow_hyphen_values = true, requires = "slope1")]
    slope2: Option<(i64, i64)>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    corner: Option<Point>,
    #[arg(long, default_value_t = 4)]
    window: i64,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "to")]
    from: Option<Point>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "from")]
    to: Option<Point>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    slopes: SlopeArgs,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    corner: Point,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    slopes: SlopeArgs,
    #[arg(long)]
    window: Option<i64>,
    /// Prefix for class labels.
    #[arg(long, default_value = "P")]
    label: String,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    slopes: SlopeArgs,
    #[arg(long, default_value_t = 4)]
    scale: u32,
    #[arg(long, default_value = "P")]
    label: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    slopes: SlopeArgs,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 4)]
    max_entry: i64,
    #[arg(long, default_value_t = 12)]
    max_classes: i64,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    slopes: SlopeArgs,
    /// Class index to draw.
    #[arg(long, conflicts_with = "corner")]
    index: Option<i64>,
    /// Draw the shape produced by this corner instead.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    corner: Option<Point>,
    #[arg(long)]
    window: Option<i64>,
    #[arg(long, default_value_t = 8)]
    scale: u32,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

/// `a/b` with signs kept in place and common factors removed.
fn parse_slope(s: &str) -> Result<(i64, i64), String> {
    let int = |t: &str| {
        let t = t.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(t);
        t.trim().parse::<i64>().map_err(|_| format!("bad slope {s:?}"))
    };
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (int(p)?, int(q)?),
        None => {
            let r: Rational = s.parse().map_err(|_| format!("bad slope {s:?}"))?;
            let narrow = |v: i128| i64::try_from(v).map_err(|_| format!("slope {s:?} too large"));
            (narrow(r.numer())?, narrow(r.denom())?)
        }
    };
    let g = gcd(p, q);
    if g == 0 {
        return Err(format!("slope {s:?} is 0/0"));
    }
    Ok((p / g, q / g))
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y but got {s:?}"))?;
    let coord = |t: &str| t.parse::<Rational>().map_err(|e| e.to_string());
    Ok(Point::new(coord(x)?, coord(y)?))
}

/// Failures that are the caller's fault rather than the input geometry's.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn write_output(common: &Common, bytes: &[u8]) -> Result<()> {
    match &common.out {
        Some(path) => {
            let path = match std::env::var_os(OUT_DIR_ENV) {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path.clone(),
            };
            std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn path_text(path: &GridPath) -> Vec<u8> {
    let parts: Vec<String> = path
        .vertices
        .iter()
        .map(|(x, y)| format!("({x},{y})"))
        .collect();
    format!("{}\n", parts.join(" ")).into_bytes()
}

fn digitize(args: &DigitizeArgs) -> Result<Vec<u8>> {
    let path = match (args.from, args.to, args.slope1, args.slope2) {
        (Some(p), Some(q), _, _) => digitize_segment(p, q)?,
        (None, None, Some((a, b)), Some((c, d))) => {
            let corner = args
                .corner
                .ok_or_else(|| usage("--corner is required with --slope1/--slope2"))?;
            let spec = AngleSpec::new(Slopes::new(a, b, c, d)?, corner);
            trace_region_boundary(&spec, args.window)?
        }
        _ => return Err(usage("give either --from and --to, or --slope1, --slope2 and --corner")),
    };
    match args.common.format {
        Format::Json => json_line(&path),
        Format::Ascii => Ok(path_text(&path)),
        other => Err(usage(format!("digitize does not support --format {other}"))),
    }
}

fn classify(args: &ClassifyArgs) -> Result<Vec<u8>> {
    let slopes = args.slopes.slopes()?;
    let spec = AngleSpec::new(slopes, args.corner);
    let params = region_params(&spec);
    let index = class_index(&spec);
    match args.common.format {
        Format::Json => json_line(&serde_json::json!({
            "slopes": slopes,
            "corner": args.corner,
            "alpha": params.alpha,
            "beta": params.beta,
            "alpha_ceil": params.alpha_ceil,
            "beta_ceil": params.beta_ceil,
            "index": index,
            "classes": slopes.class_count(),
        })),
        Format::Ascii => Ok(format!(
            "class {index} of {}\nalpha {} (ceiling {})\nbeta {} (ceiling {})\n",
            slopes.class_count(),
            params.alpha,
            params.alpha_ceil,
            params.beta,
            params.beta_ceil
        )
        .into_bytes()),
        other => Err(usage(format!("classify does not support --format {other}"))),
    }
}

fn enumerate(args: &EnumerateArgs) -> Result<Vec<u8>> {
    let slopes = args.slopes.slopes()?;
    let shapes = enumerate_shapes(&slopes, args.window)?;
    let format = args.common.format;
    match format {
        Format::Json => json_line(&shapes),
        Format::Ascii | Format::Pbm => {
            let opts = RenderOptions::new(format);
            let mut out = Vec::new();
            for shape in &shapes {
                let header = match format {
                    Format::Pbm => format!("# {}{}\n", args.label, shape.index),
                    _ => format!("{}{}:\n", args.label, shape.index),
                };
                out.extend_from_slice(header.as_bytes());
                out.extend(render_pixelset(&shape.pixels, &opts)?);
                if format == Format::Ascii {
                    out.push(b'\n');
                }
            }
            Ok(out)
        }
        other => Err(usage(format!("enumerate does not support --format {other}; use render"))),
    }
}

fn partition(args: &PartitionArgs) -> Result<Vec<u8>> {
    let slopes = args.slopes.slopes()?;
    let cells = partition_unit_square(&slopes);
    let opts = RenderOptions {
        format: args.common.format,
        scale: args.scale,
        label: args.label.clone(),
        ..RenderOptions::default()
    };
    match args.common.format {
        Format::Svg | Format::Json => Ok(render_partition(&cells, &opts)?),
        other => Err(usage(format!("partition does not support --format {other}"))),
    }
}

/// Returns the report and whether it passed.
fn verify(args: &VerifyArgs) -> Result<(Vec<u8>, bool)> {
    if args.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let slopes = args.slopes.slopes()?;
    let h = sample_class_frequencies(&slopes, args.samples, args.seed);
    let pass = h.passes();
    let bytes = match args.common.format {
        Format::Json => json_line(&serde_json::json!({
            "histogram": h,
            "frequencies": h.frequencies(),
            "expected": 1.0 / slopes.class_count() as f64,
            "tolerance": h.frequency_tolerance(),
            "chi_square_limit": h.chi_square_threshold(),
            "pass": pass,
        }))?,
        Format::Ascii => format!("{h}\n").into_bytes(),
        other => return Err(usage(format!("verify does not support --format {other}"))),
    };
    Ok((bytes, pass))
}

fn sweep(args: &SweepArgs) -> Result<(Vec<u8>, bool)> {
    if args.max_entry < 1 || args.max_classes < 1 {
        return Err(usage("--max-entry and --max-classes must be at least 1"));
    }
    let report = theorem_sweep(args.max_entry, args.max_classes);
    let pass = report.passed();
    let bytes = match args.common.format {
        Format::Json => json_line(&report)?,
        Format::Ascii => format!("{report}\n").into_bytes(),
        other => return Err(usage(format!("sweep does not support --format {other}"))),
    };
    Ok((bytes, pass))
}

fn render(args: &RenderArgs) -> Result<Vec<u8>> {
    let slopes = args.slopes.slopes()?;
    let window = args.window.unwrap_or_else(|| default_window(&slopes));
    if window < 1 {
        return Err(usage("--window must be at least 1"));
    }
    let pixels = match (args.index, args.corner) {
        (Some(j), None) => {
            if !(0..slopes.class_count()).contains(&j) {
                return Err(usage(format!("--index must be in 0..{}", slopes.class_count())));
            }
            ShapeClass::new(slopes, j, window).pixels
        }
        (None, Some(corner)) => spec_shape(&AngleSpec::new(slopes, corner), window),
        _ => return Err(usage("give exactly one of --index or --corner")),
    };
    let opts = RenderOptions {
        format: args.common.format,
        scale: args.scale,
        ..RenderOptions::default()
    };
    Ok(render_pixelset(&pixels, &opts)?)
}

fn run(cli: &Cli) -> Result<bool> {
    let (common, bytes, pass) = match &cli.command {
        Command::Digitize(a) => (&a.common, digitize(a)?, true),
        Command::Classify(a) => (&a.common, classify(a)?, true),
        Command::Enumerate(a) => (&a.common, enumerate(a)?, true),
        Command::Partition(a) => (&a.common, partition(a)?, true),
        Command::Verify(a) => {
            let (b, p) = verify(a)?;
            (&a.common, b, p)
        }
        Command::Sweep(a) => {
            let (b, p) = sweep(a)?;
            (&a.common, b, p)
        }
        Command::Render(a) => (&a.common, render(a)?, true),
    };
    write_output(common, &bytes)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
