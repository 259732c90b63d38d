//! `juniward` command line.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, Pattern, DEFAULT_TEXTURE};
use crate::container::{read_container, read_grid_tsv, write_container, write_grid, GridFormat};
use crate::costmap::{CostModel, CostParams, WindowMode, DEFAULT_SIGMA};
use crate::embed::{simulate, solve_lambda};
use crate::error::{Error, Result};
use crate::jpeg::quality_table;

#[derive(Debug, Parser)]
#[command(name = "juniward", version, about = "J-UNIWARD costmaps with original and fixed residual windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Original,
    Fixed,
}

impl From<ModeArg> for WindowMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Original => WindowMode::Original,
            ModeArg::Fixed => WindowMode::Fixed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PatternArg {
    #[value(name = "stripes_h")]
    StripesH,
    #[value(name = "stripes_2d")]
    Stripes2d,
}

impl From<PatternArg> for Pattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::StripesH => Pattern::StripesH,
            PatternArg::Stripes2d => Pattern::Stripes2d,
        }
    }
}

#[derive(Debug, Args)]
struct CostArgs {
    /// DCTC v1 container.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "fixed")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Output grid; `.pgm` writes an image, anything else TSV.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-coefficient costs.
    Costmap(CostArgs),
    /// Per-block costs with unit numerator.
    Blockcost(CostArgs),
    /// Compare both window modes and write grids, scatters and a summary.
    Compare {
        #[arg(long)]
        input: PathBuf,
        /// Payload in bits per nonzero AC coefficient.
        #[arg(long)]
        payload: f64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
    },
    /// Simulate embedding at the given payload and write the stego container.
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "fixed")]
        mode: ModeArg,
        #[arg(long)]
        payload: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Generate a synthetic smooth/textured cover.
    Synth {
        #[arg(long, value_enum)]
        pattern: PatternArg,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        quality: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Texture strength in [0, 1]; 1 is uniform noise over [0, 255].
        #[arg(long, default_value_t = DEFAULT_TEXTURE)]
        texture: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Block-cost statistics of one synthetic image across JPEG qualities.
    Sweep {
        #[arg(long, value_enum)]
        pattern: PatternArg,
        /// Comma-separated list, e.g. 30,75,95.
        #[arg(long, value_delimiter = ',', required = true)]
        qualities: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        width: usize,
        #[arg(long, default_value_t = 40)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TEXTURE)]
        texture: f64,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Convert a TSV grid to an 8-bit PGM.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

fn params(sigma: f64) -> Result<CostParams> {
    let p = CostParams::with_sigma(sigma);
    p.validate()?;
    Ok(p)
}

fn check_payload(payload: f64) -> Result<()> {
    if !(payload > 0.0 && payload <= 3f64.log2()) {
        return Err(Error::invalid("--payload", format!("{payload} must be in (0, log2 3]")));
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Costmap(args) => {
            let p = params(args.sigma)?;
            let cover = read_container(&args.input)?;
            let cm = CostModel::new(&cover, p)?.costmap(args.mode.into());
            write_grid(&cm.to_grid(), &args.output, GridFormat::from_path(&args.output))
        }
        Command::Blockcost(args) => {
            let p = params(args.sigma)?;
            let cover = read_container(&args.input)?;
            let grid = CostModel::new(&cover, p)?.block_costs(args.mode.into());
            write_grid(&grid, &args.output, GridFormat::from_path(&args.output))
        }
        Command::Compare { input, payload, out_dir, sigma } => {
            let p = params(sigma)?;
            check_payload(payload)?;
            let cover = read_container(&input)?;
            analysis::compare(&cover, &p, payload)?.write_to(&out_dir)
        }
        Command::Embed { input, mode, payload, seed, sigma, output } => {
            let p = params(sigma)?;
            check_payload(payload)?;
            let cover = read_container(&input)?;
            let cm = CostModel::new(&cover, p)?.costmap(mode.into());
            let pm = solve_lambda(&cm, payload)?;
            let stego = simulate(&pm, &cover, seed)?;
            write_container(&stego, &output)
        }
        Command::Synth { pattern, width, height, quality, seed, texture, output } => {
            quality_table(quality)?;
            let img = analysis::synth_spatial(pattern.into(), height, width, seed, texture)?;
            write_container(&analysis::compress(&img, quality)?, &output)
        }
        Command::Sweep { pattern, qualities, width, height, seed, texture, sigma, output } => {
            let p = params(sigma)?;
            let rows = analysis::quality_sweep(pattern.into(), height, width, seed, texture, &qualities, &p)?;
            write_file(&output, &analysis::sweep_csv(&rows))
        }
        Command::Render { input, output } => {
            let grid = read_grid_tsv(&input)?;
            write_grid(&grid, &output, GridFormat::Pgm)
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to `stderr`.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("juniward").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_command_prints_usage() {
        let (code, err) = run_capture(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"));
        let (code, _) = run_capture(&["costmap", "--input", "x", "--output", "y", "--bogus"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn bad_mode_is_a_usage_error() {
        let (code, _) = run_capture(&["costmap", "--input", "x", "--mode", "shifted", "--output", "y"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn payload_validated_before_reading_input() {
        let (code, err) = run_capture(&[
            "embed",
            "--input",
            "/nonexistent/c.json",
            "--payload",
            "0",
            "--seed",
            "1",
            "--output",
            "o.json",
        ]);
        assert_eq!(code, 1, "{err}");
        assert!(err.contains("--payload"));
    }

    #[test]
    fn missing_input_is_io_error() {
        let (code, _) = run_capture(&["costmap", "--input", "/nonexistent/c.json", "--output", "/tmp/x.tsv"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
    }
}
