use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use msbhide::{
    analysis, hider_embed, metrics, owner_encode, read_pgm, receiver_extract, receiver_recover,
    write_pgm, Bits, GrayImage, KeySpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "msbhide",
    version,
    about = "Reversible data hiding in encrypted grayscale images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Content owner: encrypt an image and embed its label map.
    OwnerEncrypt {
        input: PathBuf,
        output: PathBuf,
        /// Encryption key as hex.
        #[arg(long = "key-e", value_name = "HEX")]
        key_e: String,
        /// Write the capacity table to this file.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Data hider: embed a payload file into a marked encrypted image.
    Hide {
        input: PathBuf,
        output: PathBuf,
        /// Data-hiding key as hex.
        #[arg(long = "key-w", value_name = "HEX")]
        key_w: String,
        #[arg(long, value_name = "FILE")]
        payload: PathBuf,
    },
    /// Receiver: extract the payload with the data-hiding key.
    Extract {
        input: PathBuf,
        output: PathBuf,
        #[arg(long = "key-w", value_name = "HEX")]
        key_w: String,
    },
    /// Receiver: restore the original image with the encryption key.
    Recover {
        input: PathBuf,
        output: PathBuf,
        #[arg(long = "key-e", value_name = "HEX")]
        key_e: String,
        /// Reference image for PSNR/SSIM.
        #[arg(long, value_name = "PATH")]
        original: Option<PathBuf>,
    },
    /// Capacity statistics for every PGM in a directory.
    Analyze {
        dir: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Processing(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Processing(e)
    }
}

fn parse_key(hex: &str, flag: &str) -> Result<KeySpec, Failure> {
    KeySpec::from_hex(hex).map_err(|e| Failure::Usage(format!("{flag}: {e}")))
}

fn load(path: &Path) -> anyhow::Result<GrayImage> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_pgm(&bytes).with_context(|| format!("parsing {}", path.display()))
}

/// Writes through a temporary file in the destination directory, renaming on success.
fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| anyhow!(e.error))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::OwnerEncrypt {
            input,
            output,
            key_e,
            report,
        } => {
            let ke = parse_key(&key_e, "--key-e")?;
            let img = load(&input)?;
            let out = owner_encode(&img, &ke).context("owner encoding failed")?;
            if let Some(path) = report {
                write_atomic(&path, format!("{}\n", out.report).as_bytes())?;
            }
            write_atomic(&output, &write_pgm(&out.image))?;
            println!(
                "reference region: {}x{}; net payload: {} bits; max payload: {} bits",
                out.report.ref_rows,
                out.report.ref_cols,
                out.report.net_payload,
                out.report.max_payload_bits()
            );
        }
        Command::Hide {
            input,
            output,
            key_w,
            payload,
        } => {
            let kw = parse_key(&key_w, "--key-w")?;
            let img = load(&input)?;
            let data = std::fs::read(&payload)
                .with_context(|| format!("reading {}", payload.display()))?;
            let (marked, report) = hider_embed(&img, &Bits::from_byte_slice(&data), &kw)?;
            write_atomic(&output, &write_pgm(&marked))?;
            println!("payload bits: {}", report.payload_bits);
            println!("ER = {:.3} bpp", report.embedding_rate);
        }
        Command::Extract {
            input,
            output,
            key_w,
        } => {
            let kw = parse_key(&key_w, "--key-w")?;
            let img = load(&input)?;
            let bits = receiver_extract(&img, &kw)?;
            write_atomic(&output, bits.as_bytes())?;
            println!("payload bits: {}", bits.len());
        }
        Command::Recover {
            input,
            output,
            key_e,
            original,
        } => {
            let ke = parse_key(&key_e, "--key-e")?;
            let img = load(&input)?;
            let recovered = receiver_recover(&img, &ke)?;
            write_atomic(&output, &write_pgm(&recovered))?;
            if let Some(path) = original {
                let reference = load(&path)?;
                let psnr: f64 = metrics::psnr(&reference, &recovered)?;
                let ssim = match metrics::ssim::<f64>(&reference, &recovered) {
                    Ok(v) => format!("{v:.3}"),
                    Err(_) => "n/a".to_string(),
                };
                println!("PSNR = {} dB, SSIM = {}", metrics::format_psnr(psnr), ssim);
            }
        }
        Command::Analyze { dir, out } => {
            let result = analysis::analyze_dir(&dir)
                .with_context(|| format!("listing {}", dir.display()))?;
            for w in &result.warnings {
                eprintln!("warning: skipped {w}");
            }
            if result.rows.is_empty() {
                return Err(anyhow!("no readable PGM images in {}", dir.display()).into());
            }
            let mut buf = Vec::new();
            result.write_csv(&mut buf).context("formatting CSV")?;
            write_atomic(&out, &buf)?;
            if let Some(s) = result.summary() {
                println!(
                    "{} images; ER best {:.3} / worst {:.3} / average {:.3} bpp",
                    result.rows.len(),
                    s.best,
                    s.worst,
                    s.average
                );
            }
        }
    }
    Ok(())
}

impl From<msbhide::Error> for Failure {
    fn from(e: msbhide::Error) -> Self {
        Failure::Processing(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Processing(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
