//! Command-line front end. Data goes to stdout, diagnostics to stderr.
//! Exit codes: 0 success/verified, 1 verification failure, 2 invalid input,
//! 3 precision indeterminate.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ocpg_core::cutoff::{self, CutoffCertificateJson};
use ocpg_core::forms;
use ocpg_core::interval::rational_from_string;
use ocpg_core::lfunc::{self, BoundHypothesis, BoundVerdict};
use ocpg_core::{CutoffError, Precision, SearchMode};

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ocpg",
    about = "Class numbers, genera, and certified one-class-per-genus cutoffs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    Fundamental,
    Idoneal,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> SearchMode {
        match m {
            ModeArg::All => SearchMode::All,
            ModeArg::Fundamental => SearchMode::Fundamental,
            ModeArg::Idoneal => SearchMode::Idoneal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the reduced forms of a negative discriminant
    Forms {
        #[arg(short, long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Class number of a negative discriminant
    Classnum {
        #[arg(short, long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Class, ambiguous, and genus counts of a negative discriminant
    Genus {
        #[arg(short, long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Scan for one-class-per-genus discriminants
    Search {
        #[arg(long)]
        limit: u64,
        #[arg(long, value_enum, default_value = "fundamental")]
        mode: ModeArg,
        /// One JSON object per line (the default output format)
        #[arg(long)]
        jsonl: bool,
        /// CSV with header d,h,ambiguous,genera,ocpg
        #[arg(long, conflicts_with = "jsonl")]
        csv: bool,
    },
    /// Certified enclosure of L(1, chi) for the character of conductor d
    Lvalue {
        #[arg(short, long)]
        d: u64,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Check L(1, chi) >= c (log d)^-A for one discriminant
    Boundcheck {
        #[arg(short, long)]
        d: u64,
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        exponent: u32,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Find the cutoff genus index g* for a class-number lower bound
    Cutoff {
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        exponent: u32,
        #[arg(long, default_value_t = 1000)]
        gmax: usize,
        #[arg(long, default_value_t = 80)]
        digits: u32,
        /// Also write the certificate JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a previously emitted cutoff certificate
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 60)]
        digits: u32,
    },
    /// Exponent 4A+18 of the bound implied by spacing exponent A
    CiExponent {
        #[arg(long)]
        a: u32,
    },
}

fn parse_hypothesis(coeff: &str, exponent: u32) -> Result<BoundHypothesis, String> {
    let c = rational_from_string(coeff).ok_or_else(|| format!("invalid coefficient {coeff:?}"))?;
    BoundHypothesis::new(c, exponent).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Forms { d } => {
            let disc = forms::validate_discriminant(d).map_err(|e| e.to_string())?;
            let list = forms::enumerate_reduced(&disc);
            let triples: Vec<[String; 3]> = list
                .iter()
                .map(|f| [f.a.to_string(), f.b.to_string(), f.c.to_string()])
                .collect();
            #[derive(serde::Serialize)]
            struct FormsOut {
                d: String,
                forms: Vec<[String; 3]>,
            }
            emit(&FormsOut {
                d: disc.value.to_string(),
                forms: triples,
            })?;
            Ok(EXIT_OK)
        }
        Command::Classnum { d } => {
            let disc = forms::validate_discriminant(d).map_err(|e| e.to_string())?;
            #[derive(serde::Serialize)]
            struct ClassnumOut {
                d: String,
                h: u64,
            }
            emit(&ClassnumOut {
                d: disc.value.to_string(),
                h: forms::class_number(&disc),
            })?;
            Ok(EXIT_OK)
        }
        Command::Genus { d } => {
            let disc = forms::validate_discriminant(d).map_err(|e| e.to_string())?;
            let report = forms::genus_report(&disc).map_err(|e| e.to_string())?;
            emit(&report.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Search {
            limit,
            mode,
            jsonl: _,
            csv,
        } => {
            if limit < 3 {
                return Err("limit must be at least 3".into());
            }
            let reports = forms::search_ocpg(limit, mode.into());
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if csv {
                writeln!(lock, "d,h,ambiguous,genera,ocpg").map_err(|e| e.to_string())?;
                for r in &reports {
                    writeln!(lock, "{}", r.to_csv_row()).map_err(|e| e.to_string())?;
                }
            } else {
                for r in &reports {
                    let line = serde_json::to_string(&r.to_json()).map_err(|e| e.to_string())?;
                    writeln!(lock, "{line}").map_err(|e| e.to_string())?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Lvalue { d, digits } => {
            let prec = Precision::from_digits(digits);
            let report =
                lfunc::l_value_report(d, &prec, None).map_err(|e| e.to_string())?;
            emit(&report)?;
            Ok(EXIT_OK)
        }
        Command::Boundcheck {
            d,
            coeff,
            exponent,
            digits,
        } => {
            let hyp = parse_hypothesis(&coeff, exponent)?;
            let prec = Precision::from_digits(digits);
            let report =
                lfunc::l_value_report(d, &prec, Some(&hyp)).map_err(|e| e.to_string())?;
            let code = match report.verdict {
                Some(BoundVerdict::Indeterminate) => EXIT_INDETERMINATE,
                _ => EXIT_OK,
            };
            emit(&report)?;
            Ok(code)
        }
        Command::Cutoff {
            coeff,
            exponent,
            gmax,
            digits,
            out,
        } => {
            let hyp = parse_hypothesis(&coeff, exponent)?;
            let prec = Precision::from_digits(digits);
            match cutoff::find_cutoff(&hyp, gmax, &prec) {
                Ok(cert) => {
                    let json = cert.to_json();
                    let text =
                        serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?;
                    if let Some(path) = out {
                        std::fs::write(&path, &text)
                            .map_err(|e| format!("writing {}: {e}", path.display()))?;
                    }
                    println!("{text}");
                    Ok(EXIT_OK)
                }
                Err(CutoffError::PrecisionExhausted) => {
                    eprintln!("{}", CutoffError::PrecisionExhausted);
                    Ok(EXIT_INDETERMINATE)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Verify { cert, digits } => {
            let text = std::fs::read_to_string(&cert)
                .map_err(|e| format!("reading {}: {e}", cert.display()))?;
            let json: CutoffCertificateJson =
                serde_json::from_str(&text).map_err(|e| format!("parsing certificate: {e}"))?;
            let Some(parsed) = cutoff::CutoffCertificate::from_json(&json) else {
                eprintln!("certificate is malformed");
                return Ok(EXIT_VERIFY_FAIL);
            };
            if cutoff::verify_certificate(&parsed, &Precision::from_digits(digits)) {
                println!("verified");
                Ok(EXIT_OK)
            } else {
                eprintln!("certificate verification failed");
                Ok(EXIT_VERIFY_FAIL)
            }
        }
        Command::CiExponent { a } => {
            println!("{}", cutoff::ci_exponent(a));
            Ok(EXIT_OK)
        }
    }
}

fn emit<T: serde::Serialize>(value: &T) -> Result<(), String> {
    let text = serde_json::to_string(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID_INPUT)
        }
    }
}
