use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use polyirr_core::anatomy::{divisor_degree_density, smooth_degree_stats, DensityMode};
use polyirr_core::equidist::{delta, PrimeModulusSet};
use polyirr_core::experiments::{
    mc_irreducibility, random_subset_alpha, run_suite, ExperimentConfig, SubsetConfig, ZBudget,
};
use polyirr_core::galois::{enumerate_mergings, frobenius_certify, is_y_merging, CycleType};
use polyirr_core::measures::{alpha_beta, certify_alpha_range, parse_measure, MeasureReport};
use polyirr_core::rng::with_threads;
use polyirr_core::sieve::{brun_check, BrunOptions};
use polyirr_core::{Error, IntPoly, MeasureSequence, Partition};

#[derive(Parser)]
#[command(name = "polyirr", version, about = "Experiments on the irreducibility of random polynomials")]
struct Cli {
    /// Master seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certified enclosures of α(P) and β(P) for a measure, or a sweep over box:1..H.
    CertifyAlpha {
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = 210)]
        modulus: u64,
        /// H range LO..HI for the uniform boxes [1, H].
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Exact discrepancy of A mod D over products of primes' moduli.
    Delta {
        #[arg(long)]
        measure: String,
        /// Comma-separated primes.
        #[arg(long)]
        primes: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Brun upper bound against the exact rough fraction.
    BrunCheck {
        #[arg(long, default_value = "box:0..1")]
        measure: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Monte Carlo fallback when no exact path fits the cap.
        #[arg(long, default_value_t = 0)]
        mc_samples: u64,
    },
    /// Degree of the m-smooth part of A mod p, sampled.
    Anatomy {
        #[arg(long, default_value = "box:0..1")]
        measure: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Density of degree-k divisors in M_p(n); exact unless --samples is given.
    Density {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Whether σ is a y-merging of ρ, or all y-mergings of ρ.
    Merge {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 2)]
        y: u32,
    },
    /// Frobenius cycle types certifying A_n ≤ Gal(A).
    GaloisCert {
        /// File holding the coefficients c0,c1,…,cn.
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
    },
    /// Monte Carlo irreducibility over ℤ conditioned on a_0 ≠ 0.
    McIrr {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        keep_samples: bool,
    },
    /// How often a random N-subset of [−H, H] certifies α(210) ≤ 3/4.
    RandomSubset {
        #[arg(long = "H")]
        h: u64,
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        trials: u64,
    },
    /// Run a JSON suite; reports and manifest.json go to --out (a directory).
    Suite {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<(u64, u64), Error> {
    let bad = || Error::Parse(format!("expected LO..HI, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_primes(s: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad prime {t:?}"))))
        .collect()
}

fn iid(spec: &str) -> Result<MeasureSequence, Error> {
    Ok(MeasureSequence::iid(parse_measure(spec)?))
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Error> {
    Ok(serde_json::to_value(x)?)
}

fn run(cli: &Cli) -> Result<Option<Value>, Error> {
    let seed = cli.seed;
    Ok(Some(match &cli.cmd {
        Cmd::CertifyAlpha { measure, modulus, sweep } => match (measure, sweep) {
            (_, Some(r)) => {
                let (lo, hi) = parse_range(r)?;
                to_value(&certify_alpha_range(lo, hi, *modulus)?)?
            }
            (Some(spec), None) => {
                let ab = alpha_beta(&iid(spec)?, *modulus, None)?;
                to_value(&MeasureReport {
                    spec: spec.clone(),
                    modulus: *modulus,
                    alpha: ab.alpha,
                    beta: ab.beta,
                    certified: ab.certified(),
                })?
            }
            (None, None) => return Err(Error::Parse("certify-alpha needs --measure or --sweep".into())),
        },
        Cmd::Delta { measure, primes, n, m } => {
            let set = PrimeModulusSet::new(parse_primes(primes)?)?;
            to_value(&delta(&iid(measure)?, *n, &set, *m)?)?
        }
        Cmd::BrunCheck { measure, p, n, m, mc_samples } => {
            let opts = BrunOptions {
                mc_samples: *mc_samples,
                seed,
                ..BrunOptions::default()
            };
            to_value(&brun_check(&iid(measure)?, *p, *n, *m, &opts)?)?
        }
        Cmd::Anatomy { measure, p, n, m, samples } => {
            to_value(&smooth_degree_stats(&iid(measure)?, *n, *p, *m, *samples, seed)?)?
        }
        Cmd::Density { p, n, k, samples } => {
            let mode = match samples {
                Some(s) => DensityMode::MonteCarlo { samples: *s, seed },
                None => DensityMode::Exact,
            };
            to_value(&divisor_degree_density(*p, *n, *k, mode)?)?
        }
        Cmd::Merge { rho, sigma, y } => {
            let rho: Partition = rho.parse()?;
            match sigma {
                Some(s) => {
                    let s: Partition = s.parse()?;
                    serde_json::json!({
                        "rho": rho, "sigma": s, "y": y,
                        "is_merging": is_y_merging(&s, &rho, *y)?,
                    })
                }
                None => {
                    let all: Vec<CycleType> = enumerate_mergings(&rho, *y)?.into_iter().collect();
                    serde_json::json!({ "rho": rho, "y": y, "mergings": all })
                }
            }
        }
        Cmd::GaloisCert { poly, budget } => {
            let text = std::fs::read_to_string(poly).map_err(|source| Error::Io {
                path: poly.display().to_string(),
                source,
            })?;
            let a: IntPoly = text.parse()?;
            to_value(&frobenius_certify(&a, *budget, seed)?)?
        }
        Cmd::McIrr { measure, n, samples, keep_samples } => to_value(&mc_irreducibility(&ExperimentConfig {
            measure: measure.clone(),
            n: *n,
            samples: *samples,
            seed,
            budget: ZBudget::default(),
            keep_samples: *keep_samples,
        })?)?,
        Cmd::RandomSubset { h, n, trials } => to_value(&random_subset_alpha(&SubsetConfig {
            h: *h,
            n: *n,
            trials: *trials,
            seed,
        })?)?,
        Cmd::Suite { config } => {
            let dir = cli
                .out
                .as_ref()
                .ok_or_else(|| Error::Parse("suite needs --out DIR".into()))?;
            let m = run_suite(config, dir)?;
            eprintln!("wrote {} entries to {}", m.entries.len(), dir.display());
            return Ok(None);
        }
    }))
}

/// Flattens a JSON value into (dotted path, scalar) rows.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn render(v: &Value, format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(v)? + "\n",
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            let mut s = String::from("field,value\n");
            for (k, x) in rows {
                s += &format!("{},{}\n", csv_field(&k), csv_field(&x));
            }
            s
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = with_threads(cli.threads, || run(&cli)).and_then(|v| {
        let Some(v) = v else { return Ok(()) };
        let text = render(&v, cli.format)?;
        match &cli.out {
            Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polyirr: {e}");
            ExitCode::from(match e {
                Error::Parse(_) | Error::Json(_) => 2,
                e if e.is_cap() => 3,
                _ => 1,
            })
        }
    }
}
