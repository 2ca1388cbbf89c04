//! `birkhoff`: command-line front end for the birkhoff library.
//!
//! Exit status is 0 on success, 1 when a computed check fails and 2 for
//! usage or input errors. Diagnostics go to stderr.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use birkhoff::alphafam::{self, FloatMatrix, HighFloat};
use birkhoff::bistoch::{self, BistochMatrix, MaxtraceMethod};
use birkhoff::format::{self, KernelSpec};
use birkhoff::{erdosenum, infarray, kernelmr, orbits, randindep};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "birkhoff", version, about = "Erdős matrices and the Marcus–Ree inequality on the Birkhoff polytope")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Δ(A) = maxtrace(A) − ||A||², with a maximising permutation.
    Delta {
        file: PathBuf,
        /// Exit with status 1 unless Δ = 0.
        #[arg(long)]
        require_erdos: bool,
    },
    /// Maximal trace over all permutations of the rows.
    Maxtrace {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Decide whether B = PAQ for permutation matrices P, Q.
    Equiv { a: PathBuf, b: PathBuf },
    /// Enumerate all Erdős matrices up to equivalence.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Write per-subset-size statistics as TSV.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check the bundled catalogue of 4×4 Erdős matrices.
    VerifyAppendix,
    /// Number of orbits of k-subsets of S_n under left and right multiplication.
    Orbits {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        method: Option<OrbitMethod>,
    },
    /// Orbit counts for k = 1..kmax.
    OrbitsTable {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
    },
    /// 3×3 symmetric bistochastic matrix with Δ = α.
    Alpha3 {
        #[arg(long)]
        alpha: HighFloat,
        #[arg(long)]
        x: HighFloat,
    },
    /// n×n symmetric bistochastic matrix with Δ = α.
    AlphaN {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: HighFloat,
        #[arg(long)]
        x: HighFloat,
    },
    /// Point with Δ = α on the segment from the midpoint matrix to A3 ⊕ I.
    AlphaCurve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: HighFloat,
        /// 3×3 matrix file.
        #[arg(long)]
        base: PathBuf,
    },
    /// Prefix of the infinite bistochastic array.
    Array {
        #[arg(long)]
        rows: usize,
        /// Print the squared l2 norm of the prefix.
        #[arg(long)]
        l2: bool,
        /// Print the first T terms of the trace pairing with the transpose.
        #[arg(long, value_name = "T")]
        pairing: Option<usize>,
        /// Only list cells in columns up to this one.
        #[arg(long, default_value_t = 64)]
        max_col: usize,
    },
    /// Discretised Marcus–Ree checks for a bistochastic kernel.
    KernelCheck {
        /// uniform, cosine:EPS or random:SEED
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long)]
        m: u32,
        /// Midpoint samples per cell side for kernels without closed-form cells.
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// Monte Carlo estimate of the probability of linear dependence.
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        iters: u64,
        #[arg(long)]
        seed: u64,
        /// Subset size; defaults to (n−1)²+1.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Brute,
    Assign,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitMethod {
    Canon,
    Burnside,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<birkhoff::Error> for Failure {
    fn from(e: birkhoff::Error) -> Self {
        match e {
            birkhoff::Error::CheckFailed(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn read_matrix(path: &Path) -> Result<birkhoff::ExactMatrix, Failure> {
    format::parse_matrix(&read_input(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_bistoch(path: &Path) -> Result<BistochMatrix, Failure> {
    BistochMatrix::new(read_matrix(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialises") + "\n"
}

fn checked(out: String, ok: bool, what: &str) -> Outcome {
    if ok {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Check(format!("{what} failed")))
    }
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    let mut out = String::new();
    match cli.command {
        Command::Delta { file, require_erdos } => {
            let cert = bistoch::delta(&read_bistoch(&file)?);
            if json {
                out = to_json(&cert);
            } else {
                writeln!(out, "delta = {}, erdos = {}", cert.delta, cert.is_erdos).unwrap();
                writeln!(out, "maxtrace = {}", cert.witness.value).unwrap();
                writeln!(out, "witness = {}", cert.witness.sigma).unwrap();
            }
            return checked(out, cert.is_erdos || !require_erdos, "Erdős check");
        }
        Command::Maxtrace { file, method } => {
            let method = match method {
                Method::Auto => MaxtraceMethod::Auto,
                Method::Brute => MaxtraceMethod::Brute,
                Method::Assign => MaxtraceMethod::Assignment,
            };
            let w = bistoch::maxtrace(&read_matrix(&file)?, method)?;
            if json {
                return Ok(to_json(&w));
            }
            writeln!(out, "maxtrace = {}", w.value).unwrap();
            writeln!(out, "witness = {}", w.sigma).unwrap();
        }
        Command::Equiv { a, b } => {
            let (a, b) = (read_bistoch(&a)?, read_bistoch(&b)?);
            let wit = bistoch::equivalence_witness(&a, &b)?;
            if json {
                let pq = wit.as_ref().map(|(p, q)| (p.to_string(), q.to_string()));
                return Ok(to_json(&serde_json::json!({ "equivalent": wit.is_some(), "witness": pq })));
            }
            writeln!(out, "equivalent = {}", wit.is_some()).unwrap();
            if let Some((p, q)) = wit {
                writeln!(out, "rows = {p}").unwrap();
                writeln!(out, "cols = {q}").unwrap();
            }
        }
        Command::Enumerate { n, workers, stats } => {
            let e = erdosenum::enumerate_erdos(n, workers)?;
            if let Some(path) = stats {
                std::fs::write(&path, e.stats.to_tsv())
                    .map_err(|err| Failure::Usage(format!("{}: {err}", path.display())))?;
            }
            let merged = e.classes_up_to_transpose().len();
            let mats: Vec<_> = e.classes.iter().map(|c| c.inner().clone()).collect();
            if json {
                let text: Vec<String> = mats.iter().map(format::write_matrix).collect();
                return Ok(to_json(&serde_json::json!({
                    "n": n,
                    "classes": e.classes.len(),
                    "up_to_transpose": merged,
                    "stats": e.stats,
                    "matrices": text,
                })));
            }
            writeln!(out, "{} classes ({merged} up to transpose)", e.classes.len()).unwrap();
            out.push('\n');
            out.push_str(&format::write_records(&mats));
        }
        Command::VerifyAppendix => {
            let records = format::parse_records(format::appendix_text())?;
            let e = erdosenum::enumerate_erdos(4, 0)?;
            let report = erdosenum::verify_appendix(&records, &e.classes)?;
            let ok = report.all_erdos && report.pairwise_inequivalent && report.matches_enumeration;
            out = if json {
                to_json(&report)
            } else {
                format!(
                    "matrices = {}\nall erdos = {}\npairwise inequivalent = {}\nmatches enumeration = {}\nclasses up to transpose = {}\n",
                    report.matrices,
                    report.all_erdos,
                    report.pairwise_inequivalent,
                    report.matches_enumeration,
                    report.classes_up_to_transpose
                )
            };
            return checked(out, ok, "appendix verification");
        }
        Command::Orbits { n, k, method } => {
            let method = method.unwrap_or(if n <= orbits::CANONICAL_MAX_N {
                OrbitMethod::Canon
            } else {
                OrbitMethod::Burnside
            });
            let count = match method {
                OrbitMethod::Canon => orbits::count_orbits_canonical(n, k)?.to_string(),
                OrbitMethod::Burnside => orbits::count_orbits_burnside(n, k)?.to_string(),
            };
            if json {
                return Ok(to_json(&serde_json::json!({ "n": n, "k": k, "orbits": count })));
            }
            writeln!(out, "{count}").unwrap();
        }
        Command::OrbitsTable { n, kmax } => {
            let table = orbits::orbit_table(n, kmax)?;
            if json {
                let t: Vec<String> = table.iter().map(|f| f.to_string()).collect();
                return Ok(to_json(&serde_json::json!({ "n": n, "f": t })));
            }
            writeln!(out, "k\tf").unwrap();
            for (k, f) in table.iter().enumerate() {
                writeln!(out, "{}\t{f}", k + 1).unwrap();
            }
        }
        Command::Alpha3 { alpha, x } => return alpha_member(alphafam::alpha_erdos3(&alpha, &x)?, json),
        Command::AlphaN { n, alpha, x } => return alpha_member(alphafam::alpha_erdos_n(n, &alpha, &x)?, json),
        Command::AlphaCurve { n, alpha, base } => {
            let a3 = FloatMatrix::from_exact(&read_matrix(&base)?);
            let pt = alphafam::alpha_on_segment(n, &alpha, &a3)?;
            let err = (&pt.delta - &alpha).abs().to_f64();
            if json {
                out = to_json(&serde_json::json!({
                    "t": pt.t.to_string(),
                    "delta": pt.delta.to_string(),
                    "delta_error": err,
                    "matrix": pt.matrix.to_f64_rows(),
                }));
            } else {
                writeln!(out, "t = {}", pt.t).unwrap();
                writeln!(out, "delta = {}", pt.delta).unwrap();
                out.push_str(&format::write_float_matrix(&pt.matrix.to_f64_rows()));
            }
            return checked(out, err <= 1e-10, "|delta - alpha| <= 1e-10");
        }
        Command::Array { rows, l2, pairing, max_col } => {
            let a = infarray::example_array(rows)?;
            let l2v = l2.then(|| infarray::prefix_l2(&a));
            let pv = pairing.map(|t| infarray::pairing_trace(&a, t)).transpose()?;
            let sums_ok = (1..=rows).all(|k| a.row_sum(k) == birkhoff::Rational::one());
            if json {
                let cells: Vec<_> = a.cells(max_col).into_iter().map(|(i, j, v)| (i, j, v.to_string())).collect();
                out = to_json(&serde_json::json!({
                    "rows": rows,
                    "row_sums_one": sums_ok,
                    "l2": l2v.as_ref().map(ToString::to_string),
                    "pairing": pv.as_ref().map(ToString::to_string),
                    "cells": cells,
                }));
            } else {
                let cells = a.cells(max_col);
                out.push_str(&format::write_triplets(cells.iter().map(|(i, j, v)| (*i, *j, v))));
                if let Some(v) = &l2v {
                    writeln!(out, "l2 = {v} ({})", format::fmt_sig(v.to_f64())).unwrap();
                }
                if let (Some(t), Some(v)) = (pairing, &pv) {
                    writeln!(out, "pairing({t}) = {v}").unwrap();
                }
            }
            return checked(out, sums_ok, "row sums");
        }
        Command::KernelCheck { kernel, m, samples } => {
            let w = kernelmr::kernel_from_spec(&kernel)?;
            let r = kernelmr::kernel_check(w.as_ref(), m, samples)?;
            out = if json {
                to_json(&r)
            } else {
                let f = |x: f64| format::fmt_sig(x);
                let mut s = String::new();
                writeln!(s, "kernel = {}, m = {m}", r.kernel).unwrap();
                writeln!(s, "frobenius_sq = {}", f(r.finite.frobenius_sq)).unwrap();
                writeln!(s, "maxtrace = {}", f(r.finite.maxtrace)).unwrap();
                writeln!(s, "sum_error = {}", f(r.finite.sum_error)).unwrap();
                writeln!(s, "coupling_identity = {}", f(r.coupling_identity.pairing)).unwrap();
                writeln!(s, "coupling_transpose = {}", f(r.coupling_transpose.pairing)).unwrap();
                writeln!(s, "tower_error = {}", f(r.tower_error)).unwrap();
                let refine: Vec<String> = r.refinement.iter().map(|&x| f(x)).collect();
                writeln!(s, "refinement = {}", refine.join(" ")).unwrap();
                writeln!(s, "passed = {}", r.passed).unwrap();
                s
            };
            return checked(out, r.passed, "kernel check");
        }
        Command::Mc { n, iters, seed, k, workers } => {
            let mut config = randindep::McConfig::new(n, iters, seed)?;
            if let Some(k) = k {
                config = config.with_k(k)?;
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let r = pool.install(|| randindep::estimate(&config));
            if json {
                return Ok(to_json(&r));
            }
            writeln!(out, "{}", randindep::McResult::tsv_header()).unwrap();
            writeln!(out, "{}", r.tsv_row()).unwrap();
        }
    }
    Ok(out)
}

fn alpha_member(m: alphafam::AlphaMember, json: bool) -> Outcome {
    let r = &m.report;
    let out = if json {
        to_json(&serde_json::json!({ "report": r, "matrix": m.matrix.to_f64_rows() }))
    } else {
        let mut s = format::write_float_matrix(&m.matrix.to_f64_rows());
        writeln!(s, "x = {}, z = {}", m.x, m.z).unwrap();
        writeln!(s, "delta = {}, error = {}", format::fmt_sig(r.delta), format::fmt_sig(r.delta_error)).unwrap();
        writeln!(s, "identity witness = {}, symmetric = {}", r.witness_is_identity, r.symmetric).unwrap();
        s
    };
    checked(out, r.passes(1e-10), "family member check")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
