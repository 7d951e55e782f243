//! Command-line front end: rule synthesis, measure inspection, crossing
//! scans, order certification, sandwich bounds, and corpus verification.
//!
//! Measures are JSON files in the schema
//! `{"interval":[a,b],"atoms":[{"x":..,"w":..}],"pieces":[{"support":[c,d],"coeffs":[..]}]}`.
//! Wherever a measure argument is expected, an inline spec is also accepted:
//! `uniform`, `dirac:<x>`, `chebyshev3`, or `<family>:<points>` with family
//! one of gauss, lobatto, radau-left, radau-right.
//!
//! Exit codes: 0 certified / success, 1 refuted, 2 inconclusive or numeric
//! hypothesis failure, 64 usage error, 65 file or parse error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use quadorder::ordering::DEFAULT_MOMENT_TOL;
use quadorder::{
    certify_s_convex_order, certify_sandwich, check_moment_hypothesis, crossing_scan,
    incomparability_check, random_moment_matched_measure, rules, shared_moment_degree,
    ComparabilityVerdict, Interval, Measure, QuadratureRule, SandwichError, Verdict,
};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "quadorder", version, about = "Quadrature rules and convex stochastic orders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Working interval as "a,b".
    #[arg(long, default_value = "0,1", value_parser = parse_interval, allow_hyphen_values = true, global = true)]
    interval: Interval,
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print a quadrature rule as a node/weight table.
    Rule {
        /// gauss | lobatto | radau-left | radau-right | chebyshev3
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Moments of a measure compared against the uniform measure.
    Moments {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 8)]
        max_k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Crossing points of two CDFs.
    Crossings {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        /// Write a CSV (x, F1, F2, diff, is_crossing) sampled at 2048 points.
        #[arg(long)]
        plot_data: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Certify or refute s-convex ordering between two measures.
    Certify {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sandwich a moment-matched measure between the extremal rules.
    Sandwich {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Comparability of two rules in the class of n-convex functions.
    Compare {
        #[arg(long)]
        rule1: String,
        #[arg(long)]
        rule2: String,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Verify the sandwich theorem on a seeded corpus of measures.
    VerifyCorpus {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"a,b\", got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad endpoint: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad endpoint: {e}"))?;
    Interval::new(a, b).map_err(|e| e.to_string())
}

fn build_rule(family: &str, points: usize, interval: Interval) -> Result<QuadratureRule, String> {
    match family {
        "gauss" => rules::gauss(points, interval).map_err(|e| e.to_string()),
        "lobatto" => rules::lobatto(points, interval).map_err(|e| e.to_string()),
        "radau-left" => rules::radau_left(points, interval).map_err(|e| e.to_string()),
        "radau-right" => rules::radau_right(points, interval).map_err(|e| e.to_string()),
        "chebyshev3" => Ok(rules::chebyshev3(interval)),
        other => Err(format!("unknown rule family {other:?}")),
    }
}

/// Inline spec (`uniform`, `dirac:x`, `family:points`, `chebyshev3`) or a
/// path to a measure JSON file.
fn load_measure(spec: &str, interval: Interval) -> Result<Measure, String> {
    match spec {
        "uniform" => return Ok(Measure::uniform(interval)),
        "chebyshev3" => return Ok(Measure::from_rule(&rules::chebyshev3(interval))),
        _ => {}
    }
    if let Some((family, arg)) = spec.split_once(':') {
        if family == "dirac" {
            let x: f64 = arg.parse().map_err(|e| format!("bad dirac position: {e}"))?;
            return Measure::dirac(interval, x).map_err(|e| e.to_string());
        }
        if ["gauss", "lobatto", "radau-left", "radau-right"].contains(&family) {
            let points: usize = arg.parse().map_err(|e| format!("bad point count: {e}"))?;
            return Ok(Measure::from_rule(&build_rule(family, points, interval)?));
        }
    }
    let text =
        fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {spec}: {e}"))
}

fn parse_rule_spec(spec: &str, interval: Interval) -> Result<QuadratureRule, String> {
    if spec == "chebyshev3" {
        return Ok(rules::chebyshev3(interval));
    }
    let (family, points) = spec
        .split_once(':')
        .ok_or_else(|| format!("expected family:points, got {spec:?}"))?;
    let points: usize = points
        .parse()
        .map_err(|e| format!("bad point count in {spec:?}: {e}"))?;
    build_rule(family, points, interval)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn verdict_exit(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Certified => 0,
        Verdict::Refuted => 1,
        Verdict::Inconclusive => 2,
    }
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::try_parse().map_err(|e| {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            let _ = e.print();
            (0, String::new())
        } else {
            (EXIT_USAGE, e.to_string())
        }
    })?;

    match cli.command {
        Command::Rule {
            family,
            points,
            common,
        } => {
            let rule = build_rule(&family, points, common.interval)
                .map_err(|e| (EXIT_USAGE, e))?;
            if common.json {
                print_json(&rule);
            } else {
                println!(
                    "# {} rule, {} points on [{}, {}], exact to degree {}",
                    rule.family(),
                    rule.len(),
                    rule.interval().a(),
                    rule.interval().b(),
                    rule.exactness_degree()
                );
                println!("{:>24} {:>24}", "node", "weight");
                for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                    println!("{x:>24.17} {w:>24.17}");
                }
            }
            Ok(0)
        }
        Command::Moments {
            measure,
            max_k,
            common,
        } => {
            let mu = load_measure(&measure, common.interval).map_err(|e| (EXIT_DATA, e))?;
            let rows: Vec<(usize, f64, f64, f64)> = (0..=max_k)
                .map(|k| {
                    let m = mu.moment(k);
                    let u = rules::uniform_moment(mu.interval(), k);
                    (k, m, u, m - u)
                })
                .collect();
            if common.json {
                #[derive(Serialize)]
                struct MomentRow {
                    k: usize,
                    moment: f64,
                    uniform: f64,
                    residual: f64,
                }
                #[derive(Serialize)]
                struct MomentsOut {
                    measure: Measure,
                    moments: Vec<MomentRow>,
                }
                print_json(&MomentsOut {
                    measure: mu,
                    moments: rows
                        .into_iter()
                        .map(|(k, moment, uniform, residual)| MomentRow {
                            k,
                            moment,
                            uniform,
                            residual,
                        })
                        .collect(),
                });
            } else {
                println!(
                    "{:>4} {:>24} {:>24} {:>12}",
                    "k", "moment", "uniform", "residual"
                );
                for (k, m, u, d) in rows {
                    println!("{k:>4} {m:>24.17} {u:>24.17} {d:>12.3e}");
                }
            }
            Ok(0)
        }
        Command::Crossings {
            first,
            second,
            plot_data,
            common,
        } => {
            let mu = load_measure(&first, common.interval).map_err(|e| (EXIT_DATA, e))?;
            let nu = load_measure(&second, common.interval).map_err(|e| (EXIT_DATA, e))?;
            let report = crossing_scan(&mu, &nu).map_err(|e| (EXIT_DATA, e.to_string()))?;
            if let Some(path) = plot_data {
                let csv = plot_data_csv(&mu, &nu, &report.crossings);
                fs::write(&path, csv)
                    .map_err(|e| (EXIT_DATA, format!("cannot write {}: {e}", path.display())))?;
            }
            if common.json {
                print_json(&report);
            } else {
                println!(
                    "crossings: {} (initial sign of F2 - F1: {:?})",
                    report.count, report.initial_sign
                );
                for x in &report.crossings {
                    println!("{x:>24.17}");
                }
            }
            Ok(0)
        }
        Command::Certify {
            first,
            second,
            order,
            common,
        } => {
            let mu = load_measure(&first, common.interval).map_err(|e| (EXIT_DATA, e))?;
            let nu = load_measure(&second, common.interval).map_err(|e| (EXIT_DATA, e))?;
            let cert = certify_s_convex_order(&mu, &nu, order, DEFAULT_MOMENT_TOL)
                .map_err(|e| (EXIT_DATA, e.to_string()))?;
            if common.json {
                print_json(&cert);
            } else {
                println!("verdict: {:?} ({:?})", cert.verdict, cert.direction);
                println!(
                    "crossings: {} at {:?}",
                    cert.crossing_report.count, cert.crossing_report.crossings
                );
                println!("moment residuals: {:?}", cert.moment_residuals);
                if !cert.notes.is_empty() {
                    println!("notes: {}", cert.notes);
                }
            }
            Ok(verdict_exit(cert.verdict))
        }
        Command::Sandwich {
            measure,
            order,
            seed,
            common,
        } => {
            let mu = load_measure(&measure, common.interval).map_err(|e| (EXIT_DATA, e))?;
            let result = match certify_sandwich(&mu, order, DEFAULT_MOMENT_TOL, seed) {
                Ok(r) => r,
                Err(SandwichError::HypothesisFailed { k, residual }) => {
                    return Err((
                        2,
                        format!("moment hypothesis fails at k = {k} (residual {residual:.3e})"),
                    ));
                }
                Err(e) => return Err((EXIT_DATA, e.to_string())),
            };
            let ok = result.lower_certificate.verdict == Verdict::Certified
                && result.upper_certificate.verdict == Verdict::Certified
                && result.max_relative_violation() <= 1e-9;
            if common.json {
                print_json(&result);
            } else {
                println!(
                    "lower ({}): {:?}, upper ({}): {:?}, max spot-check violation: {:.3e}",
                    result.lower_rule.family(),
                    result.lower_certificate.verdict,
                    result.upper_rule.family(),
                    result.upper_certificate.verdict,
                    result.max_relative_violation()
                );
            }
            Ok(if ok { 0 } else { 2 })
        }
        Command::Compare {
            rule1,
            rule2,
            order,
            common,
        } => {
            let r1 = parse_rule_spec(&rule1, common.interval).map_err(|e| (EXIT_USAGE, e))?;
            let r2 = parse_rule_spec(&rule2, common.interval).map_err(|e| (EXIT_USAGE, e))?;
            let m1 = Measure::from_rule(&r1);
            let m2 = Measure::from_rule(&r2);
            let verdict = incomparability_check(&m1, &m2, order, DEFAULT_MOMENT_TOL)
                .map_err(|e| (EXIT_DATA, e.to_string()))?;
            let shared = shared_moment_degree(&m1, &m2, 2 * order + 4, DEFAULT_MOMENT_TOL);
            if common.json {
                #[derive(Serialize)]
                struct CompareOut {
                    verdict: ComparabilityVerdict,
                    shared_moment_degree: usize,
                }
                print_json(&CompareOut {
                    verdict,
                    shared_moment_degree: shared,
                });
            } else {
                match verdict {
                    ComparabilityVerdict::IncomparableCertified => {
                        println!("incomparable (shared moments: {shared})")
                    }
                    ComparabilityVerdict::NecessaryConditionsHold => {
                        println!("necessary conditions hold (shared moments: {shared})")
                    }
                    ComparabilityVerdict::MomentMismatch { j } => {
                        println!("moment mismatch at j = {j}")
                    }
                }
            }
            Ok(0)
        }
        Command::VerifyCorpus {
            order,
            count,
            seed,
            common,
        } => {
            let mut rows = Vec::with_capacity(count);
            let mut violations = 0usize;
            for index in 0..count {
                let measure_seed = seed.wrapping_add(index as u64);
                let mu = random_moment_matched_measure(order, common.interval, measure_seed)
                    .map_err(|e| (EXIT_DATA, e.to_string()))?;
                debug_assert!(check_moment_hypothesis(&mu, order, DEFAULT_MOMENT_TOL).satisfied);
                let result = certify_sandwich(&mu, order, DEFAULT_MOMENT_TOL, measure_seed)
                    .map_err(|e| (EXIT_DATA, e.to_string()))?;
                let max_violation = result.max_relative_violation();
                let violated = max_violation > 1e-9;
                if violated {
                    violations += 1;
                }
                rows.push(CorpusRow {
                    n: order,
                    seed: measure_seed,
                    index,
                    lower_verdict: result.lower_certificate.verdict,
                    upper_verdict: result.upper_certificate.verdict,
                    max_violation,
                });
            }
            if common.json {
                #[derive(Serialize)]
                struct CorpusOut {
                    order: usize,
                    count: usize,
                    seed: u64,
                    violations: usize,
                    rows: Vec<CorpusRow>,
                }
                print_json(&CorpusOut {
                    order,
                    count,
                    seed,
                    violations,
                    rows,
                });
            } else {
                println!("n,seed,index,lower_verdict,upper_verdict,max_violation");
                for r in &rows {
                    println!(
                        "{},{},{},{:?},{:?},{:.3e}",
                        r.n, r.seed, r.index, r.lower_verdict, r.upper_verdict, r.max_violation
                    );
                }
                println!("# violations: {violations}");
            }
            Ok(if violations == 0 { 0 } else { 2 })
        }
    }
}

#[derive(Serialize)]
struct CorpusRow {
    n: usize,
    seed: u64,
    index: usize,
    lower_verdict: Verdict,
    upper_verdict: Verdict,
    max_violation: f64,
}

fn plot_data_csv(mu: &Measure, nu: &Measure, crossings: &[f64]) -> String {
    let interval = mu.interval();
    let mut xs: Vec<(f64, bool)> = (0..2048)
        .map(|i| {
            (
                interval.a() + interval.length() * i as f64 / 2047.0,
                false,
            )
        })
        .collect();
    xs.extend(crossings.iter().map(|&x| (x, true)));
    xs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut out = String::from("x,F1,F2,diff,is_crossing\n");
    for (x, is_crossing) in xs {
        let f1 = mu.cdf_eval(x);
        let f2 = nu.cdf_eval(x);
        out.push_str(&format!(
            "{x},{f1},{f2},{},{}\n",
            f2 - f1,
            u8::from(is_crossing)
        ));
    }
    out
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            if !msg.is_empty() {
                eprintln!("quadorder: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
