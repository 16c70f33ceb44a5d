//! `sixv`: builders and identity verifiers on the command line.
//!
//! Exit status: 0 when every identity holds, 1 when one fails, 2 on usage
//! errors, 3 when a computation fails.

mod args;

use args::{header, verma_weight, weight, Field};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sixv_core::funcrel::{bethe_roots, run_suite, BetheRootSet, Grid, Suite, DEFAULT_DIGITS, DEFAULT_THRESHOLD_EXP};
use sixv_core::qops::{q_operator, QSign};
use sixv_core::rmatrix::{
    recurrence_residuals, reconstruct_from_recurrences, verify_symmetries, verify_ybe, Route, YbeFields, YbeInput,
};
use sixv_core::scalars::{frac, parse_scalar, SumPolicy};
use sixv_core::tetra::{all_tuples, verify_tetrahedron_batch, SixFields, Tetra3Element};
use sixv_core::transfer::{transfer_block, TransferKind, TransferSpec};
use sixv_core::{IdentityReport, Residual, Result, Scalar, SectorBlock, SpinRMatrix, WeightParam};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "sixv", version, about = "Exact R-matrices, Q-operators and transfer matrices, with identity checks")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "SIXV_THREADS")]
    threads: Option<usize>,
    /// Report zero seconds everywhere, so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// All entries of R_{I,J}(λ;φ) as CSV.
    ComputeR {
        #[arg(long = "I")]
        big_i: String,
        #[arg(long = "J")]
        big_j: String,
        #[arg(long, default_value = "single")]
        route: String,
        /// Band `i + j ≤ max-total` for generic weights.
        #[arg(long, default_value_t = 4)]
        max_total: i64,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Yang-Baxter equation.
    VerifyYbe {
        #[arg(long = "I1")]
        i1: String,
        #[arg(long = "I2")]
        i2: String,
        #[arg(long = "I3", default_value = "1")]
        i3: String,
        /// reduced | two-layer | l-operator
        #[arg(long, default_value = "reduced")]
        form: String,
        /// Second spectral parameter (κ for the L-operator form).
        #[arg(long, default_value = "5/4")]
        lambda2: String,
        #[arg(long, default_value_t = 3)]
        max_total: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tetrahedron equation over all external tuples with entries ≤ K, plus random ones.
    VerifyTetra {
        #[arg(long, default_value_t = 1)]
        max_index: i64,
        #[arg(long, default_value = "1/2")]
        q: String,
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 2)]
        random_max: i64,
        #[arg(long)]
        dressed: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Transposition, permutation, spin-flip and inversion symmetries.
    VerifySymmetries {
        #[arg(long = "I")]
        big_i: u32,
        #[arg(long = "J")]
        big_j: u32,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Linear recurrences of the R-matrix entries and reconstruction from them.
    VerifyRecurrences {
        #[arg(long = "I")]
        big_i: String,
        #[arg(long = "J")]
        big_j: String,
        #[arg(long, default_value_t = 4)]
        max_total: i64,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// A±-block of one sector as CSV.
    BuildQ {
        #[arg(long)]
        sign: String,
        #[arg(long = "I")]
        big_i: String,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        sector: i64,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfer-matrix block of one sector as CSV.
    BuildTransfer {
        #[arg(long, default_value = "finite")]
        kind: String,
        #[arg(long = "J")]
        big_j: String,
        #[arg(long = "I")]
        big_i: u32,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        sector: i64,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Functional relations: factorization, Wronskian, TQ, higher TQ, fusion.
    VerifyFuncrel {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "small")]
        grid: String,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Bethe roots of the A± eigenvalues and their Bethe-equation residuals.
    Bethe {
        #[arg(long = "I")]
        big_i: u32,
        #[arg(long = "M")]
        m: usize,
        /// One sector; all sectors when omitted.
        #[arg(long)]
        sector: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        digits: u32,
        /// Residual threshold is 10^{-threshold-exp}.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_EXP)]
        threshold_exp: u32,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    let io = |e: std::io::Error| sixv_core::Error::Domain(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn csv_text(head: [&str; 6], rows: impl IntoIterator<Item = [String; 6]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let err = |e: csv::Error| sixv_core::Error::Domain(e.to_string());
    w.write_record(head).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| sixv_core::Error::Domain(e.to_string()))?)
        .map_err(|e| sixv_core::Error::Domain(e.to_string()))
}

fn block_csv(b: &SectorBlock) -> Result<String> {
    csv_text(["row", "l", "col", "l_out", "numerator", "denominator"], b.csv_rows())
}

fn finish(mut reports: Vec<IdentityReport>, no_timing: bool, json: &Option<PathBuf>) -> Result<Outcome> {
    if no_timing {
        for r in &mut reports {
            r.seconds = 0.0;
        }
    }
    let recs: Vec<_> = reports.iter().map(|r| r.record()).collect();
    let text = serde_json::to_string_pretty(&recs).expect("reports serialize") + "\n";
    emit(json, &text)?;
    for r in reports.iter().filter(|r| !r.passed()) {
        eprintln!("FAILED {} {:?}: {}", r.name, r.params, r.residual.max_abs_string());
    }
    Ok(if reports.iter().all(|r| r.passed()) { Outcome::Pass } else { Outcome::Fail })
}

fn with_header(mut r: IdentityReport, ctx: &sixv_core::ScalarContext) -> IdentityReport {
    for (k, v) in header(ctx) {
        r = r.param(k, v);
    }
    r
}

fn timed(r: IdentityReport, f: impl FnOnce() -> Result<Residual>) -> Result<IdentityReport> {
    r.timed(f)
}

fn rand_nonzero(rng: &mut ChaCha8Rng) -> Scalar {
    let n = rng.gen_range(1..=9i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    frac(n, rng.gen_range(1..=9))
}

fn rand_positive(rng: &mut ChaCha8Rng) -> Scalar {
    frac(rng.gen_range(1..=9), rng.gen_range(1..=9))
}

#[derive(Serialize)]
struct BetheOut<'a> {
    report: sixv_core::report::ReportRecord<'a>,
    roots: &'a BetheRootSet,
}

fn run(cli: Cli) -> Result<Outcome> {
    let nt = cli.no_timing;
    match cli.cmd {
        Cmd::ComputeR { big_i, big_j, route, max_total, field, out } => {
            let ctx = field.context()?;
            let (wi, wj) = (weight(&big_i, ctx.q())?, weight(&big_j, ctx.q())?);
            let route: Route = route.parse()?;
            let r = SpinRMatrix::build(wi.clone(), wj.clone(), route, max_total, &ctx)?;
            let tuples: Vec<[i64; 4]> = match (wi.finite(), wj.finite()) {
                (Some(a), Some(b)) => {
                    let (a, b) = (a as i64, b as i64);
                    (0..=a)
                        .flat_map(|i| (0..=b).flat_map(move |j| (0..=a).flat_map(move |ip| (0..=b).map(move |jp| [i, j, ip, jp]))))
                        .collect()
                }
                _ => r.entries().map(|(ix, _)| *ix).collect(),
            };
            let rows = tuples.into_iter().map(|ix| {
                let v = r.get(&ix);
                [ix[0].to_string(), ix[1].to_string(), ix[2].to_string(), ix[3].to_string(), v.numer().to_string(), v.denom().to_string()]
            });
            emit(&out, &csv_text(["i", "j", "i_out", "j_out", "numerator", "denominator"], rows)?)?;
            Ok(Outcome::Pass)
        }
        Cmd::VerifyYbe { i1, i2, i3, form, lambda2, max_total, seed, field, json } => {
            let ctx = field.context()?;
            let q = ctx.q();
            let w = [weight(&i1, q)?, weight(&i2, q)?, weight(&i3, q)?];
            let lam2 = parse_scalar(&lambda2)?;
            let finite = || -> Result<[u32; 3]> {
                let f = |x: &WeightParam| x.finite().ok_or_else(|| sixv_core::Error::Domain(format!("form '{form}' needs finite weights")));
                Ok([f(&w[0])?, f(&w[1])?, f(&w[2])?])
            };
            let input = match form.as_str() {
                "reduced" => YbeInput::Reduced {
                    n: finite()?,
                    lam1: ctx.lambda().clone(),
                    lam2: lam2.clone(),
                    phis: [frac(1, 1), ctx.phi().clone(), ctx.phi().clone()],
                },
                "two-layer" => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut g = || rand_nonzero(&mut rng);
                    YbeInput::TwoLayer {
                        n: finite()?,
                        fields: YbeFields {
                            w: g(),
                            w2: g(),
                            phi_h: g(),
                            phi_v: g(),
                            psi_h: g(),
                            psi_v: g(),
                            phi_h1: g(),
                            psi_h1: g(),
                            psi_v1: g(),
                            psi_h2: g(),
                        },
                    }
                }
                "l-operator" => YbeInput::LOperator {
                    wi: w[0].clone(),
                    wj: w[1].clone(),
                    rho: ctx.lambda().clone(),
                    kappa: lam2.clone(),
                    max_total,
                },
                _ => return Err(sixv_core::Error::Domain(format!("unknown form {form}"))),
            };
            let r = with_header(IdentityReport::new("ybe"), &ctx)
                .param("form", &form)
                .param("I1", &w[0])
                .param("I2", &w[1])
                .param("I3", &w[2])
                .param("lambda2", sixv_core::scalars::fmt_scalar(&lam2))
                .param("seed", seed);
            let r = timed(r, || verify_ybe(&input, q))?;
            finish(vec![r], nt, &json)
        }
        Cmd::VerifyTetra { max_index, q, random, random_max, dressed, seed, json } => {
            let q = parse_scalar(&q)?;
            let mut tuples = all_tuples(max_index);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..random {
                tuples.push(std::array::from_fn(|_| rng.gen_range(0..=random_max)));
            }
            let fields = dressed.then(|| {
                let mut g = || rand_positive(&mut rng);
                SixFields {
                    lambda: std::array::from_fn(|_| g()),
                    mu: std::array::from_fn(|_| g()),
                    c: std::array::from_fn(|_| g()),
                }
            });
            let r3 = Tetra3Element::new(q.clone());
            let start = Instant::now();
            let (res, nontrivial) = verify_tetrahedron_batch(&tuples, &r3, fields.as_ref());
            let mut r = IdentityReport::new("tetrahedron")
                .param("q", sixv_core::scalars::fmt_scalar(&q))
                .param("max_index", max_index)
                .param("random", random)
                .param("random_max", random_max)
                .param("dressed", dressed)
                .param("seed", seed)
                .param("tuples", tuples.len())
                .param("nontrivial", nontrivial);
            r.residual = res;
            r.seconds = start.elapsed().as_secs_f64();
            finish(vec![r], nt, &json)
        }
        Cmd::VerifySymmetries { big_i, big_j, field, json } => {
            let ctx = field.context()?;
            let start = Instant::now();
            let res = verify_symmetries(big_i, big_j, &ctx)?;
            let secs = start.elapsed().as_secs_f64() / res.len() as f64;
            let reports = res
                .into_iter()
                .map(|(kind, residual)| {
                    let mut r = with_header(IdentityReport::new("symmetry"), &ctx).param("kind", kind).param("I", big_i).param("J", big_j);
                    r.residual = residual;
                    r.seconds = secs;
                    r
                })
                .collect();
            finish(reports, nt, &json)
        }
        Cmd::VerifyRecurrences { big_i, big_j, max_total, field, json } => {
            let ctx = field.context()?;
            let (wi, wj) = (weight(&big_i, ctx.q())?, weight(&big_j, ctx.q())?);
            let base = |name: &str| with_header(IdentityReport::new(name), &ctx).param("I", &wi).param("J", &wj).param("max_total", max_total);
            let mut reports = Vec::new();
            for (rec, residual, checked) in recurrence_residuals(&wi, &wj, max_total, &ctx)? {
                let mut r = base("recurrence").param("which", format!("{rec:?}")).param("checked", checked);
                r.residual = residual;
                reports.push(r);
            }
            let mut unique = true;
            let r = timed(base("reconstruction"), || {
                let rec = reconstruct_from_recurrences(&wi, &wj, max_total, &ctx)?;
                unique = rec.unique();
                Ok(rec.residual)
            })?;
            reports.push(r.param("unique", unique));
            let out = finish(reports, nt, &json)?;
            Ok(if unique { out } else { Outcome::Fail })
        }
        Cmd::BuildQ { sign, big_i, m, sector, field, out } => {
            let ctx = field.context()?;
            let s: QSign = sign.parse()?;
            let b = q_operator(s, &weight(&big_i, ctx.q())?, m, sector, &ctx, SumPolicy::Continued)?;
            emit(&out, &block_csv(&b.block)?)?;
            Ok(Outcome::Pass)
        }
        Cmd::BuildTransfer { kind, big_j, big_i, m, sector, field, out } => {
            let ctx = field.context()?;
            let spec = match kind.parse::<TransferKind>()? {
                TransferKind::VermaTraceHat => TransferSpec::hat(verma_weight(&big_j, ctx.q())?, big_i, m)?,
                TransferKind::FiniteTrace => {
                    let j = big_j.parse::<u32>().map_err(|_| sixv_core::Error::Domain(format!("finite traces need J ≥ 0, got {big_j}")))?;
                    TransferSpec::finite(j, big_i, m)?
                }
            };
            emit(&out, &block_csv(&transfer_block(&spec, sector, &ctx, SumPolicy::Continued)?)?)?;
            Ok(Outcome::Pass)
        }
        Cmd::VerifyFuncrel { suite, grid, field, json } => {
            let ctx = field.context()?;
            let reports = run_suite(suite.parse::<Suite>()?, grid.parse::<Grid>()?, &ctx)?;
            finish(reports, nt, &json)
        }
        Cmd::Bethe { big_i, m, sector, digits, threshold_exp, field, json } => {
            let ctx = field.context()?;
            let sectors: Vec<i64> = match sector {
                Some(l) => vec![l],
                None => (0..=big_i as i64 * m as i64).collect(),
            };
            let mut results = Vec::new();
            for l in sectors {
                let (set, mut r) = bethe_roots(big_i, m, l, &ctx, digits, threshold_exp)?;
                if nt {
                    r.seconds = 0.0;
                }
                results.push((set, r));
            }
            let out: Vec<BetheOut> = results.iter().map(|(s, r)| BetheOut { report: r.record(), roots: s }).collect();
            emit(&json, &(serde_json::to_string_pretty(&out).expect("roots serialize") + "\n"))?;
            Ok(if results.iter().all(|(_, r)| r.passed()) { Outcome::Pass } else { Outcome::Fail })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
