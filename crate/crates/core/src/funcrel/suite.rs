use super::{
    verify_factorization, verify_fusion, verify_higher_tq, verify_tq, verify_wronskian_relation, FusionDirection,
};
use crate::error::{Error, Result};
use crate::qops::QSign;
use crate::report::IdentityReport;
use crate::rmatrix::{GenericWeight, WeightParam};
use crate::scalars::{frac, ScalarContext};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Factorization,
    Wronskian,
    Tq,
    HigherTq,
    Fusion,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "factorization" => Suite::Factorization,
            "wronskian" => Suite::Wronskian,
            "tq" => Suite::Tq,
            "higher-tq" => Suite::HigherTq,
            "fusion" => Suite::Fusion,
            "all" => Suite::All,
            _ => return Err(Error::Domain(format!("unknown suite {s}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    /// `I, M ≤ 2`, every sector.
    Small,
    /// Adds `M = 3` and `J = 3`.
    Full,
}

impl std::str::FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Grid::Small),
            "full" => Ok(Grid::Full),
            _ => Err(Error::Domain(format!("unknown grid {s}"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Job {
    Factorization(WeightParam, u32, usize, i64),
    Wronskian(u32, usize, i64),
    Tq(u32, usize, i64, QSign),
    HigherTq(u32, u32, usize, i64, QSign),
    Fusion(u32, u32, usize, i64, FusionDirection),
}

fn jobs(suite: Suite, grid: Grid, ctx: &ScalarContext) -> Result<Vec<Job>> {
    let q = ctx.q();
    let shapes: Vec<(u32, usize)> = match grid {
        Grid::Small => vec![(1, 1), (1, 2), (2, 1), (2, 2)],
        Grid::Full => vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)],
    };
    let js: Vec<u32> = match grid {
        Grid::Small => vec![1, 2],
        Grid::Full => vec![1, 2, 3],
    };
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut out = Vec::new();
    for &(i, m) in &shapes {
        for l in 0..=(i as i64 * m as i64) {
            if want(Suite::Factorization) {
                let mut auxes: Vec<WeightParam> = (0..=js.len() as i64).map(|j| WeightParam::Generic(GenericWeight::continued(j, q))).collect();
                auxes.push(WeightParam::Generic(GenericWeight::new(frac(2, 7), q)?));
                for a in auxes {
                    out.push(Job::Factorization(a, i, m, l));
                }
            }
            if want(Suite::Wronskian) {
                out.push(Job::Wronskian(i, m, l));
            }
            for s in [QSign::Plus, QSign::Minus] {
                if want(Suite::Tq) {
                    out.push(Job::Tq(i, m, l, s));
                }
                if want(Suite::HigherTq) {
                    for &j in js.iter().filter(|&&j| j >= 2) {
                        out.push(Job::HigherTq(j, i, m, l, s));
                    }
                }
            }
            if want(Suite::Fusion) {
                for &j in &js {
                    for d in [FusionDirection::Up, FusionDirection::Down] {
                        out.push(Job::Fusion(j, i, m, l, d));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn run_job(job: &Job, ctx: &ScalarContext) -> Result<IdentityReport> {
    match job {
        Job::Factorization(a, i, m, l) => verify_factorization(a, *i, *m, *l, ctx),
        Job::Wronskian(i, m, l) => verify_wronskian_relation(*i, *m, *l, ctx),
        Job::Tq(i, m, l, s) => verify_tq(*i, *m, *l, ctx, *s),
        Job::HigherTq(j, i, m, l, s) => {
            // step λ off a singular sample
            let mut c = ctx.clone();
            for _ in 0..8 {
                match verify_higher_tq(*j, *i, *m, *l, &c, *s) {
                    Err(Error::SingularSample(_)) => c = c.with_lambda(c.lambda() * frac(11, 10)),
                    r => return r,
                }
            }
            Err(Error::SingularSample("no regular λ sample found".into()))
        }
        Job::Fusion(j, i, m, l, d) => verify_fusion(*j, *i, *m, *l, ctx, *d),
    }
}

/// Runs every identity of `suite` on `grid`, in parallel; the result is sorted
/// by name and parameters, so it does not depend on scheduling.
pub fn run_suite(suite: Suite, grid: Grid, ctx: &ScalarContext) -> Result<Vec<IdentityReport>> {
    let jobs = jobs(suite, grid, ctx)?;
    let mut reports = jobs.par_iter().map(|j| run_job(j, ctx)).collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| (&a.name, format!("{:?}", a.params)).cmp(&(&b.name, format!("{:?}", b.params))));
    Ok(reports)
}
