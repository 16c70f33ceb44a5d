use clap::Args;
use sixv_core::rmatrix::{GenericWeight, WeightParam};
use sixv_core::scalars::{fmt_scalar, parse_scalar, rational_sqrt};
use sixv_core::{Error, Result, Scalar, ScalarContext};

/// Spectral data. `q = p²`; give `--p`, or `--q` when `q^{1/2}` is irrational.
#[derive(Args, Debug, Clone)]
pub struct Field {
    #[arg(long, conflicts_with = "q")]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, default_value = "3/5")]
    pub lambda: String,
    #[arg(long, default_value = "2/7")]
    pub phi: String,
}

impl Field {
    pub fn context(&self) -> Result<ScalarContext> {
        let lam = parse_scalar(&self.lambda)?;
        let phi = parse_scalar(&self.phi)?;
        match (&self.p, &self.q) {
            (Some(p), _) => ScalarContext::new(parse_scalar(p)?, lam, phi),
            (None, Some(q)) => {
                let q = parse_scalar(q)?;
                match rational_sqrt(&q) {
                    Some(p) => ScalarContext::new(p, lam, phi),
                    None => ScalarContext::from_q(q, lam, phi),
                }
            }
            (None, None) => ScalarContext::new(parse_scalar("1/2")?, lam, phi),
        }
    }
}

/// `N` (finite), `x=a/b` (generic, `q^J = a/b`) or `verma(k)`.
pub fn weight(s: &str, q: &Scalar) -> Result<WeightParam> {
    let s = s.trim();
    if let Some(x) = s.strip_prefix("x=") {
        return Ok(WeightParam::Generic(GenericWeight::new(parse_scalar(x)?, q)?));
    }
    if let Some(k) = s.strip_prefix("verma(").and_then(|r| r.strip_suffix(')')) {
        let k: i64 = k.trim().parse().map_err(|_| Error::Domain(format!("bad weight '{s}'")))?;
        return Ok(WeightParam::Generic(GenericWeight::continued(k, q)));
    }
    s.parse::<u32>().map(WeightParam::NonNeg).map_err(|_| Error::Domain(format!("bad weight '{s}'")))
}

/// Auxiliary weight of a Verma trace: an integer means the Verma module of that weight.
pub fn verma_weight(s: &str, q: &Scalar) -> Result<WeightParam> {
    match s.trim().parse::<i64>() {
        Ok(k) => Ok(WeightParam::Generic(GenericWeight::continued(k, q))),
        Err(_) => weight(s, q),
    }
}

pub fn header(ctx: &ScalarContext) -> Vec<(&'static str, String)> {
    let mut h = vec![("q", fmt_scalar(ctx.q()))];
    if let Ok(p) = ctx.p() {
        h.push(("p", fmt_scalar(p)));
    }
    h.push(("lambda", fmt_scalar(ctx.lambda())));
    h.push(("phi", fmt_scalar(ctx.phi())));
    h
}
