//! Residual reports shared by all verifiers.

use crate::scalars::{fmt_scalar, Scalar};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    ExactZero,
    /// Largest |entry| of a nonzero residual.
    MaxAbs(Scalar),
    /// The identity degenerates (e.g. a vanishing Wronskian); not a failure.
    DegenerateField,
    /// Floating residual compared against a threshold.
    Numeric { max: String, pass: bool },
}

impl Residual {
    pub fn passed(&self) -> bool {
        match self {
            Residual::ExactZero | Residual::DegenerateField => true,
            Residual::MaxAbs(_) => false,
            Residual::Numeric { pass, .. } => *pass,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Residual::ExactZero => "ExactZero",
            Residual::MaxAbs(_) => "MaxAbsNumerator",
            Residual::DegenerateField => "DegenerateField",
            Residual::Numeric { pass: true, .. } => "NumericPass",
            Residual::Numeric { pass: false, .. } => "NumericFail",
        }
    }

    pub fn max_abs_string(&self) -> String {
        match self {
            Residual::ExactZero | Residual::DegenerateField => "0".into(),
            Residual::MaxAbs(x) => fmt_scalar(x),
            Residual::Numeric { max, .. } => max.clone(),
        }
    }

    /// Merge two residuals of the same identity family.
    pub fn merge(self, o: Residual) -> Residual {
        use Residual::*;
        match (self, o) {
            (MaxAbs(a), MaxAbs(b)) => MaxAbs(if a >= b { a } else { b }),
            (MaxAbs(a), _) | (_, MaxAbs(a)) => MaxAbs(a),
            (Numeric { max, pass: false }, _) | (_, Numeric { max, pass: false }) => {
                Numeric { max, pass: false }
            }
            (ExactZero, x) | (x, ExactZero) => x,
            (DegenerateField, x) | (x, DegenerateField) => x,
            (a @ Numeric { .. }, Numeric { .. }) => a,
        }
    }
}

/// Running maximum of |difference|.
#[derive(Clone, Debug, Default)]
pub struct ResidualAcc {
    max: Option<Scalar>,
    checked: usize,
}

impl ResidualAcc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, diff: &Scalar) {
        self.checked += 1;
        if diff.is_zero() {
            return;
        }
        let a = diff.abs();
        match &self.max {
            Some(m) if *m >= a => {}
            _ => self.max = Some(a),
        }
    }

    pub fn observe_pair(&mut self, lhs: &Scalar, rhs: &Scalar) {
        self.observe(&(lhs - rhs));
    }

    pub fn absorb(&mut self, o: ResidualAcc) {
        self.checked += o.checked;
        if let Some(m) = o.max {
            self.observe(&m);
            self.checked -= 1;
        }
    }

    pub fn checked(&self) -> usize {
        self.checked
    }

    pub fn residual(&self) -> Residual {
        match &self.max {
            None => Residual::ExactZero,
            Some(m) => Residual::MaxAbs(m.clone()),
        }
    }
}

/// Outcome of one identity check.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub residual: Residual,
    pub seconds: f64,
}

/// Flat JSON form.
#[derive(Serialize)]
pub struct ReportRecord<'a> {
    pub name: &'a str,
    pub params: &'a BTreeMap<String, String>,
    pub residual_kind: &'static str,
    pub max_abs: String,
    pub seconds: f64,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>) -> Self {
        IdentityReport {
            name: name.into(),
            params: BTreeMap::new(),
            residual: Residual::ExactZero,
            seconds: 0.0,
        }
    }

    pub fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.insert(k.to_string(), v.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.residual.passed()
    }

    pub fn record(&self) -> ReportRecord<'_> {
        ReportRecord {
            name: &self.name,
            params: &self.params,
            residual_kind: self.residual.kind(),
            max_abs: self.residual.max_abs_string(),
            seconds: self.seconds,
        }
    }

    /// Runs `f`, storing its residual and wall time.
    pub fn timed<F>(mut self, f: F) -> crate::Result<Self>
    where
        F: FnOnce() -> crate::Result<Residual>,
    {
        let t = Instant::now();
        self.residual = f()?;
        self.seconds = t.elapsed().as_secs_f64();
        Ok(self)
    }
}
