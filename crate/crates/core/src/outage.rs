//! Result type shared by every outage estimator.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gamma,
    GaussianFbc,
    GaussianVbc,
    McExact,
    McDecomposition,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Gamma,
        Method::GaussianFbc,
        Method::GaussianVbc,
        Method::McExact,
        Method::McDecomposition,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Gamma => "gamma",
            Method::GaussianFbc => "gaussian-fbc",
            Method::GaussianVbc => "gaussian-vbc",
            Method::McExact => "mc-exact",
            Method::McDecomposition => "mc-decomposition",
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Method::McExact | Method::McDecomposition)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s.trim())
            .ok_or_else(|| Error::Usage(format!("unknown method '{s}'")))
    }
}

/// Raw analytic values further than this outside `[0, 1]` are flagged.
pub const CLAMP_FLAG_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub method: Method,
    pub p_out: f64,
    /// Present exactly for Monte Carlo methods.
    pub std_error: Option<f64>,
    pub trials: Option<u64>,
    pub diagnostics: Vec<(String, String)>,
}

impl OutageEstimate {
    /// Clamps a quadrature result into `[0, 1]`, recording a `clamped` note
    /// when the raw value was off by more than [`CLAMP_FLAG_TOLERANCE`].
    pub fn analytic(method: Method, raw: f64, mut diagnostics: Vec<(String, String)>) -> Self {
        if raw < -CLAMP_FLAG_TOLERANCE || raw > 1.0 + CLAMP_FLAG_TOLERANCE || raw.is_nan() {
            diagnostics.push(("clamped".into(), format!("{raw}")));
        }
        let p_out = if raw.is_nan() {
            raw
        } else {
            raw.clamp(0.0, 1.0)
        };
        OutageEstimate {
            method,
            p_out,
            std_error: None,
            trials: None,
            diagnostics,
        }
    }

    /// Binomial proportion `hits / trials` with its standard error.
    pub fn from_counts(
        method: Method,
        hits: u64,
        trials: u64,
        diagnostics: Vec<(String, String)>,
    ) -> Self {
        let p = hits as f64 / trials as f64;
        OutageEstimate {
            method,
            p_out: p,
            std_error: Some((p * (1.0 - p) / trials as f64).sqrt()),
            trials: Some(trials),
            diagnostics,
        }
    }

    pub fn is_clamp_flagged(&self) -> bool {
        self.diagnostics.iter().any(|(k, _)| k == "clamped")
    }

    pub fn diagnostic(&self, key: &str) -> Option<&str> {
        self.diagnostics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}
