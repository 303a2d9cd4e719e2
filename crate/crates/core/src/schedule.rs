//! Perturbation sequences `eps_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::FeasError;

/// The perturbation `eps_k` added to every constraint value at iteration `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PerturbationSchedule {
    /// `nu * (k + 1)^(-r)`.
    PowerLaw { nu: f64, r: f64 },
    /// No perturbation; PACA then coincides with CARM on the product space.
    Zero,
}

impl PerturbationSchedule {
    /// `1/(k+1)`.
    pub const HARMONIC: Self = Self::PowerLaw { nu: 1.0, r: 1.0 };
    /// `1/sqrt(k+1)`.
    pub const INV_SQRT: Self = Self::PowerLaw { nu: 1.0, r: 0.5 };

    pub fn power_law(nu: f64, r: f64) -> Result<Self, FeasError> {
        // Exponents above 1 give summable sequences: allowed, but not divergent.
        if !(nu > 0.0 && nu.is_finite() && r > 0.0 && r.is_finite()) {
            return Err(FeasError::InvalidSchedule(format!(
                "powerlaw:nu={nu},r={r}"
            )));
        }
        Ok(Self::PowerLaw { nu, r })
    }

    pub fn epsilon(&self, k: usize) -> f64 {
        match *self {
            Self::PowerLaw { nu, r } => {
                let base = (k as f64) + 1.0;
                if r == 1.0 {
                    nu / base
                } else if r == 0.5 {
                    nu / base.sqrt()
                } else {
                    nu * base.powf(-r)
                }
            }
            Self::Zero => 0.0,
        }
    }

    /// Whether `sum_k eps_k` diverges, the hypothesis of finite termination.
    pub fn is_divergent(&self) -> bool {
        match *self {
            Self::PowerLaw { r, .. } => r <= 1.0,
            Self::Zero => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// First `k` with `eps_k < margin`, searched up to `limit`.
    pub fn first_below(&self, margin: f64, limit: usize) -> Option<usize> {
        (0..=limit).find(|&k| self.epsilon(k) < margin)
    }
}

/// Free function form of [`PerturbationSchedule::epsilon`].
pub fn epsilon(s: &PerturbationSchedule, k: usize) -> f64 {
    s.epsilon(k)
}

impl fmt::Display for PerturbationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerLaw { nu, r } => write!(f, "powerlaw:nu={nu},r={r}"),
            Self::Zero => f.write_str("zero"),
        }
    }
}

impl FromStr for PerturbationSchedule {
    type Err = FeasError;

    /// Accepts `zero` and `powerlaw:nu=<f>,r=<f>` (either key may be omitted; both default to 1).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FeasError::InvalidSchedule(s.to_string());
        let s_trim = s.trim();
        if s_trim.eq_ignore_ascii_case("zero") {
            return Ok(Self::Zero);
        }
        let rest = s_trim.strip_prefix("powerlaw").ok_or_else(bad)?;
        let (mut nu, mut r) = (1.0, 1.0);
        let rest = rest.strip_prefix(':').unwrap_or(rest);
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (key, value) = part.split_once('=').ok_or_else(bad)?;
                let v: f64 = value.trim().parse().map_err(|_| bad())?;
                match key.trim() {
                    "nu" => nu = v,
                    "r" => r = v,
                    _ => return Err(bad()),
                }
            }
        }
        Self::power_law(nu, r).map_err(|_| bad())
    }
}
