//! Single operating-point evaluation: URLLC and eMBB rates of one scheme.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::{compute_lambda_sq, effective_cable_noise_variance};
use crate::embb::{scheme_rate, EmbbModel, EmbbScheme};
use crate::error::{Error, Result};
use crate::expectation::{Evaluation, ExpectationPolicy, FailureModel};
use crate::params::{AccessMode, SystemParams};
use crate::urllc::urllc_rate;

/// A multiple-access scheme together with its fronthaul model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Oma,
    NomaPunct,
    NomaTin,
    NomaSic,
    IdealOma,
    IdealPunct,
    IdealTin,
    IdealSic,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Oma,
        Scheme::NomaPunct,
        Scheme::NomaTin,
        Scheme::NomaSic,
        Scheme::IdealOma,
        Scheme::IdealPunct,
        Scheme::IdealTin,
        Scheme::IdealSic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Oma => "OMA",
            Scheme::NomaPunct => "NOMA-punct",
            Scheme::NomaTin => "NOMA-TIN",
            Scheme::NomaSic => "NOMA-SIC",
            Scheme::IdealOma => "ideal-OMA",
            Scheme::IdealPunct => "ideal-punct",
            Scheme::IdealTin => "ideal-TIN",
            Scheme::IdealSic => "ideal-SIC",
        }
    }

    pub fn embb(self) -> EmbbScheme {
        match self {
            Scheme::Oma | Scheme::IdealOma => EmbbScheme::Oma,
            Scheme::NomaPunct | Scheme::IdealPunct => EmbbScheme::Puncturing,
            Scheme::NomaTin | Scheme::IdealTin => EmbbScheme::Tin,
            Scheme::NomaSic | Scheme::IdealSic => EmbbScheme::Sic,
        }
    }

    pub fn is_ideal(self) -> bool {
        matches!(self, Scheme::IdealOma | Scheme::IdealPunct | Scheme::IdealTin | Scheme::IdealSic)
    }

    pub fn access_mode(self) -> AccessMode {
        match self.embb() {
            EmbbScheme::Oma => AccessMode::Oma,
            _ => AccessMode::Noma,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let known: Vec<_> = Scheme::ALL.iter().map(|x| x.label()).collect();
                Error::Config(format!("unknown scheme '{s}' (expected one of {})", known.join(", ")))
            })
    }
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// URLLC and eMBB per-UE rates at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub scheme: Scheme,
    #[serde(rename = "R_U")]
    pub r_u: f64,
    #[serde(rename = "R_B")]
    pub r_b: f64,
    pub urllc_feasible: bool,
    #[serde(rename = "eps_U_D")]
    pub eps_u_d: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl RatePoint {
    pub fn mc_std_err(&self) -> f64 {
        self.diagnostics.get("mc_std_err").copied().unwrap_or(0.0)
    }
}

/// Evaluates `scheme` at `params`. SIC uses the URLLC decoding target of the
/// same access mode as its decode-failure probability.
pub fn evaluate_point(
    params: &SystemParams<f64>,
    scheme: Scheme,
    policy: &ExpectationPolicy,
    failures: FailureModel,
) -> Result<RatePoint> {
    let mode = scheme.access_mode();
    let urllc = urllc_rate(params, mode)?;
    let model = if scheme.is_ideal() {
        EmbbModel::ideal(params)?
    } else {
        EmbbModel::new(params, mode)?
    };
    let embb = scheme_rate(&model, params, scheme.embb(), urllc.eps_u_d, failures, policy)?;

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("S_U".to_string(), urllc.sinr);
    diagnostics.insert("V".to_string(), urllc.dispersion);
    diagnostics.insert("blockage_prob".to_string(), urllc.blockage_prob);
    if !scheme.is_ideal() {
        diagnostics.insert("lambda_sq".to_string(), compute_lambda_sq(params, mode)?);
        diagnostics.insert(
            "cable_noise_variance".to_string(),
            effective_cable_noise_variance(params, mode)?,
        );
    }
    diagnostics.insert("mc_std_err".to_string(), embb.std_err);
    diagnostics.insert("jittered_states".to_string(), embb.jittered as f64);
    match embb.evaluation {
        Evaluation::Exact { states } => {
            diagnostics.insert("exact_states".to_string(), states as f64);
        }
        Evaluation::MonteCarlo { samples } => {
            diagnostics.insert("mc_samples".to_string(), samples as f64);
        }
    }
    Ok(RatePoint {
        scheme,
        r_u: urllc.rate,
        r_b: embb.rate,
        urllc_feasible: urllc.feasible,
        eps_u_d: urllc.eps_u_d,
        diagnostics,
    })
}
