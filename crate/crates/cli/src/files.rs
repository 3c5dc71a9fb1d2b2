//! On-disk formats for channels, distributions, and inequality systems.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rrlab_core::channel::{ChannelSpec, ZChannelSpec};
use rrlab_core::error::{Error, Result};
use rrlab_core::factored::{Factor, FactoredDistribution, Scheme};
use rrlab_core::fme::{InequalitySystem, Sense};

/// Channel file: `cards: [|X1|, |X2|, |X3|, |Y1|, |Y2|]` with either a full
/// transition array `w` (index order `(x1, x2, x3, y1, y2)`) or the factored
/// Z form `w2` (`(x1, x2, x3, y2)`) and `w1` (`(y2, x3, y1)`).
#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub cards: [usize; 5],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w1: Option<Vec<f64>>,
}

impl ChannelFile {
    pub fn into_channel(self) -> Result<ChannelSpec> {
        match (self.w, self.w2, self.w1) {
            (Some(w), None, None) => ChannelSpec::validate_channel(self.cards, w),
            (None, Some(w2), Some(w1)) => {
                ZChannelSpec::new(self.cards, w2, w1)?.lift_z_channel()
            }
            _ => Err(Error::InvalidInput(
                "channel file needs either `w` or both `w2` and `w1`".into(),
            )),
        }
    }

    pub fn into_z_channel(self) -> Result<ZChannelSpec> {
        match (self.w2, self.w1) {
            (Some(w2), Some(w1)) => ZChannelSpec::new(self.cards, w2, w1),
            _ => Err(Error::InvalidInput("a Z-channel file needs `w2` and `w1`".into())),
        }
    }
}

/// Distribution file mirroring the factor list of a scheme.
#[derive(Debug, Serialize, Deserialize)]
pub struct DistributionFile {
    pub scheme: String,
    pub cards: BTreeMap<String, usize>,
    pub factors: Vec<FactorFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FactorFile {
    pub produced: Vec<String>,
    pub given: Vec<String>,
    pub probs: Vec<f64>,
}

impl DistributionFile {
    pub fn into_distribution(self) -> Result<FactoredDistribution> {
        let scheme = Scheme::parse(&self.scheme)?;
        let factors = self
            .factors
            .into_iter()
            .map(|f| {
                let produced_cards: Vec<usize> = f
                    .produced
                    .iter()
                    .map(|v| {
                        self.cards
                            .get(v)
                            .copied()
                            .ok_or_else(|| Error::UnknownVariable(v.clone()))
                    })
                    .collect::<Result<_>>()?;
                let given_cards: Vec<usize> = f
                    .given
                    .iter()
                    .map(|v| {
                        self.cards
                            .get(v)
                            .copied()
                            .ok_or_else(|| Error::UnknownVariable(v.clone()))
                    })
                    .collect::<Result<_>>()?;
                Ok(Factor {
                    produced: f.produced,
                    given: f.given,
                    produced_cards,
                    given_cards,
                    probs: f.probs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FactoredDistribution::new(scheme, self.cards, factors)
    }
}

/// Standalone inequality-system file for the `fme` subcommand.
#[derive(Debug, Serialize, Deserialize)]
pub struct SystemFile {
    pub vars: Vec<String>,
    pub rows: Vec<RowFile>,
    /// Variables to eliminate, in order; empty means eliminate everything
    /// not named in `r1`/`r2` when projecting.
    #[serde(default)]
    pub eliminate: Vec<String>,
    #[serde(default)]
    pub r1: Vec<String>,
    #[serde(default)]
    pub r2: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RowFile {
    pub coeffs: Vec<f64>,
    pub sense: String,
    pub rhs: f64,
}

impl SystemFile {
    pub fn into_system(&self) -> Result<InequalitySystem> {
        let mut sys = InequalitySystem::new(self.vars.clone());
        for row in &self.rows {
            if row.coeffs.len() != self.vars.len() {
                return Err(Error::LengthMismatch {
                    expected: self.vars.len(),
                    got: row.coeffs.len(),
                });
            }
            let sense = match row.sense.as_str() {
                "<=" => Sense::Le,
                ">=" => Sense::Ge,
                other => {
                    return Err(Error::InvalidInput(format!("unknown sense `{other}`")))
                }
            };
            let terms: Vec<(&str, f64)> = self
                .vars
                .iter()
                .map(String::as_str)
                .zip(row.coeffs.iter().copied())
                .collect();
            sys.push_row(&terms, sense, row.rhs)?;
        }
        Ok(sys)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("cannot parse {}: {e}", path.display())))
}
