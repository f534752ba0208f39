use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;

use super::baselines::{EtcTwoBit, FixedPrice};
use super::gbb::GbbOneBit;
use super::params::params_for_horizon;
use super::profit_max::ProfitMax;
use crate::error::{Error, Result};
use crate::trade::{Action, Mechanism};

/// Parsed mechanism description, e.g. `gbb-onebit`, `profitmax:K=4,beta=50`,
/// `etc2bit:explore=5000,grid=21`, `fixed:p=0.5,q=0.5`.
///
/// `gbb-onebit` also accepts optional `K=` and `beta=` overrides; `etc2bit`
/// defaults to `explore = ceil(T^{2/3})` and `grid = ceil(T^{1/3}) + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechanismSpec {
    GbbOneBit { k: Option<usize>, beta: Option<f64> },
    ProfitMax { k: usize, beta: f64 },
    EtcTwoBit { explore: Option<u64>, grid: Option<usize> },
    Fixed { p: f64, q: f64 },
}

pub type BoxedMechanism = Box<dyn Mechanism + Send>;

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_args(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| config(format!("expected key=value, got '{part}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take<T: FromStr>(args: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    args.remove(key)
        .map(|v| v.parse::<T>().map_err(|_| config(format!("bad value for {key}: '{v}'"))))
        .transpose()
}

fn require<T: FromStr>(args: &mut BTreeMap<String, String>, key: &str) -> Result<T> {
    take(args, key)?.ok_or_else(|| config(format!("missing {key}")))
}

impl FromStr for MechanismSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut args = parse_args(rest)?;
        let spec = match name.trim() {
            "gbb-onebit" => MechanismSpec::GbbOneBit {
                k: take(&mut args, "K")?,
                beta: take(&mut args, "beta")?,
            },
            "profitmax" => MechanismSpec::ProfitMax {
                k: require(&mut args, "K")?,
                beta: require(&mut args, "beta")?,
            },
            "etc2bit" => MechanismSpec::EtcTwoBit {
                explore: take(&mut args, "explore")?,
                grid: take(&mut args, "grid")?,
            },
            "fixed" => MechanismSpec::Fixed {
                p: require(&mut args, "p")?,
                q: require(&mut args, "q")?,
            },
            other => return Err(config(format!("unknown mechanism '{other}'"))),
        };
        if let Some(k) = args.keys().next() {
            return Err(config(format!("unknown parameter '{k}' for {name}")));
        }
        Ok(spec)
    }
}

impl fmt::Display for MechanismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanismSpec::GbbOneBit { k, beta } => {
                let mut parts = vec![];
                if let Some(k) = k {
                    parts.push(format!("K={k}"));
                }
                if let Some(b) = beta {
                    parts.push(format!("beta={b}"));
                }
                if parts.is_empty() {
                    write!(f, "gbb-onebit")
                } else {
                    write!(f, "gbb-onebit:{}", parts.join(","))
                }
            }
            MechanismSpec::ProfitMax { k, beta } => write!(f, "profitmax:K={k},beta={beta}"),
            MechanismSpec::EtcTwoBit { explore, grid } => {
                let mut parts = vec![];
                if let Some(e) = explore {
                    parts.push(format!("explore={e}"));
                }
                if let Some(g) = grid {
                    parts.push(format!("grid={g}"));
                }
                if parts.is_empty() {
                    write!(f, "etc2bit")
                } else {
                    write!(f, "etc2bit:{}", parts.join(","))
                }
            }
            MechanismSpec::Fixed { p, q } => write!(f, "fixed:p={p},q={q}"),
        }
    }
}

impl MechanismSpec {
    /// Instantiates the mechanism for `horizon` rounds with its own random stream.
    pub fn build(&self, horizon: u64, rng: ChaCha8Rng) -> Result<BoxedMechanism> {
        let t = horizon as f64;
        Ok(match *self {
            MechanismSpec::GbbOneBit { k, beta } => {
                let mut p = params_for_horizon(horizon)?;
                if let Some(k) = k {
                    p = p.with_k(k)?;
                }
                if let Some(b) = beta {
                    p = p.with_beta(b)?;
                }
                Box::new(GbbOneBit::with_params(p, rng)?)
            }
            MechanismSpec::ProfitMax { k, beta } => Box::new(ProfitMax::new(k, beta, horizon, rng)?),
            MechanismSpec::EtcTwoBit { explore, grid } => {
                let explore = explore.unwrap_or_else(|| t.powf(2.0 / 3.0).ceil() as u64);
                let grid = grid.unwrap_or_else(|| t.cbrt().ceil() as usize + 1);
                Box::new(EtcTwoBit::new(explore, grid)?)
            }
            MechanismSpec::Fixed { p, q } => Box::new(FixedPrice::new(Action::new(p, q)?)),
        })
    }
}
