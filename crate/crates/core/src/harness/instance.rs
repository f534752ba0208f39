use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{bayesian_optimal, Benchmark, JointDistribution, Marginal, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::instances::{
    correlated_continuous_family, correlated_discrete_family, dirac_wbb_instance, independent_lb_family, FamilyKind,
    LbFamily,
};
use crate::trade::ValuePair;

/// Where round values come from, e.g. `uniform`, `corr-discrete:T=10000,k=2`,
/// `dirac:a=0.45`, `pwu:seed=3,pieces=4`, `seq:values.csv`, or a JSON file
/// holding a distribution or a family.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    Uniform,
    /// Member `member` (0 = base) of a family built for horizon `horizon`.
    Family { kind: FamilyKind, horizon: u64, member: usize },
    Dirac { a: f64 },
    /// Random piecewise-uniform product with `pieces` cells per marginal.
    RandomPiecewise { seed: u64, pieces: usize },
    Json(PathBuf),
    Sequence(PathBuf),
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn args(rest: &str) -> Result<Vec<(String, String)>> {
    rest.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| config(format!("expected key=value, got '{kv}'")))
        })
        .collect()
}

fn number<T: FromStr>(key: &str, v: &str) -> Result<T> {
    // Accept 1e6-style horizons for integer fields.
    v.parse::<T>()
        .or_else(|_| {
            let f: f64 = v.parse().map_err(|_| ())?;
            if f.fract() == 0.0 && f >= 0.0 {
                format!("{f:.0}").parse::<T>().map_err(|_| ())
            } else {
                Err(())
            }
        })
        .map_err(|_| config(format!("bad value for {key}: '{v}'")))
}

impl FromStr for InstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("seq:") {
            return Ok(InstanceSpec::Sequence(PathBuf::from(path)));
        }
        if s.ends_with(".json") {
            return Ok(InstanceSpec::Json(PathBuf::from(s)));
        }
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let kv = args(rest)?;
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let known = |keys: &[&str]| -> Result<()> {
            match kv.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
                Some((k, _)) => Err(config(format!("unknown parameter '{k}' for {name}"))),
                None => Ok(()),
            }
        };
        Ok(match name {
            "uniform" => {
                known(&[])?;
                InstanceSpec::Uniform
            }
            "dirac" => {
                known(&["a"])?;
                InstanceSpec::Dirac { a: get("a").map(|v| number("a", v)).transpose()?.unwrap_or(0.45) }
            }
            "pwu" => {
                known(&["seed", "pieces"])?;
                InstanceSpec::RandomPiecewise {
                    seed: get("seed").map(|v| number("seed", v)).transpose()?.unwrap_or(0),
                    pieces: get("pieces").map(|v| number("pieces", v)).transpose()?.unwrap_or(4),
                }
            }
            fam => {
                let kind: FamilyKind = fam.parse().map_err(|_| config(format!("unknown instance '{s}'")))?;
                if kind == FamilyKind::Dirac {
                    unreachable!("handled above");
                }
                known(&["T", "k"])?;
                let horizon = number("T", get("T").ok_or_else(|| config(format!("{fam} needs T=")))?)?;
                let member = get("k").map(|v| number("k", v)).transpose()?.unwrap_or(0);
                InstanceSpec::Family { kind, horizon, member }
            }
        })
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::Uniform => write!(f, "uniform"),
            InstanceSpec::Family { kind, horizon, member } => write!(f, "{kind}:T={horizon},k={member}"),
            InstanceSpec::Dirac { a } => write!(f, "dirac:a={a}"),
            InstanceSpec::RandomPiecewise { seed, pieces } => write!(f, "pwu:seed={seed},pieces={pieces}"),
            InstanceSpec::Json(p) => write!(f, "{}", p.display()),
            InstanceSpec::Sequence(p) => write!(f, "seq:{}", p.display()),
        }
    }
}

/// A random piecewise-uniform marginal with `pieces` cells.
pub fn random_piecewise_marginal<R: Rng + ?Sized>(rng: &mut R, pieces: usize) -> Result<Marginal> {
    let pieces = pieces.max(1);
    let mut cuts: Vec<f64> = (0..pieces - 1).map(|_| rng.random_range(0.01..0.99)).collect();
    cuts.extend([0.0, 1.0]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let n = cuts.len() - 1;
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = (0..n).map(|i| weights[i] * (cuts[i + 1] - cuts[i])).sum();
    let densities: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Marginal::piecewise(&cuts, &densities)
}

pub fn random_piecewise_product(seed: u64, pieces: usize) -> Result<JointDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_piecewise_marginal(&mut rng, pieces)?;
    let b = random_piecewise_marginal(&mut rng, pieces)?;
    Ok(JointDistribution::product(s, b))
}

/// A resolved value source.
#[derive(Debug, Clone)]
pub enum Instance {
    Distribution(JointDistribution),
    Sequence(Vec<ValuePair>),
}

pub fn build_family(kind: FamilyKind, horizon: u64) -> Result<LbFamily> {
    match kind {
        FamilyKind::IndepSemi => independent_lb_family(horizon),
        FamilyKind::CorrDiscrete => correlated_discrete_family(horizon),
        FamilyKind::CorrContinuous => correlated_continuous_family(horizon),
        FamilyKind::Dirac => Err(config("use dirac:a=... for the Dirac instance")),
    }
}

fn read_sequence(path: &Path) -> Result<Vec<ValuePair>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut out = vec![];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parse = |j: usize| rec.get(j).and_then(|v| v.parse::<f64>().ok());
        match (parse(0), parse(1)) {
            (Some(s), Some(b)) => out.push(ValuePair::new(s, b)?),
            _ if i == 0 => continue,
            _ => return Err(config(format!("{}: row {} is not a pair of numbers", path.display(), i + 1))),
        }
    }
    if out.is_empty() {
        return Err(config(format!("{}: no value rows", path.display())));
    }
    Ok(out)
}

impl InstanceSpec {
    pub fn resolve(&self) -> Result<Instance> {
        Ok(match self {
            InstanceSpec::Uniform => Instance::Distribution(JointDistribution::uniform()),
            InstanceSpec::Family { kind, horizon, member } => {
                let fam = build_family(*kind, *horizon).map_err(|e| config(e.to_string()))?;
                Instance::Distribution(fam.member(*member).map_err(|e| config(e.to_string()))?.clone())
            }
            InstanceSpec::Dirac { a } => Instance::Distribution(dirac_wbb_instance(*a).map_err(|e| config(e.to_string()))?),
            InstanceSpec::RandomPiecewise { seed, pieces } => Instance::Distribution(random_piecewise_product(*seed, *pieces)?),
            InstanceSpec::Json(path) => {
                let text = std::fs::read_to_string(path)?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                let dist = if value.get("family").is_some() {
                    serde_json::from_value::<LbFamily>(value)?.base
                } else {
                    serde_json::from_value::<JointDistribution>(value)?
                };
                Instance::Distribution(dist)
            }
            InstanceSpec::Sequence(path) => Instance::Sequence(read_sequence(path)?),
        })
    }
}

/// Best diagonal price on a finite value list, with its mean per-round GFT.
/// Ties go to the smallest price.
pub fn empirical_diagonal_optimum(values: &[ValuePair]) -> Benchmark {
    let mut spans: Vec<(f64, f64)> = values.iter().map(|v| (v.s(), v.b())).filter(|(s, b)| s <= b).collect();
    if spans.is_empty() || values.is_empty() {
        return Benchmark { price: 0.0, gft: 0.0 };
    }
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ends: Vec<(f64, f64)> = spans.iter().map(|&(s, b)| (b, b - s)).collect();
    ends.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut acc, mut i, mut j) = (0.0, 0, 0);
    let (mut best_p, mut best) = (0.0, 0.0);
    while i < spans.len() {
        let x = spans[i].0;
        while i < spans.len() && spans[i].0 <= x {
            acc += spans[i].1 - spans[i].0;
            i += 1;
        }
        while j < ends.len() && ends[j].0 < x {
            acc -= ends[j].1;
            j += 1;
        }
        if acc > best + 1e-12 {
            best = acc;
            best_p = x;
        }
    }
    Benchmark { price: best_p, gft: best / values.len() as f64 }
}

impl Instance {
    /// Per-round benchmark for a run of `horizon` rounds.
    pub fn benchmark(&self, horizon: u64) -> Result<Benchmark> {
        match self {
            Instance::Distribution(d) => bayesian_optimal(d, DEFAULT_RESOLUTION),
            Instance::Sequence(v) => {
                let n = horizon as usize;
                if n > v.len() {
                    return Err(config(format!("sequence has {} rows but T = {horizon}", v.len())));
                }
                Ok(empirical_diagonal_optimum(&v[..n]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::expected_gft;
    use crate::trade::Action;

    #[test]
    fn parse_forms() {
        let cases = [
            ("uniform", InstanceSpec::Uniform),
            ("corr-discrete:T=1e4,k=2", InstanceSpec::Family { kind: FamilyKind::CorrDiscrete, horizon: 10_000, member: 2 }),
            ("indep-semi:T=512", InstanceSpec::Family { kind: FamilyKind::IndepSemi, horizon: 512, member: 0 }),
            ("dirac:a=0.42", InstanceSpec::Dirac { a: 0.42 }),
            ("pwu:seed=3", InstanceSpec::RandomPiecewise { seed: 3, pieces: 4 }),
            ("seq:v.csv", InstanceSpec::Sequence("v.csv".into())),
            ("d.json", InstanceSpec::Json("d.json".into())),
        ];
        for (text, want) in cases {
            let got: InstanceSpec = text.parse().unwrap();
            assert_eq!(got, want);
            if !matches!(got, InstanceSpec::Json(_)) {
                assert_eq!(got.to_string().parse::<InstanceSpec>().unwrap(), want);
            }
        }
        for bad in ["nope", "corr-discrete", "uniform:x=1", "dirac:a=z", "indep-semi:T=1.5"] {
            assert!(matches!(bad.parse::<InstanceSpec>(), Err(Error::Config(_))), "{bad}");
        }
        assert!(matches!("corr-discrete:T=100,k=9".parse::<InstanceSpec>().unwrap().resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn random_products_normalized() {
        for seed in 0..20 {
            let d = random_piecewise_product(seed, 5).unwrap();
            assert!((d.total_mass() - 1.0).abs() < 1e-12);
        }
        assert_ne!(random_piecewise_product(1, 4).unwrap(), random_piecewise_product(2, 4).unwrap());
    }

    #[test]
    fn empirical_optimum_matches_brute_force() {
        let d = JointDistribution::uniform();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vals: Vec<ValuePair> = (0..300).map(|_| d.sample(&mut rng)).collect();
        let b = empirical_diagonal_optimum(&vals);
        // Brute force over every seller value as candidate price.
        let f = |p: f64| vals.iter().filter(|v| v.s() <= p && p <= v.b()).map(|v| v.b() - v.s()).sum::<f64>() / 300.0;
        let best = vals.iter().map(|v| f(v.s())).fold(0.0, f64::max);
        assert!((b.gft - best).abs() < 1e-12);
        assert!((f(b.price) - b.gft).abs() < 1e-12);
        // Empirical optimum is close to the population one.
        assert!((b.gft - expected_gft(&d, Action::diagonal(0.5).unwrap())).abs() < 0.05);
    }

    #[test]
    fn sequence_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        std::fs::write(&path, "s,b\n0.1,0.9\n0.5,0.4\n0.2,0.3\n").unwrap();
        let Instance::Sequence(v) = InstanceSpec::Sequence(path.clone()).resolve().unwrap() else { panic!() };
        assert_eq!(v.len(), 3);
        let inst = Instance::Sequence(v);
        let b = inst.benchmark(3).unwrap();
        assert!((b.gft - 0.9 / 3.0).abs() < 1e-12 && b.price == 0.2);
        assert!(inst.benchmark(4).is_err());
        std::fs::write(&path, "0.1,0.9\nx,y\n").unwrap();
        assert!(InstanceSpec::Sequence(path).resolve().is_err());
    }
}
