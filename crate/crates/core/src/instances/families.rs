use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::region::{ActionRegion, Interval};
use crate::dist::{Atom, JointDistribution, Marginal, UniformRegion};
use crate::error::{domain, Error, Result};
use crate::trade::Action;

/// The instance-side unit of the independent construction.
pub const ELL: f64 = 1.0 / 13.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    IndepSemi,
    CorrDiscrete,
    CorrContinuous,
    Dirac,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::IndepSemi => "indep-semi",
            FamilyKind::CorrDiscrete => "corr-discrete",
            FamilyKind::CorrContinuous => "corr-continuous",
            FamilyKind::Dirac => "dirac",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "indep-semi" => FamilyKind::IndepSemi,
            "corr-discrete" => FamilyKind::CorrDiscrete,
            "corr-continuous" => FamilyKind::CorrContinuous,
            "dirac" => FamilyKind::Dirac,
            other => return Err(Error::Config(format!("unknown family '{other}'"))),
        })
    }
}

/// A base instance `D^0` with its perturbed members `D^1..D^K` and the
/// action sets the lower-bound arguments talk about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbFamily {
    #[serde(rename = "family")]
    pub kind: FamilyKind,
    #[serde(rename = "T")]
    pub horizon: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    pub regions: BTreeMap<String, ActionRegion>,
    pub base: JointDistribution,
    pub hards: Vec<JointDistribution>,
}

impl LbFamily {
    /// `D^0, D^1, ...` in order.
    pub fn members(&self) -> impl Iterator<Item = &JointDistribution> {
        std::iter::once(&self.base).chain(&self.hards)
    }

    pub fn member(&self, idx: usize) -> Result<&JointDistribution> {
        self.members()
            .nth(idx)
            .ok_or_else(|| Error::IndexOutOfRange(format!("member {idx} of {}", self.hards.len() + 1)))
    }

    pub fn region(&self, name: &str) -> Result<&ActionRegion> {
        self.regions
            .get(name)
            .ok_or_else(|| Error::Internal(format!("family has no region '{name}'")))
    }
}

fn ell(n: f64) -> f64 {
    n / 13.0
}

/// Product instances with semi-transparent feedback lower bound; `D^1` and
/// `D^2` tilt the buyer density on the top two `ℓ`-cells in opposite
/// directions by `δ = 4T^{-1/3}`.
pub fn independent_lb_family(horizon: u64) -> Result<LbFamily> {
    if horizon < 512 {
        return Err(domain(format!("independent family needs T >= 512, got {horizon}")));
    }
    let delta = 4.0 * (horizon as f64).powf(-1.0 / 3.0);
    let d = 13.0 / 4.0;
    let seller = Marginal::piecewise(&[0.0, ell(3.0), ell(9.0), ell(10.0), 1.0], &[d, 0.0, d, 0.0])?;
    let buyer_breaks = [0.0, ell(3.0), ell(4.0), ell(10.0), ell(11.0), ell(12.0), 1.0];
    let buyer = |lo: f64, hi: f64| Marginal::piecewise(&buyer_breaks, &[0.0, d, 0.0, d, d * lo, d * hi]);
    let base = JointDistribution::product(seller.clone(), buyer(1.0, 1.0)?);
    let d1 = JointDistribution::product(seller.clone(), buyer(1.0 - delta, 1.0 + delta)?);
    let d2 = JointDistribution::product(seller, buyer(1.0 + delta, 1.0 - delta)?);

    let mut regions = BTreeMap::new();
    regions.insert("G1".into(), ActionRegion::closed_rect(ell(10.0), 1.0, ell(4.0), ell(10.0)));
    regions.insert(
        "G1'".into(),
        ActionRegion::rect(Interval::closed(ell(9.5), 1.0), Interval::open_lo(ell(3.5), 1.0)),
    );
    regions.insert("G2".into(), ActionRegion::closed_rect(ell(3.0), ell(9.0), 0.0, ell(3.0)));
    regions.insert(
        "G2'".into(),
        ActionRegion::rect(Interval::open_hi(0.0, ell(9.5)), Interval::closed(0.0, ell(3.5))),
    );
    regions.insert("I".into(), ActionRegion::closed_rect(0.0, 1.0, ell(11.0), 1.0));

    Ok(LbFamily {
        kind: FamilyKind::IndepSemi,
        horizon,
        k: 2,
        delta,
        params: BTreeMap::from([("ell".into(), ELL)]),
        regions,
        base,
        hards: vec![d1, d2],
    })
}

/// `K = max(1, floor(T^{1/4}))`.
pub fn correlated_k(horizon: u64) -> usize {
    ((horizon as f64).powf(0.25) + 1e-9).floor().max(1.0) as usize
}

/// Seller coordinate `i/5K`.
fn grid_p(i: usize, k: usize) -> f64 {
    i as f64 / (5 * k) as f64
}

/// Buyer coordinate `0.4 + j/5K`, formed as one integer ratio so equal
/// grid values are equal floats.
fn grid_q(j: usize, k: usize) -> f64 {
    grid_p(2 * k + j, k)
}

/// Index layout of the discrete family's atoms: `V_UL[0..=3K]`,
/// `V_LR[0..=2K]`, four corners, then the majority point.
struct DiscreteLayout {
    k: usize,
}

impl DiscreteLayout {
    fn ul(&self, i: usize) -> usize {
        i
    }
    fn lr(&self, i: usize) -> usize {
        3 * self.k + 1 + i
    }
    fn atoms(&self, delta: f64) -> Vec<Atom> {
        let k = self.k;
        let mut atoms: Vec<Atom> = (0..=3 * k)
            .map(|i| Atom { s: grid_p(i, k), b: grid_q(i, k), mass: delta })
            .collect();
        atoms.extend((0..=2 * k).map(|i| Atom { s: grid_p(k + i, k), b: grid_q(i, k), mass: delta }));
        for (s, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            atoms.push(Atom { s, b, mass: 0.1 });
        }
        atoms.push(Atom { s: 0.4, b: 0.6, mass: 0.5 });
        atoms
    }
}

/// Correlated atom instances for one-bit feedback: a majority point, corner
/// points and two diagonal chains of `δ`-atoms; `D^k` moves `δ` along the
/// chains around index `k`.
pub fn correlated_discrete_family(horizon: u64) -> Result<LbFamily> {
    if horizon < 16 {
        return Err(domain(format!("correlated family needs T >= 16, got {horizon}")));
    }
    let k = correlated_k(horizon);
    let delta = 0.1 / (5 * k + 2) as f64;
    let layout = DiscreteLayout { k };
    let atoms = layout.atoms(delta);
    let base = JointDistribution::mixture(atoms.clone(), vec![])?;
    let mut hards = Vec::with_capacity(k);
    for kk in 1..=k {
        let mut a = atoms.clone();
        a[layout.ul(kk)].mass += delta;
        a[layout.lr(kk - 1)].mass += delta;
        a[layout.ul(kk - 1)].mass -= delta;
        a[layout.lr(kk)].mass -= delta;
        hards.push(JointDistribution::mixture(a, vec![])?);
    }

    let mut regions = BTreeMap::new();
    let all: Vec<[f64; 2]> = (0..=3 * k)
        .flat_map(|i| (0..=3 * k).map(move |j| [grid_p(i, k), grid_q(j, k)]))
        .collect();
    let good = |kk: usize| -> Vec<[f64; 2]> { (0..=k).map(|i| [grid_p(2 * k + i, k), grid_q(kk, k)]).collect() };
    let g_all: Vec<[f64; 2]> = (0..=k).flat_map(good).collect();
    regions.insert("A".into(), ActionRegion::points(all.clone()));
    regions.insert("G".into(), ActionRegion::points(g_all.clone()));
    regions.insert(
        "B".into(),
        ActionRegion::points(all).minus(ActionRegion::points(g_all)),
    );
    for kk in 0..=k {
        regions.insert(format!("G^{kk}"), ActionRegion::points(good(kk)));
    }
    for kk in 1..=k {
        let hor = (0..k).map(|i| [grid_p(kk + i, k), grid_q(kk, k)]).collect();
        let ll = (0..kk).map(|i| [grid_p(kk - 1, k), grid_q(i, k)]).collect();
        let ul = (kk..=3 * k).map(|i| [grid_p(kk - 1, k), grid_q(i, k)]).collect();
        let lr = (0..kk).map(|i| [grid_p(k + kk - 1, k), grid_q(i, k)]).collect();
        let ur = (kk + 1..=3 * k).map(|i| [grid_p(k + kk - 1, k), grid_q(i, k)]).collect();
        for (name, pts) in [("hor", hor), ("LL", ll), ("UL", ul), ("LR", lr), ("UR", ur)] {
            regions.insert(format!("I^{kk}_{name}"), ActionRegion::points(pts));
        }
    }

    Ok(LbFamily {
        kind: FamilyKind::CorrDiscrete,
        horizon,
        k,
        delta,
        params: BTreeMap::new(),
        regions,
        base,
        hards,
    })
}

/// Index layout of the continuous family's regions: `HL^0..=K`,
/// `HR^0..=K`, the vertical strip, four corners, then the majority square.
struct ContinuousLayout {
    k: usize,
}

impl ContinuousLayout {
    fn hl(&self, i: usize) -> usize {
        i
    }
    fn hr(&self, i: usize) -> usize {
        self.k + 1 + i
    }
}

/// The discrete construction with every atom spread into a density-bounded
/// region; `D^k` shifts `δ` between the diagonal strips of buyer band `k`.
pub fn correlated_continuous_family(horizon: u64) -> Result<LbFamily> {
    if horizon < 16 {
        return Err(domain(format!("correlated family needs T >= 16, got {horizon}")));
    }
    let k = correlated_k(horizon);
    let kp = (k + 1) as f64;
    let delta = 0.02 / (2.0 * kp);
    let big_delta = 0.1 / kp;
    let band = |i: usize| (0.45 + i as f64 * big_delta, 0.45 + (i + 1) as f64 * big_delta);
    let layout = ContinuousLayout { k };

    let mut regions = vec![];
    for i in 0..=k {
        regions.push(UniformRegion::new((0.0, 1.0), band(i), Some((0.3, 0.4)), delta)?);
    }
    for i in 0..=k {
        regions.push(UniformRegion::new((0.0, 1.0), band(i), Some((0.2, 0.3)), delta)?);
    }
    regions.push(UniformRegion::new((0.45, 0.55), (0.0, 1.0), Some((0.2, 0.4)), 0.02)?);
    for (s, b) in [(0.0, 0.0), (0.0, 0.95), (0.95, 0.0), (0.95, 0.95)] {
        regions.push(UniformRegion::rectangle(s, s + 0.05, b, b + 0.05, 0.1)?);
    }
    regions.push(UniformRegion::rectangle(0.4, 0.45, 0.55, 0.6, 0.56)?);
    let base = JointDistribution::mixture(vec![], regions.clone())?;

    let mut hards = Vec::with_capacity(k);
    for kk in 1..=k {
        let mut r = regions.clone();
        let shift = |r: &mut Vec<UniformRegion>, idx: usize, d: f64| -> Result<()> {
            r[idx] = r[idx].with_mass(r[idx].mass() + d)?;
            Ok(())
        };
        shift(&mut r, layout.hl(kk), delta)?;
        shift(&mut r, layout.hr(kk - 1), delta)?;
        shift(&mut r, layout.hl(kk - 1), -delta)?;
        shift(&mut r, layout.hr(kk), -delta)?;
        hards.push(JointDistribution::mixture(vec![], r)?);
    }

    let mut named = BTreeMap::new();
    let good = |kk: usize| {
        let (lo, _) = band(kk - 1);
        let (_, hi) = band(kk);
        ActionRegion::closed_rect(0.4, 0.55, lo, hi)
    };
    let g_all = ActionRegion::union((1..=k).map(good).collect());
    named.insert("G".into(), g_all.clone());
    named.insert("B".into(), ActionRegion::closed_rect(0.0, 0.6, 0.45, 1.0).minus(g_all));
    for kk in 1..=k {
        named.insert(format!("G^{kk}"), good(kk));
    }
    let strong = |kk: usize| {
        let (lo, _) = band(kk - 1);
        let (_, hi) = band(kk);
        ActionRegion::band(Interval::closed(0.2, 0.4), Interval::closed(lo, hi))
    };
    for kk in 1..=k {
        named.insert(format!("I_S^{kk}"), strong(kk));
    }
    let strong_all = ActionRegion::union((1..=k).map(strong).collect());
    named.insert("I_W".into(), ActionRegion::closed_rect(0.05, 0.35, 0.45, 1.0).minus(strong_all));

    Ok(LbFamily {
        kind: FamilyKind::CorrContinuous,
        horizon,
        k,
        delta,
        params: BTreeMap::from([("Delta".into(), big_delta)]),
        regions: named,
        base,
        hards,
    })
}

/// Seller at `0` or `a*`, buyer at `a*` or `1`, each with probability ½,
/// independently.
pub fn dirac_wbb_instance(a_star: f64) -> Result<JointDistribution> {
    if !(0.4..=0.5).contains(&a_star) {
        return Err(domain(format!("a* must lie in [0.4, 0.5], got {a_star}")));
    }
    Ok(JointDistribution::product(
        Marginal::point_masses(&[(0.0, 0.5), (a_star, 0.5)])?,
        Marginal::point_masses(&[(a_star, 0.5), (1.0, 0.5)])?,
    ))
}

/// The Dirac instance wrapped as a family with no perturbed members.
pub fn dirac_family(a_star: f64) -> Result<LbFamily> {
    Ok(LbFamily {
        kind: FamilyKind::Dirac,
        horizon: 0,
        k: 0,
        delta: 0.0,
        params: BTreeMap::from([("a_star".into(), a_star)]),
        regions: BTreeMap::new(),
        base: dirac_wbb_instance(a_star)?,
        hards: vec![],
    })
}

/// Rounds a raw action onto the grid `A`: the seller price down and the
/// buyer price up, each clamped into `A`'s range.
pub fn snap_action(raw: Action, k: usize) -> Result<Action> {
    if k == 0 {
        return Err(domain("K must be positive"));
    }
    let n = (5 * k) as f64;
    let i = ((raw.p() * n + 1e-9).floor() as usize).min(3 * k);
    let j = ((raw.q() * n - 1e-9).ceil().max(0.0) as usize).saturating_sub(2 * k);
    Action::new(grid_p(i, k), grid_q(j, k).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{acceptance_probability, bayesian_optimal, expected_gft, DensityBound};

    fn act(p: f64, q: f64) -> Action {
        Action::new(p, q).unwrap()
    }

    #[test]
    fn independent_family_shape() {
        assert!(independent_lb_family(511).is_err());
        let f = independent_lb_family(1_000_000).unwrap();
        assert_eq!(f.hards.len(), 2);
        assert!((f.delta - 0.04).abs() < 1e-12);
        for m in f.members() {
            assert!((m.total_mass() - 1.0).abs() < 1e-12);
        }
        assert_eq!(f.base.density_bound(), DensityBound::Bounded(169.0 / 16.0));
        let (g1, g2) = (f.region("G1'").unwrap(), f.region("G2'").unwrap());
        for i in 0..=260 {
            for j in 0..=260 {
                let (p, q) = (i as f64 / 260.0, j as f64 / 260.0);
                assert!(!(g1.contains(p, q) && g2.contains(p, q)), "({p}, {q})");
            }
        }
    }

    #[test]
    fn independent_buyer_tilt_integrates_to_one() {
        // Independent integration of the tilted buyer density.
        let f = independent_lb_family(4096).unwrap();
        let d = f.delta;
        let mass = 13.0 / 4.0 * ELL * (1.0 + 1.0 + (1.0 - d) + (1.0 + d));
        assert!((mass - 1.0).abs() < 1e-12);
        let p = f.hards[0].as_product().unwrap();
        assert!((p.buyer.survival(12.0 / 13.0) - 13.0 / 4.0 * ELL * (1.0 + d)).abs() < 1e-12);
    }

    #[test]
    fn discrete_family_masses() {
        let f = correlated_discrete_family(10_000).unwrap();
        assert_eq!(f.k, 10);
        assert!((f.delta * 52.0 + 0.4 + 0.5 - 1.0).abs() < 1e-12);
        assert_eq!(f.hards.len(), 10);
        for m in f.members() {
            assert!((m.total_mass() - 1.0).abs() < 1e-12);
            assert!(matches!(m.density_bound(), DensityBound::Unbounded { .. }));
        }
        assert!(correlated_discrete_family(15).is_err());
        assert_eq!(correlated_k(16), 2);
        assert_eq!(correlated_k(81), 3);
    }

    #[test]
    fn discrete_majority_coincides_with_chain_atom() {
        let f = correlated_discrete_family(10_000).unwrap();
        let crate::dist::JointDistribution::Mixture(m) = &f.base else { panic!() };
        let layout = DiscreteLayout { k: 10 };
        let a = m.atoms()[layout.lr(10)];
        assert_eq!((a.s, a.b), (0.4, 0.6));
    }

    #[test]
    fn discrete_sets_disjoint() {
        let f = correlated_discrete_family(100_000).unwrap();
        let k = f.k;
        let hor: Vec<Vec<[f64; 2]>> =
            (1..=k).map(|kk| f.region(&format!("I^{kk}_hor")).unwrap().enumerate().unwrap()).collect();
        for a in 0..k {
            for b in a + 1..k {
                for x in &hor[a] {
                    assert!(!ActionRegion::points(hor[b].clone()).contains(x[0], x[1]));
                }
            }
        }
        for kk in 1..=k {
            let parts: Vec<Vec<[f64; 2]>> = ["hor", "LL", "UL", "LR", "UR"]
                .iter()
                .map(|n| f.region(&format!("I^{kk}_{n}")).unwrap().enumerate().unwrap())
                .collect();
            let total: usize = parts.iter().map(Vec::len).sum();
            let mut flat: Vec<[f64; 2]> = parts.concat();
            flat.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            flat.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
            assert_eq!(flat.len(), total);
        }
        let a = f.region("A").unwrap().enumerate().unwrap();
        let (g, b) = (f.region("G").unwrap(), f.region("B").unwrap());
        for x in &a {
            assert!(g.contains(x[0], x[1]) ^ b.contains(x[0], x[1]));
        }
        for x in g.enumerate().unwrap() {
            assert!(f.region("A").unwrap().contains(x[0], x[1]));
        }
    }

    #[test]
    fn continuous_family_shape() {
        let f = correlated_continuous_family(10_000).unwrap();
        assert!((2.0 * 11.0 * f.delta + 0.02 + 0.4 + 0.56 - 1.0).abs() < 1e-12);
        for m in f.members() {
            assert!((m.total_mass() - 1.0).abs() < 1e-12);
            let DensityBound::Bounded(d) = m.density_bound() else { panic!() };
            assert!((d - 224.0).abs() < 1e-9, "{d}");
            for i in 0..=20 {
                let p = 0.45 + i as f64 * 0.005;
                assert!((acceptance_probability(m, act(p, p)) - 0.68).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dirac_values() {
        assert!(dirac_wbb_instance(0.3).is_err());
        let a = 0.45;
        let d = dirac_wbb_instance(a).unwrap();
        // Enumerate the four equally likely value pairs.
        let pairs = [(0.0, a), (0.0, 1.0), (a, a), (a, 1.0)];
        let oracle = |p: f64| pairs.iter().filter(|(s, b)| *s <= p && p <= *b).map(|(s, b)| (b - s) / 4.0).sum::<f64>();
        for p in [0.0, 0.2, a, 0.7, 1.0] {
            assert!((expected_gft(&d, act(p, p)) - oracle(p)).abs() < 1e-15);
        }
        assert!((expected_gft(&d, act(a, a)) - 0.5).abs() < 1e-15);
        // Below a* the pair (0, a*) trades as well as (0, 1).
        assert!((expected_gft(&d, act(0.3, 0.3)) - (1.0 + a) / 4.0).abs() < 1e-15);
        let b = bayesian_optimal(&d, 1001).unwrap();
        assert!((b.price - a).abs() < 1e-12 && (b.gft - 0.5).abs() < 1e-15);
    }

    #[test]
    fn snap_examples() {
        let s = snap_action(act(0.37, 0.52), 4).unwrap();
        assert!((s.p() - 0.35).abs() < 1e-12 && (s.q() - 0.55).abs() < 1e-12);
        let s = snap_action(act(0.9, 0.9), 4).unwrap();
        assert!((s.p() - 0.6).abs() < 1e-12 && (s.q() - 0.9).abs() < 1e-12);
        let s = snap_action(act(0.1, 0.2), 4).unwrap();
        assert!((s.p() - 0.1).abs() < 1e-12 && (s.q() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let f = correlated_discrete_family(256).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["family"], "corr-discrete");
        assert_eq!(v["K"], 4);
        let back: LbFamily = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }

    proptest::proptest! {
        #[test]
        fn snapped_action_in_grid(p in 0.0f64..=1.0, q in 0.0f64..=1.0, k in 1usize..12) {
            let s = snap_action(act(p, q), k).unwrap();
            let n = (5 * k) as f64;
            let i = s.p() * n;
            let j = (s.q() - 0.4) * n;
            proptest::prop_assert!((i - i.round()).abs() < 1e-9 && i.round() <= (3 * k) as f64);
            proptest::prop_assert!((j - j.round()).abs() < 1e-9 && j.round() >= 0.0 && j.round() <= (3 * k) as f64);
            proptest::prop_assert!(s.p() <= p + 1e-9);
            proptest::prop_assert!(s.q() >= q - 1e-9);
        }
    }
}
