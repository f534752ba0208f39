use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::families::{FamilyKind, LbFamily, ELL};
use super::region::{ActionRegion, Interval};
use crate::dist::{acceptance_probability, bayesian_optimal, expected_gft, DensityBound, JointDistribution};
use crate::error::{domain, Error, Result};
use crate::trade::Action;

/// A claim passes when its smallest slack is at least `-SLACK_TOL`.
pub const SLACK_TOL: f64 = 1e-12;

/// Grid resolution for the diagonal benchmark; breakpoints and cubic
/// stationary points make it exact regardless.
const BENCH_RESOLUTION: usize = 2001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    /// Smallest observed `value - floor` (or `ceiling - value`); `None` if nothing was checked.
    pub min_slack: Option<f64>,
    pub witness: Option<[f64; 2]>,
    pub member: Option<usize>,
    pub checked: usize,
}

impl Claim {
    fn new(name: impl Into<String>) -> Self {
        Claim {
            name: name.into(),
            passed: false,
            min_slack: None,
            witness: None,
            member: None,
            checked: 0,
        }
    }

    fn observe(&mut self, slack: f64, member: Option<usize>, witness: Option<[f64; 2]>) {
        self.checked += 1;
        if self.min_slack.is_none_or(|m| slack < m) || slack.is_nan() {
            self.min_slack = Some(slack);
            self.member = member;
            self.witness = witness;
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.checked > 0 && self.min_slack.is_some_and(|m| m >= -SLACK_TOL);
        self
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.passed { "PASS" } else { "FAIL" }, self.name)?;
        match self.min_slack {
            Some(s) => write!(f, "  min_slack={s:.3e}")?,
            None => write!(f, "  (nothing checked)")?,
        }
        write!(f, "  checked={}", self.checked)?;
        if !self.passed {
            if let Some(m) = self.member {
                write!(f, "  member=D^{m}")?;
            }
            if let Some([p, q]) = self.witness {
                write!(f, "  witness=({p}, {q})")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: FamilyKind,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub claims: Vec<Claim>,
    /// Informational checks that do not affect `passed()`.
    pub diagnostics: Vec<Claim>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let msg: Vec<String> = self.failures().map(ToString::to_string).collect();
        Err(Error::Verification(format!("{} T={}: {}", self.family, self.horizon, msg.join("; "))))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family {} T={}", self.family, self.horizon)?;
        for c in &self.claims {
            writeln!(f, "  {c}")?;
        }
        if !self.diagnostics.is_empty() {
            writeln!(f, "diagnostics")?;
            for c in &self.diagnostics {
                writeln!(f, "  {c}")?;
            }
        }
        Ok(())
    }
}

/// Unit-mass pieces shared by every member, with each member's weights.
struct Linear {
    components: Vec<Option<JointDistribution>>,
    weights: Vec<Vec<f64>>,
}

fn geometry_key(d: &JointDistribution) -> Option<Vec<f64>> {
    let JointDistribution::Mixture(m) = d else { return None };
    let mut key: Vec<f64> = m.atoms().iter().flat_map(|a| [a.s, a.b]).collect();
    key.push(f64::NAN);
    for r in m.regions() {
        let sp = r.spread_band().unwrap_or((f64::NAN, f64::NAN));
        key.extend([r.seller_band().0, r.seller_band().1, r.buyer_band().0, r.buyer_band().1, sp.0, sp.1]);
    }
    Some(key)
}

fn same_geometry(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x.is_nan() && y.is_nan()))
}

/// Component masses of a mixture, atoms first.
pub fn component_masses(d: &JointDistribution) -> Option<Vec<f64>> {
    let JointDistribution::Mixture(m) = d else { return None };
    Some(m.atoms().iter().map(|a| a.mass).chain(m.regions().iter().map(|r| r.mass())).collect())
}

fn linearize(members: &[&JointDistribution]) -> Option<Linear> {
    let key = geometry_key(members[0])?;
    if !members[1..].iter().all(|m| geometry_key(m).is_some_and(|k| same_geometry(&k, &key))) {
        return None;
    }
    let JointDistribution::Mixture(m) = members[0] else { return None };
    let mut components = vec![];
    for a in m.atoms() {
        components.push(Some(JointDistribution::point_mass(a.s, a.b).ok()?));
    }
    for r in m.regions() {
        let unit = r.with_mass(1.0).ok().and_then(|u| JointDistribution::mixture(vec![], vec![u]).ok());
        components.push(unit);
    }
    let weights = members.iter().map(|d| component_masses(d)).collect::<Option<Vec<_>>>()?;
    Some(Linear { components, weights })
}

/// `gft[member][action]` by the exact oracle.
fn gft_matrix(members: &[&JointDistribution], actions: &[Action]) -> Vec<Vec<f64>> {
    match linearize(members) {
        Some(lin) => {
            let per_comp: Vec<Vec<f64>> = lin
                .components
                .par_iter()
                .map(|c| match c {
                    Some(c) => actions.iter().map(|&a| expected_gft(c, a)).collect(),
                    None => vec![0.0; actions.len()],
                })
                .collect();
            lin.weights
                .iter()
                .map(|w| {
                    (0..actions.len())
                        .map(|i| w.iter().zip(&per_comp).map(|(m, g)| m * g[i]).sum())
                        .collect()
                })
                .collect()
        }
        None => members
            .iter()
            .map(|d| actions.par_iter().map(|&a| expected_gft(d, a)).collect())
            .collect(),
    }
}

struct RegretTable {
    actions: Vec<Action>,
    regret: Vec<Vec<f64>>,
}

fn regret_table(family: &LbFamily, actions: Vec<Action>) -> Result<RegretTable> {
    let members: Vec<&JointDistribution> = family.members().collect();
    let bench = members
        .par_iter()
        .map(|d| bayesian_optimal(d, BENCH_RESOLUTION).map(|b| b.gft))
        .collect::<Result<Vec<f64>>>()?;
    let gft = gft_matrix(&members, &actions);
    let regret = gft.into_iter().zip(&bench).map(|(row, b)| row.into_iter().map(|g| b - g).collect()).collect();
    Ok(RegretTable { actions, regret })
}

type Floor<'a> = Box<dyn Fn(usize, f64, f64) -> f64 + Sync + 'a>;

/// `regret >= floor` (or `regret <= floor` when `upper`) on `region` for each listed member.
struct RegretClaim<'a> {
    name: String,
    members: Vec<usize>,
    region: ActionRegion,
    floor: Floor<'a>,
    upper: bool,
}

impl<'a> RegretClaim<'a> {
    fn lower(name: &str, members: Vec<usize>, region: ActionRegion, floor: Floor<'a>) -> Self {
        RegretClaim { name: name.into(), members, region, floor, upper: false }
    }

    fn upper(name: &str, members: Vec<usize>, region: ActionRegion) -> Self {
        RegretClaim { name: name.into(), members, region, floor: Box::new(|_, _, _| 0.0), upper: true }
    }

    fn restricted(&self, extra: ActionRegion, suffix: &str) -> RegretClaim<'_> {
        RegretClaim {
            name: format!("{} {suffix}", self.name),
            members: self.members.clone(),
            region: self.region.clone().intersect(extra),
           
            floor: Box::new(|m, p, q| (self.floor)(m, p, q)),
            upper: self.upper,
        }
    }

    fn evaluate(&self, table: &RegretTable) -> Claim {
        let mut claim = Claim::new(&self.name);
        for &m in &self.members {
            for (i, a) in table.actions.iter().enumerate() {
                let (p, q) = (a.p(), a.q());
                if !self.region.contains(p, q) {
                    continue;
                }
                let r = table.regret[m][i];
                let floor = (self.floor)(m, p, q);
                let slack = if self.upper { floor - r } else { r - floor };
                claim.observe(slack, Some(m), Some([p, q]));
            }
        }
        claim.finish()
    }
}

fn axis(lo: f64, hi: f64, resolution: usize, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let n = resolution.max(2);
    let mut xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    xs.extend(extra.into_iter().filter(|x| (lo..=hi).contains(x)));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Grid over `[p0,p1] × [q0,q1]` plus every distribution breakpoint and
/// region boundary coordinate inside the box.
fn box_actions(family: &LbFamily, p: (f64, f64), q: (f64, f64), resolution: usize) -> Vec<Action> {
    let mut extra: Vec<f64> = family.members().flat_map(|d| d.breakpoints()).collect();
    let (mut bp, mut bq) = (vec![], vec![]);
    for r in family.regions.values() {
        let (a, b) = r.boundary_coordinates();
        bp.extend(a);
        bq.extend(b);
    }
    extra.sort_by(f64::total_cmp);
    extra.dedup();
    let ps = axis(p.0, p.1, resolution, extra.iter().copied().chain(bp));
    let qs = axis(q.0, q.1, resolution, extra.iter().copied().chain(bq));
    ps.iter()
        .flat_map(|&x| qs.iter().map(move |&y| Action::new(x, y).expect("inside unit square")))
        .collect()
}

fn all_members(family: &LbFamily) -> Vec<usize> {
    (0..=family.hards.len()).collect()
}

fn independent_claims(family: &LbFamily, resolution: usize) -> Result<(Vec<Claim>, Vec<Claim>, RegretTable)> {
    let delta = family.delta;
    let g1 = family.region("G1")?.clone();
    let g2 = family.region("G2")?.clone();
    let g1p = family.region("G1'")?.clone();
    let g2p = family.region("G2'")?.clone();
    let inf = family.region("I")?.clone();
    let small = ELL * delta / 16.0;
    let big = (3.0 - 11.0 * ELL) / 16.0;
    let specs = vec![
        RegretClaim::upper("D^1 maximized on G1", vec![1], g1.clone()),
        RegretClaim::lower("D^1 regret >= 0", vec![1], ActionRegion::all(), Box::new(|_, _, _| 0.0)),
        RegretClaim::lower("D^1 regret >= l*delta/16 outside G1'", vec![1], ActionRegion::all().minus(g1p), Box::new(move |_, _, _| small)),
        RegretClaim::upper("D^2 maximized on G2", vec![2], g2.clone()),
        RegretClaim::lower("D^2 regret >= 0", vec![2], ActionRegion::all(), Box::new(|_, _, _| 0.0)),
        RegretClaim::lower("D^2 regret >= l*delta/16 outside G2'", vec![2], ActionRegion::all().minus(g2p), Box::new(move |_, _, _| small)),
        RegretClaim::upper("D^0 maximized on G1 u G2", vec![0], ActionRegion::union(vec![g1, g2])),
        RegretClaim::lower("D^0 regret >= 0", vec![0], ActionRegion::all(), Box::new(|_, _, _| 0.0)),
        RegretClaim::lower("D^0 regret >= (3-11l)/16 on I", vec![0], inf, Box::new(move |_, _, _| big)),
    ];
    let table = regret_table(family, box_actions(family, (0.0, 1.0), (0.0, 1.0), resolution))?;
    let claims = specs.iter().map(|c| c.evaluate(&table)).collect();
    let diags = specs
        .iter()
        .map(|c| c.restricted(ActionRegion::budget_safe(), "[p <= q]").evaluate(&table))
        .collect();
    Ok((claims, diags, table))
}

fn discrete_claims(family: &LbFamily) -> Result<(Vec<Claim>, Vec<Claim>, RegretTable)> {
    let (delta, k) = (family.delta, family.k as f64);
    let actions: Vec<Action> = family
        .region("A")?
        .enumerate()
        .ok_or_else(|| Error::Internal("A must be finite".into()))?
        .into_iter()
        .map(|[p, q]| Action::new(p, q))
        .collect::<Result<_>>()?;
    let goods: Vec<ActionRegion> = (0..=family.k).map(|i| family.region(&format!("G^{i}")).cloned()).collect::<Result<_>>()?;
    let table = regret_table(family, actions)?;
    let b = RegretClaim::lower("regret >= 0.1 on B", all_members(family), family.region("B")?.clone(), Box::new(|_, _, _| 0.1));
    let g = RegretClaim::lower(
        "regret >= 3*delta*K*(q-p) + 0.2*delta*1[not in G^k] on G",
        all_members(family),
        family.region("G")?.clone(),
        Box::new(move |m, p, q| {
            let off = m > 0 && !goods[m].contains(p, q);
            3.0 * delta * k * (q - p) + if off { 0.2 * delta } else { 0.0 }
        }),
    );
    Ok((vec![b.evaluate(&table), g.evaluate(&table)], vec![], table))
}

fn continuous_claims(family: &LbFamily, resolution: usize) -> Result<(Vec<Claim>, Vec<Claim>, RegretTable)> {
    let delta = family.delta;
    let goods: Vec<ActionRegion> = (1..=family.k).map(|i| family.region(&format!("G^{i}")).cloned()).collect::<Result<_>>()?;
    let table = regret_table(family, box_actions(family, (0.0, 0.6), (0.45, 1.0), resolution))?;
    let b = RegretClaim::lower("regret >= 0.084 on B", all_members(family), family.region("B")?.clone(), Box::new(|_, _, _| 0.084));
    let g = RegretClaim::lower(
        "regret >= 0.06*(q-p) + 0.1*delta*1[not in G^k] on G",
        all_members(family),
        family.region("G")?.clone(),
        Box::new(move |m, p, q| {
            let off = m > 0 && !goods[m - 1].contains(p, q);
            0.06 * (q - p) + if off { 0.1 * delta } else { 0.0 }
        }),
    );
    let claims = vec![b.evaluate(&table), g.evaluate(&table)];
    // Where B's failures sit: away from the shared edge with G the floor holds.
    let far = ActionRegion::rect(Interval::closed(0.0, 0.6), Interval::closed(0.45, 1.0)).minus(ActionRegion::closed_rect(0.35, 0.6, 0.45, 0.65));
    let diag = b.restricted(far, "[away from G: outside [0.35,0.6]x[0.45,0.65]]").evaluate(&table);
    Ok((claims, vec![diag], table))
}

type Evaluated = (Vec<Claim>, Vec<Claim>, Option<RegretTable>);

fn regret_claims(family: &LbFamily, resolution: usize) -> Result<Evaluated> {
    if resolution < 2 {
        return Err(domain("grid resolution must be at least 2"));
    }
    let (c, d, t) = match family.kind {
        FamilyKind::IndepSemi => independent_claims(family, resolution)?,
        FamilyKind::CorrDiscrete => discrete_claims(family)?,
        FamilyKind::CorrContinuous => continuous_claims(family, resolution)?,
        FamilyKind::Dirac => return Ok((vec![], vec![], None)),
    };
    Ok((c, d, Some(t)))
}

/// Checks every per-action regret floor of the family on a
/// `resolution`-per-axis grid plus breakpoints (or on the whole finite
/// action set), against the exact benchmark of each member.
pub fn verify_per_round_regret(family: &LbFamily, resolution: usize) -> Result<VerificationReport> {
    let (claims, diagnostics, _) = regret_claims(family, resolution)?;
    Ok(VerificationReport { family: family.kind, horizon: family.horizon, claims, diagnostics })
}

fn scalar_claim(name: &str, values: impl IntoIterator<Item = (usize, f64)>) -> Claim {
    let mut c = Claim::new(name);
    for (m, slack) in values {
        c.observe(slack, Some(m), None);
    }
    c.finish()
}

fn total_variation_masses(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Mass, density, locality, structural, acceptance and regret checks.
pub fn verify_family(family: &LbFamily, resolution: usize) -> Result<VerificationReport> {
    let members: Vec<&JointDistribution> = family.members().collect();
    let mut claims = vec![scalar_claim(
        "total mass = 1",
        members.iter().enumerate().map(|(i, d)| (i, -(d.total_mass() - 1.0).abs())),
    )];
    let mut diagnostics = vec![];

    match family.kind {
        FamilyKind::IndepSemi => {
            claims.push(scalar_claim(
                "density bound <= 11",
                members.iter().enumerate().map(|(i, d)| (i, 11.0 - d.density_bound().value().unwrap_or(f64::INFINITY))),
            ));
            diagnostics.push(scalar_claim(
                "base density = 169/16",
                [(0, -(family.base.density_bound().value().unwrap_or(f64::INFINITY) - 169.0 / 16.0).abs())],
            ));
            claims.push(independent_locality(family)?);
        }
        FamilyKind::CorrDiscrete => {
            claims.push(scalar_claim(
                "density unbounded (atoms)",
                members.iter().enumerate().map(|(i, d)| (i, if matches!(d.density_bound(), DensityBound::Unbounded { .. }) { 0.0 } else { -1.0 })),
            ));
            claims.extend(mixture_locality(family)?);
            claims.extend(discrete_structure(family)?);
        }
        FamilyKind::CorrContinuous => {
            claims.push(scalar_claim(
                "density bound = 224",
                members.iter().enumerate().map(|(i, d)| (i, -(d.density_bound().value().unwrap_or(f64::INFINITY) - 224.0).abs())),
            ));
            claims.extend(mixture_locality(family)?);
            claims.push(diagonal_acceptance(family, resolution));
        }
        FamilyKind::Dirac => {}
    }

    let (regret, diag, table) = regret_claims(family, resolution)?;
    if let Some(t) = &table {
        match family.kind {
            FamilyKind::IndepSemi => {
                let (a, b) = (family.region("G1'")?, family.region("G2'")?);
                let mut c = Claim::new("G1' and G2' disjoint");
                for x in &t.actions {
                    let both = a.contains(x.p(), x.q()) && b.contains(x.p(), x.q());
                    c.observe(if both { -1.0 } else { 0.0 }, None, Some([x.p(), x.q()]));
                }
                claims.push(c.finish());
            }
            FamilyKind::CorrContinuous => {
                let step = *family.params.get("Delta").ok_or_else(|| Error::Internal("missing Delta".into()))?;
                let goods: Vec<ActionRegion> = (1..=family.k)
                    .map(|i| {
                        let q = Interval::open_hi(0.45 + (i - 1) as f64 * step, 0.45 + (i + 1) as f64 * step);
                        ActionRegion::rect(Interval::closed(0.4, 0.55), q)
                    })
                    .collect();
                let mut c = Claim::new("each action in at most 2 bands G^k (half-open in q)");
                for x in &t.actions {
                    let n = goods.iter().filter(|g| g.contains(x.p(), x.q())).count();
                    c.observe(2.0 - n as f64, None, Some([x.p(), x.q()]));
                }
                claims.push(c.finish());
            }
            _ => {}
        }
    }
    claims.extend(regret);
    diagnostics.extend(diag);
    Ok(VerificationReport { family: family.kind, horizon: family.horizon, claims, diagnostics })
}

fn independent_locality(family: &LbFamily) -> Result<Claim> {
    let base = family.base.as_product().ok_or_else(|| Error::Internal("product expected".into()))?;
    let mut c = Claim::new("hards differ from base only in buyer density on [11l, 1]");
    for (i, h) in family.hards.iter().enumerate() {
        let h = h.as_product().ok_or_else(|| Error::Internal("product expected".into()))?;
        for j in 0..=1000 {
            let x = j as f64 / 1000.0;
            let seller = (h.seller.cdf(x) - base.seller.cdf(x)).abs();
            let buyer = if x <= 11.0 * ELL { (h.buyer.cdf(x) - base.buyer.cdf(x)).abs() } else { 0.0 };
            c.observe(-(seller + buyer), Some(i + 1), Some([x, x]));
        }
        c.observe(-(h.buyer.cdf(1.0) - 1.0).abs(), Some(i + 1), None);
    }
    Ok(c.finish())
}

fn mixture_locality(family: &LbFamily) -> Result<Vec<Claim>> {
    let base = component_masses(&family.base).ok_or_else(|| Error::Internal("mixture expected".into()))?;
    let mut support = Claim::new("D^k - D^0 moves delta on exactly four components");
    let mut tv = Claim::new("TV(D^0, D^k) = 2*delta");
    for (i, h) in family.hards.iter().enumerate() {
        let w = component_masses(h).ok_or_else(|| Error::Internal("mixture expected".into()))?;
        if w.len() != base.len() {
            support.observe(-1.0, Some(i + 1), None);
            continue;
        }
        let diffs: Vec<f64> = w.iter().zip(&base).map(|(a, b)| (a - b).abs()).filter(|d| *d > 1e-15).collect();
        let off = if diffs.len() == 4 { 0.0 } else { -1.0 };
        let worst = diffs.iter().map(|d| (d - family.delta).abs()).fold(0.0, f64::max);
        support.observe(off - worst, Some(i + 1), None);
        tv.observe(-(total_variation_masses(&w, &base) - 2.0 * family.delta).abs(), Some(i + 1), None);
    }
    Ok(vec![support.finish(), tv.finish()])
}

fn points(family: &LbFamily, name: &str) -> Result<Vec<[f64; 2]>> {
    family.region(name)?.enumerate().ok_or_else(|| Error::Internal(format!("{name} must be finite")))
}

fn overlaps(sets: &[(usize, Vec<[f64; 2]>)], claim: &mut Claim) {
    for (x, (i, a)) in sets.iter().enumerate() {
        for (j, b) in &sets[x + 1..] {
            let rb = ActionRegion::points(b.clone());
            let hit = a.iter().find(|pt| rb.contains(pt[0], pt[1]));
            claim.observe(if hit.is_some() { -1.0 } else { 0.0 }, Some(*i.min(j)), hit.copied());
        }
    }
}

fn discrete_structure(family: &LbFamily) -> Result<Vec<Claim>> {
    let k = family.k;
    let mut goods = Claim::new("G^k pairwise disjoint");
    let sets: Vec<(usize, Vec<[f64; 2]>)> = (0..=k).map(|i| Ok((i, points(family, &format!("G^{i}"))?))).collect::<Result<_>>()?;
    overlaps(&sets, &mut goods);

    let mut hor = Claim::new("I^k_hor disjoint across k");
    let sets: Vec<(usize, Vec<[f64; 2]>)> = (1..=k).map(|i| Ok((i, points(family, &format!("I^{i}_hor"))?))).collect::<Result<_>>()?;
    overlaps(&sets, &mut hor);

    let mut within = Claim::new("I^k components disjoint within k");
    for i in 1..=k {
        let sets: Vec<(usize, Vec<[f64; 2]>)> = ["hor", "LL", "UL", "LR", "UR"]
            .iter()
            .map(|n| Ok((i, points(family, &format!("I^{i}_{n}"))?)))
            .collect::<Result<_>>()?;
        overlaps(&sets, &mut within);
    }

    let mut part = Claim::new("G and B partition A");
    let (g, b) = (family.region("G")?, family.region("B")?);
    for x in points(family, "A")? {
        let ok = g.contains(x[0], x[1]) != b.contains(x[0], x[1]);
        part.observe(if ok { 0.0 } else { -1.0 }, None, Some(x));
    }
    let a = family.region("A")?;
    for x in points(family, "G")? {
        part.observe(if a.contains(x[0], x[1]) { 0.0 } else { -1.0 }, None, Some(x));
    }
    Ok(vec![goods.finish(), hor.finish(), within.finish(), part.finish()])
}

fn diagonal_acceptance(family: &LbFamily, resolution: usize) -> Claim {
    let extra: Vec<f64> = family.members().flat_map(|d| d.breakpoints()).collect();
    let ps = axis(0.45, 0.55, resolution + 1, extra);
    let mut c = Claim::new("diagonal acceptance = 0.68 on [0.45, 0.55]");
    for (i, d) in family.members().enumerate() {
        for &p in &ps {
            let a = Action::diagonal(p).expect("in range");
            c.observe(-(acceptance_probability(d, a) - 0.68).abs(), Some(i), Some([p, p]));
        }
    }
    c.finish()
}
