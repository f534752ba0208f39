use serde::{Deserialize, Serialize};

/// Coordinate tolerance for finite point-set membership.
pub const POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub lo_open: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub hi_open: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn open_lo(lo: f64, hi: f64) -> Self {
        Interval {
            lo_open: true,
            ..Self::closed(lo, hi)
        }
    }

    pub fn open_hi(lo: f64, hi: f64) -> Self {
        Interval {
            hi_open: true,
            ..Self::closed(lo, hi)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }
}

/// A set of actions `(p, q)`: rectangles (optionally cut by a band on
/// `q - p`), finite point sets, unions and differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionRegion {
    Rect {
        p: Interval,
        q: Interval,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spread: Option<Interval>,
    },
    Points {
        points: Vec<[f64; 2]>,
    },
    Union {
        parts: Vec<ActionRegion>,
    },
    Intersection {
        parts: Vec<ActionRegion>,
    },
    Difference {
        base: Box<ActionRegion>,
        minus: Box<ActionRegion>,
    },
}

impl ActionRegion {
    pub fn rect(p: Interval, q: Interval) -> Self {
        ActionRegion::Rect { p, q, spread: None }
    }

    pub fn closed_rect(p0: f64, p1: f64, q0: f64, q1: f64) -> Self {
        Self::rect(Interval::closed(p0, p1), Interval::closed(q0, q1))
    }

    /// Actions with `q - p` in `spread` and `q` in `q`.
    pub fn band(spread: Interval, q: Interval) -> Self {
        ActionRegion::Rect {
            p: Interval::closed(0.0, 1.0),
            q,
            spread: Some(spread),
        }
    }

    pub fn points(points: Vec<[f64; 2]>) -> Self {
        ActionRegion::Points { points }
    }

    pub fn union(parts: Vec<ActionRegion>) -> Self {
        ActionRegion::Union { parts }
    }

    pub fn intersect(self, other: ActionRegion) -> Self {
        ActionRegion::Intersection { parts: vec![self, other] }
    }

    /// The closed unit square of all actions.
    pub fn all() -> Self {
        Self::closed_rect(0.0, 1.0, 0.0, 1.0)
    }

    /// Actions with `p <= q`.
    pub fn budget_safe() -> Self {
        Self::band(Interval::closed(0.0, 1.0), Interval::closed(0.0, 1.0))
    }

    pub fn minus(self, other: ActionRegion) -> Self {
        ActionRegion::Difference {
            base: Box::new(self),
            minus: Box::new(other),
        }
    }

    pub fn contains(&self, p: f64, q: f64) -> bool {
        match self {
            ActionRegion::Rect { p: ip, q: iq, spread } => {
                ip.contains(p) && iq.contains(q) && spread.is_none_or(|s| s.contains(q - p))
            }
            ActionRegion::Points { points } => points
                .iter()
                .any(|x| (x[0] - p).abs() <= POINT_TOL && (x[1] - q).abs() <= POINT_TOL),
            ActionRegion::Union { parts } => parts.iter().any(|r| r.contains(p, q)),
            ActionRegion::Intersection { parts } => parts.iter().all(|r| r.contains(p, q)),
            ActionRegion::Difference { base, minus } => base.contains(p, q) && !minus.contains(p, q),
        }
    }

    /// Every point of a finite region; `None` if any part is a continuum.
    pub fn enumerate(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            ActionRegion::Rect { .. } => None,
            ActionRegion::Points { points } => Some(points.clone()),
            ActionRegion::Union { parts } => {
                let mut out = vec![];
                for r in parts {
                    out.extend(r.enumerate()?);
                }
                Some(out)
            }
            ActionRegion::Intersection { parts } => {
                let (first, rest) = parts.split_first()?;
                let pts = first.enumerate()?;
                Some(pts.into_iter().filter(|x| rest.iter().all(|r| r.contains(x[0], x[1]))).collect())
            }
            ActionRegion::Difference { base, minus } => {
                Some(base.enumerate()?.into_iter().filter(|x| !minus.contains(x[0], x[1])).collect())
            }
        }
    }

    /// Finite coordinates where membership can change, per axis.
    pub fn boundary_coordinates(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut ps, mut qs) = (vec![], vec![]);
        self.collect_boundaries(&mut ps, &mut qs);
        (ps, qs)
    }

    fn collect_boundaries(&self, ps: &mut Vec<f64>, qs: &mut Vec<f64>) {
        match self {
            ActionRegion::Rect { p, q, .. } => {
                ps.extend([p.lo, p.hi]);
                qs.extend([q.lo, q.hi]);
            }
            ActionRegion::Points { points } => {
                ps.extend(points.iter().map(|x| x[0]));
                qs.extend(points.iter().map(|x| x[1]));
            }
            ActionRegion::Union { parts } | ActionRegion::Intersection { parts } => {
                parts.iter().for_each(|r| r.collect_boundaries(ps, qs))
            }
            ActionRegion::Difference { base, minus } => {
                base.collect_boundaries(ps, qs);
                minus.collect_boundaries(ps, qs);
            }
        }
    }
}
