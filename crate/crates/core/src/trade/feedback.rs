use serde::{Deserialize, Serialize};

use super::{Action, ValuePair};
use crate::error::{Error, Result};

/// The seven feedback models, from full revelation down to the trade bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeedbackKind {
    Full,
    SemiSellerValBuyerBit,
    SemiSellerBitBuyerVal,
    SemiSellerValTrade,
    SemiTradeBuyerVal,
    TwoBit,
    OneBit,
}

impl FeedbackKind {
    pub const ALL: [FeedbackKind; 7] = [
        FeedbackKind::Full,
        FeedbackKind::SemiSellerValBuyerBit,
        FeedbackKind::SemiSellerBitBuyerVal,
        FeedbackKind::SemiSellerValTrade,
        FeedbackKind::SemiTradeBuyerVal,
        FeedbackKind::TwoBit,
        FeedbackKind::OneBit,
    ];

    /// Immediate successors in the informativeness order.
    fn covers(self) -> &'static [FeedbackKind] {
        use FeedbackKind::*;
        match self {
            Full => &[SemiSellerValBuyerBit, SemiSellerBitBuyerVal],
            SemiSellerValBuyerBit => &[SemiSellerValTrade, TwoBit],
            SemiSellerBitBuyerVal => &[TwoBit, SemiTradeBuyerVal],
            SemiSellerValTrade | TwoBit | SemiTradeBuyerVal => &[OneBit],
            OneBit => &[],
        }
    }

    /// `self >= other`: a payload of kind `self` determines one of kind `other`.
    pub fn dominates(self, other: FeedbackKind) -> bool {
        self == other || self.covers().iter().any(|k| k.dominates(other))
    }
}

/// Feedback payload delivered to the mechanism after a round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Feedback {
    Full { s: f64, b: f64 },
    SemiSellerValBuyerBit { s: f64, y: bool },
    SemiSellerBitBuyerVal { x: bool, b: f64 },
    SemiSellerValTrade { s: f64, z: bool },
    SemiTradeBuyerVal { z: bool, b: f64 },
    TwoBit { x: bool, y: bool },
    OneBit { z: bool },
}

pub fn extract_feedback(values: ValuePair, action: Action, kind: FeedbackKind) -> Feedback {
    let (s, b) = (values.s(), values.b());
    let x = s <= action.p();
    let y = action.q() <= b;
    let z = x && y;
    match kind {
        FeedbackKind::Full => Feedback::Full { s, b },
        FeedbackKind::SemiSellerValBuyerBit => Feedback::SemiSellerValBuyerBit { s, y },
        FeedbackKind::SemiSellerBitBuyerVal => Feedback::SemiSellerBitBuyerVal { x, b },
        FeedbackKind::SemiSellerValTrade => Feedback::SemiSellerValTrade { s, z },
        FeedbackKind::SemiTradeBuyerVal => Feedback::SemiTradeBuyerVal { z, b },
        FeedbackKind::TwoBit => Feedback::TwoBit { x, y },
        FeedbackKind::OneBit => Feedback::OneBit { z },
    }
}

impl Feedback {
    pub fn kind(&self) -> FeedbackKind {
        match self {
            Feedback::Full { .. } => FeedbackKind::Full,
            Feedback::SemiSellerValBuyerBit { .. } => FeedbackKind::SemiSellerValBuyerBit,
            Feedback::SemiSellerBitBuyerVal { .. } => FeedbackKind::SemiSellerBitBuyerVal,
            Feedback::SemiSellerValTrade { .. } => FeedbackKind::SemiSellerValTrade,
            Feedback::SemiTradeBuyerVal { .. } => FeedbackKind::SemiTradeBuyerVal,
            Feedback::TwoBit { .. } => FeedbackKind::TwoBit,
            Feedback::OneBit { .. } => FeedbackKind::OneBit,
        }
    }

    fn violation(&self, requested: &'static str) -> Error {
        Error::ProtocolViolation {
            declared: self.kind(),
            requested,
        }
    }

    pub fn seller_value(&self) -> Result<f64> {
        match *self {
            Feedback::Full { s, .. }
            | Feedback::SemiSellerValBuyerBit { s, .. }
            | Feedback::SemiSellerValTrade { s, .. } => Ok(s),
            _ => Err(self.violation("seller value")),
        }
    }

    pub fn buyer_value(&self) -> Result<f64> {
        match *self {
            Feedback::Full { b, .. }
            | Feedback::SemiSellerBitBuyerVal { b, .. }
            | Feedback::SemiTradeBuyerVal { b, .. } => Ok(b),
            _ => Err(self.violation("buyer value")),
        }
    }

    pub fn seller_bit(&self) -> Result<bool> {
        match *self {
            Feedback::SemiSellerBitBuyerVal { x, .. } | Feedback::TwoBit { x, .. } => Ok(x),
            _ => Err(self.violation("seller acceptance bit")),
        }
    }

    pub fn buyer_bit(&self) -> Result<bool> {
        match *self {
            Feedback::SemiSellerValBuyerBit { y, .. } | Feedback::TwoBit { y, .. } => Ok(y),
            _ => Err(self.violation("buyer acceptance bit")),
        }
    }

    pub fn trade_bit(&self) -> Result<bool> {
        match *self {
            Feedback::OneBit { z }
            | Feedback::SemiSellerValTrade { z, .. }
            | Feedback::SemiTradeBuyerVal { z, .. } => Ok(z),
            Feedback::TwoBit { x, y } => Ok(x && y),
            _ => Err(self.violation("trade bit")),
        }
    }

    /// Re-expresses this payload as the less informative `kind`, given the
    /// action that produced it.
    pub fn downgrade(&self, action: Action, kind: FeedbackKind) -> Result<Feedback> {
        let from = self.kind();
        if !from.dominates(kind) {
            return Err(Error::NotDowngradable { from, to: kind });
        }
        let (p, q) = (action.p(), action.q());
        // Recover whichever of (s, x), (b, y) the payload carries.
        let (s, x) = match *self {
            Feedback::Full { s, .. }
            | Feedback::SemiSellerValBuyerBit { s, .. }
            | Feedback::SemiSellerValTrade { s, .. } => (Some(s), Some(s <= p)),
            Feedback::SemiSellerBitBuyerVal { x, .. } | Feedback::TwoBit { x, .. } => (None, Some(x)),
            _ => (None, None),
        };
        let (b, y) = match *self {
            Feedback::Full { b, .. }
            | Feedback::SemiSellerBitBuyerVal { b, .. }
            | Feedback::SemiTradeBuyerVal { b, .. } => (Some(b), Some(q <= b)),
            Feedback::SemiSellerValBuyerBit { y, .. } | Feedback::TwoBit { y, .. } => (None, Some(y)),
            _ => (None, None),
        };
        let z = match (x, y) {
            (Some(x), Some(y)) => x && y,
            _ => self.trade_bit()?,
        };
        let missing = || Error::Internal(format!("downgrade {from:?} -> {kind:?}"));
        Ok(match kind {
            FeedbackKind::Full => Feedback::Full {
                s: s.ok_or_else(missing)?,
                b: b.ok_or_else(missing)?,
            },
            FeedbackKind::SemiSellerValBuyerBit => Feedback::SemiSellerValBuyerBit {
                s: s.ok_or_else(missing)?,
                y: y.ok_or_else(missing)?,
            },
            FeedbackKind::SemiSellerBitBuyerVal => Feedback::SemiSellerBitBuyerVal {
                x: x.ok_or_else(missing)?,
                b: b.ok_or_else(missing)?,
            },
            FeedbackKind::SemiSellerValTrade => Feedback::SemiSellerValTrade {
                s: s.ok_or_else(missing)?,
                z,
            },
            FeedbackKind::SemiTradeBuyerVal => Feedback::SemiTradeBuyerVal {
                z,
                b: b.ok_or_else(missing)?,
            },
            FeedbackKind::TwoBit => Feedback::TwoBit {
                x: x.ok_or_else(missing)?,
                y: y.ok_or_else(missing)?,
            },
            FeedbackKind::OneBit => Feedback::OneBit { z },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use FeedbackKind::*;

    fn vp(s: f64, b: f64) -> ValuePair {
        ValuePair::new(s, b).unwrap()
    }
    fn act(p: f64, q: f64) -> Action {
        Action::new(p, q).unwrap()
    }

    #[test]
    fn payload_examples() {
        assert_eq!(
            extract_feedback(vp(0.3, 0.7), act(0.5, 0.5), TwoBit),
            Feedback::TwoBit { x: true, y: true }
        );
        assert_eq!(
            extract_feedback(vp(0.3, 0.7), act(0.2, 0.5), OneBit),
            Feedback::OneBit { z: false }
        );
        assert_eq!(
            extract_feedback(vp(0.3, 0.7), act(0.5, 0.5), SemiSellerValBuyerBit),
            Feedback::SemiSellerValBuyerBit { s: 0.3, y: true }
        );
    }

    #[test]
    fn order_matches_hasse_diagram() {
        let expected: &[(FeedbackKind, &[FeedbackKind])] = &[
            (Full, &[Full, SemiSellerValBuyerBit, SemiSellerBitBuyerVal, SemiSellerValTrade, SemiTradeBuyerVal, TwoBit, OneBit]),
            (SemiSellerValBuyerBit, &[SemiSellerValBuyerBit, SemiSellerValTrade, TwoBit, OneBit]),
            (SemiSellerBitBuyerVal, &[SemiSellerBitBuyerVal, SemiTradeBuyerVal, TwoBit, OneBit]),
            (SemiSellerValTrade, &[SemiSellerValTrade, OneBit]),
            (SemiTradeBuyerVal, &[SemiTradeBuyerVal, OneBit]),
            (TwoBit, &[TwoBit, OneBit]),
            (OneBit, &[OneBit]),
        ];
        for (a, below) in expected {
            for b in FeedbackKind::ALL {
                assert_eq!(a.dominates(b), below.contains(&b), "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn accessors_enforce_declared_kind() {
        let fb = Feedback::OneBit { z: true };
        assert!(fb.trade_bit().unwrap());
        assert!(matches!(fb.seller_value(), Err(Error::ProtocolViolation { .. })));
        assert!(matches!(fb.buyer_bit(), Err(Error::ProtocolViolation { .. })));
        let up = fb.downgrade(act(0.5, 0.5), TwoBit);
        assert!(matches!(up, Err(Error::NotDowngradable { .. })));
    }

    proptest! {
        #[test]
        fn downgrade_commutes_with_extraction(
            s in 0.0f64..=1.0, b in 0.0f64..=1.0, p in 0.0f64..=1.0, q in 0.0f64..=1.0,
            hi in 0usize..7, lo in 0usize..7,
        ) {
            let (v, a) = (vp(s, b), act(p, q));
            let (hi, lo) = (FeedbackKind::ALL[hi], FeedbackKind::ALL[lo]);
            let top = extract_feedback(v, a, hi);
            if hi.dominates(lo) {
                prop_assert_eq!(top.downgrade(a, lo).unwrap(), extract_feedback(v, a, lo));
            } else {
                prop_assert!(top.downgrade(a, lo).is_err());
            }
        }

        #[test]
        fn two_bit_and_one_bit_agree(s in 0.0f64..=1.0, b in 0.0f64..=1.0, p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let (v, a) = (vp(s, b), act(p, q));
            let Feedback::TwoBit { x, y } = extract_feedback(v, a, TwoBit) else { unreachable!() };
            prop_assert_eq!(x, s <= p);
            prop_assert_eq!(y, q <= b);
            prop_assert_eq!(extract_feedback(v, a, OneBit), Feedback::OneBit { z: x && y });
        }

        #[test]
        fn inclusivity_and_accounting(s in 0.0f64..=1.0, b in 0.0f64..=1.0, p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            // A few exact ties per case.
            for (s, b) in [(s, b), (p, b), (s, q), (p, q)] {
                let o = super::super::trade(vp(s, b), act(p, q));
                let z = !(s > p) && !(q > b);
                prop_assert_eq!(o.traded, z);
                let zf = if z { 1.0 } else { 0.0 };
                prop_assert_eq!(o.gft, (b - s) * zf);
                prop_assert_eq!(o.profit, (q - p) * zf);
                prop_assert!((o.gft - o.profit - ((b - q) + (p - s)) * zf).abs() < 1e-12);
            }
        }
    }
}
