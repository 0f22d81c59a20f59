//! Points of the closed interval [-1, 1] that keep their distance to a
//! nearby reference point exactly.
//!
//! Most points are plain `f64` values (`offset == 0`). Points created near a
//! singularity or near an endpoint are stored as `anchor + offset`, so that
//! differences like `1 - x`, `x - a` or `b - x` stay accurate when they are far
//! below the spacing of doubles around `anchor`. Everything that evaluates
//! logarithmic profiles close to their singular points goes through this type.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

/// `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[derive(Clone, Copy, Debug)]
pub struct Abscissa {
    anchor: f64,
    offset: f64,
}

impl Abscissa {
    pub const LEFT: Abscissa = Abscissa {
        anchor: -1.0,
        offset: 0.0,
    };
    pub const RIGHT: Abscissa = Abscissa {
        anchor: 1.0,
        offset: 0.0,
    };

    pub const fn new(x: f64) -> Self {
        Abscissa {
            anchor: x,
            offset: 0.0,
        }
    }

    /// The point `anchor + offset`, with `offset` kept separately.
    pub const fn near(anchor: f64, offset: f64) -> Self {
        Abscissa { anchor, offset }
    }

    /// The point at distance `d` to the left of `+1`.
    pub fn below_one(d: f64) -> Self {
        Abscissa::near(1.0, -d)
    }

    /// The point at distance `d` to the right of `-1`.
    pub fn above_minus_one(d: f64) -> Self {
        Abscissa::near(-1.0, d)
    }

    pub fn anchor(self) -> f64 {
        self.anchor
    }

    pub fn offset(self) -> f64 {
        self.offset
    }

    pub fn value(self) -> f64 {
        self.anchor + self.offset
    }

    /// `x - c`.
    pub fn sub(self, c: f64) -> f64 {
        (self.anchor - c) + self.offset
    }

    /// `self - other`, exact in the offsets when both share an anchor.
    pub fn diff(self, other: Abscissa) -> f64 {
        if self.anchor == other.anchor {
            self.offset - other.offset
        } else {
            // compensated sum, so that offsets survive the cancellation of
            // the anchors
            let mut sum = 0.0;
            let mut err = 0.0;
            for term in [self.anchor, -other.anchor, self.offset, -other.offset] {
                let (s, e) = two_sum(sum, term);
                sum = s;
                err += e;
            }
            sum + err
        }
    }

    /// `1 - x`.
    pub fn one_minus(self) -> f64 {
        (1.0 - self.anchor) - self.offset
    }

    /// `1 + x`.
    pub fn one_plus(self) -> f64 {
        (1.0 + self.anchor) + self.offset
    }

    /// `w(x) = sqrt(1 - x^2)`.
    pub fn weight(self) -> f64 {
        let p = self.one_minus() * self.one_plus();
        if p <= 0.0 {
            0.0
        } else {
            p.sqrt()
        }
    }

    pub fn shifted(self, d: f64) -> Self {
        let offset = self.offset + d;
        let x = self.anchor + offset;
        let end = if x > 0.0 { 1.0 } else { -1.0 };
        // re-anchor at the endpoint once it is the nearer reference
        if end != self.anchor && (x - end).abs() < offset.abs() {
            Abscissa::near(end, (self.anchor - end) + offset)
        } else {
            Abscissa::near(self.anchor, offset)
        }
    }

    /// Point at fraction `frac` of the way from `a` to `b`, anchored at the
    /// closer end.
    pub fn lerp(a: Abscissa, b: Abscissa, frac: f64) -> Abscissa {
        let width = b.diff(a);
        if frac <= 0.5 {
            a.shifted(frac * width)
        } else {
            b.shifted(-(1.0 - frac) * width)
        }
    }

    /// `cos(theta)` for `theta` in `[0, pi]`, anchored at the nearer endpoint.
    pub fn from_angle(theta: f64) -> Self {
        if theta < PI / 4.0 {
            let s = (0.5 * theta).sin();
            Abscissa::below_one(2.0 * s * s)
        } else if theta > 0.75 * PI {
            let c = (0.5 * theta).cos();
            Abscissa::above_minus_one(2.0 * c * c)
        } else {
            Abscissa::new(theta.cos())
        }
    }

    /// `acos(x)` in `[0, pi]`.
    pub fn angle(self) -> f64 {
        let x = self.value();
        if x > 0.5 {
            2.0 * (0.5 * self.one_minus()).max(0.0).sqrt().asin()
        } else if x < -0.5 {
            PI - 2.0 * (0.5 * self.one_plus()).max(0.0).sqrt().asin()
        } else {
            x.acos()
        }
    }

    /// True for points of the open interval (-1, 1).
    pub fn is_interior(self) -> bool {
        self.one_minus() > 0.0 && self.one_plus() > 0.0
    }
}

impl From<f64> for Abscissa {
    fn from(x: f64) -> Self {
        Abscissa::new(x)
    }
}

impl PartialEq for Abscissa {
    fn eq(&self, other: &Self) -> bool {
        self.diff(*other) == 0.0
    }
}

impl PartialOrd for Abscissa {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.diff(*other).partial_cmp(&0.0)
    }
}

impl fmt::Display for Abscissa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset == 0.0 {
            write!(f, "{}", self.anchor)
        } else {
            write!(f, "{}{:+e}", self.anchor, self.offset)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complements_survive_tiny_offsets() {
        let p = Abscissa::below_one(1e-40);
        assert_eq!(p.value(), 1.0);
        assert_eq!(p.one_minus(), 1e-40);
        assert_eq!(p.one_plus(), 2.0);
        let q = Abscissa::above_minus_one(3e-200);
        assert_eq!(q.one_plus(), 3e-200);
    }

    #[test]
    fn diff_is_exact_for_shared_anchor() {
        let a = Abscissa::below_one(0.25e-30);
        let b = Abscissa::below_one(0.75e-30);
        assert_eq!(a.diff(b), 0.75e-30 - 0.25e-30);
        assert!(a.diff(b) > 0.0 && a.value() == b.value());
        assert!(b < a);
    }

    #[test]
    fn angle_round_trip() {
        for &theta in &[1e-9, 0.3, 1.2, 2.0, 3.0, PI - 1e-9] {
            let p = Abscissa::from_angle(theta);
            let back = p.angle();
            assert!((back - theta).abs() <= 1e-15 * theta.max(1.0), "{theta} -> {back}");
        }
    }

    #[test]
    fn weight_near_endpoint() {
        let p = Abscissa::below_one(1e-20);
        let w = p.weight();
        assert!((w - (2e-20f64).sqrt()).abs() < 1e-25);
    }

    #[test]
    fn long_shifts_reanchor_at_the_far_endpoint() {
        let p = Abscissa::LEFT.shifted(1.5);
        assert_eq!((p.anchor(), p.offset()), (1.0, -0.5));
        let q = p.shifted(0.5).shifted(-1e-300);
        assert_eq!(q.one_minus(), 1e-300);
        assert_eq!(Abscissa::new(0.3).shifted(0.1).anchor(), 0.3);
    }

    #[test]
    fn diff_across_anchors_keeps_offsets() {
        let p = Abscissa::near(0.5, 1e-30);
        let q = Abscissa::near(1.0, -0.5);
        assert_eq!(p.diff(q), 1e-30);
        assert_eq!(q.diff(p), -1e-30);
    }
}
