//! Evaluable functions on (-1, 1) together with the singularity metadata the
//! engines need to integrate them accurately.

use std::fmt;
use std::sync::Arc;

use crate::point::Abscissa;

pub type Evaluator = Arc<dyn Fn(Abscissa) -> f64 + Send + Sync>;

/// Coarse classification of a [`SingularityTag`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TagKind {
    Smooth,
    Jump,
    InverseWeight,
}

/// What is known about where a function stops being smooth.
///
/// `breakpoints` are jump locations, `singular_points` interior points where
/// the function is unbounded (typically logarithmically, as for transforms of
/// jump functions), `kinks` points where it is continuous but not smooth.
/// All lists are sorted and strictly interior.
#[derive(Clone, Debug, Default)]
pub struct SingularityTag {
    pub breakpoints: Vec<Abscissa>,
    pub singular_points: Vec<Abscissa>,
    pub kinks: Vec<Abscissa>,
    /// The function may be unbounded or non-smooth at -1 or +1.
    pub endpoint_singular: bool,
    /// The function is stored as `numerator / w`.
    pub inverse_weight: bool,
}

impl SingularityTag {
    pub fn kind(&self) -> TagKind {
        if self.inverse_weight {
            TagKind::InverseWeight
        } else if !self.breakpoints.is_empty() || !self.singular_points.is_empty() {
            TagKind::Jump
        } else {
            TagKind::Smooth
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.kind() == TagKind::Smooth && !self.endpoint_singular && self.kinks.is_empty()
    }

    /// Breakpoints, singular points and kinks merged, sorted and deduplicated.
    pub fn split_points(&self) -> Vec<Abscissa> {
        let mut pts: Vec<Abscissa> = self
            .breakpoints
            .iter()
            .chain(self.singular_points.iter())
            .chain(self.kinks.iter())
            .copied()
            .collect();
        normalize_points(&mut pts);
        pts
    }

    /// Split points at which the function itself is not defined.
    pub fn is_breaking_point(&self, p: Abscissa) -> bool {
        self.breakpoints.iter().chain(self.singular_points.iter()).any(|&s| s.diff(p) == 0.0)
    }

    pub fn is_singular_point(&self, p: Abscissa) -> bool {
        self.singular_points.iter().any(|&s| s == p)
    }

    fn merged(&self, other: &SingularityTag) -> SingularityTag {
        let mut breakpoints: Vec<Abscissa> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        normalize_points(&mut breakpoints);
        let mut singular_points: Vec<Abscissa> = self
            .singular_points
            .iter()
            .chain(other.singular_points.iter())
            .copied()
            .collect();
        normalize_points(&mut singular_points);
        let mut kinks: Vec<Abscissa> = self.kinks.iter().chain(other.kinks.iter()).copied().collect();
        normalize_points(&mut kinks);
        SingularityTag {
            breakpoints,
            singular_points,
            kinks,
            endpoint_singular: self.endpoint_singular || other.endpoint_singular,
            inverse_weight: self.inverse_weight || other.inverse_weight,
        }
    }
}

pub(crate) fn normalize_points(pts: &mut Vec<Abscissa>) {
    pts.retain(|p| p.is_interior());
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup_by(|a, b| a.diff(*b) == 0.0);
}

#[derive(Clone)]
enum Body {
    Direct(Evaluator),
    OverWeight(Evaluator),
}

/// A real function on (-1, 1).
#[derive(Clone)]
pub struct FunctionHandle {
    name: String,
    body: Body,
    tag: SingularityTag,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("name", &self.name)
            .field("tag", &self.tag)
            .finish()
    }
}

impl FunctionHandle {
    /// Wraps a plain closure of `x`.
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::precise(name, move |p: Abscissa| f(p.value()))
    }

    /// Wraps a closure that reads the point with its exact offsets.
    pub fn precise<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(Abscissa) -> f64 + Send + Sync + 'static,
    {
        FunctionHandle {
            name: name.into(),
            body: Body::Direct(Arc::new(f)),
            tag: SingularityTag::default(),
        }
    }

    /// The function `numerator(x) / w(x)`.
    pub fn over_weight<F>(name: impl Into<String>, numerator: F) -> Self
    where
        F: Fn(Abscissa) -> f64 + Send + Sync + 'static,
    {
        FunctionHandle {
            name: name.into(),
            body: Body::OverWeight(Arc::new(numerator)),
            tag: SingularityTag {
                endpoint_singular: true,
                inverse_weight: true,
                ..SingularityTag::default()
            },
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    /// The characteristic function of (-1, 1).
    pub fn chi() -> Self {
        Self::new("chi(-1,1)", |_| 1.0)
    }

    pub fn identity() -> Self {
        Self::new("x", |x| x)
    }

    pub fn weight() -> Self {
        Self::precise("w", |p| p.weight())
    }

    pub fn inverse_weight() -> Self {
        Self::over_weight("1/w", |_| 1.0)
    }

    /// Characteristic function of a union of intervals `(a, b)`; intervals
    /// must be disjoint.
    pub fn indicator(intervals: &[(Abscissa, Abscissa)]) -> Self {
        let iv: Vec<(Abscissa, Abscissa)> = intervals.to_vec();
        let name = iv
            .iter()
            .map(|(a, b)| format!("chi({a},{b})"))
            .collect::<Vec<_>>()
            .join("+");
        let breakpoints: Vec<Abscissa> = iv.iter().flat_map(|&(a, b)| [a, b]).collect();
        let f = move |p: Abscissa| {
            if iv.iter().any(|&(a, b)| p.diff(a) >= 0.0 && p.diff(b) < 0.0) {
                1.0
            } else {
                0.0
            }
        };
        Self::precise(name, f).with_breakpoints(breakpoints)
    }

    pub fn with_breakpoints<I, P>(mut self, pts: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Abscissa>,
    {
        self.tag.breakpoints.extend(pts.into_iter().map(Into::into));
        normalize_points(&mut self.tag.breakpoints);
        self
    }

    pub fn with_singular_points<I, P>(mut self, pts: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Abscissa>,
    {
        self.tag.singular_points.extend(pts.into_iter().map(Into::into));
        normalize_points(&mut self.tag.singular_points);
        self
    }

    pub fn with_kinks<I, P>(mut self, pts: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Abscissa>,
    {
        self.tag.kinks.extend(pts.into_iter().map(Into::into));
        normalize_points(&mut self.tag.kinks);
        self
    }

    pub fn with_endpoint_singular(mut self, yes: bool) -> Self {
        self.tag.endpoint_singular = yes;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tag(&self) -> &SingularityTag {
        &self.tag
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_at(Abscissa::new(x))
    }

    pub fn eval_at(&self, p: Abscissa) -> f64 {
        match &self.body {
            Body::Direct(f) => f(p),
            Body::OverWeight(n) => n(p) / p.weight(),
        }
    }

    /// `w(x) * f(x)`, computed without dividing by `w` for inverse-weight
    /// handles.
    pub fn numerator_at(&self, p: Abscissa) -> f64 {
        match &self.body {
            Body::Direct(f) => f(p) * p.weight(),
            Body::OverWeight(n) => n(p),
        }
    }

    /// `f / w`.
    pub fn divided_by_weight(&self) -> FunctionHandle {
        let body = match &self.body {
            Body::Direct(f) => Body::OverWeight(f.clone()),
            Body::OverWeight(n) => {
                let n = n.clone();
                Body::OverWeight(Arc::new(move |p: Abscissa| n(p) / p.weight()))
            }
        };
        FunctionHandle {
            name: format!("({})/w", self.name),
            body,
            tag: SingularityTag {
                endpoint_singular: true,
                inverse_weight: true,
                ..self.tag.clone()
            },
        }
    }

    /// `w * f`.
    pub fn times_weight(&self) -> FunctionHandle {
        let (body, endpoint_singular) = match &self.body {
            Body::Direct(f) => {
                let f = f.clone();
                (
                    Body::Direct(Arc::new(move |p: Abscissa| f(p) * p.weight()) as Evaluator),
                    // w f is continuous at +-1 but not smooth there
                    true,
                )
            }
            Body::OverWeight(n) => (Body::Direct(n.clone()), self.tag.endpoint_singular),
        };
        FunctionHandle {
            name: format!("w*({})", self.name),
            body,
            tag: SingularityTag {
                inverse_weight: false,
                endpoint_singular,
                ..self.tag.clone()
            },
        }
    }

    pub fn scaled(&self, c: f64) -> FunctionHandle {
        let body = match &self.body {
            Body::Direct(f) => {
                let f = f.clone();
                Body::Direct(Arc::new(move |p: Abscissa| c * f(p)))
            }
            Body::OverWeight(n) => {
                let n = n.clone();
                Body::OverWeight(Arc::new(move |p: Abscissa| c * n(p)))
            }
        };
        FunctionHandle {
            name: format!("{c}*({})", self.name),
            body,
            tag: self.tag.clone(),
        }
    }

    pub fn abs(&self) -> FunctionHandle {
        let h = self.clone();
        FunctionHandle {
            name: format!("abs({})", self.name),
            body: Body::Direct(Arc::new(move |p: Abscissa| h.eval_at(p).abs())),
            tag: SingularityTag {
                inverse_weight: false,
                ..self.tag.clone()
            },
        }
    }

    /// `self - other`. Inverse-weight structure is dropped.
    pub fn minus(&self, other: &FunctionHandle) -> FunctionHandle {
        let (a, b) = (self.clone(), other.clone());
        let tag = SingularityTag {
            inverse_weight: false,
            ..self.tag.merged(&other.tag)
        };
        FunctionHandle {
            name: format!("({})-({})", self.name, other.name),
            body: Body::Direct(Arc::new(move |p: Abscissa| a.eval_at(p) - b.eval_at(p))),
            tag,
        }
    }

    /// Pointwise product. If either factor carries `1/w`, so does the product.
    pub fn product(&self, other: &FunctionHandle) -> FunctionHandle {
        let tag = self.tag.merged(&other.tag);
        let name = format!("({})*({})", self.name, other.name);
        let (a, b) = (self.clone(), other.clone());
        let body = match (&self.body, &other.body) {
            (Body::Direct(_), Body::Direct(_)) => {
                Body::Direct(Arc::new(move |p: Abscissa| a.eval_at(p) * b.eval_at(p)) as Evaluator)
            }
            (Body::OverWeight(n), Body::Direct(_)) => {
                let n = n.clone();
                Body::OverWeight(Arc::new(move |p: Abscissa| n(p) * b.eval_at(p)))
            }
            (Body::Direct(_), Body::OverWeight(n)) => {
                let n = n.clone();
                Body::OverWeight(Arc::new(move |p: Abscissa| a.eval_at(p) * n(p)))
            }
            (Body::OverWeight(n), Body::OverWeight(m)) => {
                let (n, m) = (n.clone(), m.clone());
                Body::OverWeight(Arc::new(move |p: Abscissa| n(p) * m(p) / p.weight()))
            }
        };
        FunctionHandle { name, body, tag }
    }

    /// Piecewise-linear interpolant through `(x, value)` samples, constant
    /// beyond the first and last sample.
    pub fn from_samples(name: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let f = move |x: f64| {
            let n = xs.len();
            if x <= xs[0] {
                return ys[0];
            }
            if x >= xs[n - 1] {
                return ys[n - 1];
            }
            let i = xs.partition_point(|&v| v <= x);
            let (x0, x1) = (xs[i - 1], xs[i]);
            let s = (x - x0) / (x1 - x0);
            ys[i - 1] + s * (ys[i] - ys[i - 1])
        };
        Self::new(name, f).with_endpoint_singular(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_is_right_open() {
        let f = FunctionHandle::indicator(&[(0.0.into(), 0.5.into())]);
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(0.25), 1.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(-0.1), 0.0);
        assert_eq!(f.tag().kind(), TagKind::Jump);
        assert_eq!(f.tag().breakpoints.len(), 2);
    }

    #[test]
    fn endpoints_are_not_breakpoints() {
        let f = FunctionHandle::indicator(&[(Abscissa::LEFT, Abscissa::RIGHT)]);
        assert!(f.tag().breakpoints.is_empty());
        assert_eq!(f.tag().kind(), TagKind::Smooth);
    }

    #[test]
    fn weight_round_trip() {
        let f = FunctionHandle::new("x^2", |x| x * x);
        let g = f.divided_by_weight().times_weight();
        for &x in &[-0.9, 0.0, 0.3, 0.99] {
            assert!((g.eval(x) - x * x).abs() < 1e-15);
        }
        let inv = FunctionHandle::inverse_weight();
        assert!((inv.eval(0.6) - 1.25).abs() < 1e-15);
        assert_eq!(inv.numerator_at(Abscissa::new(0.6)), 1.0);
        assert_eq!(inv.tag().kind(), TagKind::InverseWeight);
    }

    #[test]
    fn samples_interpolate_linearly() {
        let f = FunctionHandle::from_samples("s", vec![-0.5, 0.0, 0.5], vec![1.0, 3.0, 2.0]);
        assert_eq!(f.eval(-0.25), 2.0);
        assert_eq!(f.eval(0.25), 2.5);
        assert_eq!(f.eval(-0.9), 1.0);
    }
}
