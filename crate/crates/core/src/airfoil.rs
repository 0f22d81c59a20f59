//! The airfoil equation `T(f) = g` for bounded `f`.
//!
//! A bounded solution exists iff `Tcheck(g)` is bounded and `int g / w = 0`;
//! it is then unique and equals `Tcheck(g) = -w T(g / w)`. Boundedness cannot
//! be decided from samples, so it is classified from the growth of
//! `sup |Tcheck(g)|` on grids that approach the endpoints and the breakpoints.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cheb::{self, ChebSeries, DEFAULT_ORDER};
use crate::error::{FhtError, Result};
use crate::function::FunctionHandle;
use crate::norms;
use crate::operators::{self, EngineConfig};
use crate::point::Abscissa;
use crate::quad;

/// Relative increment of the sup below which a refinement counts as stable.
pub const STABLE_INCREMENT: f64 = 0.01;
/// Relative increment at or above which a refinement counts as growth.
pub const GROWTH_INCREMENT: f64 = 0.10;
/// Refinement distances `10^-k` for `k` in this range.
pub const REFINEMENT_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=8;
pub const RESIDUAL_POINTS: usize = 201;

pub const BOUNDEDNESS_POLICY: &str = "engineering proxy: sup|Tcheck(g)| is sampled on grids reaching distance 10^-2 .. 10^-8 from +-1 and from the breakpoints of g; bounded if each of the last three refinements raises the sup by less than 1%, growing if each raises it by at least 10%, inconclusive otherwise";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeMembershipReport {
    pub phi_value: f64,
    pub phi_pass: bool,
    /// `(distance, sup |Tcheck(g)|)` for each refinement level.
    pub tcheck_sup_by_refinement: Vec<(f64, f64)>,
    pub boundedness_verdict: Verdict,
    pub overall: bool,
    pub policy: String,
    pub notes: Vec<String>,
}

fn classify(sups: &[f64]) -> Verdict {
    if sups.len() < 4 {
        return Verdict::Inconclusive;
    }
    let incs: Vec<f64> = sups
        .windows(2)
        .rev()
        .take(3)
        .map(|w| {
            if w[1] <= 1e-300 {
                0.0
            } else if w[0] <= 1e-300 {
                f64::INFINITY
            } else {
                (w[1] - w[0]) / w[0]
            }
        })
        .collect();
    if incs.iter().all(|&i| i < STABLE_INCREMENT) {
        Verdict::Bounded
    } else if incs.iter().all(|&i| i >= GROWTH_INCREMENT) {
        Verdict::Growing
    } else {
        Verdict::Inconclusive
    }
}

/// Interior Chebyshev points `cos((2j + 1) pi / 2n)`.
fn chebyshev_points(n: usize) -> Vec<Abscissa> {
    (0..n)
        .map(|j| Abscissa::from_angle((2 * j + 1) as f64 * PI / (2 * n) as f64))
        .collect()
}

/// Points at distance `d` from `+-1` and on both sides of each split point.
fn probe_points(g: &FunctionHandle, d: f64) -> Vec<Abscissa> {
    let mut pts = vec![Abscissa::below_one(d), Abscissa::above_minus_one(d)];
    for s in g.tag().split_points() {
        for p in [s.shifted(-d), s.shifted(d)] {
            if p.is_interior() {
                pts.push(p);
            }
        }
    }
    pts
}

pub fn check_range(g: &FunctionHandle, tol: f64) -> Result<RangeMembershipReport> {
    let mut notes = Vec::new();
    let (phi_value, phi_pass) = match operators::phi_1_over_w(g, tol) {
        Ok(p) => (p.value, p.in_kernel),
        Err(FhtError::ConvergenceFailure { value, est_error, .. }) => {
            notes.push(format!("phi quadrature unconverged (est. error {est_error:.3e})"));
            (value, value.abs() <= tol)
        }
        Err(e) => return Err(e),
    };
    let tcheck = operators::t_check_image(g, &EngineConfig::auto(tol))?;
    let eval_sup = |pts: &[Abscissa]| -> (f64, usize) {
        let vals: Vec<f64> = pts.par_iter().map(|&p| tcheck.eval_at(p)).collect();
        let bad = vals.iter().filter(|v| !v.is_finite()).count();
        (vals.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs())), bad)
    };
    let (mut sup, mut failures) = eval_sup(&chebyshev_points(41));
    let mut by_level = Vec::new();
    for k in REFINEMENT_EXPONENTS {
        let d = 10f64.powi(-k);
        let (s, bad) = eval_sup(&probe_points(g, d));
        sup = sup.max(s);
        failures += bad;
        by_level.push((d, sup));
    }
    if failures > 0 {
        notes.push(format!("{failures} probe evaluations failed and were skipped"));
    }
    let sups: Vec<f64> = by_level.iter().map(|l| l.1).collect();
    let verdict = classify(&sups);
    Ok(RangeMembershipReport {
        phi_value,
        phi_pass,
        tcheck_sup_by_refinement: by_level,
        boundedness_verdict: verdict,
        overall: phi_pass && verdict == Verdict::Bounded,
        policy: BOUNDEDNESS_POLICY.into(),
        notes,
    })
}

/// A solution of the airfoil equation.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Solution {
    /// One Chebyshev series on `[-1, 1]`.
    Chebyshev { coeffs: Vec<f64> },
    /// Chebyshev series on the pieces between the breakpoints of `g`.
    Piecewise { pieces: Vec<Piece> },
    /// No resolved representation; evaluated through quadrature.
    Handle { name: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    /// Coefficients in the variable mapped from `[a, b]` to `[-1, 1]`.
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AirfoilSolution {
    pub solution: Solution,
    #[serde(skip)]
    pub handle: FunctionHandle,
    pub residual_sup: f64,
    pub membership: RangeMembershipReport,
    /// `Q(g)`, reported when the range check failed and the solve was forced.
    pub defect: Option<f64>,
    /// `L_exp` norm (equivalent form, alpha = 1) of `T(f) - g`.
    pub lexp_residual: Option<f64>,
}

impl AirfoilSolution {
    pub fn eval(&self, x: f64) -> f64 {
        self.handle.eval(x)
    }
}

const RESOLVED: f64 = 1e-11;

/// Fits `f` on `[a, b]` through the affine map to `[-1, 1]`.
fn fit_piece(f: &FunctionHandle, a: Abscissa, b: Abscissa, order: usize) -> Result<ChebSeries> {
    let grid = cheb::ChebNodeGrid::new(order)?;
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|u| {
            let frac = 0.5 * u.one_plus();
            let p = Abscissa::lerp(a, b, frac);
            let v = f.eval_at(p);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FhtError::RejectedInput { x: p.value() })
            }
        })
        .collect::<Result<_>>()?;
    Ok(cheb::fit_samples(&samples))
}

fn represent(f: &FunctionHandle, g: &FunctionHandle, tol: f64) -> (Solution, FunctionHandle) {
    let splits = g.tag().split_points();
    let unresolved = || {
        (
            Solution::Handle {
                name: f.name().to_string(),
            },
            f.clone(),
        )
    };
    let mut ends = vec![Abscissa::LEFT];
    ends.extend(splits.iter().copied());
    ends.push(Abscissa::RIGHT);
    let mut pieces = Vec::new();
    for w in ends.windows(2) {
        match fit_piece(f, w[0], w[1], DEFAULT_ORDER) {
            Ok(s) => pieces.push((w[0], w[1], s)),
            Err(_) => return unresolved(),
        }
    }
    // Tails are compared with the largest coefficient over all pieces, so a
    // piece on which f vanishes is not judged by its noise alone.
    let scale = pieces.iter().map(|p| p.2.max_coeff()).fold(0.0f64, f64::max).max(1e-300);
    let threshold = RESOLVED.max(10.0 * tol);
    if pieces.iter().any(|p| p.2.tail() > threshold * scale) {
        return unresolved();
    }
    if pieces.len() == 1 {
        let s = pieces.pop().unwrap().2;
        let h = s.to_handle(f.name().to_string());
        return (
            Solution::Chebyshev {
                coeffs: s.coeffs().to_vec(),
            },
            h,
        );
    }
    let table: Vec<(Abscissa, Abscissa, ChebSeries)> = pieces.clone();
    let handle = FunctionHandle::precise(f.name().to_string(), move |p| {
        let i = table.partition_point(|(_, b, _)| p.diff(*b) >= 0.0).min(table.len() - 1);
        let (a, b, s) = &table[i];
        let u = 2.0 * p.diff(*a) / b.diff(*a) - 1.0;
        s.eval(u.clamp(-1.0, 1.0)).unwrap_or(f64::NAN)
    })
    .with_breakpoints(splits);
    let pieces = pieces
        .into_iter()
        .map(|(a, b, s)| Piece {
            a: a.value(),
            b: b.value(),
            coeffs: s.coeffs().to_vec(),
        })
        .collect();
    (Solution::Piecewise { pieces }, handle)
}

/// Solves `T(f) = g` by `f = Tcheck(g)`.
///
/// Without `force`, inputs that fail the range check are rejected. With
/// `force`, the returned `f` satisfies `T(f) = g - Q(g)` and the defect is
/// reported.
pub fn solve(g: &FunctionHandle, tol: f64, force: bool) -> Result<AirfoilSolution> {
    let membership = check_range(g, tol)?;
    if !membership.overall && !force {
        return Err(FhtError::NotInRange {
            phi_value: membership.phi_value,
            verdict: format!("{:?}", membership.boundedness_verdict).to_lowercase(),
        });
    }
    let raw = operators::t_check_image(g, &EngineConfig::auto(tol))?;
    let (solution, handle) = represent(&raw, g, tol);
    let cfg = EngineConfig::auto(tol.max(1e-12));
    let tf = match &solution {
        Solution::Chebyshev { coeffs } => {
            let s = ChebSeries::new(coeffs.clone())?;
            operators::t_image(&s.to_handle("f"), &cfg)?
        }
        _ => operators::t_image(&handle, &EngineConfig::quadrature(tol.max(1e-12)))?,
    };
    let splits = g.tag().split_points();
    let pts: Vec<Abscissa> = chebyshev_points(RESIDUAL_POINTS)
        .into_iter()
        .filter(|p| splits.iter().all(|s| p.diff(*s) != 0.0))
        .collect();
    let residual_sup = pts
        .par_iter()
        .map(|&p| (tf.eval_at(p) - g.eval_at(p)).abs())
        .reduce(|| 0.0, f64::max);
    let defect = if membership.overall {
        None
    } else {
        Some(operators::apply_q(g, tol.max(quad::MIN_TOL))?)
    };
    // Rearranging a nested quadrature is too slow to be worth a diagnostic.
    let lexp_residual = match solution {
        Solution::Handle { .. } => None,
        _ => norms::rearrange(&tf.minus(g), 256)
            .ok()
            .map(|r| norms::norm_lexp_equiv(&r, 1.0)),
    };
    Ok(AirfoilSolution {
        solution,
        handle,
        residual_sup,
        membership,
        defect,
        lexp_residual,
    })
}

/// `(2/pi) K B(1/2, lambda)`: a bound for `sup |Tcheck(g)|` when `g` is
/// Hölder continuous with constant `K` and exponent `lambda`.
pub fn holder_bound(k: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(FhtError::Domain {
            t: lambda,
            reason: "the Hölder exponent must lie in (0, 1]",
        });
    }
    if !(k > 0.0) {
        return Err(FhtError::Domain {
            t: k,
            reason: "the Hölder constant must be positive",
        });
    }
    Ok(2.0 / PI * k * beta(0.5, lambda))
}

/// `B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
}
