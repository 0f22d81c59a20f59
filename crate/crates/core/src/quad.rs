//! Principal-value quadrature for the finite Hilbert transform
//!
//! `T(f)(t) = (1/pi) p.v. int_{-1}^{1} f(x) / (x - t) dx`
//!
//! is computed by singularity subtraction. On every smooth piece `[a, b]` of
//! `f` a constant `c` is removed and added back analytically:
//!
//! `int_a^b f/(x-t) = int_a^b (f(x) - c)/(x - t) dx + c log|(b-t)/(a-t)|`.
//!
//! On the piece containing `t` the constant is `f(t)`, which removes the pole.
//! Inputs carrying the factor `1/w` are integrated in the angle `x = cos(theta)`,
//! where `dx / w = -d theta` and the add-back has the closed form
//! `int d theta / (cos theta - cos phi) = log|sin((theta+phi)/2) / sin((theta-phi)/2)| / sin phi`.
//!
//! The remainders are integrated by a globally adaptive 7/15-point
//! Gauss-Kronrod rule with a panel budget (`FHT_MAX_PANELS`, default 2^16).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{FhtError, Result};
use crate::function::FunctionHandle;
use crate::point::Abscissa;

pub const DEFAULT_MAX_PANELS: usize = 1 << 16;
pub const MIN_TOL: f64 = 1e-13;

/// Panel budget, overridable through the `FHT_MAX_PANELS` environment variable.
pub fn max_panels() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("FHT_MAX_PANELS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(DEFAULT_MAX_PANELS)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PVResult {
    pub value: f64,
    pub est_error: f64,
    pub subdivisions: usize,
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integration variable: either a plain `f64` or an [`Abscissa`].
pub(crate) trait Coord: Copy {
    fn width(a: Self, b: Self) -> f64;
    fn lerp(a: Self, b: Self, frac: f64) -> Self;
    fn approx(self) -> f64;
}

impl Coord for f64 {
    fn width(a: Self, b: Self) -> f64 {
        b - a
    }
    fn lerp(a: Self, b: Self, frac: f64) -> Self {
        if frac <= 0.5 {
            a + frac * (b - a)
        } else {
            b - (1.0 - frac) * (b - a)
        }
    }
    fn approx(self) -> f64 {
        self
    }
}

impl Coord for Abscissa {
    fn width(a: Self, b: Self) -> f64 {
        b.diff(a)
    }
    fn lerp(a: Self, b: Self, frac: f64) -> Self {
        Abscissa::lerp(a, b, frac)
    }
    fn approx(self) -> f64 {
        self.value()
    }
}

struct Panel<C> {
    a: C,
    b: C,
    value: f64,
    error: f64,
    resabs: f64,
}

impl<C> PartialEq for Panel<C> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<C> Eq for Panel<C> {}
impl<C> PartialOrd for Panel<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C> Ord for Panel<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<C: Coord>(f: &dyn Fn(C) -> f64, a: C, b: C) -> Result<Panel<C>> {
    let half = 0.5 * C::width(a, b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    let mut resabs = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.5] } else { &[0.5 * (1.0 - x), 0.5 * (1.0 + x)] };
        for &frac in nodes {
            let p = C::lerp(a, b, frac);
            let v = f(p);
            if !v.is_finite() {
                return Err(FhtError::RejectedInput { x: p.approx() });
            }
            kronrod += wk * v;
            resabs += wk * v.abs();
            if i % 2 == 1 {
                gauss += WG[i / 2] * v;
            }
        }
    }
    Ok(Panel {
        a,
        b,
        value: half * kronrod,
        error: (half * (kronrod - gauss)).abs(),
        resabs: (half * resabs).abs(),
    })
}

/// Globally adaptive integration of `f` over the union of `segments`.
pub(crate) fn adaptive<C: Coord>(
    f: &dyn Fn(C) -> f64,
    segments: &[(C, C)],
    tol: f64,
    budget: usize,
) -> Result<PVResult> {
    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut frozen = 0usize;
    for &(a, b) in segments {
        if C::width(a, b) == 0.0 {
            continue;
        }
        heap.push(gauss_kronrod(f, a, b)?);
    }
    let totals = |heap: &BinaryHeap<Panel<C>>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, r), p| (v + p.value, e + p.error, r + p.resabs))
    };
    let (mut value, mut error, mut resabs) = totals(&heap);
    let mut steps = 0usize;
    loop {
        let floor = 50.0 * f64::EPSILON * resabs;
        if error + frozen_error <= tol.max(floor) {
            break;
        }
        let panels = heap.len() + frozen;
        if panels >= budget {
            return Err(FhtError::ConvergenceFailure {
                value: value + frozen_value,
                est_error: error + frozen_error,
                subdivisions: panels,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(FhtError::ConvergenceFailure {
                value: frozen_value,
                est_error: frozen_error,
                subdivisions: frozen,
            });
        };
        let mid = C::lerp(worst.a, worst.b, 0.5);
        let w = C::width(worst.a, worst.b).abs();
        if C::width(worst.a, mid) == 0.0 || C::width(mid, worst.b) == 0.0 || w < 1e-300 {
            frozen_value += worst.value;
            frozen_error += worst.error;
            frozen += 1;
            value -= worst.value;
            error -= worst.error;
            resabs -= worst.resabs;
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
        steps += 1;
        // Re-sum occasionally so incremental drift cannot stall termination.
        if steps % 256 == 0 {
            (value, error, resabs) = totals(&heap);
        }
    }
    let (v, e, _) = totals(&heap);
    Ok(PVResult {
        value: v + frozen_value,
        est_error: e + frozen_error,
        subdivisions: heap.len() + frozen,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= MIN_TOL) || !tol.is_finite() {
        return Err(FhtError::InvalidRequest(format!(
            "tolerance {tol} below the supported minimum {MIN_TOL}"
        )));
    }
    Ok(())
}

fn check_interior(t: Abscissa) -> Result<()> {
    if !t.is_interior() || !t.value().is_finite() {
        return Err(FhtError::Domain {
            t: t.value(),
            reason: "the transform is evaluated on the open interval (-1, 1)",
        });
    }
    Ok(())
}

/// Boundaries `-1 = B_0 < B_1 < ... < B_k = 1` of the smooth pieces of `f`,
/// except a kink at `t`, where `f` is continuous.
fn piece_boundaries(f: &FunctionHandle, t: Abscissa) -> Vec<Abscissa> {
    let mut b = vec![Abscissa::LEFT];
    b.extend(f.tag().split_points().into_iter().filter(|p| p.diff(t) != 0.0));
    b.push(Abscissa::RIGHT);
    b
}

/// Subtraction constant for a piece that does not contain `t`: the value of
/// `f` just inside the piece at its end closest to `t`.
fn side_constant(
    f: &FunctionHandle,
    eval: &dyn Fn(Abscissa) -> f64,
    a: Abscissa,
    b: Abscissa,
    t: Abscissa,
) -> f64 {
    let width = b.diff(a);
    let (closest, inside) = if t.diff(a) < 0.0 {
        (a, a.shifted(1e-8 * width))
    } else {
        (b, b.shifted(-1e-8 * width))
    };
    if !closest.is_interior() || f.tag().is_singular_point(closest) {
        return 0.0;
    }
    let c = eval(inside);
    if c.is_finite() {
        c
    } else {
        0.0
    }
}

/// `T(f)(t)` with absolute tolerance `tol` on the returned value.
pub fn pv_fht(f: &FunctionHandle, t: impl Into<Abscissa>, tol: f64) -> Result<PVResult> {
    pv_fht_with_budget(f, t.into(), tol, max_panels())
}

pub fn pv_fht_with_budget(
    f: &FunctionHandle,
    t: Abscissa,
    tol: f64,
    budget: usize,
) -> Result<PVResult> {
    check_tol(tol)?;
    check_interior(t)?;
    if f.tag().is_breaking_point(t) {
        return Err(FhtError::SingularPoint {
            t: t.value(),
            breakpoint: t.value(),
        });
    }
    let scaled_tol = tol * PI;
    let raw = if f.tag().inverse_weight {
        pv_angle(f, t, scaled_tol, budget)
    } else {
        pv_direct(f, t, scaled_tol, budget)
    }
    .map_err(|e| shift_failure(e, 0.0, 1.0 / PI))?;
    Ok(PVResult {
        value: raw.value / PI,
        est_error: raw.est_error / PI,
        subdivisions: raw.subdivisions,
    })
}

/// Applies `(value + shift) * scale` to the best value of a failure.
fn shift_failure(e: FhtError, shift: f64, scale: f64) -> FhtError {
    match e {
        FhtError::ConvergenceFailure {
            value,
            est_error,
            subdivisions,
        } => FhtError::ConvergenceFailure {
            value: (value + shift) * scale,
            est_error: est_error * scale,
            subdivisions,
        },
        other => other,
    }
}

/// Remainder integrand over `x` with its add-back, for inputs without `1/w`.
fn pv_direct(f: &FunctionHandle, t: Abscissa, tol: f64, budget: usize) -> Result<PVResult> {
    let bounds = piece_boundaries(f, t);
    let eval = |p: Abscissa| f.eval_at(p);
    let ft = eval(t);
    if !ft.is_finite() {
        return Err(FhtError::RejectedInput { x: t.value() });
    }
    let mut segments: Vec<(Abscissa, Abscissa, f64)> = Vec::new();
    let mut add_back = 0.0;
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let contains = t.diff(a) > 0.0 && t.diff(b) < 0.0;
        let c = if contains {
            ft
        } else {
            side_constant(f, &eval, a, b, t)
        };
        if c != 0.0 {
            add_back += c * (b.diff(t) / a.diff(t)).abs().ln();
        }
        if contains {
            segments.push((a, t, c));
            segments.push((t, b, c));
        } else {
            segments.push((a, b, c));
        }
    }
    integrate_remainders(&segments, budget, tol, add_back, |p, c| {
        let d = p.diff(t);
        // a node indistinguishable from t carries no weight
        if d == 0.0 {
            return 0.0;
        }
        (eval(p) - c) / d
    })
}

/// Remainder integrand over `theta` with its add-back, for `numerator / w`.
fn pv_angle(f: &FunctionHandle, t: Abscissa, tol: f64, budget: usize) -> Result<PVResult> {
    let bounds = piece_boundaries(f, t);
    let num = |p: Abscissa| f.numerator_at(p);
    let nt = num(t);
    if !nt.is_finite() {
        return Err(FhtError::RejectedInput { x: t.value() });
    }
    let phi = t.angle();
    let sin_phi = t.weight();
    // ln|sin((theta+phi)/2) / sin((theta-phi)/2)| / sin(phi) at x = cos(theta),
    // using sin((theta+phi)/2) sin((theta-phi)/2) = (t - x)/2 so that points
    // close to t keep their exact separation
    let antideriv = |b: Abscissa| {
        if !b.is_interior() {
            return 0.0;
        }
        let s = (0.5 * (b.angle() + phi)).sin();
        (2.0 * s * s / b.diff(t).abs()).ln() / sin_phi
    };
    let mut segments: Vec<(f64, f64, f64)> = Vec::new();
    let mut add_back = 0.0;
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let contains = t.diff(a) > 0.0 && t.diff(b) < 0.0;
        let c = if contains {
            nt
        } else {
            side_constant(f, &num, a, b, t)
        };
        // x increases from a to b, theta decreases
        let (ta, tb) = (b.angle(), a.angle());
        if c != 0.0 {
            add_back += c * (antideriv(a) - antideriv(b));
        }
        if contains {
            segments.push((ta, phi, c));
            segments.push((phi, tb, c));
        } else {
            segments.push((ta, tb, c));
        }
    }
    let mut total = PVResult {
        value: add_back,
        est_error: 0.0,
        subdivisions: 0,
    };
    let r = run_segments(&segments, budget, tol, |theta: f64, c| {
        let p = Abscissa::from_angle(theta);
        let d = p.diff(t);
        if d == 0.0 {
            return 0.0;
        }
        (num(p) - c) / d
    })
    .map_err(|e| shift_failure(e, add_back, 1.0))?;
    total.value += r.value;
    total.est_error = r.est_error;
    total.subdivisions = r.subdivisions;
    Ok(total)
}

fn integrate_remainders<G>(
    segments: &[(Abscissa, Abscissa, f64)],
    budget: usize,
    tol: f64,
    add_back: f64,
    g: G,
) -> Result<PVResult>
where
    G: Fn(Abscissa, f64) -> f64,
{
    let r = run_segments(segments, budget, tol, g).map_err(|e| shift_failure(e, add_back, 1.0))?;
    Ok(PVResult {
        value: r.value + add_back,
        est_error: r.est_error,
        subdivisions: r.subdivisions,
    })
}

/// Integrates per-segment integrands `g(., c_segment)` under one shared
/// budget and error target.
fn run_segments<C, G>(segments: &[(C, C, f64)], budget: usize, tol: f64, g: G) -> Result<PVResult>
where
    C: Coord,
    G: Fn(C, f64) -> f64,
{
    // Segments whose remainder vanishes identically need no panels.
    let mut live: Vec<(C, C, f64)> = Vec::with_capacity(segments.len());
    for &(a, b, c) in segments {
        let probe = [0.13, 0.5, 0.77, 0.91];
        let zero = probe.iter().all(|&s| g(C::lerp(a, b, s), c) == 0.0);
        if !zero {
            live.push((a, b, c));
        }
    }
    if live.is_empty() {
        return Ok(PVResult {
            value: 0.0,
            est_error: 0.0,
            subdivisions: segments.len().max(1),
        });
    }
    // Each segment is integrated with a share of the tolerance proportional to
    // its count; segments keep their own constant.
    let mut out = PVResult {
        value: 0.0,
        est_error: 0.0,
        subdivisions: 0,
    };
    let share = tol / live.len() as f64;
    let per_budget = (budget / live.len()).max(1);
    let mut failed = false;
    for &(a, b, c) in &live {
        let r = match adaptive(&|p: C| g(p, c), &[(a, b)], share, per_budget) {
            Ok(r) => r,
            Err(FhtError::ConvergenceFailure {
                value,
                est_error,
                subdivisions,
            }) => {
                failed = true;
                PVResult {
                    value,
                    est_error,
                    subdivisions,
                }
            }
            Err(other) => return Err(other),
        };
        out.value += r.value;
        out.est_error += r.est_error;
        out.subdivisions += r.subdivisions;
    }
    if failed {
        return Err(FhtError::ConvergenceFailure {
            value: out.value,
            est_error: out.est_error,
            subdivisions: out.subdivisions,
        });
    }
    out.subdivisions += segments.len() - live.len();
    Ok(out)
}

/// `int_{-1}^{1} f(x) dx`.
pub fn integral(f: &FunctionHandle, tol: f64) -> Result<PVResult> {
    integral_with_budget(f, tol, max_panels())
}

pub fn integral_with_budget(f: &FunctionHandle, tol: f64, budget: usize) -> Result<PVResult> {
    check_tol(tol)?;
    let bounds = piece_boundaries(f, Abscissa::LEFT);
    if f.tag().inverse_weight {
        let segments: Vec<(f64, f64, f64)> = bounds
            .windows(2)
            .map(|w| (w[1].angle(), w[0].angle(), 0.0))
            .collect();
        run_segments(&segments, budget, tol, |theta: f64, _| {
            f.numerator_at(Abscissa::from_angle(theta))
        })
    } else {
        let segments: Vec<(Abscissa, Abscissa, f64)> =
            bounds.windows(2).map(|w| (w[0], w[1], 0.0)).collect();
        run_segments(&segments, budget, tol, |p: Abscissa, _| f.eval_at(p))
    }
}

/// Slow cross-check: `(1/pi) [int_{-1}^{t-eps} + int_{t+eps}^{1}] f(x)/(x-t) dx`.
pub fn pv_fht_excision(f: &FunctionHandle, t: f64, eps: f64, tol: f64) -> Result<PVResult> {
    check_tol(tol)?;
    let tp = Abscissa::new(t);
    check_interior(tp)?;
    let lo = Abscissa::new(t - eps);
    let hi = Abscissa::new(t + eps);
    let mut cuts = vec![Abscissa::LEFT];
    cuts.extend(
        f.tag()
            .split_points()
            .into_iter()
            .filter(|p| p.diff(lo) < 0.0 || p.diff(hi) > 0.0),
    );
    cuts.push(lo);
    cuts.push(hi);
    cuts.push(Abscissa::RIGHT);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let segments: Vec<(Abscissa, Abscissa, f64)> = cuts
        .windows(2)
        .filter(|w| !(w[0] == lo && w[1] == hi))
        .map(|w| (w[0], w[1], 0.0))
        .collect();
    let r = run_segments(&segments, max_panels(), tol * PI, |p: Abscissa, _| {
        f.eval_at(p) / p.diff(tp)
    })?;
    Ok(PVResult {
        value: r.value / PI,
        est_error: r.est_error / PI,
        subdivisions: r.subdivisions,
    })
}
