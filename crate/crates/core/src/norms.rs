//! Decreasing rearrangements and the Zygmund-space norms.
//!
//! With `L(t) = log(2e/t)` on `(0, 2]`:
//!
//! * `||f||_{L_exp^a}     = sup_t (int_0^t f*) / (t L(t)^a)`
//! * equivalent form      `= sup_t f*(t) / L(t)^a`
//! * `||f||_{L(logL)^a}   = int_0^2 f*(t) L(t)^a dt`
//!
//! Rearrangements are step functions built from sorted samples, and every
//! norm is evaluated exactly on the steps.

use std::io::Read;

use serde::Serialize;

use crate::error::{FhtError, Result};
use crate::function::FunctionHandle;
use crate::point::Abscissa;
use crate::quad;

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 64;

/// Geometric ratio of the refinement cells around singular points.
const REFINE_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Refinement depth: `REFINE_RATIO^REFINE_STEPS = 2^-100`.
const REFINE_STEPS: usize = 200;

/// `log(2e/t)`.
pub fn log_weight(t: f64) -> f64 {
    1.0 + std::f64::consts::LN_2 - t.ln()
}

/// A right-continuous non-increasing step function on `[0, 2)`.
#[derive(Clone, Debug, Serialize)]
pub struct StepRearrangement {
    /// `0 = s_0 < s_1 < ... < s_m = 2`
    breakpoints: Vec<f64>,
    /// `levels[i]` on `[s_i, s_{i+1})`
    levels: Vec<f64>,
}

impl StepRearrangement {
    /// Builds a rearrangement from `(level, measure)` cells in any order.
    /// Measures are rescaled to total exactly 2.
    pub fn from_cells(mut cells: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(v, _)) = cells.iter().find(|(v, _)| !v.is_finite()) {
            return Err(FhtError::RejectedInput { x: v });
        }
        cells.retain(|&(_, m)| m > 0.0);
        if cells.is_empty() {
            return Err(FhtError::InvalidRequest("rearrangement of an empty sample".into()));
        }
        cells.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        let total: f64 = cells.iter().map(|c| c.1).sum();
        let scale = 2.0 / total;
        let mut breakpoints = vec![0.0];
        let mut levels: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (i, &(v, m)) in cells.iter().enumerate() {
            acc += m * scale;
            let s = if i + 1 == cells.len() { 2.0 } else { acc.min(2.0) };
            let v = v.abs();
            match levels.last() {
                Some(&last) if last == v => *breakpoints.last_mut().unwrap() = s,
                _ => {
                    if s > *breakpoints.last().unwrap() {
                        levels.push(v);
                        breakpoints.push(s);
                    }
                }
            }
        }
        *breakpoints.last_mut().unwrap() = 2.0;
        Ok(StepRearrangement { breakpoints, levels })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `f*(s)` for `s` in `[0, 2)`; zero beyond.
    pub fn value(&self, s: f64) -> f64 {
        if s >= 2.0 {
            return 0.0;
        }
        let i = self.breakpoints.partition_point(|&b| b <= s);
        self.levels[i.saturating_sub(1).min(self.levels.len() - 1)]
    }

    /// `|{ f* > lambda }|`, equal to the distribution function of `|f|`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let k = self.levels.partition_point(|&v| v > lambda);
        self.breakpoints[k]
    }

    /// `int_0^t f*`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 2.0);
        let mut acc = 0.0;
        for (i, &v) in self.levels.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            if t <= a {
                break;
            }
            acc += v * (b.min(t) - a);
        }
        acc
    }

    /// The rearrangement of `c f`.
    pub fn scaled(&self, c: f64) -> StepRearrangement {
        StepRearrangement {
            breakpoints: self.breakpoints.clone(),
            levels: self.levels.iter().map(|v| v * c.abs()).collect(),
        }
    }

    fn prefix_integrals(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.levels.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for (i, &v) in self.levels.iter().enumerate() {
            acc += v * (self.breakpoints[i + 1] - self.breakpoints[i]);
            out.push(acc);
        }
        out
    }
}

/// Cell boundaries: a uniform grid plus geometric refinement towards `+-1`
/// and the split points of `f`.
fn cell_boundaries(f: &FunctionHandle, grid: usize) -> Vec<Abscissa> {
    let h = 2.0 / grid as f64;
    let mut attractors = vec![Abscissa::LEFT];
    attractors.extend(f.tag().split_points());
    attractors.push(Abscissa::RIGHT);
    let mut pts: Vec<Abscissa> = (0..=grid)
        .map(|i| {
            if 2 * i <= grid {
                Abscissa::above_minus_one(i as f64 * h)
            } else {
                Abscissa::below_one((grid - i) as f64 * h)
            }
        })
        .collect();
    pts.extend(attractors.iter().copied());
    for (j, &a) in attractors.iter().enumerate() {
        let left_room = if j > 0 { 0.5 * a.diff(attractors[j - 1]) } else { 0.0 };
        let right_room = if j + 1 < attractors.len() {
            0.5 * attractors[j + 1].diff(a)
        } else {
            0.0
        };
        for (room, sign) in [(left_room, -1.0), (right_room, 1.0)] {
            let mut d = h.min(room);
            for _ in 0..REFINE_STEPS {
                if d <= 0.0 {
                    break;
                }
                let p = a.shifted(sign * d);
                if p.diff(a) == 0.0 {
                    break;
                }
                pts.push(p);
                d *= REFINE_RATIO;
            }
        }
    }
    pts.sort_by(|a, b| a.diff(*b).total_cmp(&0.0));
    pts.dedup_by(|a, b| a.diff(*b) <= 0.0);
    pts
}

/// Sorted-sample approximation of `f*` on a grid of `grid` uniform cells,
/// refined geometrically near `+-1` and the split points of `f`.
pub fn rearrange(f: &FunctionHandle, grid: usize) -> Result<StepRearrangement> {
    if grid < MIN_GRID {
        return Err(FhtError::InvalidRequest(format!("grid must be at least {MIN_GRID}")));
    }
    let bounds = cell_boundaries(f, grid);
    let attractors: Vec<Abscissa> = {
        let mut v = vec![Abscissa::LEFT, Abscissa::RIGHT];
        v.extend(f.tag().split_points());
        v
    };
    let h = 2.0 / grid as f64;
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(bounds.len());
    let mut pending = 0.0;
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = b.diff(a);
        if m <= 0.0 {
            continue;
        }
        let v = f.eval_at(Abscissa::lerp(a, b, 0.5));
        if v.is_finite() {
            cells.push((v, m + pending));
            pending = 0.0;
            continue;
        }
        // Refinement cells next to a singular point may fall below the
        // resolution of a plain evaluator; their measure joins a neighbour.
        let near_attractor = attractors
            .iter()
            .any(|&s| a.diff(s).abs() < h || b.diff(s).abs() < h);
        if !near_attractor || m >= h {
            return Err(FhtError::RejectedInput {
                x: Abscissa::lerp(a, b, 0.5).value(),
            });
        }
        pending += m;
    }
    if pending > 0.0 {
        match cells.last_mut() {
            Some(last) => last.1 += pending,
            None => return Err(FhtError::RejectedInput { x: 0.0 }),
        }
    }
    StepRearrangement::from_cells(cells)
}

/// Rearrangement of tabulated values, each sample owning the cell between
/// the midpoints to its neighbours.
pub fn rearrange_samples(xs: &[f64], ys: &[f64]) -> Result<StepRearrangement> {
    validate_samples(xs, ys)?;
    let n = xs.len();
    let cells = (0..n)
        .map(|i| {
            let lo = if i == 0 { -1.0 } else { 0.5 * (xs[i - 1] + xs[i]) };
            let hi = if i + 1 == n { 1.0 } else { 0.5 * (xs[i] + xs[i + 1]) };
            (ys[i], hi - lo)
        })
        .collect();
    StepRearrangement::from_cells(cells)
}

fn validate_samples(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(FhtError::Csv("need at least one sample and matching columns".into()));
    }
    for (i, &x) in xs.iter().enumerate() {
        if !(x > -1.0 && x < 1.0) {
            return Err(FhtError::Csv(format!("row {}: x = {x} outside (-1, 1)", i + 2)));
        }
        if i > 0 && x <= xs[i - 1] {
            return Err(FhtError::Csv(format!("row {}: x not strictly increasing", i + 2)));
        }
        if !ys[i].is_finite() {
            return Err(FhtError::RejectedInput { x });
        }
    }
    Ok(())
}

/// Reads `x,value` samples with a header row.
pub fn read_samples<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(FhtError::Csv(format!("expected header `x,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| FhtError::Csv(format!("row {}: column {} is not a number", i + 2, k + 1)))
        };
        xs.push(parse(0)?);
        ys.push(parse(1)?);
    }
    validate_samples(&xs, &ys)?;
    Ok((xs, ys))
}

/// `sup_t (int_0^t f*) / (t L(t)^alpha)`.
///
/// The ratio is quasi-convex in `log t` on each step, so the supremum sits at
/// a breakpoint.
pub fn norm_lexp(r: &StepRearrangement, alpha: f64) -> f64 {
    let prefix = r.prefix_integrals();
    let mut best = 0.0f64;
    for (i, &s) in r.breakpoints.iter().enumerate().skip(1) {
        let v = prefix[i] / (s * log_weight(s).powf(alpha));
        best = best.max(v);
    }
    best
}

/// `sup_t f*(t) / L(t)^alpha`, attained at the right end of a step.
pub fn norm_lexp_equiv(r: &StepRearrangement, alpha: f64) -> f64 {
    r.levels
        .iter()
        .zip(&r.breakpoints[1..])
        .map(|(&v, &s)| v / log_weight(s).powf(alpha))
        .fold(0.0, f64::max)
}

/// `int_a^b L(t)^alpha dt`, via the substitution `u = L(t)`:
/// `int_a^b L^alpha dt = 2e int_{L(b)}^{L(a)} u^alpha e^{-u} du`.
fn weight_integral(a: f64, b: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return b - a;
    }
    if alpha == 1.0 {
        // t (L(t) + 1) is an antiderivative of L.
        let g = |t: f64| if t == 0.0 { 0.0 } else { t * (log_weight(t) + 1.0) };
        return g(b) - g(a);
    }
    let ub = log_weight(b);
    let ua = if a == 0.0 { ub + 800.0 } else { log_weight(a) };
    let integrand = |u: f64| u.powf(alpha) * (-u).exp();
    let scale = 2.0 * std::f64::consts::E;
    match quad::adaptive(&integrand, &[(ub, ua)], 1e-15 * (b - a).max(1e-300), 4096) {
        Ok(r) => scale * r.value,
        Err(FhtError::ConvergenceFailure { value, .. }) => scale * value,
        Err(_) => f64::NAN,
    }
}

/// `int_0^2 f*(t) L(t)^alpha dt`.
pub fn norm_llogl(r: &StepRearrangement, alpha: f64) -> f64 {
    r.levels
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 0.0 {
                0.0
            } else {
                v * weight_integral(r.breakpoints[i], r.breakpoints[i + 1], alpha)
            }
        })
        .sum()
}

/// `(int_0^t f*) / (t L(t))`, whose limit at `0` vanishes exactly on the
/// closure of the bounded functions in `L_exp`.
pub fn b_part_ratio(r: &StepRearrangement, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 2.0) {
        return Err(FhtError::Domain {
            t,
            reason: "the ratio is defined for 0 < t < 2",
        });
    }
    Ok(r.integral_to(t) / (t * log_weight(t)))
}

#[derive(Clone, Debug, Serialize)]
pub struct BPartTrend {
    /// `(k, 2^-k, ratio)`
    pub samples: Vec<(u32, f64, f64)>,
    /// Least-squares slope of the ratio per dyadic step over the second half
    /// of the samples, relative to their mean.
    pub relative_slope: f64,
    /// `decreasing`, `stabilizing` or `increasing`.
    pub label: String,
    pub policy: String,
}

pub const TREND_THRESHOLD: f64 = 0.005;

/// The ratio on `t = 2^-k`, `k = 1..=depth`, with its trend.
pub fn b_part_trend(r: &StepRearrangement, depth: u32) -> BPartTrend {
    let samples: Vec<(u32, f64, f64)> = (1..=depth.max(2))
        .map(|k| {
            let t = (-(k as f64)).exp2();
            (k, t, r.integral_to(t) / (t * log_weight(t)))
        })
        .collect();
    let tail = &samples[samples.len() / 2..];
    let n = tail.len() as f64;
    let mk = tail.iter().map(|s| s.0 as f64).sum::<f64>() / n;
    let mr = tail.iter().map(|s| s.2).sum::<f64>() / n;
    let cov: f64 = tail.iter().map(|s| (s.0 as f64 - mk) * (s.2 - mr)).sum();
    let var: f64 = tail.iter().map(|s| (s.0 as f64 - mk).powi(2)).sum();
    let relative_slope = if mr > 0.0 { cov / var / mr } else { 0.0 };
    let label = if relative_slope < -TREND_THRESHOLD {
        "decreasing"
    } else if relative_slope > TREND_THRESHOLD {
        "increasing"
    } else {
        "stabilizing"
    };
    BPartTrend {
        samples,
        relative_slope,
        label: label.into(),
        policy: format!(
            "relative slope per halving over the finest half of the samples; |slope| <= {TREND_THRESHOLD} is stabilizing"
        ),
    }
}

/// `Phi(s) = e^s - s - 1`.
pub fn young(s: f64) -> f64 {
    s.exp_m1() - s
}

/// `int Phi(lambda |f|)`. Divergence and overflow are reported as `+inf`.
pub fn young_integral(f: &FunctionHandle, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(FhtError::InvalidRequest("lambda must be positive".into()));
    }
    let g = f.clone();
    let h = FunctionHandle::precise(format!("Phi({lambda}|{}|)", f.name()), move |p| {
        young(lambda * g.eval_at(p).abs())
    })
    .with_breakpoints(f.tag().breakpoints.clone())
    .with_singular_points(f.tag().singular_points.clone());
    match quad::integral(&h, 1e-10) {
        Ok(r) if r.value.is_finite() => Ok(r.value),
        Ok(_) | Err(FhtError::ConvergenceFailure { .. }) | Err(FhtError::RejectedInput { .. }) => {
            Ok(f64::INFINITY)
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub alpha: f64,
    pub lexp_primary: f64,
    pub lexp_equiv: f64,
    pub llogl: f64,
    /// `b_part_ratio` at `t = 2^-20`.
    pub b_part_indicator: f64,
    pub grid_size: usize,
}

pub const B_PART_PROBE: f64 = 1.0 / 1048576.0;

impl NormReport {
    pub fn new(r: &StepRearrangement, alpha: f64, grid_size: usize) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(FhtError::InvalidRequest("alpha must be nonnegative".into()));
        }
        Ok(NormReport {
            alpha,
            lexp_primary: norm_lexp(r, alpha),
            lexp_equiv: norm_lexp_equiv(r, alpha),
            llogl: norm_llogl(r, alpha),
            b_part_indicator: b_part_ratio(r, B_PART_PROBE)?,
            grid_size,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn chi_rearrangement() {
        let r = rearrange(&FunctionHandle::chi(), 64).unwrap();
        assert_eq!(r.levels(), &[1.0]);
        assert_eq!(r.breakpoints(), &[0.0, 2.0]);
        assert!(close(norm_lexp(&r, 1.0), 1.0, 1e-15));
        assert!(close(norm_lexp_equiv(&r, 1.0), 1.0, 1e-15));
        assert_eq!(norm_lexp(&r, 0.0), 1.0);
        assert!(close(norm_llogl(&r, 0.0), 2.0, 1e-15));
        assert!(close(norm_llogl(&r, 1.0), 4.0, 1e-14));
    }

    #[test]
    fn half_indicator() {
        let f = FunctionHandle::indicator(&[(0.0.into(), Abscissa::RIGHT)]);
        let r = rearrange(&f, 64).unwrap();
        assert_eq!(r.levels(), &[1.0, 0.0]);
        assert!(close(r.breakpoints()[1], 1.0, 1e-15));
        assert_eq!(r.value(0.5), 1.0);
        assert_eq!(r.value(1.5), 0.0);
    }

    #[test]
    fn abs_x_profile() {
        let r = rearrange(&FunctionHandle::new("|x|", f64::abs), 4096).unwrap();
        for &s in &[0.1, 0.7, 1.3, 1.9] {
            assert!(close(r.value(s), 1.0 - s / 2.0, 1e-3), "{s}");
        }
        assert!(close(r.distribution(0.5), 1.0, 1e-3));
    }

    #[test]
    fn general_alpha_weight_matches_closed_forms() {
        for &(a, b) in &[(0.0, 2.0), (0.01, 0.5), (1e-9, 1e-3)] {
            let closed = weight_integral(a, b, 1.0);
            let g = |t: f64| if t == 0.0 { 0.0 } else { t * (log_weight(t) + 1.0) };
            assert!(close(closed, g(b) - g(a), 1e-15));
            // alpha = 2: antiderivative t (L^2 + 2L + 2)
            let h = |t: f64| if t == 0.0 { 0.0 } else { t * (log_weight(t).powi(2) + 2.0 * log_weight(t) + 2.0) };
            let q = weight_integral(a, b, 2.0 + 1e-300);
            assert!(close(q, h(b) - h(a), 1e-12 * h(b)), "{q} vs {}", h(b) - h(a));
        }
    }

    #[test]
    fn b_part_of_chi_vanishes() {
        let r = rearrange(&FunctionHandle::chi(), 64).unwrap();
        let t = 1e-6;
        assert!(close(b_part_ratio(&r, t).unwrap(), 1.0 / log_weight(t), 1e-15));
        assert_eq!(b_part_trend(&r, 30).label, "decreasing");
        assert!(b_part_ratio(&r, 2.0).is_err());
    }

    #[test]
    fn young_values() {
        assert_eq!(young_integral(&FunctionHandle::constant(0.0), 3.0).unwrap(), 0.0);
        let v = young_integral(&FunctionHandle::chi(), 1.0).unwrap();
        assert!(close(v, 2.0 * (std::f64::consts::E - 2.0), 1e-10));
        let f = FunctionHandle::new("|log x| chi[0,1)", |x| if x > 0.0 { x.ln().abs() } else { 0.0 })
            .with_singular_points([0.0]);
        assert_eq!(young_integral(&f, 2.0).unwrap(), f64::INFINITY);
        assert!(young_integral(&f, 0.5).unwrap().is_finite());
    }

    #[test]
    fn log_profile_is_resolved_near_zero() {
        let f = FunctionHandle::precise("log((1-x)/(1+x))", |p| (p.one_minus() / p.one_plus()).ln());
        let r = rearrange(&f, 4096).unwrap();
        // f*(s) = log((4 - s)/s)
        for &s in &[1e-20f64, 1e-9, 1e-3, 0.5] {
            let want = ((4.0 - s) / s).ln();
            assert!(close(r.value(s), want, 0.4), "{s}: {} vs {want}", r.value(s));
        }
        let ratio = b_part_ratio(&r, B_PART_PROBE).unwrap();
        assert!(close(ratio, 1.0446, 0.01), "{ratio}");
    }

    #[test]
    fn csv_samples() {
        let data = "x,value\n-0.5,1\n0,3\n0.5,-2\n";
        let (xs, ys) = read_samples(data.as_bytes()).unwrap();
        let r = rearrange_samples(&xs, &ys).unwrap();
        assert_eq!(r.levels(), &[3.0, 2.0, 1.0]);
        assert_eq!(r.breakpoints(), &[0.0, 0.5, 1.25, 2.0]);
        assert!(read_samples("a,b\n0,1\n".as_bytes()).is_err());
        assert!(read_samples("x,value\n0.5,1\n0.1,1\n".as_bytes()).is_err());
        assert!(read_samples("x,value\n1.5,1\n".as_bytes()).is_err());
    }
}
