//! The operator suite built on the two engines.
//!
//! * `T(f)`: finite Hilbert transform.
//! * `Tcheck(f) = -w T(f / w)`: left inverse of `T` on bounded functions.
//! * `That(f) = -(1/w) T(w f)`: its dual companion, `int That(g) f = -int g Tcheck(f)`.
//! * `Q(f) = ((1/pi) int f / w) chi`: the rank-one defect of `T Tcheck`.
//! * `phi(g) = int g / w`: the functional whose kernel holds the range of `T`.
//!
//! Spectral fast paths use the weighted Chebyshev identities
//! `T(T_n / w) = U_{n-1}` (n >= 1), `T(1/w) = 0` and `T(w U_n) = -T_{n+1}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cheb::{self, ChebSeries, DEFAULT_ORDER};
use crate::error::{FhtError, Result};
use crate::function::FunctionHandle;
use crate::point::Abscissa;
use crate::quad;

/// Relative size of the trailing Chebyshev coefficients below which a fit is
/// trusted by the `auto` method.
pub const RESOLVED_TAIL: f64 = 1e-12;

/// Panel budget of a single evaluation inside a composed operator.
pub const LAZY_PANELS: usize = 1 << 12;

/// Minimum distance to the endpoints for `That`, which divides by `w`.
pub const T_HAT_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Operator {
    #[serde(rename = "T")]
    T,
    #[serde(rename = "T_check")]
    TCheck,
    #[serde(rename = "T_hat")]
    THat,
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "Q_exp")]
    QExp,
    #[serde(rename = "phi")]
    Phi,
}

impl FromStr for Operator {
    type Err = FhtError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "T" => Operator::T,
            "T_check" | "Tcheck" => Operator::TCheck,
            "T_hat" | "That" => Operator::THat,
            "Q" => Operator::Q,
            "Q_exp" => Operator::QExp,
            "phi" => Operator::Phi,
            other => return Err(FhtError::InvalidRequest(format!("unknown operator {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Quadrature,
    #[default]
    Auto,
}

impl FromStr for Method {
    type Err = FhtError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "quadrature" => Ok(Method::Quadrature),
            "auto" => Ok(Method::Auto),
            other => Err(FhtError::InvalidRequest(format!("unknown method {other:?}"))),
        }
    }
}

/// The engine a request actually ran on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Spectral,
    Quadrature,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Spectral => "spectral",
            Engine::Quadrature => "quadrature",
        })
    }
}

#[derive(Clone, Debug)]
pub enum OperatorInput {
    Function(FunctionHandle),
    Series(ChebSeries),
}

impl From<FunctionHandle> for OperatorInput {
    fn from(f: FunctionHandle) -> Self {
        OperatorInput::Function(f)
    }
}

impl From<ChebSeries> for OperatorInput {
    fn from(s: ChebSeries) -> Self {
        OperatorInput::Series(s)
    }
}

#[derive(Clone, Debug)]
pub struct OperatorRequest {
    pub operator: Operator,
    pub input: OperatorInput,
    pub points: Vec<f64>,
    pub method: Method,
    pub tol: f64,
    pub order: usize,
}

impl OperatorRequest {
    pub fn new(operator: Operator, input: impl Into<OperatorInput>) -> Self {
        OperatorRequest {
            operator,
            input: input.into(),
            points: Vec::new(),
            method: Method::Auto,
            tol: 1e-10,
            order: DEFAULT_ORDER,
        }
    }

    pub fn points(mut self, points: impl Into<Vec<f64>>) -> Self {
        self.points = points.into();
        self
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(FhtError::InvalidRequest("tolerance must be positive".into()));
        }
        let margin = if self.operator == Operator::THat {
            T_HAT_MARGIN
        } else {
            0.0
        };
        for (i, &t) in self.points.iter().enumerate() {
            if !(t.abs() < 1.0 - margin) {
                return Err(FhtError::Domain {
                    t,
                    reason: if margin > 0.0 {
                        "T_hat divides by w; points must stay 1e-6 away from the endpoints"
                    } else {
                        "points must lie in the open interval (-1, 1)"
                    },
                });
            }
            if self.points[..i].contains(&t) {
                return Err(FhtError::InvalidRequest(format!("duplicate point {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorResult {
    pub values: Vec<(f64, f64)>,
    pub method_used: Engine,
    pub est_error: f64,
    pub diagnostics: BTreeMap<String, String>,
}

/// Engine settings shared by all operators.
#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    pub method: Method,
    pub tol: f64,
    pub order: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            method: Method::Auto,
            tol: 1e-10,
            order: DEFAULT_ORDER,
        }
    }
}

impl EngineConfig {
    pub fn quadrature(tol: f64) -> Self {
        EngineConfig {
            method: Method::Quadrature,
            tol,
            ..Self::default()
        }
    }

    pub fn spectral() -> Self {
        EngineConfig {
            method: Method::Spectral,
            ..Self::default()
        }
    }

    pub fn auto(tol: f64) -> Self {
        EngineConfig {
            tol,
            ..Self::default()
        }
    }
}

/// The input resolved to the engine that will evaluate it.
#[derive(Clone, Debug)]
enum Resolved {
    Spectral(ChebSeries),
    Quadrature(FunctionHandle),
}

fn resolve(
    input: &OperatorInput,
    cfg: &EngineConfig,
    diagnostics: &mut BTreeMap<String, String>,
) -> Result<Resolved> {
    let f = match input {
        OperatorInput::Series(s) => {
            diagnostics.insert("input".into(), format!("series of degree {}", s.degree()));
            return Ok(if cfg.method == Method::Quadrature {
                Resolved::Quadrature(s.to_handle("series"))
            } else {
                Resolved::Spectral(s.clone())
            });
        }
        OperatorInput::Function(f) => f,
    };
    diagnostics.insert("input".into(), f.name().to_string());
    diagnostics.insert("tag".into(), format!("{:?}", f.tag().kind()).to_lowercase());
    match cfg.method {
        Method::Quadrature => Ok(Resolved::Quadrature(f.clone())),
        Method::Spectral => {
            if !f.tag().is_smooth() {
                return Err(FhtError::InvalidRequest(format!(
                    "spectral method needs a smooth input, {} is tagged {:?}",
                    f.name(),
                    f.tag().kind()
                )));
            }
            let s = cheb::fit(f, cfg.order)?;
            diagnostics.insert("fit_order".into(), cfg.order.to_string());
            diagnostics.insert("fit_tail".into(), format!("{:.3e}", s.tail()));
            if !s.is_resolved(RESOLVED_TAIL) {
                diagnostics.insert("warning".into(), "fit not resolved at this order".into());
            }
            Ok(Resolved::Spectral(s))
        }
        Method::Auto => {
            if !f.tag().is_smooth() {
                diagnostics.insert("reason".into(), "input is not tagged smooth".into());
                return Ok(Resolved::Quadrature(f.clone()));
            }
            match cheb::fit(f, cfg.order) {
                Ok(s) if s.is_resolved(RESOLVED_TAIL) => {
                    diagnostics.insert("fit_order".into(), cfg.order.to_string());
                    diagnostics.insert("fit_tail".into(), format!("{:.3e}", s.tail()));
                    Ok(Resolved::Spectral(s))
                }
                Ok(s) => {
                    diagnostics.insert(
                        "reason".into(),
                        format!("Chebyshev tail {:.3e} not resolved", s.tail()),
                    );
                    Ok(Resolved::Quadrature(f.clone()))
                }
                Err(e) => {
                    diagnostics.insert("reason".into(), format!("fit failed: {e}"));
                    Ok(Resolved::Quadrature(f.clone()))
                }
            }
        }
    }
}

impl Resolved {
    fn engine(&self) -> Engine {
        match self {
            Resolved::Spectral(_) => Engine::Spectral,
            Resolved::Quadrature(_) => Engine::Quadrature,
        }
    }
}

/// Pointwise evaluator of one operator on a resolved input.
#[derive(Clone, Debug)]
enum PointOp {
    T(Resolved),
    TCheck(Resolved),
    /// spectral data: second-kind coefficients of f
    THatSpectral(Vec<f64>),
    THatQuadrature(FunctionHandle),
}

impl PointOp {
    fn build(op: Operator, r: Resolved, tol: f64) -> PointOp {
        let _ = tol;
        match op {
            Operator::T => PointOp::T(r),
            Operator::TCheck => PointOp::TCheck(match r {
                Resolved::Quadrature(f) => Resolved::Quadrature(f.divided_by_weight()),
                s => s,
            }),
            Operator::THat => match r {
                Resolved::Spectral(s) => PointOp::THatSpectral(s.to_second_kind()),
                Resolved::Quadrature(f) => PointOp::THatQuadrature(f.times_weight()),
            },
            _ => unreachable!("scalar operators have no pointwise form"),
        }
    }

    /// Value and error estimate at `t`.
    fn eval(&self, t: Abscissa, tol: f64, lenient: bool) -> Result<(f64, f64)> {
        let pv = |f: &FunctionHandle, tol: f64| pv_value(f, t, tol, lenient);
        match self {
            PointOp::T(Resolved::Spectral(s)) => Ok((cheb::fht_series(s, t)?, 0.0)),
            PointOp::T(Resolved::Quadrature(f)) => {
                let r = pv(f, tol)?;
                Ok((r.value, r.est_error))
            }
            PointOp::TCheck(Resolved::Spectral(s)) => {
                let b = s.coeffs();
                let u = if b.len() > 1 {
                    cheb::clenshaw_u(&b[1..], t.value())
                } else {
                    0.0
                };
                Ok((-t.weight() * u, 0.0))
            }
            PointOp::TCheck(Resolved::Quadrature(f_over_w)) => {
                let w = t.weight();
                let r = pv(f_over_w, tol / w.max(1e-300))?;
                Ok((-w * r.value, w * r.est_error))
            }
            PointOp::THatSpectral(c) => Ok((t_hat_numerator(c, t) / t.weight(), 0.0)),
            PointOp::THatQuadrature(wf) => {
                let w = t.weight();
                let r = pv(wf, (tol * w).max(quad::MIN_TOL))?;
                Ok((-r.value / w, r.est_error / w))
            }
        }
    }

    /// `w(t)` times the value, without dividing by `w` on the spectral path.
    fn eval_times_weight(&self, t: Abscissa, tol: f64) -> Result<f64> {
        match self {
            PointOp::THatSpectral(c) => Ok(t_hat_numerator(c, t)),
            PointOp::THatQuadrature(wf) => Ok(-pv_value(wf, t, tol, true)?.value),
            other => Ok(other.eval(t, tol, true)?.0 * t.weight()),
        }
    }
}

/// `pv_fht`, optionally accepting the best value of an unconverged run.
fn pv_value(f: &FunctionHandle, t: Abscissa, tol: f64, lenient: bool) -> Result<quad::PVResult> {
    let budget = if lenient {
        quad::max_panels().min(LAZY_PANELS)
    } else {
        quad::max_panels()
    };
    match quad::pv_fht_with_budget(f, t, tol.max(quad::MIN_TOL), budget) {
        Err(FhtError::ConvergenceFailure {
            value,
            est_error,
            subdivisions,
        }) if lenient => Ok(quad::PVResult {
            value,
            est_error,
            subdivisions,
        }),
        other => other,
    }
}

/// `sum_n c_n T_{n+1}(t)`, i.e. `-T(w f)(t)` for `f = sum c_n U_n`.
fn t_hat_numerator(c: &[f64], t: Abscissa) -> f64 {
    let mut shifted = Vec::with_capacity(c.len() + 1);
    shifted.push(0.0);
    shifted.extend_from_slice(c);
    cheb::clenshaw_t(&shifted, t.value())
}

fn apply_pointwise(req: &OperatorRequest) -> Result<OperatorResult> {
    req.validate()?;
    let mut diagnostics = BTreeMap::new();
    let cfg = EngineConfig {
        method: req.method,
        tol: req.tol,
        order: req.order,
    };
    let resolved = resolve(&req.input, &cfg, &mut diagnostics)?;
    let engine = resolved.engine();
    let op = PointOp::build(req.operator, resolved, req.tol);
    let evaluated: Vec<(f64, f64)> = req
        .points
        .par_iter()
        .map(|&t| op.eval(Abscissa::new(t), req.tol, false).map_err(|e| e.at(t)))
        .collect::<Result<_>>()?;
    let est_error = evaluated.iter().fold(0.0f64, |m, &(_, e)| m.max(e));
    Ok(OperatorResult {
        values: req.points.iter().zip(evaluated).map(|(&t, (v, _))| (t, v)).collect(),
        method_used: engine,
        est_error,
        diagnostics,
    })
}

pub fn apply_t(req: &OperatorRequest) -> Result<OperatorResult> {
    apply_pointwise(&OperatorRequest {
        operator: Operator::T,
        ..req.clone()
    })
}

pub fn apply_t_check(req: &OperatorRequest) -> Result<OperatorResult> {
    apply_pointwise(&OperatorRequest {
        operator: Operator::TCheck,
        ..req.clone()
    })
}

pub fn apply_t_hat(req: &OperatorRequest) -> Result<OperatorResult> {
    apply_pointwise(&OperatorRequest {
        operator: Operator::THat,
        ..req.clone()
    })
}

/// Dispatches on `req.operator`. Scalar operators report their constant at
/// every requested point.
pub fn apply(req: &OperatorRequest) -> Result<OperatorResult> {
    match req.operator {
        Operator::T | Operator::TCheck | Operator::THat => apply_pointwise(req),
        Operator::Q | Operator::QExp | Operator::Phi => {
            req.validate()?;
            let mut diagnostics = BTreeMap::new();
            let cfg = EngineConfig {
                method: req.method,
                tol: req.tol,
                order: req.order,
            };
            let resolved = resolve(&req.input, &cfg, &mut diagnostics)?;
            let engine = resolved.engine();
            let (integral, err) = match &resolved {
                // int (sum a_n T_n)/w = pi a_0
                Resolved::Spectral(s) => (PI * s.coeffs()[0], 0.0),
                Resolved::Quadrature(f) => {
                    let r = quad::integral(&f.divided_by_weight(), req.tol)?;
                    (r.value, r.est_error)
                }
            };
            let (value, est_error) = if req.operator == Operator::Phi {
                diagnostics.insert(
                    "in_kernel".into(),
                    (integral.abs() <= req.tol.max(err)).to_string(),
                );
                (integral, err)
            } else {
                (integral / PI, err / PI)
            };
            Ok(OperatorResult {
                values: req.points.iter().map(|&t| (t, value)).collect(),
                method_used: engine,
                est_error,
                diagnostics,
            })
        }
    }
}

/// `Q(f) = (1/pi) int f / w`, the coefficient of `chi` in the projection.
pub fn apply_q(f: &FunctionHandle, tol: f64) -> Result<f64> {
    Ok(quad::integral(&f.divided_by_weight(), tol)?.value / PI)
}

/// `Q_exp` acts on `L_exp` by the same formula.
pub fn apply_q_exp(g: &FunctionHandle, tol: f64) -> Result<f64> {
    apply_q(g, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    pub value: f64,
    pub est_error: f64,
    /// `|phi| <= tol`.
    pub in_kernel: bool,
}

/// `phi(g) = int g / w`.
pub fn phi_1_over_w(g: &FunctionHandle, tol: f64) -> Result<PhiValue> {
    let r = quad::integral(&g.divided_by_weight(), tol)?;
    Ok(PhiValue {
        value: r.value,
        est_error: r.est_error,
        in_kernel: r.value.abs() <= tol,
    })
}

/// Lazily evaluated operator images, used to compose operators. Inner
/// evaluations run two digits tighter than the requested tolerance so that
/// an outer quadrature does not chase their noise.
fn lazy(op: PointOp, tol: f64) -> impl Fn(Abscissa) -> f64 + Send + Sync + 'static {
    let inner = (tol * 1e-2).max(quad::MIN_TOL);
    move |p: Abscissa| op.eval(p, inner, true).map_or(f64::NAN, |(v, _)| v)
}

fn resolve_handle(f: &FunctionHandle, cfg: &EngineConfig) -> Result<(Resolved, Engine)> {
    let mut d = BTreeMap::new();
    let r = resolve(&OperatorInput::Function(f.clone()), cfg, &mut d)?;
    let e = r.engine();
    Ok((r, e))
}

/// Jumps and singular points of `f` become singular points of its images;
/// kinks stay kinks.
fn image_tag(h: FunctionHandle, f: &FunctionHandle) -> FunctionHandle {
    let tag = f.tag();
    h.with_singular_points(tag.breakpoints.iter().chain(&tag.singular_points).copied())
        .with_kinks(tag.kinks.iter().copied())
}

/// `T(f)` as a function handle.
pub fn t_image(f: &FunctionHandle, cfg: &EngineConfig) -> Result<FunctionHandle> {
    let (r, engine) = resolve_handle(f, cfg)?;
    let op = PointOp::build(Operator::T, r, cfg.tol);
    let h = FunctionHandle::precise(format!("T[{}]<{engine}>", f.name()), lazy(op, cfg.tol));
    Ok(image_tag(h, f).with_endpoint_singular(true))
}

/// `Tcheck(f) = -w T(f/w)` as a function handle.
pub fn t_check_image(f: &FunctionHandle, cfg: &EngineConfig) -> Result<FunctionHandle> {
    let (r, engine) = resolve_handle(f, cfg)?;
    let op = PointOp::build(Operator::TCheck, r, cfg.tol);
    let h = FunctionHandle::precise(format!("Tcheck[{}]<{engine}>", f.name()), lazy(op, cfg.tol));
    Ok(image_tag(h, f).with_endpoint_singular(f.tag().endpoint_singular))
}

/// `That(f) = -(1/w) T(w f)` as a handle of the form `numerator / w`.
pub fn t_hat_image(f: &FunctionHandle, cfg: &EngineConfig) -> Result<FunctionHandle> {
    let (r, engine) = resolve_handle(f, cfg)?;
    let op = PointOp::build(Operator::THat, r, cfg.tol);
    let tol = cfg.tol;
    let numerator = move |p: Abscissa| op.eval_times_weight(p, tol).unwrap_or(f64::NAN);
    let h = FunctionHandle::over_weight(format!("That[{}]<{engine}>", f.name()), numerator);
    Ok(image_tag(h, f))
}

/// `T(chi_A)(t) = (1/pi) sum log|(b - t)/(a - t)|` for a union of disjoint
/// intervals. Closed form, used as an oracle and for fast sampling.
pub fn indicator_transform(intervals: &[(Abscissa, Abscissa)], t: Abscissa) -> f64 {
    intervals
        .iter()
        .map(|&(a, b)| (b.diff(t) / a.diff(t)).abs().ln())
        .sum::<f64>()
        / PI
}

/// `T(chi_A)` for a union of disjoint intervals, in closed form.
pub fn indicator_image(intervals: &[(Abscissa, Abscissa)]) -> FunctionHandle {
    let iv: Vec<(Abscissa, Abscissa)> = intervals.to_vec();
    let ends: Vec<Abscissa> = iv.iter().flat_map(|&(a, b)| [a, b]).collect();
    let touches_end = ends.iter().any(|p| !p.is_interior());
    FunctionHandle::precise("T[chi_A]", move |t| indicator_transform(&iv, t))
        .with_singular_points(ends)
        .with_endpoint_singular(touches_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn t_of_chi_both_engines() {
        let pts = vec![-0.5, 0.0, 0.5];
        for m in [Method::Spectral, Method::Quadrature, Method::Auto] {
            let r = apply_t(&OperatorRequest::new(Operator::T, FunctionHandle::chi()).points(pts.clone()).method(m))
                .unwrap();
            let want = [0.34970, 0.0, -0.34970];
            for ((_, v), w) in r.values.iter().zip(want) {
                assert!(close(*v, w, 1e-5), "{m:?}: {v} vs {w}");
            }
        }
    }

    #[test]
    fn auto_picks_quadrature_for_jumps() {
        let f = FunctionHandle::indicator(&[(0.0.into(), Abscissa::RIGHT)]);
        let r = apply_t(&OperatorRequest::new(Operator::T, f).points(vec![0.3])).unwrap();
        assert_eq!(r.method_used, Engine::Quadrature);
        let r = apply_t(&OperatorRequest::new(Operator::T, FunctionHandle::identity()).points(vec![0.3])).unwrap();
        assert_eq!(r.method_used, Engine::Spectral);
        // w has a square-root tail in its Chebyshev coefficients
        let r = apply_t(&OperatorRequest::new(Operator::T, FunctionHandle::weight()).points(vec![0.25])).unwrap();
        assert_eq!(r.method_used, Engine::Quadrature);
        assert!(close(r.values[0].1, -0.25, 1e-9));
    }

    #[test]
    fn spectral_rejects_non_smooth() {
        let f = FunctionHandle::indicator(&[(0.0.into(), Abscissa::RIGHT)]);
        let req = OperatorRequest::new(Operator::T, f).points(vec![0.3]).method(Method::Spectral);
        assert!(matches!(apply_t(&req), Err(FhtError::InvalidRequest(_))));
    }

    #[test]
    fn kernel_of_inverse_weight() {
        let r = apply_t(&OperatorRequest::new(Operator::T, FunctionHandle::inverse_weight()).points(vec![-0.7, 0.1, 0.95]))
            .unwrap();
        assert!(r.values.iter().all(|&(_, v)| v.abs() < 1e-10));
    }

    #[test]
    fn t_check_examples() {
        let r = apply_t_check(&OperatorRequest::new(Operator::TCheck, FunctionHandle::chi()).points(vec![-0.4, 0.2]))
            .unwrap();
        assert!(r.values.iter().all(|&(_, v)| v.abs() < 1e-12));

        let half = FunctionHandle::indicator(&[(0.0.into(), Abscissa::RIGHT)]);
        let r = apply_t_check(&OperatorRequest::new(Operator::TCheck, half).points(vec![-0.6])).unwrap();
        // r = sqrt((1-t)/(1+t)) = 2 at t = -3/5
        let want = -(3.0f64).ln() / PI;
        assert!(close(r.values[0].1, want, 1e-9), "{}", r.values[0].1);

        for m in [Method::Spectral, Method::Quadrature] {
            let r = apply_t_check(&OperatorRequest::new(Operator::TCheck, FunctionHandle::identity()).points(vec![0.6]).method(m))
                .unwrap();
            assert!(close(r.values[0].1, -0.8, 1e-10), "{m:?}");
        }
    }

    #[test]
    fn t_hat_examples() {
        for m in [Method::Spectral, Method::Quadrature] {
            let r = apply_t_hat(&OperatorRequest::new(Operator::THat, FunctionHandle::constant(1.0)).points(vec![0.5, 0.0]).method(m))
                .unwrap();
            assert!(close(r.values[0].1, 0.5 / 0.75f64.sqrt(), 1e-9), "{m:?}");
            assert!(close(r.values[1].1, 0.0, 1e-10));
        }
        let req = OperatorRequest::new(Operator::THat, FunctionHandle::constant(1.0)).points(vec![1.0 - 1e-7]);
        assert!(matches!(apply_t_hat(&req), Err(FhtError::Domain { .. })));
    }

    #[test]
    fn q_and_phi() {
        assert!(close(apply_q(&FunctionHandle::chi(), 1e-12).unwrap(), 1.0, 1e-10));
        assert!(close(apply_q(&FunctionHandle::identity(), 1e-12).unwrap(), 0.0, 1e-12));
        let half = FunctionHandle::indicator(&[(0.0.into(), Abscissa::RIGHT)]);
        assert!(close(apply_q(&half, 1e-12).unwrap(), 0.5, 1e-10));
        assert!(close(apply_q_exp(&half, 1e-12).unwrap(), 0.5, 1e-10));

        let p = phi_1_over_w(&FunctionHandle::chi(), 1e-10).unwrap();
        assert!(close(p.value, PI, 1e-9) && !p.in_kernel);
        let p = phi_1_over_w(&FunctionHandle::identity(), 1e-10).unwrap();
        assert!(p.in_kernel);
        let tchi = t_image(&FunctionHandle::chi(), &EngineConfig::default()).unwrap();
        let p = phi_1_over_w(&tchi, 1e-9).unwrap();
        assert!(p.value.abs() < 1e-7, "{}", p.value);
    }

    #[test]
    fn request_validation() {
        let req = OperatorRequest::new(Operator::T, FunctionHandle::chi()).points(vec![0.1, 0.1]);
        assert!(matches!(apply_t(&req), Err(FhtError::InvalidRequest(_))));
        let req = OperatorRequest::new(Operator::T, FunctionHandle::chi()).points(vec![-1.0]);
        assert!(matches!(apply_t(&req), Err(FhtError::Domain { .. })));
    }

    #[test]
    fn scalar_dispatch() {
        let r = apply(&OperatorRequest::new(Operator::Q, FunctionHandle::chi()).points(vec![0.0, 0.5])).unwrap();
        assert!(r.values.iter().all(|&(_, v)| close(v, 1.0, 1e-12)));
        let r = apply(&OperatorRequest::new(Operator::Phi, FunctionHandle::chi()).points(vec![0.0]).method(Method::Quadrature))
            .unwrap();
        assert!(close(r.values[0].1, PI, 1e-9));
    }

    #[test]
    fn closed_form_indicator_matches_quadrature() {
        let iv = [(Abscissa::new(-0.7), Abscissa::new(-0.2)), (Abscissa::new(0.1), Abscissa::new(0.65))];
        let f = FunctionHandle::indicator(&iv);
        for &t in &[-0.9, -0.45, 0.0, 0.3, 0.8] {
            let q = quad::pv_fht(&f, t, 1e-12).unwrap().value;
            assert!(close(q, indicator_transform(&iv, Abscissa::new(t)), 1e-12));
        }
    }
}
