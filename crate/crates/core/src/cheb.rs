//! Chebyshev series and the exact transform of Chebyshev polynomials.
//!
//! With `rho_n = T(T_n)`,
//!
//! * `rho_0(t) = log((1-t)/(1+t)) / pi`
//! * `rho_1(t) = t rho_0(t) + 2/pi`
//! * `rho_{n+1}(t) = 2 t rho_n(t) - rho_{n-1}(t) + (2/pi) c_n`, with
//!   `c_n = int T_n`, i.e. `0` for odd `n` and `2/(1-n^2)` for even `n`.
//!
//! The recurrence follows from `T(x g)(t) = t T(g)(t) + (1/pi) int g`.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use serde::Serialize;

use crate::error::{FhtError, Result};
use crate::function::FunctionHandle;
use crate::point::Abscissa;
use crate::quad;

pub const DEFAULT_ORDER: usize = 64;

/// Limits of the forward recurrence; beyond them evaluation is delegated to
/// the principal-value quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralConfig {
    pub max_degree: usize,
    pub max_abs_t: f64,
    /// Largest accepted `sum |a_n rho_n| / max(|sum|, max|a_n|)`.
    pub growth_limit: f64,
    /// Tolerance used when delegating to quadrature.
    pub delegate_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            max_degree: 64,
            max_abs_t: 0.99,
            growth_limit: 1e8,
            delegate_tol: 1e-12,
        }
    }
}

/// `f = sum_n a_n T_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(FhtError::InvalidRequest("a series needs at least one coefficient".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(FhtError::InvalidRequest(format!("coefficient {i} is not finite")));
        }
        Ok(ChebSeries { coeffs })
    }

    /// `T_n` itself.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        ChebSeries { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest magnitude among the last (up to) four coefficients.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(4)..]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Whether the trailing coefficients are below `rel` times the largest one.
    pub fn is_resolved(&self, rel: f64) -> bool {
        self.degree() < 4 || self.tail() <= rel * self.max_coeff().max(f64::MIN_POSITIVE)
    }

    /// Clenshaw summation; `t` must lie in `[-1, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(FhtError::Domain {
                t,
                reason: "Chebyshev series are evaluated on [-1, 1]",
            });
        }
        Ok(clenshaw_t(&self.coeffs, t))
    }

    /// Coefficients `c` with `sum_n a_n T_n = sum_k c_k U_k`.
    pub fn to_second_kind(&self) -> Vec<f64> {
        let a = &self.coeffs;
        let mut c = vec![0.0; a.len()];
        for (n, &an) in a.iter().enumerate() {
            match n {
                0 => c[0] += an,
                1 => c[1] += 0.5 * an,
                _ => {
                    c[n] += 0.5 * an;
                    c[n - 2] -= 0.5 * an;
                }
            }
        }
        c
    }

    /// The series as a function handle.
    pub fn to_handle(&self, name: impl Into<String>) -> FunctionHandle {
        let coeffs = self.coeffs.clone();
        FunctionHandle::precise(name, move |p: Abscissa| clenshaw_t(&coeffs, p.value().clamp(-1.0, 1.0)))
    }
}

impl Add for &ChebSeries {
    type Output = ChebSeries;
    fn add(self, rhs: &ChebSeries) -> ChebSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.coeffs.get(i).unwrap_or(&0.0))
            .collect();
        ChebSeries { coeffs }
    }
}

impl Mul<f64> for &ChebSeries {
    type Output = ChebSeries;
    fn mul(self, k: f64) -> ChebSeries {
        ChebSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }
}

pub(crate) fn clenshaw_t(a: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in a.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a[0] + t * b1 - b2
}

/// `sum_k c_k U_k(t)`.
pub(crate) fn clenshaw_u(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().rev() {
        let b0 = ck + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

/// The Chebyshev-Gauss points `cos((2k+1) pi / 2n)`, strictly decreasing.
#[derive(Clone, Debug)]
pub struct ChebNodeGrid {
    order: usize,
    nodes: Vec<Abscissa>,
}

impl ChebNodeGrid {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(FhtError::InvalidRequest("node grid order must be at least 1".into()));
        }
        let nodes = (0..order)
            .map(|k| Abscissa::from_angle((2 * k + 1) as f64 * PI / (2 * order) as f64))
            .collect();
        Ok(ChebNodeGrid { order, nodes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Abscissa] {
        &self.nodes
    }

    pub fn values(&self) -> Vec<f64> {
        self.nodes.iter().map(|p| p.value()).collect()
    }
}

/// Interpolates `f` at `order + 1` Chebyshev-Gauss points.
pub fn fit(f: &FunctionHandle, order: usize) -> Result<ChebSeries> {
    let n = order + 1;
    let grid = ChebNodeGrid::new(n)?;
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&p| {
            let v = f.eval_at(p);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FhtError::RejectedInput { x: p.value() })
            }
        })
        .collect::<Result<_>>()?;
    Ok(fit_samples(&samples))
}

/// Coefficients from samples at the `n = samples.len()` Chebyshev-Gauss points.
pub(crate) fn fit_samples(samples: &[f64]) -> ChebSeries {
    let n = samples.len();
    let nf = n as f64;
    let mut coeffs = vec![0.0; n];
    for (j, cj) in coeffs.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, &v) in samples.iter().enumerate() {
            let angle = (j * (2 * k + 1)) as f64 * PI / (2.0 * nf);
            s += v * angle.cos();
        }
        *cj = 2.0 * s / nf;
    }
    coeffs[0] *= 0.5;
    ChebSeries { coeffs }
}

fn check_open(t: Abscissa) -> Result<()> {
    if !t.is_interior() {
        return Err(FhtError::Domain {
            t: t.value(),
            reason: "logarithmic singularity of T(T_n) at the endpoints",
        });
    }
    Ok(())
}

fn integral_of_basis(n: usize) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        2.0 / (1.0 - (n * n) as f64)
    }
}

/// `rho_0 .. rho_nmax` at `t` by the forward recurrence.
pub(crate) fn rho_table(nmax: usize, t: Abscissa) -> Vec<f64> {
    let x = t.value();
    let mut rho = Vec::with_capacity(nmax + 1);
    rho.push((t.one_minus() / t.one_plus()).ln() / PI);
    if nmax >= 1 {
        rho.push(x * rho[0] + 2.0 / PI);
    }
    for n in 1..nmax {
        let next = 2.0 * x * rho[n] - rho[n - 1] + 2.0 / PI * integral_of_basis(n);
        rho.push(next);
    }
    rho
}

/// `T(T_n)(t)`.
pub fn fht_cheb_rho(n: usize, t: impl Into<Abscissa>) -> Result<f64> {
    fht_cheb_rho_with(n, t.into(), &SpectralConfig::default())
}

pub fn fht_cheb_rho_with(n: usize, t: Abscissa, cfg: &SpectralConfig) -> Result<f64> {
    check_open(t)?;
    if n <= cfg.max_degree && t.value().abs() <= cfg.max_abs_t {
        Ok(rho_table(n, t)[n])
    } else {
        let h = ChebSeries::basis(n).to_handle(format!("T_{n}"));
        Ok(quad::pv_fht(&h, t, cfg.delegate_tol)?.value)
    }
}

/// `T(sum a_n T_n)(t)`.
pub fn fht_series(s: &ChebSeries, t: impl Into<Abscissa>) -> Result<f64> {
    fht_series_with(s, t.into(), &SpectralConfig::default())
}

pub fn fht_series_with(s: &ChebSeries, t: Abscissa, cfg: &SpectralConfig) -> Result<f64> {
    check_open(t)?;
    if s.degree() <= cfg.max_degree && t.value().abs() <= cfg.max_abs_t {
        let rho = rho_table(s.degree(), t);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for (a, r) in s.coeffs.iter().zip(rho.iter()) {
            sum += a * r;
            abs_sum += (a * r).abs();
        }
        let scale = sum.abs().max(s.max_coeff());
        if scale > 0.0 {
            let growth = abs_sum / scale;
            if growth > cfg.growth_limit {
                return Err(FhtError::Instability {
                    value: sum,
                    growth,
                    limit: cfg.growth_limit,
                });
            }
        }
        Ok(sum)
    } else {
        let tol = (cfg.delegate_tol * s.max_coeff().max(1.0)).max(quad::MIN_TOL);
        Ok(quad::pv_fht(&s.to_handle("series"), t, tol)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_basic_polynomials() {
        let one = fit(&FunctionHandle::constant(1.0), 4).unwrap();
        assert_eq!(one.coeffs().len(), 5);
        assert!((one.coeffs()[0] - 1.0).abs() < 1e-15);
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));

        let x = fit(&FunctionHandle::identity(), 4).unwrap();
        assert!((x.coeffs()[1] - 1.0).abs() < 1e-15);
        assert!(x.coeffs().iter().enumerate().all(|(i, c)| i == 1 || c.abs() < 1e-15));

        let t2 = fit(&FunctionHandle::new("2x^2-1", |x| 2.0 * x * x - 1.0), 8).unwrap();
        for (i, c) in t2.coeffs().iter().enumerate() {
            let want = if i == 2 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-14, "a_{i} = {c}");
        }
    }

    #[test]
    fn fit_rejects_non_finite() {
        let f = FunctionHandle::new("bad", |x| if x > 0.0 { f64::NAN } else { 0.0 });
        assert!(matches!(fit(&f, 8), Err(FhtError::RejectedInput { .. })));
    }

    #[test]
    fn eval_examples() {
        let s = ChebSeries::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(s.eval(0.5).unwrap(), 0.5);
        let s = ChebSeries::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert!(s.eval(0.0).unwrap().abs() < 1e-16);
        let s = ChebSeries::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let want = 4.0 * 0.3f64.powi(3) - 3.0 * 0.3;
        assert!((s.eval(0.3).unwrap() - want).abs() < 1e-15);
        assert!((want + 0.792).abs() < 1e-12);
        assert!(matches!(s.eval(1.5), Err(FhtError::Domain { .. })));
    }

    #[test]
    fn nodes_decrease_strictly_inside() {
        let g = ChebNodeGrid::new(17).unwrap();
        let v = g.values();
        assert!(v.windows(2).all(|w| w[0] > w[1]));
        assert!(g.nodes().iter().all(|p| p.is_interior()));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(fht_cheb_rho(0, 0.0).unwrap(), 0.0);
        assert!((fht_cheb_rho(1, 0.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!(matches!(fht_cheb_rho(2, 1.0), Err(FhtError::Domain { .. })));
    }

    #[test]
    fn series_examples() {
        let one = ChebSeries::new(vec![1.0]).unwrap();
        let v = fht_series(&one, 0.5).unwrap();
        assert!((v - (1.0f64 / 3.0).ln() / PI).abs() < 1e-15);
        assert_eq!(fht_series(&one, 0.0).unwrap(), 0.0);
        let x = ChebSeries::new(vec![0.0, 1.0]).unwrap();
        assert!((fht_series(&x, 0.0).unwrap() - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn instability_is_flagged() {
        let cfg = SpectralConfig {
            growth_limit: 1.5,
            ..SpectralConfig::default()
        };
        // large cancelling coefficients
        let s = ChebSeries::new(vec![1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        let r = fht_series_with(&s, Abscissa::new(0.9), &cfg);
        assert!(matches!(r, Err(FhtError::Instability { .. })));
    }

    #[test]
    fn second_kind_conversion() {
        let s = ChebSeries::new(vec![0.3, -1.2, 0.7, 0.25, -0.4]).unwrap();
        let c = s.to_second_kind();
        for &t in &[-0.8, -0.1, 0.45, 0.93] {
            assert!((clenshaw_u(&c, t) - s.eval(t).unwrap()).abs() < 1e-14);
        }
    }
}
