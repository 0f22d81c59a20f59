//! T(chi) on both engines against (1/pi) log((1-t)/(1+t)), and the spectral
//! pair T(T_n / w) = U_{n-1}.

use std::f64::consts::PI;

use fht::cheb::{self, ChebSeries};
use fht::operators::{self, Method, Operator, OperatorRequest};
use fht::FunctionHandle;

fn main() -> fht::Result<()> {
    let points = vec![-0.9, -0.5, 0.0, 0.5, 0.9, 0.999];
    for method in [Method::Spectral, Method::Quadrature] {
        let req = OperatorRequest::new(Operator::T, FunctionHandle::chi())
            .points(points.clone())
            .method(method);
        let r = operators::apply(&req)?;
        println!("T(chi) via {}:", r.method_used);
        for (t, v) in r.values {
            let exact = ((1.0 - t) / (1.0 + t)).ln() / PI;
            println!("  t = {t:>6}  T = {v:>20.15}  error = {:.1e}", (v - exact).abs());
        }
    }

    // T(x) = 2/pi + x T(chi)
    let x = ChebSeries::basis(1);
    println!("T(x)(0.3) = {:.15}", cheb::fht_series(&x, 0.3)?);
    println!("closed    = {:.15}", 2.0 / PI + 0.3 * (0.7f64 / 1.3).ln() / PI);

    let inv_w = FunctionHandle::inverse_weight();
    println!("T(1/w)(0.4) = {:.3e}", fht::quad::pv_fht(&inv_w, 0.4, 1e-12)?.value);
    Ok(())
}
