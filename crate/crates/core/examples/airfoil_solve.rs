//! The airfoil equation T(f) = g: a round trip through a polynomial, a
//! piecewise right-hand side, and a rejected one.

use fht::airfoil::{self, Solution};
use fht::cheb::ChebSeries;
use fht::operators::{self, EngineConfig};
use fht::{FhtError, FunctionHandle};

fn main() -> fht::Result<()> {
    let p = ChebSeries::new(vec![0.2, -0.5, 0.0, 0.25, 0.1])?.to_handle("p");
    let g = operators::t_image(&p, &EngineConfig::auto(1e-12))?;
    let sol = airfoil::solve(&g, 1e-10, false)?;
    let err = (0..=100)
        .map(|i| -0.99 + 0.0198 * i as f64)
        .map(|x| (sol.eval(x) - p.eval(x)).abs())
        .fold(0.0, f64::max);
    println!("round trip: residual {:.2e}, max |f - p| = {err:.2e}", sol.residual_sup);
    if let Solution::Chebyshev { coeffs } = &sol.solution {
        println!("  coefficients {:?}", &coeffs[..5]);
    }

    let g = fht::expr::parse_function("abs(x - 0.3) - 0.3")?;
    let report = airfoil::check_range(&g, 1e-10)?;
    println!("phi(|x - 0.3| - 0.3) = {:.6}, verdict {:?}", report.phi_value, report.boundedness_verdict);
    let forced = airfoil::solve(&g, 1e-10, true)?;
    println!("forced solve: residual {:.2e}, defect Q(g) = {:?}", forced.residual_sup, forced.defect);

    match airfoil::solve(&FunctionHandle::chi(), 1e-10, false) {
        Err(FhtError::NotInRange { phi_value, .. }) => println!("chi rejected: phi = {phi_value:.12}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
