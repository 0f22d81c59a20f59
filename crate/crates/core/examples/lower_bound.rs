//! ||T(chi_A)||_{L_exp} stays above 1/(pi e^2) however small A is.

use fht::verify::{self, lower_bound_constant};
use fht::Abscissa;

fn main() -> fht::Result<()> {
    println!("1/(pi e^2) = {:.10}", lower_bound_constant());
    for k in 0..=8 {
        let len = 10f64.powi(-k);
        let a = [(Abscissa::new(0.1), Abscissa::new(0.1 + len))];
        let norm = verify::indicator_norm(&a, verify::LOWER_BOUND_GRID)?;
        println!("mu(A) = 1e-{k}:  ||T(chi_A)|| = {norm:.6}");
    }
    let report = verify::verify_lower_bound(7, 25);
    println!("random sets: {} pass, {} fail, smallest margin {:.4}", report.summary.pass, report.summary.fail, report.worst());
    Ok(())
}
