//! The companions Tcheck, That, Q and phi, and the two inversion formulas.

use fht::operators::{self, EngineConfig, Method, Operator, OperatorRequest};
use fht::{expr, FunctionHandle};

fn main() -> fht::Result<()> {
    let f = expr::parse_function("x^3 - x/2")?;
    let cfg = EngineConfig::auto(1e-11);

    let tf = operators::t_image(&f, &cfg)?;
    let left = operators::t_check_image(&tf, &cfg)?;
    let right = operators::t_image(&operators::t_check_image(&f, &cfg)?, &cfg)?;
    let q = operators::apply_q(&f, 1e-12)?;
    println!("Q(f) = {q:.3e}");
    for t in [-0.8, -0.2, 0.35, 0.9] {
        println!(
            "t = {t:>5}: f = {:>9.6}  Tcheck(T f) = {:>9.6}  T(Tcheck f) + Q(f) = {:>9.6}",
            f.eval(t),
            left.eval(t),
            right.eval(t) + q
        );
    }

    // chi is not in the range of T: phi(chi) = pi and T(Tcheck chi) = 0
    let chi = FunctionHandle::chi();
    let phi = operators::phi_1_over_w(&chi, 1e-12)?;
    println!("phi(chi) = {:.15}, in kernel: {}", phi.value, phi.in_kernel);

    let req = OperatorRequest::new(Operator::THat, expr::parse_function("1 + x^2")?)
        .points(vec![-0.5, 0.0, 0.5])
        .method(Method::Spectral);
    for (t, v) in operators::apply(&req)?.values {
        println!("That(1 + x^2)({t}) = {v:.12}");
    }
    Ok(())
}
