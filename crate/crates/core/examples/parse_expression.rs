//! The expression language and the singularity tags it infers.

use fht::expr::FunctionExpr;

fn main() {
    let sources = [
        "x^3 - 2*x",
        "chi(-0.5, 0.25) + 0.5*chi(0.25, 1)",
        "log(abs(x - 0.3))",
        "cos(pi*x)/w",
        "sqrt(1 - x)",
        "exp(-x^2) * (1 + x",
        "chi(0.5, 0.2)",
    ];
    for s in sources {
        match FunctionExpr::parse(s) {
            Ok(e) => {
                let h = e.to_handle();
                let tag = h.tag();
                println!(
                    "{s:<36} f(0.1) = {:>10.6}  kind {:?}  split points {:?}  endpoint singular {}",
                    e.eval(0.1),
                    tag.kind(),
                    tag.split_points().iter().map(|p| p.value()).collect::<Vec<_>>(),
                    tag.endpoint_singular
                );
            }
            Err(err) => println!("{s:<36} error: {err}"),
        }
    }
}
