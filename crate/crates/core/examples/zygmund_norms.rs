//! Decreasing rearrangements and the L_exp / LlogL norms.

use fht::norms::{self, NormReport};
use fht::operators::{self, EngineConfig};
use fht::{expr, FunctionHandle};

fn main() -> fht::Result<()> {
    for source in ["chi(-1, 1)", "x", "chi(0, 0.5)", "log((1 - x)/(1 + x))"] {
        let f = expr::parse_function(source)?;
        let r = norms::rearrange(&f, norms::DEFAULT_GRID)?;
        let rep = NormReport::new(&r, 1.0, norms::DEFAULT_GRID)?;
        println!(
            "{source:<24} L_exp {:.6}  equiv {:.6}  LlogL {:.6}",
            rep.lexp_primary, rep.lexp_equiv, rep.llogl
        );
    }

    // the b-part ratio of log((1+x)/(1-x)) approaches 1 at small t
    let tchi = operators::t_image(&FunctionHandle::chi(), &EngineConfig::quadrature(1e-12))?;
    let r = norms::rearrange(&tchi, norms::DEFAULT_GRID)?.scaled(std::f64::consts::PI);
    let trend = norms::b_part_trend(&r, 20);
    println!("b-part ratio at 2^-20: {:.4} ({})", trend.samples.last().unwrap().2, trend.label);

    let xs: Vec<f64> = (1..200).map(|i| -1.0 + i as f64 / 100.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let r = norms::rearrange_samples(&xs, &ys)?;
    println!("sampled x^2: L_exp {:.6}", norms::norm_lexp(&r, 1.0));
    Ok(())
}
