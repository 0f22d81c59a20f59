//! Lower bounds n ||T(chi_{A_n})|| on the level sets of an unbounded f.

use fht::verify;

fn main() -> fht::Result<()> {
    let f = fht::expr::parse_function("abs(log((1 - x)/(1 + x)))")?;
    let r = verify::probe_optimal_domain(&f, 40, 5.0)?;
    for s in r.sequence.iter().filter(|s| s.n % 4 == 1) {
        println!("n = {:>3}  mu(A_n) = {:.3e}  n ||T(chi_A_n)|| = {:.4}", s.n, s.measure, s.lower_bound);
    }
    println!("exceeds {} at n = {:?}", r.cap, r.first_exceeding);

    let bounded = verify::probe_optimal_domain(&fht::FunctionHandle::chi(), 10, 5.0)?;
    println!("chi: declined = {}, {}", bounded.declined, bounded.warning.unwrap_or_default());
    Ok(())
}
