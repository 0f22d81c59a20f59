//! Runs every verification suite with its default size.

use fht::cli::default_cases;
use fht::verify;

fn main() -> fht::Result<()> {
    let seed = 7;
    for suite in verify::SUITES {
        let r = verify::run_suite(suite, seed, default_cases(suite))?;
        println!(
            "{suite:<13} {:>4} pass {:>3} fail  worst {:>10.3e}  {:.2}s",
            r.summary.pass,
            r.summary.fail,
            r.worst(),
            r.wall_time
        );
    }
    Ok(())
}
