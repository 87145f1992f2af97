//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use kac_spectral::verify::{self, Baselines, Verdict};
use kac_spectral::Result;

fn main() -> ExitCode {
    let b = Baselines::recorded();
    type Check<'a> = Box<dyn Fn() -> Result<Verdict> + 'a>;
    let checks: Vec<(&str, Check)> = vec![
        (
            "1",
            Box::new(|| Ok(verify::kernel_closed_forms(&verify::identity_tables(0.5)?))),
        ),
        ("2", Box::new(|| verify::eigenvalue_asymptotics(&[0.25, 0.5, 0.75]))),
        (
            "3",
            Box::new(|| Ok(verify::conservation_identities(&verify::identity_tables(0.5)?))),
        ),
        ("4", Box::new(|| verify::bobylev_agreement(0.5))),
        ("5", Box::new(verify::littlewood_paley)),
        ("6", Box::new(verify::solver_structure)),
        ("7", Box::new(|| verify::picard_contraction(&b))),
        ("8", Box::new(|| verify::kolmogorov_oracle(&b))),
        ("9", Box::new(verify::inhomogeneous_smoothing)),
        ("10", Box::new(verify::fitter_self_test)),
    ];
    let mut failed = 0;
    for (id, check) in &checks {
        let t0 = Instant::now();
        match check() {
            Ok(v) => {
                if !v.passed {
                    failed += 1;
                }
                println!("criterion {id:>2}: {} [{:.1?}]", v.line(), t0.elapsed());
            }
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2}: FAIL error: {e}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
