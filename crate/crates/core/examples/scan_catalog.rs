//! Seeded scan over generated instances: the smallest gap per function and
//! the gap histogram as CSV.

use ssa_lab::functions::parse_function;
use ssa_lab::matcore::Partition;
use ssa_lab::search::{scan, Family, ScanConfig, DEFAULT_EPS};
use ssa_lab::ssa::{Form, DEFAULT_TOL_REL};

fn main() -> ssa_lab::Result<()> {
    let cfg = ScanConfig {
        family: Family::GenericSpd,
        dims: Partition::new(2, 2, 2),
        trials: 500,
        seed: 2024,
        eps: DEFAULT_EPS,
        form: Form::Compressed,
        tol_rel: DEFAULT_TOL_REL,
    };
    for spec in [
        "log",
        "kappa",
        "shifted_entropy:c=1",
        "neg_power:t=1.5",
        "neg_inverse",
    ] {
        let s = scan(&parse_function(spec)?, &cfg)?;
        println!(
            "{spec:<20} violations {:>4}/{}  min scaled gap {:+.3e}",
            s.violations, s.evaluated, s.min_scaled_gap
        );
    }

    let s = scan(&parse_function("kappa")?, &cfg)?;
    println!("\nkappa histogram of gap/scale:\n{}", s.histogram_csv());
    Ok(())
}
