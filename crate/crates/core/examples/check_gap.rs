//! Gap of the trace inequality for a handful of catalog functions on one
//! random positive definite matrix, in both the compressed and the projected
//! form.

use ssa_lab::functions::parse_function;
use ssa_lab::matcore::Partition;
use ssa_lab::rng::{random_spd, Stream};
use ssa_lab::ssa::{ssa_gap, Form, DEFAULT_TOL_REL};

fn main() -> ssa_lab::Result<()> {
    let p = Partition::new(2, 1, 2);
    let a = random_spd(&mut Stream::new(11), p.dim(), 1e-3);

    println!(
        "{:<22} {:>14} {:>14}  holds",
        "function", "compressed", "projected"
    );
    for spec in [
        "log",
        "kappa",
        "power:t=0.5",
        "neg_square",
        "neg_inverse",
        "f_p:p=0.3",
    ] {
        let f = parse_function(spec)?;
        let c = ssa_gap(&f, &a, &p, Form::Compressed, DEFAULT_TOL_REL)?;
        let projected = if f.finite_at_zero() {
            let r = ssa_gap(&f, &a, &p, Form::Projected, DEFAULT_TOL_REL)?;
            format!("{:>14.6e}", r.gap)
        } else {
            format!("{:>14}", "n/a")
        };
        println!("{spec:<22} {:>14.6e} {projected}  {}", c.gap, c.holds);
    }
    Ok(())
}
