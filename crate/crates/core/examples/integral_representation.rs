//! Quadrature of the integral representations of `xᵗ` and `κ` against their
//! closed forms.

use ssa_lab::functions::{kappa, kappa_integral, power_integral, PowerVariant, QuadratureSpec};

fn main() -> ssa_lab::Result<()> {
    let quad = QuadratureSpec::default();
    println!("{:>6} {:>5} {:>12} {:>12}", "x", "t", "resolvent", "log");
    for x in [0.1f64, 1.0, 4.0, 10.0] {
        for t in [0.25, 0.5, 0.75] {
            let exact = x.powf(t);
            let r = power_integral(x, t, PowerVariant::Resolvent, &quad)?;
            let l = power_integral(x, t, PowerVariant::Log, &quad)?;
            println!(
                "{x:>6} {t:>5} {:>12.2e} {:>12.2e}",
                (r.value - exact).abs(),
                (l.value - exact).abs()
            );
        }
    }
    println!();
    for x in [0.0, 0.5, 1.0, 10.0] {
        let k = kappa_integral(x, &quad)?;
        println!(
            "kappa({x:>4}) = {:.12}  error {:.2e}  ({} evals)",
            kappa(x),
            (k.value - kappa(x)).abs(),
            k.evals
        );
    }
    Ok(())
}
