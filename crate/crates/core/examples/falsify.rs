//! Hill climbing towards a violation for `f(x) = -1/x`, once from a random
//! start and once from the known counterexample.

use ssa_lab::exact::ando_report;
use ssa_lab::functions::parse_function;
use ssa_lab::matcore::{format_matrix, Partition};
use ssa_lab::search::{falsify, Family, SearchConfig};

fn main() -> ssa_lab::Result<()> {
    let f = parse_function("neg_inverse")?;
    let dims = Partition::new(1, 1, 1);

    let random = falsify(&f, &SearchConfig::new(Family::GenericSpd, dims, 10_000, 7))?;
    println!(
        "random start: best gap {:.6e} after {} restarts, violated = {}",
        random.best_gap, random.restarts, random.violated
    );
    for (iter, gap) in random.trace.iter().take(8) {
        println!("  iter {iter:>5}  gap {gap:+.6e}");
    }

    let mut cfg = SearchConfig::new(Family::GenericSpd, dims, 2_000, 7);
    cfg.start = Some(ando_report()?.a.to_sym()?);
    let seeded = falsify(&f, &cfg)?;
    println!(
        "\nseeded at the counterexample: best gap {:.12}",
        seeded.best_gap
    );
    print!("{}", format_matrix(&seeded.best_matrix));
    Ok(())
}
