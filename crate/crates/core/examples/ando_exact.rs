//! Exact rational reproduction of the three-by-three counterexample for
//! `f(x) = -1/x`, with the floating-point pipeline as a cross-check.

use ssa_lab::exact::{ando_report, fmt_rational};

fn main() -> ssa_lab::Result<()> {
    let r = ando_report()?;
    println!("Tr A^-1   = {}", fmt_rational(&r.tr_a_inv));
    println!("Tr A22^-1 = {}", fmt_rational(&r.tr_a22_inv));
    println!("Tr B^-1   = {}", fmt_rational(&r.tr_b_inv));
    println!("Tr C^-1   = {}", fmt_rational(&r.tr_c_inv));
    println!(
        "gap       = {}  (negative: the inequality fails)",
        fmt_rational(&r.gap)
    );
    println!(
        "float gap = {:.17}, |float - exact| = {:.2e}",
        r.float_gap, r.float_abs_err
    );
    Ok(())
}
