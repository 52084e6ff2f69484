//! User-supplied functions: parse an expression, differentiate it with dual
//! numbers and run it through the same checks as catalog functions.

use ssa_lab::expr::{eval_second, parse_expr, parse_scalar_fn};
use ssa_lab::functions::Domain;
use ssa_lab::matcore::Partition;
use ssa_lab::monotone::check_ssa_sufficient;
use ssa_lab::rng::{random_spd, Stream};
use ssa_lab::ssa::{ssa_gap, Form, DEFAULT_TOL_REL};

fn main() -> ssa_lab::Result<()> {
    let e = parse_expr("-x*log(x) + (x+1)*log(x+1)")?;
    println!("parsed: {e}");
    for x in [0.5, 1.0, 2.0] {
        let (v, d1, d2) = eval_second(&e, x)?;
        println!("  x = {x}: f = {v:.6}, f' = {d1:.6}, f'' = {d2:.6}");
    }

    if let Err(err) = parse_expr("x^^2") {
        println!("rejected `x^^2`: {err}");
    }

    let f = parse_scalar_fn("x^0.4", Domain::NonNegative)?;
    let p = Partition::new(1, 2, 1);
    let a = random_spd(&mut Stream::new(5), p.dim(), 1e-3);
    let r = ssa_gap(&f, &a, &p, Form::Projected, DEFAULT_TOL_REL)?;
    println!("x^0.4 projected gap {:.6e}, holds = {}", r.gap, r.holds);
    let v = check_ssa_sufficient(&f, (1e-3, 1e3), 4, 200, 9)?;
    println!("x^0.4 sufficient condition: {:?}", v.verdict);
    Ok(())
}
