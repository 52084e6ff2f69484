//! Pinching a matrix flattens its spectrum: the eigenvalues of `A` majorize
//! those of the pinched matrix, so concave trace functions can only grow.

use ssa_lab::functions::parse_function;
use ssa_lab::matcore::{eigenvalues, majorizes, pinch, trace_f};
use ssa_lab::rng::{random_spd, Stream};

fn main() -> ssa_lab::Result<()> {
    let a = random_spd(&mut Stream::new(17), 5, 1e-3);
    let f = parse_function("kappa")?;
    let ev = eigenvalues(&a)?;
    println!("spectrum of A: {ev:.4?}");
    for k in 1..5 {
        let pk = pinch(&a, k)?;
        let m = majorizes(&ev, &eigenvalues(&pk)?)?;
        println!(
            "k = {k}: majorizes = {}, min slack {:.3e}, Tr κ(A) = {:.6} ≤ Tr κ(pinch) = {:.6}",
            m.holds,
            m.min_slack,
            trace_f(&f, &a)?,
            trace_f(&f, &pk)?
        );
    }
    Ok(())
}
