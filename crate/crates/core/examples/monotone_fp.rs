//! Loewner-matrix evidence that `-f'` is matrix monotone for the family
//! `f_p`, and a failing case for `g(x) = x²`.

use ssa_lab::functions::parse_function;
use ssa_lab::matcore::eigenvalues;
use ssa_lab::monotone::{check_ssa_sufficient, loewner_matrix, test_matrix_monotone};

fn main() -> ssa_lab::Result<()> {
    for i in 1..10 {
        let p = f64::from(i) / 10.0;
        let f = parse_function(&format!("f_p:p={p}"))?;
        let v = check_ssa_sufficient(&f, (1e-3, 1e3), 5, 500, 42)?;
        println!("p = {p:.1}: {:?} ({})", v.verdict, v.summary);
    }

    let l = loewner_matrix(|x| x * x, |x| 2.0 * x, &[1.0, 2.0])?;
    let ev = eigenvalues(&l.loewner)?;
    let det: f64 = ev.iter().product();
    println!(
        "\nx^2 at points (1, 2): Loewner det {det:.3}, min eigenvalue {:.3}",
        l.min_eig
    );
    let v = test_matrix_monotone(|x| x * x, |x| 2.0 * x, (1e-3, 1e3), 2, 100, 1)?;
    println!(
        "x^2 order 2: {:?}, {} violating trials",
        v.verdict, v.violations
    );
    Ok(())
}
