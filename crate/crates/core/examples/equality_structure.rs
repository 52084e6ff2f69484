//! Equality diagnostics: the log-determinant residual on a constructed
//! equality instance, and the invariant-subspace structure on a decomposable
//! one.

use ssa_lab::functions::parse_function;
use ssa_lab::matcore::Partition;
use ssa_lab::search::{generate, Family, GenSpec};
use ssa_lab::ssa::{
    detect_structure, gap_log_det, log_equality_residual, scale, ssa_gap, stone_weierstrass_check,
    Form, DEFAULT_STRUCTURE_TOL, DEFAULT_TOL_REL,
};

fn main() -> ssa_lab::Result<()> {
    let p = Partition::new(2, 2, 2);

    let a = generate(&GenSpec::new(Family::LogEquality, p, 3))?;
    let d = log_equality_residual(&a, &p)?;
    println!("log_equality instance");
    println!(
        "  residual ‖A13 − A12 A22⁻¹ A23‖_F = {:.3e}",
        d.log_residual.unwrap_or(f64::NAN)
    );
    println!(
        "  log-det gap                      = {:.3e}",
        gap_log_det(&a, &p)?
    );

    let a = generate(&GenSpec::new(Family::TriviBlock, p, 5))?;
    let s = detect_structure(&a, &p, DEFAULT_STRUCTURE_TOL)?;
    let kappa = ssa_gap(
        &parse_function("kappa")?,
        &a,
        &p,
        Form::Compressed,
        DEFAULT_TOL_REL,
    )?;
    let gs = [vec![0.0, 1.0], vec![0.5, -1.0, 0.25]];
    println!("\ntrivi_block instance");
    println!(
        "  decomposable = {}, Krylov dimension {}",
        s.decomposable, s.krylov_dim
    );
    println!(
        "  residuals: invariance {:.1e}, range {:.1e}, kernel {:.1e}",
        s.invariance_residual, s.range_residual, s.kernel_residual
    );
    println!("  kappa gap {:.3e} (scale {:.2})", kappa.gap, scale(&a));
    println!(
        "  polynomial cross-term {:.3e}",
        stone_weierstrass_check(&a, &p, &gs)?
    );

    let a = generate(&GenSpec::new(Family::GenericSpd, p, 3))?;
    let s = detect_structure(&a, &p, DEFAULT_STRUCTURE_TOL)?;
    println!("\ngeneric instance: decomposable = {}", s.decomposable);
    Ok(())
}
