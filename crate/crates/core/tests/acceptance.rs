//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Every criterion returns a JSON digest of what it computed. The last
//! criterion reruns the others and the CLI under `--ci` and requires
//! byte-identical output.

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;
use ssa_lab::cli::{execute, Cli};
use ssa_lab::exact::{ando_report, fmt_rational, rational};
use ssa_lab::functions::{
    kappa, kappa_integral, parse_function, power_integral, PowerVariant, QuadratureSpec,
};
use ssa_lab::matcore::{blocks, eigenvalues, majorizes, pinch, trace_f, Partition};
use ssa_lab::monotone::{check_ssa_sufficient, loewner_matrix, test_matrix_monotone, Verdict};
use ssa_lab::report::to_json;
use ssa_lab::rng::{random_spd, Stream};
use ssa_lab::search::{
    falsify, generate, scan, Family, GenSpec, ScanConfig, SearchConfig, DEFAULT_EPS,
};
use ssa_lab::ssa::{
    detect_structure, gap_log_det, scale, ssa_gap, stone_weierstrass_check, Form,
    DEFAULT_STRUCTURE_TOL, DEFAULT_TOL_REL,
};
use ssa_lab::Result;

struct Outcome {
    pass: bool,
    detail: String,
    digest: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>, digest: serde_json::Value) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            digest: to_json(&digest),
        }
    }
}

type Criterion = fn() -> Result<Outcome>;

const DIMS: [(usize, usize, usize); 3] = [(1, 1, 1), (2, 2, 2), (3, 1, 2)];

fn partition((a, b, c): (usize, usize, usize)) -> Partition {
    Partition::new(a, b, c)
}

/// `tol_rel · max(1, Σ|traces|)`, the scale the gap verdicts use.
fn trace_tol(r: &ssa_lab::ssa::SsaReport, tol_rel: f64) -> f64 {
    r.tol / DEFAULT_TOL_REL * tol_rel
}

fn ando_exact() -> Result<Outcome> {
    let r = ando_report()?;
    let expected = [
        (&r.tr_a_inv, rational(33, 1)),
        (&r.tr_a22_inv, rational(2, 1)),
        (&r.tr_b_inv, rational(212, 9)),
        (&r.tr_c_inv, rational(12, 1)),
        (&r.gap, rational(-5, 9)),
    ];
    let exact = expected.iter().all(|(got, want)| *got == want);
    let pass = exact && r.float_abs_err <= 1e-12;
    Ok(Outcome::new(
        pass,
        format!(
            "gap {} exactly, float error {:.1e}",
            fmt_rational(&r.gap),
            r.float_abs_err
        ),
        serde_json::to_value(&r).expect("serializable"),
    ))
}

const SCAN_FUNCTIONS: &[&str] = &[
    "log",
    "kappa",
    "power:t=0.25",
    "power:t=0.5",
    "power:t=0.75",
    "neg_power:t=1",
    "neg_power:t=1.5",
    "neg_power:t=2",
    "neg_square",
    "shifted_entropy:c=0",
    "shifted_entropy:c=1",
    "f_p:p=0.5",
];

fn catalog_scan() -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let mut worst_case = String::new();
    let mut skipped = 0;
    let mut digest = Vec::new();
    for spec in SCAN_FUNCTIONS {
        let f = parse_function(spec)?;
        for dims in DIMS {
            let cfg = ScanConfig {
                family: Family::GenericSpd,
                dims: partition(dims),
                trials: 1000,
                seed: 20_000,
                eps: DEFAULT_EPS,
                form: Form::Compressed,
                tol_rel: DEFAULT_TOL_REL,
            };
            let s = scan(&f, &cfg)?;
            skipped += s.skipped;
            if s.min_scaled_gap < worst {
                worst = s.min_scaled_gap;
                worst_case = format!("{spec} at {dims:?}");
            }
            digest.push(serde_json::to_value(&s).expect("serializable"));
        }
    }
    Ok(Outcome::new(
        worst >= -1e-8 && skipped == 0,
        format!(
            "{} scans of 1000, min gap/scale {worst:.3e} ({worst_case}), {skipped} skipped",
            SCAN_FUNCTIONS.len() * DIMS.len()
        ),
        json!(digest),
    ))
}

fn falsification() -> Result<Outcome> {
    let f = parse_function("neg_inverse")?;
    let dims = Partition::new(1, 1, 1);
    let random = falsify(&f, &SearchConfig::new(Family::GenericSpd, dims, 10_000, 7))?;

    let mut cfg = SearchConfig::new(Family::GenericSpd, dims, 10_000, 7);
    cfg.start = Some(ando_report()?.a.to_sym()?);
    let seeded = falsify(&f, &cfg)?;

    let pass = random.violated && random.best_gap <= -1e-4 && seeded.best_gap <= -5.0 / 9.0 + 1e-10;
    Ok(Outcome::new(
        pass,
        format!(
            "random start best gap {:.4e}, seeded best gap {:.6}",
            random.best_gap, seeded.best_gap
        ),
        json!([random, seeded]),
    ))
}

fn neg_square_closed_form() -> Result<Outcome> {
    let f = parse_function("neg_square")?;
    let mut worst_rel = 0.0f64;
    let mut separated = true;
    let mut digest = Vec::new();
    for i in 0..200u64 {
        let p = partition(DIMS[i as usize % DIMS.len()]);
        let a = generate(&GenSpec::new(Family::GenericSpd, p, 4000 + i))?;
        let r = ssa_gap(&f, &a, &p, Form::Compressed, DEFAULT_TOL_REL)?;
        let expected = 2.0 * blocks(&a, &p)?.a13.frobenius().powi(2);
        worst_rel = worst_rel.max((r.gap - expected).abs() / expected.max(1.0));
        // A₁₃ ≠ 0 here, so the gap must be resolvably positive
        separated &= expected > 0.0 && !r.equality;
        digest.push(r.gap);
    }

    // instances whose A₁₃ block is structurally zero
    let mut worst_zero = 0.0f64;
    let mut equality = true;
    for i in 0..200u64 {
        let p = partition(DIMS[i as usize % DIMS.len()]);
        let a = generate(&GenSpec::new(Family::TriviBlock, p, 5000 + i))?;
        let r = ssa_gap(&f, &a, &p, Form::Compressed, DEFAULT_TOL_REL)?;
        assert_eq!(
            blocks(&a, &p)?.a13.max_abs(),
            0.0,
            "trivi_block must zero A13"
        );
        worst_zero = worst_zero.max(r.gap.abs());
        equality &= r.equality;
        digest.push(r.gap);
    }
    Ok(Outcome::new(
        worst_rel <= 1e-10 && separated && equality && worst_zero <= 1e-10,
        format!(
            "max relative deviation {worst_rel:.2e}; A13 = 0 gives |gap| ≤ {worst_zero:.2e} with equality = {equality}"
        ),
        json!(digest),
    ))
}

fn log_equality() -> Result<Outcome> {
    let f = parse_function("log")?;
    let mut worst_gap = 0.0f64;
    let mut worst_det = 0.0f64;
    let mut digest = Vec::new();
    for i in 0..200u64 {
        let p = partition(DIMS[i as usize % DIMS.len()]);
        let a = generate(&GenSpec::new(Family::LogEquality, p, 6000 + i))?;
        let r = ssa_gap(&f, &a, &p, Form::Compressed, DEFAULT_TOL_REL)?;
        let det = gap_log_det(&a, &p)?;
        worst_gap = worst_gap.max(r.gap.abs() / trace_tol(&r, 1.0));
        worst_det = worst_det.max((r.gap - det).abs() / trace_tol(&r, 1.0));
        digest.push(json!([r.gap, det]));
    }
    Ok(Outcome::new(
        worst_gap <= 1e-8 && worst_det <= 1e-8,
        format!("max |gap|/scale {worst_gap:.2e}, max log-det disagreement {worst_det:.2e}"),
        json!(digest),
    ))
}

fn zero_cancellation() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut digest = Vec::new();
    for spec in ["kappa", "neg_square", "power:t=0.5"] {
        let f = parse_function(spec)?;
        for i in 0..200u64 {
            let p = partition(DIMS[i as usize % DIMS.len()]);
            let a = generate(&GenSpec::new(Family::GenericSpd, p, 7000 + i))?;
            let c = ssa_gap(&f, &a, &p, Form::Compressed, DEFAULT_TOL_REL)?;
            let pr = ssa_gap(&f, &a, &p, Form::Projected, DEFAULT_TOL_REL)?;
            worst = worst.max((c.gap - pr.gap).abs() / trace_tol(&c, 1.0));
            digest.push(json!([c.gap, pr.gap]));
        }
    }
    Ok(Outcome::new(
        worst <= 1e-9,
        format!("max |compressed − projected|/scale {worst:.2e} over 600 instances"),
        json!(digest),
    ))
}

fn monotonicity_evidence() -> Result<Outcome> {
    let mut specs = vec![
        "kappa".to_string(),
        "shifted_entropy:c=1".into(),
        "power:t=0.5".into(),
    ];
    specs.extend((1..10).map(|i| format!("f_p:p=0.{i}")));
    let mut failed = Vec::new();
    let mut digest = Vec::new();
    for spec in &specs {
        let v = check_ssa_sufficient(&parse_function(spec)?, (1e-3, 1e3), 5, 500, 42)?;
        if v.verdict != Verdict::Passed {
            failed.push(spec.clone());
        }
        digest.push(serde_json::to_value(&v).expect("serializable"));
    }

    let square = |x: f64| x * x;
    let twice = |x: f64| 2.0 * x;
    let fixed = loewner_matrix(square, twice, &[1.0, 2.0])?;
    let det: f64 = eigenvalues(&fixed.loewner)?.iter().product();
    let sampled = test_matrix_monotone(square, twice, (1e-3, 1e3), 2, 500, 42)?;
    let square_fails =
        !fixed.psd && (det + 1.0).abs() <= 1e-12 && sampled.verdict == Verdict::Failed;
    digest.push(json!({ "det": det, "sampled": sampled }));

    Ok(Outcome::new(
        failed.is_empty() && square_fails,
        format!(
            "{}/{} PASSED; x² at (1,2) has Loewner det {det:.3} and sampled verdict {:?}",
            specs.len() - failed.len(),
            specs.len(),
            sampled.verdict
        ),
        json!(digest),
    ))
}

fn integral_representations() -> Result<Outcome> {
    let quad = QuadratureSpec::default();
    let mut worst_power = 0.0f64;
    let mut worst_kappa = 0.0f64;
    let mut digest = Vec::new();
    for x in [0.1f64, 1.0, 4.0, 10.0] {
        for t in [0.25, 0.5, 0.75] {
            for variant in [PowerVariant::Resolvent, PowerVariant::Log] {
                let q = power_integral(x, t, variant, &quad)?;
                worst_power = worst_power.max((q.value - x.powf(t)).abs());
                digest.push(q.value);
            }
        }
    }
    for x in [0.0, 0.5, 1.0, 10.0] {
        let q = kappa_integral(x, &quad)?;
        worst_kappa = worst_kappa.max((q.value - kappa(x)).abs());
        digest.push(q.value);
    }
    Ok(Outcome::new(
        worst_power <= 1e-6 && worst_kappa <= 1e-6,
        format!(
            "max power error {worst_power:.1e} (both variants), max kappa error {worst_kappa:.1e}"
        ),
        json!(digest),
    ))
}

fn structure_detection() -> Result<Outcome> {
    let kappa_fn = parse_function("kappa")?;
    let p = Partition::new(2, 3, 2);
    let mut stream = Stream::new(9100);
    let mut decomposed = 0;
    let mut worst = 0.0f64;
    let mut digest = Vec::new();
    for i in 0..100u64 {
        let a = generate(&GenSpec::new(Family::TriviBlock, p, 9000 + i))?;
        let s = detect_structure(&a, &p, DEFAULT_STRUCTURE_TOL)?;
        let r = ssa_gap(&kappa_fn, &a, &p, Form::Compressed, DEFAULT_TOL_REL)?;
        let b = blocks(&a, &p)?;
        let a22_ev = eigenvalues(&b.a22)?;
        // each cross term is measured against ‖A₁₂‖·‖g(A₂₂)‖·‖A₂₃‖, its size
        // before any cancellation
        let mut cross = 0.0f64;
        for _ in 0..10 {
            let degree = stream.below(ssa_lab::ssa::MAX_POLY_DEGREE + 1);
            let g = stream.gaussians(degree + 1);
            let g_norm = a22_ev
                .iter()
                .map(|&l| g.iter().rev().fold(0.0, |acc, c| acc * l + c).powi(2))
                .sum::<f64>()
                .sqrt();
            let size = b.a12.frobenius() * g_norm * b.a23.frobenius();
            let term = stone_weierstrass_check(&a, &p, &[g])?;
            cross = cross.max(if size > 0.0 { term / size } else { term });
        }
        let residual = [
            s.invariance_residual,
            s.range_residual,
            s.kernel_residual,
            r.gap.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / scale(&a);
        let residual = residual.max(cross);
        worst = worst.max(residual);
        decomposed += usize::from(s.decomposable);
        digest.push(json!([s.krylov_dim, s.decomposable, r.gap, cross]));
    }
    let mut generic_flagged = 0;
    for i in 0..100u64 {
        let a = generate(&GenSpec::new(Family::GenericSpd, p, 9500 + i))?;
        let s = detect_structure(&a, &p, DEFAULT_STRUCTURE_TOL)?;
        generic_flagged += usize::from(s.decomposable);
        digest.push(json!(s.decomposable));
    }
    Ok(Outcome::new(
        decomposed == 100 && generic_flagged == 0 && worst <= 1e-8,
        format!(
            "{decomposed}/100 structured decomposable, max residual/scale {worst:.1e}; {generic_flagged}/100 generic flagged"
        ),
        json!(digest),
    ))
}

fn majorization_pinching() -> Result<Outcome> {
    let concave: Vec<_> = [
        "log",
        "kappa",
        "power:t=0.5",
        "neg_square",
        "neg_inverse",
        "shifted_entropy:c=1",
        "f_p:p=0.3",
    ]
    .iter()
    .map(|s| parse_function(s))
    .collect::<Result<_>>()?;
    let mut stream = Stream::new(10_000);
    let mut majorized = true;
    let mut worst_jensen = f64::INFINITY;
    let mut digest = Vec::new();
    for _ in 0..500 {
        let n = 2 + stream.below(6);
        let a = random_spd(&mut stream, n, DEFAULT_EPS);
        let ev = eigenvalues(&a)?;
        for k in 1..n {
            let pk = pinch(&a, k)?;
            let m = majorizes(&ev, &eigenvalues(&pk)?)?;
            majorized &= m.holds;
            digest.push(m.min_slack);
            for f in &concave {
                let (ta, tp) = (trace_f(f, &a)?, trace_f(f, &pk)?);
                let tol = 1e-9 * ta.abs().max(tp.abs()).max(1.0);
                worst_jensen = worst_jensen.min((tp - ta) / tol);
            }
        }
    }
    Ok(Outcome::new(
        majorized && worst_jensen >= -1.0,
        format!(
            "majorization holds = {majorized}; min (Tr f(pinch) − Tr f(A))/tol {worst_jensen:.3e}"
        ),
        json!(digest),
    ))
}

const RERUN: &[(usize, Criterion)] = &[
    (2, catalog_scan),
    (3, falsification),
    (4, neg_square_closed_form),
    (5, log_equality),
    (6, zero_cancellation),
    (7, monotonicity_evidence),
    (8, integral_representations),
    (9, structure_detection),
    (10, majorization_pinching),
];

fn cli_json(args: &[&str]) -> Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("ssa-lab").chain(args.iter().copied()))
        .expect("acceptance arguments parse");
    Ok(execute(&cli)?.json)
}

fn determinism(first: &[(usize, String)]) -> Result<Outcome> {
    let mut mismatched: Vec<String> = Vec::new();
    for ((id, run), (_, digest)) in RERUN.iter().zip(first) {
        if run()?.digest != *digest {
            mismatched.push(format!("criterion {id}"));
        }
    }

    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/");
    let ando = format!("{data}ando.mat");
    let log_eq = format!("{data}log_eq.mat");
    let commands: Vec<Vec<&str>> = vec![
        vec!["--ci", "ando"],
        vec!["--ci", "check", &ando, "1,1,1", "neg_inverse"],
        vec![
            "--ci",
            "--seed",
            "11",
            "scan",
            "--function",
            "kappa",
            "--dims",
            "2,2,2",
            "--trials",
            "300",
        ],
        vec![
            "--ci",
            "--seed",
            "7",
            "search",
            "--function",
            "neg_inverse",
            "--iters",
            "3000",
        ],
        vec![
            "--ci",
            "--seed",
            "42",
            "monotone",
            "--function",
            "f_p:p=0.3",
            "--neg-derivative",
        ],
        vec!["--ci", "equality", "--matrix", &log_eq, "--split", "2,2,2"],
        vec!["--ci", "represent", "--check", "kappa", "--x", "2"],
    ];
    for args in &commands {
        if cli_json(args)? != cli_json(args)? {
            mismatched.push(args[1..].join(" "));
        }
    }
    Ok(Outcome::new(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!(
                "criteria 2–10 and {} CLI commands replay byte-identically",
                commands.len()
            )
        } else {
            format!("differs: {}", mismatched.join(", "))
        },
        json!(null),
    ))
}

fn report(
    id: usize,
    name: &str,
    budget: Option<f64>,
    run: impl FnOnce() -> Result<Outcome>,
) -> (bool, String) {
    let start = Instant::now();
    let outcome = run();
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail, digest) = match outcome {
        Ok(o) => {
            let in_time = budget.is_none_or(|b| secs < b);
            let detail = if in_time {
                o.detail
            } else {
                format!("{} (over {}s budget)", o.detail, budget.unwrap())
            };
            (o.pass && in_time, detail, o.digest)
        }
        Err(e) => (false, format!("error: {e}"), String::new()),
    };
    println!(
        "criterion {id:>2} {} {name} [{secs:.2}s]: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    (pass, digest)
}

fn main() -> ExitCode {
    let mut all = true;
    let (pass, _) = report(1, "ando exact reproduction", Some(1.0), ando_exact);
    all &= pass;

    let names = [
        "catalog scan",
        "falsification",
        "−x² closed form",
        "log equality",
        "f(0) cancellation",
        "monotonicity evidence",
        "integral representations",
        "structure detection",
        "majorization and pinching",
    ];
    let mut digests = Vec::new();
    for ((id, run), name) in RERUN.iter().zip(names) {
        let budget = (*id == 2).then_some(120.0);
        let (pass, digest) = report(*id, name, budget, run);
        all &= pass;
        digests.push((*id, digest));
    }

    let (pass, _) = report(11, "determinism", None, || determinism(&digests));
    all &= pass;

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
