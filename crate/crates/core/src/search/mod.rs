//! Seeded instance generation, batch scans of the gap, and hill-climbing
//! search for violations.

mod family;

use rayon::prelude::*;
use serde::Serialize;

pub use family::{Family, FAMILIES};

use crate::error::{Error, Result};
use crate::functions::ScalarFn;
use crate::matcore::{eig_sym, Partition, SymMatrix};
use crate::rng::Stream;
use crate::ssa::{ssa_gap, Form};

/// Default spectral floor added to every generated matrix.
pub const DEFAULT_EPS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    pub family: Family,
    pub dims: Partition,
    pub seed: u64,
    pub eps: f64,
}

impl GenSpec {
    pub fn new(family: Family, dims: Partition, seed: u64) -> Self {
        GenSpec {
            family,
            dims,
            seed,
            eps: DEFAULT_EPS,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dims.dim() == 0 {
            return Err(Error::ParamOutOfRange("dims must not all be zero".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::ParamOutOfRange(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// The matrix for `spec`; a pure function of the spec.
pub fn generate(spec: &GenSpec) -> Result<SymMatrix> {
    spec.validate()?;
    let mut s = Stream::new(spec.seed);
    let params = s.gaussians(spec.family.param_len(&spec.dims));
    spec.family.build(&params, &spec.dims, spec.eps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    /// Bounds on `gap / scale`; `null` stands for an infinite bound.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub count: usize,
}

/// Bin edges for `gap / scale`, symmetric in sign and logarithmic in size.
const EDGES: [f64; 6] = [-1e-2, -1e-4, -1e-8, 1e-8, 1e-4, 1e-2];

fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let mut bins: Vec<HistogramBin> = (0..=EDGES.len())
        .map(|k| HistogramBin {
            lo: k.checked_sub(1).map(|i| EDGES[i]),
            hi: EDGES.get(k).copied(),
            count: 0,
        })
        .collect();
    for &v in values {
        let k = EDGES.iter().position(|&e| v < e).unwrap_or(EDGES.len());
        bins[k].count += 1;
    }
    bins
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub function: String,
    pub family: Family,
    pub dims: [usize; 3],
    pub form: Form,
    pub seed: u64,
    pub trials: usize,
    pub evaluated: usize,
    /// Instances skipped because `f` was undefined on their spectrum.
    pub skipped: usize,
    /// Instances with `gap < −tol`.
    pub violations: usize,
    pub min_gap: f64,
    /// `min gap / scale` over instances, where `scale = max(1, Σ|traces|)`.
    pub min_scaled_gap: f64,
    /// Seed that regenerates the instance with the smallest scaled gap.
    pub argmin_seed: Option<u64>,
    pub histogram: Vec<HistogramBin>,
}

impl ScanSummary {
    /// Histogram as CSV with columns `lo,hi,count`.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("lo,hi,count\n");
        for b in &self.histogram {
            let fmt = |v: Option<f64>, inf: &str| v.map_or(inf.to_string(), crate::report::fmt_f64);
            out.push_str(&format!(
                "{},{},{}\n",
                fmt(b.lo, "-inf"),
                fmt(b.hi, "inf"),
                b.count
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanConfig {
    pub family: Family,
    pub dims: Partition,
    pub trials: usize,
    pub seed: u64,
    pub eps: f64,
    pub form: Form,
    pub tol_rel: f64,
}

/// Evaluates the gap on `trials` instances, trial `i` generated from seed
/// `seed + i`. Trials run in parallel; the summary does not depend on
/// scheduling.
pub fn scan(f: &ScalarFn, cfg: &ScanConfig) -> Result<ScanSummary> {
    if cfg.trials == 0 {
        return Err(Error::ParamOutOfRange("trials must be at least 1".into()));
    }
    GenSpec::new(cfg.family, cfg.dims, cfg.seed)
        .with_eps(cfg.eps)
        .validate()?;
    let outcomes: Vec<Result<(f64, f64, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let spec = GenSpec::new(cfg.family, cfg.dims, cfg.seed.wrapping_add(i as u64))
                .with_eps(cfg.eps);
            let a = generate(&spec)?;
            let r = ssa_gap(f, &a, &cfg.dims, cfg.form, cfg.tol_rel)?;
            Ok((r.gap, r.tol, r.tol / cfg.tol_rel))
        })
        .collect();

    let mut skipped = 0;
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    let mut min_scaled = f64::INFINITY;
    let mut argmin = None;
    let mut scaled = Vec::with_capacity(cfg.trials);
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok((gap, tol, scale)) => {
                if gap < -tol {
                    violations += 1;
                }
                min_gap = min_gap.min(gap);
                let s = gap / scale;
                if s < min_scaled {
                    min_scaled = s;
                    argmin = Some(cfg.seed.wrapping_add(i as u64));
                }
                scaled.push(s);
            }
            Err(Error::Domain { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(ScanSummary {
        function: f.spec_string(),
        family: cfg.family,
        dims: cfg.dims.as_array(),
        form: cfg.form,
        seed: cfg.seed,
        trials: cfg.trials,
        evaluated: scaled.len(),
        skipped,
        violations,
        min_gap,
        min_scaled_gap: min_scaled,
        argmin_seed: argmin,
        histogram: histogram(&scaled),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub function: String,
    pub family: Family,
    pub dims: [usize; 3],
    pub seed: u64,
    pub iterations: usize,
    pub restarts: usize,
    pub best_gap: f64,
    /// Tolerance of the best instance's report.
    pub tol: f64,
    pub violated: bool,
    pub best_matrix: SymMatrix,
    /// `(iteration, gap)` at every improvement of the best gap; iteration 0
    /// is the starting point.
    pub trace: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub family: Family,
    pub dims: Partition,
    pub iters: usize,
    pub seed: u64,
    pub step0: f64,
    pub eps: f64,
    pub tol_rel: f64,
    /// Optional starting matrix; only the generic family can be seeded.
    pub start: Option<SymMatrix>,
}

impl SearchConfig {
    pub fn new(family: Family, dims: Partition, iters: usize, seed: u64) -> Self {
        SearchConfig {
            family,
            dims,
            iters,
            seed,
            step0: 0.1,
            eps: DEFAULT_EPS,
            tol_rel: crate::ssa::DEFAULT_TOL_REL,
            start: None,
        }
    }
}

/// Consecutive non-improving steps before the step size is halved.
pub const HALVE_AFTER: usize = 20;
/// Consecutive non-improving steps before a random restart.
pub const RESTART_AFTER: usize = 200;

/// Factor parameters for a given matrix: `G = (A − eps·I)^{1/2}`, so that
/// `GᵀG + eps·I` reproduces `A` up to rounding.
fn factor_params(a: &SymMatrix, eps: f64) -> Result<Vec<f64>> {
    let eig = eig_sym(a)?;
    let roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|l| (l - eps).max(0.0).sqrt())
        .collect();
    Ok(eig.reconstruct(&roots).as_mat().as_slice().to_vec())
}

/// Minimizes the gap by Gaussian perturbation of the family parameters.
///
/// A step is accepted only if it lowers the gap of the current point. The
/// step size halves after every [`HALVE_AFTER`] consecutive rejections, and
/// after [`RESTART_AFTER`] the search restarts from a fresh draw at the
/// initial step size. Points where `f` is undefined count as rejections.
/// The whole trajectory is a function of the seed.
pub fn falsify(f: &ScalarFn, cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.iters == 0 {
        return Err(Error::ParamOutOfRange("iters must be at least 1".into()));
    }
    if !(cfg.step0 > 0.0 && cfg.step0.is_finite()) {
        return Err(Error::ParamOutOfRange(format!(
            "step must be positive, got {}",
            cfg.step0
        )));
    }
    GenSpec::new(cfg.family, cfg.dims, cfg.seed)
        .with_eps(cfg.eps)
        .validate()?;
    let len = cfg.family.param_len(&cfg.dims);
    let mut s = Stream::new(cfg.seed);

    let eval = |params: &[f64]| -> Option<(f64, f64)> {
        let a = cfg.family.build(params, &cfg.dims, cfg.eps).ok()?;
        let r = ssa_gap(f, &a, &cfg.dims, Form::Compressed, cfg.tol_rel).ok()?;
        r.gap.is_finite().then_some((r.gap, r.tol))
    };
    let fresh = |s: &mut Stream| -> (Vec<f64>, Option<(f64, f64)>) {
        let mut last = s.gaussians(len);
        for _ in 0..100 {
            if let Some(v) = eval(&last) {
                return (last, Some(v));
            }
            last = s.gaussians(len);
        }
        (last, None)
    };

    let (mut params, mut current) = match &cfg.start {
        Some(a) => {
            if cfg.family != Family::GenericSpd {
                return Err(Error::ParamOutOfRange(
                    "a start matrix can only seed the generic_spd family".into(),
                ));
            }
            cfg.dims.check(a)?;
            let p = factor_params(a, cfg.eps)?;
            let v = eval(&p);
            (p, v)
        }
        None => fresh(&mut s),
    };
    let Some(start) = current else {
        return Err(Error::domain(
            f64::NAN,
            format!("`{}` is undefined on every starting instance", f.name()),
        ));
    };
    let mut best = (start.0, start.1, params.clone());
    let mut trace = vec![(0, start.0)];
    let mut step = cfg.step0;
    let mut stall = 0;
    let mut restarts = 0;

    for it in 1..=cfg.iters {
        let cand: Vec<f64> = params.iter().map(|p| p + step * s.gaussian()).collect();
        let cur_gap = current.map_or(f64::INFINITY, |c| c.0);
        match eval(&cand) {
            Some((gap, tol)) if gap < cur_gap => {
                params = cand;
                current = Some((gap, tol));
                stall = 0;
                if gap < best.0 {
                    best = (gap, tol, params.clone());
                    trace.push((it, gap));
                }
            }
            _ => {
                stall += 1;
                if stall % HALVE_AFTER == 0 {
                    step *= 0.5;
                }
                if stall >= RESTART_AFTER {
                    let (p, v) = fresh(&mut s);
                    params = p;
                    current = v;
                    step = cfg.step0;
                    stall = 0;
                    restarts += 1;
                    if let Some((gap, tol)) = v {
                        if gap < best.0 {
                            best = (gap, tol, params.clone());
                            trace.push((it, gap));
                        }
                    }
                }
            }
        }
    }

    let (best_gap, tol, best_params) = best;
    Ok(SearchResult {
        function: f.spec_string(),
        family: cfg.family,
        dims: cfg.dims.as_array(),
        seed: cfg.seed,
        iterations: cfg.iters,
        restarts,
        best_gap,
        tol,
        violated: best_gap < -tol,
        best_matrix: cfg.family.build(&best_params, &cfg.dims, cfg.eps)?,
        trace,
    })
}
