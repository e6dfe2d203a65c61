use serde_json::{json, Value};

use lowrank_core::concentration::{
    bernstein_tail_experiment, golden_thompson_gap, lie_product_errors, lieb_concavity_probe, MatrixEnsemble,
};
use lowrank_core::linalg::io::{format_float, matrix_to_csv, read_matrix_csv, rows_to_csv};
use lowrank_core::linalg::{default_rank_tol, sym_operator_norm, DenseMatrix};
use lowrank_core::nets::{ball_net, lowrank_net, sphere_net, stiefel_net, Net};
use lowrank_core::prob::{
    approx_caratheodory, chi2_tail_experiment, jl_embed, jl_min_dim, monte_carlo_integrate, radius, run_trials,
    PointSet, RngStream,
};
use lowrank_core::recovery::{
    complete, golfing_batch_count, golfing_batch_size, golfing_certificate, nsp_falsify, rank_nsp_falsify,
    tangent_operator_concentration, tangent_sample_count, verify_certificate, Measurement, NspReport, SolverConfig,
    Witness,
};
use lowrank_core::sensing::{
    coherence, gaussian_map_new, gaussian_rip_sample_count, matrix_rip_estimate, sparse_rip_constant,
    OperatorBasis, SamplingOperator, TangentProjector,
};

use crate::config::ExperimentConfig;
use crate::error::{usage, CliError};
use crate::params::Params;

/// CSV artifacts plus the summary written to `report.json`.
pub struct Output {
    pub files: Vec<(String, String)>,
    pub report: Value,
}

type Res = Result<Output, CliError>;

struct Ctx<'a> {
    p: Params<'a>,
    seed: u64,
    trials: usize,
}

impl Ctx<'_> {
    fn trial_stream(&self) -> RngStream {
        RngStream::new(self.seed, 0)
    }

    fn setup_stream(&self) -> RngStream {
        RngStream::new(self.seed, 1)
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Res {
    let ctx = Ctx {
        p: Params(&cfg.params),
        seed: cfg.seed,
        trials: cfg.trials,
    };
    match cfg.subcommand.as_str() {
        "caratheodory" => caratheodory(&ctx),
        "montecarlo" => montecarlo(&ctx),
        "chi2-tails" => chi2_tails(&ctx),
        "jl" => jl(&ctx),
        "nets" => nets(&ctx),
        "rip-sparse" => rip_sparse(&ctx),
        "rip-matrix" => rip_matrix(&ctx),
        "nsp" => nsp(&ctx),
        "rank-nsp" => rank_nsp(&ctx),
        "complete" => complete_cmd(&ctx),
        "golf" => golf(&ctx),
        "tangent-conc" => tangent_conc(&ctx),
        "lie" => lie(&ctx),
        "golden-thompson" => golden_thompson(&ctx),
        "lieb-probe" => lieb_probe(&ctx),
        "mat-bernstein" => mat_bernstein(&ctx),
        other => Err(usage(format!("unknown subcommand {other:?}"))),
    }
}

fn f(x: f64) -> String {
    format_float(x)
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn collect<T>(v: Vec<lowrank_core::Result<T>>) -> Result<Vec<T>, CliError> {
    v.into_iter().collect::<lowrank_core::Result<Vec<T>>>().map_err(CliError::from)
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        Err(usage(format!("{name} must be positive")))
    } else {
        Ok(v)
    }
}

fn read_text(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn symmetric(r: &mut RngStream, n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| r.normal()).symmetrized()
}

fn spd(r: &mut RngStream, n: usize) -> DenseMatrix {
    let g = DenseMatrix::from_fn(n, n, |_, _| r.normal());
    &g.t_matmul(&g) + &DenseMatrix::identity(n).scale(0.1)
}

/// The matrix in `--matrix`, or the normalized all-ones `n × n` matrix.
fn target_matrix(ctx: &Ctx) -> Result<DenseMatrix, CliError> {
    match ctx.p.text("matrix") {
        Some(path) => Ok(read_matrix_csv(path)?),
        None => {
            let n = positive("n", ctx.p.int("n"))?;
            Ok(DenseMatrix::from_fn(n, n, |_, _| 1.0 / n as f64))
        }
    }
}

fn entry_basis_for(a: &DenseMatrix) -> Result<OperatorBasis, CliError> {
    if !a.is_square() {
        return Err(usage(format!("entry sampling needs a square matrix, got {:?}", a.shape())));
    }
    Ok(OperatorBasis::entry(a.rows()))
}

fn caratheodory(ctx: &Ctx) -> Res {
    let set = match ctx.p.text("points") {
        Some(path) => PointSet::from_csv(&read_text(path)?)?,
        None => {
            let d = positive("dim", ctx.p.int("dim"))?;
            PointSet::new((0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())?
        }
    };
    let w = ctx.p.floats("weights").unwrap_or_else(|| vec![1.0 / set.len() as f64; set.len()]);
    let big_n = ctx.p.int("n_points");
    let errs = collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, r| {
        approx_caratheodory(&set, &w, big_n, r).map(|x| x.1)
    }))?;
    let x = set.convex_combination(&w)?;
    let rad = radius(&set);
    let x_sq: f64 = x.iter().map(|v| v * v).sum();
    Ok(Output {
        files: vec![(
            "errors.csv".into(),
            csv("trial,error", errs.iter().enumerate().map(|(i, e)| format!("{i},{}", f(*e)))),
        )],
        report: json!({
            "rms_error": rms(&errs),
            "rms_bound": rad / (big_n as f64).sqrt(),
            "mean_square_bound": (rad * rad - x_sq) / big_n as f64,
            "radius": rad,
        }),
    })
}

fn montecarlo(ctx: &Ctx) -> Res {
    let (fun, exact, l2): (fn(f64) -> f64, f64, f64) = match ctx.p.text("integrand").unwrap_or_default() {
        "identity" => (|x| x, 0.5, 1.0 / 3f64.sqrt()),
        "indicator" => (|x| if x < 0.5 { 1.0 } else { 0.0 }, 0.5, 0.5f64.sqrt()),
        "square" => (|x| x * x, 1.0 / 3.0, 1.0 / 5f64.sqrt()),
        other => return Err(usage(format!("unknown integrand {other:?}"))),
    };
    let n = ctx.p.int("n");
    let est = collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, r| {
        monte_carlo_integrate(
            |r| {
                let x = r.uniform();
                (x, fun(x))
            },
            n,
            Some(l2),
            r,
        )
    }))?;
    let errs: Vec<f64> = est.iter().map(|e| e.estimate - exact).collect();
    Ok(Output {
        files: vec![(
            "estimates.csv".into(),
            csv(
                "trial,estimate,error",
                est.iter().zip(&errs).enumerate().map(|(i, (e, d))| format!("{i},{},{}", f(e.estimate), f(*d))),
            ),
        )],
        report: json!({
            "exact": exact,
            "rms_error": rms(&errs),
            "rms_bound": est[0].rms_bound,
        }),
    })
}

fn chi2_tails(ctx: &Ctx) -> Res {
    let rep = chi2_tail_experiment(ctx.p.int("m"), ctx.p.float("eps"), ctx.trials, &mut ctx.trial_stream())?;
    Ok(Output {
        files: vec![("upper.csv".into(), rep.upper.to_csv()), ("lower.csv".into(), rep.lower.to_csv())],
        report: json!({
            "bound": rep.upper.bound[0],
            "upper_empirical": rep.upper.empirical[0],
            "lower_empirical": rep.lower.empirical[0],
            "within_contract": rep.within_contract(),
        }),
    })
}

fn jl(ctx: &Ctx) -> Res {
    let set = match ctx.p.text("points") {
        Some(path) => PointSet::from_csv(&read_text(path)?)?,
        None => {
            let mut r = ctx.setup_stream();
            let dim = positive("dim", ctx.p.int("dim"))?;
            PointSet::new((0..ctx.p.int("n_points")).map(|_| r.normal_vec(dim)).collect())?
        }
    };
    let eps = ctx.p.float("eps");
    let min_dim = jl_min_dim(set.len(), eps)?;
    let m = ctx.p.opt_int("m").unwrap_or(min_dim);
    let runs = collect(run_trials(&ctx.trial_stream(), ctx.trials, |i, r| {
        jl_embed(&set, eps, m, r).map(|e| (e.max_distortion, e.within_eps, (i == 0).then_some(e.embedded)))
    }))?;
    let ok = runs.iter().filter(|x| x.1).count();
    let embedded = runs[0].2.as_ref().expect("first trial keeps its embedding");
    Ok(Output {
        files: vec![
            ("embedded.csv".into(), embedded.to_csv()),
            (
                "distortions.csv".into(),
                csv(
                    "trial,max_distortion,within_eps",
                    runs.iter().enumerate().map(|(i, x)| format!("{i},{},{}", f(x.0), x.1)),
                ),
            ),
        ],
        report: json!({
            "m": m,
            "min_dim": min_dim,
            "success_fraction": ok as f64 / runs.len() as f64,
            "worst_distortion": runs.iter().map(|x| x.0).fold(0.0, f64::max),
        }),
    })
}

fn nets(ctx: &Ctx) -> Res {
    let (n, k, big_n, r) = (ctx.p.int("n"), ctx.p.int("k"), ctx.p.int("big_n"), ctx.p.int("r"));
    let eps = ctx.p.float("eps");
    let cap = ctx.p.int("cap");
    let mut rng = ctx.trial_stream();
    let (net, log_bound): (Net, f64) = match ctx.p.text("kind").unwrap_or_default() {
        "sphere" => (sphere_net(n, eps, &mut rng, cap)?, n as f64 * (1.0 + 2.0 / eps).ln()),
        "ball" => (ball_net(n, eps, &mut rng, cap)?, n as f64 * (1.0 + 2.0 / eps).ln()),
        "stiefel" => (stiefel_net(n, k, eps, &mut rng, cap)?, (n * k) as f64 * (1.0 + 2.0 / eps).ln()),
        "lowrank" => (
            lowrank_net(n, big_n, r, eps, &mut rng, cap)?,
            (r * (n + big_n + 1)) as f64 * (1.0 + 10.0 / eps).ln(),
        ),
        other => return Err(usage(format!("unknown net kind {other:?}"))),
    };
    let max_projection = net.projection_distance.as_ref().map(|d| d.iter().copied().fold(0.0, f64::max));
    Ok(Output {
        files: vec![("net.csv".into(), net.to_csv()), ("net.json".into(), net.sidecar_json())],
        report: json!({
            "size": net.len(),
            "cardinality_bound": log_bound.exp(),
            "max_projection_distance": max_projection,
        }),
    })
}

fn rip_sparse(ctx: &Ctx) -> Res {
    let k = ctx.p.int("k");
    let deltas = match ctx.p.text("matrix") {
        Some(path) => vec![sparse_rip_constant(&read_matrix_csv(path)?, k)?],
        None => {
            let (m, n) = (positive("m", ctx.p.int("m"))?, ctx.p.int("n"));
            let s = 1.0 / (m as f64).sqrt();
            collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, r| {
                sparse_rip_constant(&DenseMatrix::from_fn(m, n, |_, _| r.normal() * s), k)
            }))?
        }
    };
    let threshold = ctx.p.float("threshold");
    let below = deltas.iter().filter(|&&d| d < threshold).count();
    Ok(Output {
        files: vec![(
            "deltas.csv".into(),
            csv("trial,delta", deltas.iter().enumerate().map(|(i, d)| format!("{i},{}", f(*d)))),
        )],
        report: json!({
            "threshold": threshold,
            "count_below": below,
            "fraction_below": below as f64 / deltas.len() as f64,
            "max_delta": deltas.iter().copied().fold(0.0, f64::max),
        }),
    })
}

fn rip_matrix(ctx: &Ctx) -> Res {
    let (n, big_n, r, m) = (ctx.p.int("n"), ctx.p.int("big_n"), ctx.p.int("r"), ctx.p.int("m"));
    let probes = ctx.p.int("probes");
    let est = collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, rng| {
        gaussian_map_new(rng, m, n, big_n).and_then(|map| matrix_rip_estimate(&map, r, probes, rng))
    }))?;
    let count = gaussian_rip_sample_count(r, n, big_n, ctx.p.float("eps"), ctx.p.float("delta"))?;
    Ok(Output {
        files: vec![(
            "estimates.csv".into(),
            csv("trial,delta_estimate", est.iter().enumerate().map(|(i, d)| format!("{i},{}", f(*d)))),
        )],
        report: json!({
            "m": m,
            "sample_count_for_delta": count,
            "max_estimate": est.iter().copied().fold(0.0, f64::max),
        }),
    })
}

fn nsp_output(rep: &NspReport) -> Output {
    let mut files = Vec::new();
    match &rep.witness {
        Some(Witness::Vector(v)) => files.push(("witness.csv".into(), rows_to_csv([v.as_slice()]))),
        Some(Witness::Matrix(m)) => files.push(("witness.csv".into(), matrix_to_csv(m))),
        None => {}
    }
    Output {
        files,
        report: json!({
            "violated": rep.violated,
            "margin": rep.margin,
            "budget_used": rep.budget_used,
            "trivial_kernel": rep.trivial_kernel,
        }),
    }
}

fn nsp(ctx: &Ctx) -> Res {
    let a = match ctx.p.text("matrix") {
        Some(path) => read_matrix_csv(path)?,
        None => {
            let mut r = ctx.setup_stream();
            DenseMatrix::from_fn(ctx.p.int("m"), ctx.p.int("n"), |_, _| r.normal())
        }
    };
    let rep = nsp_falsify(&a, ctx.p.int("k"), ctx.p.int("budget"), &mut ctx.trial_stream())?;
    Ok(nsp_output(&rep))
}

fn measurement(ctx: &Ctx, kind: &str, n: usize, big_n: usize, m: usize) -> Result<Measurement, CliError> {
    let mut r = ctx.setup_stream();
    match kind {
        "gaussian" => Ok(Measurement::Gaussian(gaussian_map_new(&mut r, m, n, big_n)?)),
        "sampling" => {
            if n != big_n {
                return Err(usage(format!("entry sampling needs a square matrix, got ({n}, {big_n})")));
            }
            Ok(Measurement::Sampling(SamplingOperator::random(
                OperatorBasis::entry(n),
                m,
                ctx.p.bool("replacement"),
                &mut r,
            )?))
        }
        other => Err(usage(format!("unknown measurement {other:?}"))),
    }
}

fn rank_nsp(ctx: &Ctx) -> Res {
    let n = ctx.p.int("n");
    let meas = measurement(ctx, ctx.p.text("measurement").unwrap_or_default(), n, n, ctx.p.int("m"))?;
    let rep = rank_nsp_falsify(&meas, ctx.p.int("r"), ctx.p.int("budget"), &mut ctx.trial_stream())?;
    Ok(nsp_output(&rep))
}

fn complete_cmd(ctx: &Ctx) -> Res {
    if ctx.p.text("basis") != Some("entry") {
        return Err(usage("only the entry basis is available from the command line"));
    }
    let a = target_matrix(ctx)?;
    let (rows, cols) = a.shape();
    let m = match ctx.p.opt_int("m") {
        Some(m) => m,
        None => {
            let n = rows.max(cols) as f64;
            (2.0 * n * n.ln().powi(2) - 1e-9).ceil().max(1.0) as usize
        }
    };
    let meas = measurement(ctx, ctx.p.text("measurement").unwrap_or_default(), rows, cols, m)?;
    let cfg = SolverConfig {
        step: ctx.p.float("step"),
        tol_residual: ctx.p.float("tol_residual"),
        tol_change: ctx.p.float("tol_change"),
        max_iter: ctx.p.int("max_iter"),
    };
    let y = meas.measure(&a)?;
    let rep = complete(&meas, &y, &cfg)?;
    let rel = (&rep.solution - &a).frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE);
    Ok(Output {
        files: vec![("solution.csv".into(), matrix_to_csv(&rep.solution))],
        report: json!({
            "m": m,
            "solver": cfg,
            "iterations": rep.iterations,
            "constraint_residual": rep.constraint_residual,
            "objective": rep.objective,
            "converged": rep.converged,
            "relative_error": rel,
        }),
    })
}

fn tangent_setup(ctx: &Ctx) -> Result<(DenseMatrix, OperatorBasis, TangentProjector), CliError> {
    let a = target_matrix(ctx)?;
    let basis = entry_basis_for(&a)?;
    let p = TangentProjector::from_matrix(&a, default_rank_tol(&a))?;
    Ok((a, basis, p))
}

fn golf(ctx: &Ctx) -> Res {
    let (a, basis, p) = tangent_setup(ctx)?;
    let (n, r) = (a.rows(), p.rank());
    let nu = match ctx.p.opt_float("nu") {
        Some(nu) => nu,
        None => coherence(&basis, &a, &p)?.nu_pair_max(),
    };
    let l = positive("l", ctx.p.opt_int("l").unwrap_or_else(|| golfing_batch_count(n, r)))?;
    let batch = ctx.p.opt_int("batch").unwrap_or_else(|| golfing_batch_size(nu, r, n, l, ctx.p.float("beta")));
    let cert = golfing_certificate(&basis, &a, &p, &vec![batch; l], ctx.p.bool("replacement"), &mut ctx.trial_stream())?;
    let check = verify_certificate(&cert, &a, &p, n)?;
    Ok(Output {
        files: vec![
            (
                "residuals.csv".into(),
                csv(
                    "step,residual_norm",
                    cert.residual_norms.iter().enumerate().map(|(i, z)| format!("{i},{}", f(*z))),
                ),
            ),
            ("certificate.csv".into(), matrix_to_csv(&cert.y)),
        ],
        report: json!({
            "nu": nu,
            "rank": r,
            "l": l,
            "batch_size": batch,
            "check": check,
            "certified": check.all(),
            "halves_each_step": cert.halves_each_step(),
            "cond_tangent": cert.cond_tangent,
            "cond_complement": cert.cond_complement,
            "support_size": cert.support.len(),
        }),
    })
}

fn tangent_conc(ctx: &Ctx) -> Res {
    let (a, basis, p) = tangent_setup(ctx)?;
    let nu = coherence(&basis, &a, &p)?.nu_pair.0;
    let m = match ctx.p.opt_int("m") {
        Some(m) => m,
        None => tangent_sample_count(a.rows(), p.rank(), nu, ctx.p.float("p_fail"))?,
    };
    let ts = ctx.p.floats("thresholds").unwrap_or_default();
    let rep = tangent_operator_concentration(&basis, &p, m, ctx.trials, &ts, &mut ctx.trial_stream())?;
    Ok(Output {
        files: vec![("tails.csv".into(), rep.to_csv())],
        report: json!({
            "m": m,
            "nu": nu,
            "rank": p.rank(),
            "violations": rep.violations(),
        }),
    })
}

fn lie(ctx: &Ctx) -> Res {
    let n = positive("n", ctx.p.int("n"))?;
    let ns: Vec<u32> = ctx
        .p
        .ints("ns")
        .unwrap_or_default()
        .into_iter()
        .map(|v| u32::try_from(v).map_err(|_| usage(format!("product order {v} too large"))))
        .collect::<Result<_, _>>()?;
    let errs = collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, r| {
        let a = symmetric(r, n);
        let b = symmetric(r, n);
        let a = a.scale(1.0 / sym_operator_norm(&a)?);
        let b = b.scale(1.0 / sym_operator_norm(&b)?);
        lie_product_errors(&a, &b, &ns)
    }))?;
    let rows = errs
        .iter()
        .enumerate()
        .flat_map(|(i, e)| ns.iter().zip(e).map(move |(k, v)| format!("{i},{k},{}", f(*v))));
    let mean: Vec<f64> = (0..ns.len())
        .map(|j| errs.iter().map(|e| e[j]).sum::<f64>() / errs.len() as f64)
        .collect();
    Ok(Output {
        files: vec![("errors.csv".into(), csv("trial,N,error", rows))],
        report: json!({ "ns": ns, "mean_error": mean }),
    })
}

fn golden_thompson(ctx: &Ctx) -> Res {
    let n = positive("n", ctx.p.int("n"))?;
    let gaps = collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, r| {
        let a = symmetric(r, n);
        let b = symmetric(r, n);
        golden_thompson_gap(&a, &b)
    }))?;
    let violations = gaps.iter().filter(|(l, h)| l > &(h + 1e-9 * h.abs())).count();
    Ok(Output {
        files: vec![(
            "gaps.csv".into(),
            csv("trial,lhs,rhs", gaps.iter().enumerate().map(|(i, (l, h))| format!("{i},{},{}", f(*l), f(*h)))),
        )],
        report: json!({
            "violations": violations,
            "min_relative_slack": gaps.iter().map(|(l, h)| (h - l) / h.abs()).fold(f64::INFINITY, f64::min),
        }),
    })
}

fn lieb_probe(ctx: &Ctx) -> Res {
    let n = positive("n", ctx.p.int("n"))?;
    let gaps = collect(run_trials(&ctx.trial_stream(), ctx.trials, |_, r| {
        let h = symmetric(r, n);
        let a = spd(r, n);
        let b = spd(r, n);
        lieb_concavity_probe(&h, &a, &b)
    }))?;
    Ok(Output {
        files: vec![(
            "gaps.csv".into(),
            csv("trial,gap", gaps.iter().enumerate().map(|(i, g)| format!("{i},{}", f(*g)))),
        )],
        report: json!({ "min_gap": gaps.iter().copied().fold(f64::INFINITY, f64::min) }),
    })
}

fn weight_matrices(ctx: &Ctx, n: usize) -> Result<Vec<DenseMatrix>, CliError> {
    match ctx.p.text("weights") {
        Some(path) => {
            let stacked = read_matrix_csv(path)?;
            let c = stacked.cols();
            if stacked.rows() % c != 0 {
                return Err(usage(format!("weights file has {} rows, not a multiple of {c}", stacked.rows())));
            }
            Ok((0..stacked.rows() / c)
                .map(|b| DenseMatrix::from_fn(c, c, |i, j| stacked[(b * c + i, j)]))
                .collect())
        }
        None => Ok((0..n)
            .map(|k| DenseMatrix::from_fn(n, n, |i, j| if i == k && j == k { 1.0 } else { 0.0 }))
            .collect()),
    }
}

fn mat_bernstein(ctx: &Ctx) -> Res {
    let n = ctx.p.int("n");
    let e = match ctx.p.text("ensemble").unwrap_or_default() {
        "dyad" => MatrixEnsemble::RandomDyad(n),
        "rademacher" => MatrixEnsemble::RademacherWeighted(weight_matrices(ctx, n)?),
        "gaussian" => MatrixEnsemble::GaussianWeighted(weight_matrices(ctx, n)?),
        other => return Err(usage(format!("unknown ensemble {other:?}"))),
    };
    let ts = ctx.p.floats("thresholds").unwrap_or_default();
    let rep = bernstein_tail_experiment(&e, ctx.p.int("m"), &ts, ctx.trials, &ctx.trial_stream())?;
    Ok(Output {
        files: vec![("tails.csv".into(), rep.to_csv())],
        report: json!({
            "params": rep.params,
            "regime_split": rep.regime_split,
            "violations": rep.violations(),
        }),
    })
}
