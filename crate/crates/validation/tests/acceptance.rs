//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run alone with `cargo test -p lowrank-validation --test acceptance`.

use std::time::{Duration, Instant};

use lowrank_core::concentration::{
    bernstein_tail_experiment, golden_thompson_gap, lie_product_errors, lieb_concavity_probe,
    MatrixEnsemble,
};
use lowrank_core::linalg::{
    eigenvalue_triangle_gap, frobenius_inner, nuclear_duality_gap, nuclear_norm, singular_triangle_gap, svd,
    sym_operator_norm, DenseMatrix,
};
use lowrank_core::prob::{
    approx_caratheodory, chi2_tail_experiment, jl_embed, jl_min_dim, rademacher_tail_experiment, radius,
    run_trials, scalar_bernstein_bound, three_sigma_half_width, PointSet, RngStream,
};
use lowrank_core::recovery::{
    affine_project, complete, golfing_batch_count, golfing_batch_size, golfing_certificate,
    tangent_operator_concentration, tangent_sample_count, svt, verify_certificate, AffineProjector,
    Measurement, SolverConfig,
};
use lowrank_core::sensing::{gaussian_map_new, sparse_rip_constant, OperatorBasis, SamplingOperator, TangentProjector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gaussian(r: &mut RngStream, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| r.normal())
}

fn symmetric(r: &mut RngStream, n: usize) -> DenseMatrix {
    let g = gaussian(r, n, n);
    (&g + &g.transpose()).scale(0.5)
}

fn spd(r: &mut RngStream, n: usize) -> DenseMatrix {
    let g = gaussian(r, n, n);
    &g.t_matmul(&g) + &DenseMatrix::identity(n).scale(0.1)
}

fn ones_rank1(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| 1.0 / n as f64)
}

fn c01_caratheodory() -> Outcome {
    let n = 10;
    let set = PointSet::new((0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect()).unwrap();
    let w = vec![1.0 / n as f64; n];
    let big_n = 100;
    let reps = 1000;
    let errs = run_trials(&RngStream::new(101, 0), reps, |_, r| {
        approx_caratheodory(&set, &w, big_n, r).unwrap().1
    });
    let rms = (errs.iter().map(|e| e * e).sum::<f64>() / reps as f64).sqrt();
    let limit = 1.05 * radius(&set) / (big_n as f64).sqrt();
    outcome(rms <= limit, format!("rms {rms:.5} <= {limit:.5}"))
}

fn c02_chi2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, eps) in [0.2, 0.5].into_iter().enumerate() {
        let rep = chi2_tail_experiment(50, eps, 100_000, &mut RngStream::new(102, k as u64)).unwrap();
        for (name, t) in [("upper", &rep.upper), ("lower", &rep.lower)] {
            let hw = three_sigma_half_width(t.empirical[0], t.trials);
            ok &= t.empirical[0] <= t.bound[0] + hw;
            parts.push(format!("eps {eps} {name} {:.4}<={:.4}", t.empirical[0], t.bound[0]));
        }
    }
    outcome(ok, parts.join(", "))
}

fn c03_jl() -> Outcome {
    let mut r = RngStream::new(103, 0);
    let set = PointSet::new((0..20).map(|_| r.normal_vec(500)).collect()).unwrap();
    let m = 2 * jl_min_dim(20, 0.5).unwrap();
    let trials = 200;
    let ok_count = run_trials(&RngStream::new(103, 1), trials, |_, r| jl_embed(&set, 0.5, m, r).unwrap().within_eps)
        .into_iter()
        .filter(|&b| b)
        .count();
    outcome(ok_count * 100 >= 99 * trials, format!("m {m}, {ok_count}/{trials} within eps"))
}

fn c04_duality() -> Outcome {
    let res = run_trials(&RngStream::new(104, 0), 100, |_, r| {
        let a = gaussian(r, 5, 7);
        let probe = nuclear_duality_gap(&a, 10_000, r).unwrap();
        let nuc = nuclear_norm(&a).unwrap();
        let f = svd(&a, 0.0).unwrap();
        let b = &f.u * &f.v.transpose();
        let attained = frobenius_inner(&a, &b).unwrap();
        (
            probe.best_probe <= probe.exact + 1e-9,
            (probe.exact - nuc).abs() <= 1e-9,
            (attained - nuc).abs() <= 1e-10,
        )
    });
    let probes = res.iter().filter(|x| x.0).count();
    let exact = res.iter().filter(|x| x.1).count();
    let attained = res.iter().filter(|x| x.2).count();
    outcome(
        probes == 100 && exact == 100 && attained == 100,
        format!("probe<=exact {probes}/100, exact=nuclear {exact}/100, UV^T attains {attained}/100"),
    )
}

fn c05_lidskii() -> Outcome {
    let mut r = RngStream::new(105, 0);
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..1000 {
        let (l, h) = eigenvalue_triangle_gap(&symmetric(&mut r, 6), &symmetric(&mut r, 6)).unwrap();
        worst = worst.min(h - l);
        let (l, h) = singular_triangle_gap(&gaussian(&mut r, 5, 7), &gaussian(&mut r, 5, 7)).unwrap();
        worst = worst.min(h - l);
    }
    outcome(worst >= -1e-9, format!("min slack {worst:.3e}"))
}

fn c06_golden_thompson_lie() -> Outcome {
    let mut r = RngStream::new(106, 0);
    let mut gt_ok = 0;
    for _ in 0..1000 {
        let (l, h) = golden_thompson_gap(&symmetric(&mut r, 6), &symmetric(&mut r, 6)).unwrap();
        gt_ok += (l <= h + 1e-9 * h.abs()) as usize;
    }
    let mut lie_ok = 0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let a = symmetric(&mut r, 6);
        let a = a.scale(1.0 / sym_operator_norm(&a).unwrap());
        let b = symmetric(&mut r, 6);
        let b = b.scale(1.0 / sym_operator_norm(&b).unwrap());
        let e = lie_product_errors(&a, &b, &[64, 128]).unwrap();
        let ratio = e[0] / e[1];
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        lie_ok += (1.6..=2.4).contains(&ratio) as usize;
    }
    outcome(
        gt_ok == 1000 && lie_ok == 100,
        format!("golden-thompson {gt_ok}/1000, lie ratio in [{lo:.3}, {hi:.3}]"),
    )
}

fn c07_lieb() -> Outcome {
    let mut r = RngStream::new(107, 0);
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..1000 {
        let h = symmetric(&mut r, 5);
        let a = spd(&mut r, 5);
        let b = spd(&mut r, 5);
        worst = worst.min(lieb_concavity_probe(&h, &a, &b).unwrap());
    }
    outcome(worst >= -1e-9, format!("min gap {worst:.3e}"))
}

fn c08_bernstein() -> Outcome {
    let ts = [10.0, 14.0, 18.0, 22.0, 26.0];
    let rep = bernstein_tail_experiment(&MatrixEnsemble::RandomDyad(8), 200, &ts, 10_000, &RngStream::new(108, 0)).unwrap();
    let matrix_ok = rep.violations().is_empty();

    let scalar_ts = [10.0, 20.0];
    let rng = RngStream::new(108, 1);
    let scalar = rademacher_tail_experiment(100, &scalar_ts, 10_000, &rng).unwrap();
    let one = MatrixEnsemble::RademacherWeighted(vec![DenseMatrix::identity(1)]);
    let reduced = bernstein_tail_experiment(&one, 100, &scalar_ts, 10_000, &rng).unwrap();
    let same = reduced.empirical == scalar.empirical
        && scalar_ts
            .iter()
            .enumerate()
            .all(|(i, &t)| reduced.bound_theo_bern1[i] == scalar_bernstein_bound(100, 1.0, t));
    let scalar_ok = scalar.violations().is_empty();
    outcome(
        matrix_ok && same && scalar_ok,
        format!(
            "dyad empirical {:?} vs min bound {:?}; n=1 reduction identical: {same}",
            rep.empirical,
            rep.bound_min.iter().map(|b| format!("{b:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn c09_sparse_rip() -> Outcome {
    let (m, n) = (200, 12);
    let deltas = run_trials(&RngStream::new(109, 0), 100, |_, r| {
        let s = 1.0 / (m as f64).sqrt();
        let a = DenseMatrix::from_fn(m, n, |_, _| r.normal() * s);
        sparse_rip_constant(&a, 2).unwrap()
    });
    let good = deltas.iter().filter(|&&d| d < 1.0 / 3.0).count();
    let mut sorted = deltas.clone();
    sorted.sort_by(f64::total_cmp);
    outcome(
        good >= 95,
        format!("delta_2 < 1/3 in {good}/100 seeds (median {:.3}, 95th pct {:.3})", sorted[50], sorted[95]),
    )
}

fn c10_sampling_expectation() -> Outcome {
    let n = 10;
    let mut r = RngStream::new(110, 0);
    let z = gaussian(&mut r, n, n);
    let draws = 10_000;
    let mut acc = DenseMatrix::zeros(n, n);
    for _ in 0..draws {
        let op = SamplingOperator::random(OperatorBasis::entry(n), n * n, true, &mut r).unwrap();
        acc += &op.apply(&z).unwrap();
    }
    let err = (&acc.scale(1.0 / draws as f64) - &z).frobenius_norm() / z.frobenius_norm();
    outcome(err <= 0.02, format!("relative error {err:.4}"))
}

fn c11_tangent_concentration() -> Outcome {
    let n = 15;
    let a = ones_rank1(n);
    let p = TangentProjector::from_matrix(&a, 1e-10).unwrap();
    let m = tangent_sample_count(n, 1, 1.0, 1e-2).unwrap();
    let rep = tangent_operator_concentration(&OperatorBasis::entry(n), &p, m, 1000, &[0.5], &mut RngStream::new(111, 0)).unwrap();
    outcome(
        rep.violations().is_empty(),
        format!("m {m}, empirical {:.4} vs bound {:.4}", rep.empirical[0], rep.bound[0]),
    )
}

fn c12_golfing() -> Outcome {
    let (n, r) = (20, 1);
    let a = ones_rank1(n);
    let p = TangentProjector::from_matrix(&a, 1e-10).unwrap();
    let l = golfing_batch_count(n, r);
    let mi = golfing_batch_size(1.0, r, n, l, 1.0);
    let basis = OperatorBasis::entry(n);
    let good = run_trials(&RngStream::new(112, 0), 20, |_, rng| {
        let cert = golfing_certificate(&basis, &a, &p, &vec![mi; l], true, rng).unwrap();
        let check = verify_certificate(&cert, &a, &p, n).unwrap();
        check.all() && cert.halves_each_step()
    })
    .into_iter()
    .filter(|&b| b)
    .count();
    outcome(good >= 18, format!("l {l}, m_i {mi}, certified {good}/20"))
}

fn c13_completion() -> Outcome {
    let n = 20;
    let nf = n as f64;
    let m = (2.0 * nf * nf.ln().powi(2)).ceil() as usize;
    let cfg = SolverConfig::default();
    let a = ones_rank1(n);
    let errs = run_trials(&RngStream::new(113, 0), 20, |_, r| {
        let op = SamplingOperator::random(OperatorBasis::entry(n), m, true, r).unwrap();
        let meas = Measurement::Sampling(op);
        let y = meas.measure(&a).unwrap();
        let rep = complete(&meas, &y, &cfg).unwrap();
        (&rep.solution - &a).frobenius_norm() / a.frobenius_norm()
    });
    let recovered = errs.iter().filter(|&&e| e <= 1e-4).count();

    let mut spike = DenseMatrix::zeros(n, n);
    spike[(0, 0)] = 1.0;
    let ms = n * n / 4;
    let spike_errs = run_trials(&RngStream::new(113, 1), 20, |_, r| {
        let op = SamplingOperator::random(OperatorBasis::entry(n), ms, true, r).unwrap();
        let meas = Measurement::Sampling(op);
        let y = meas.measure(&spike).unwrap();
        let rep = complete(&meas, &y, &cfg).unwrap();
        (&rep.solution - &spike).frobenius_norm()
    });
    let failed = spike_errs.iter().filter(|&&e| e >= 0.5).count();
    outcome(
        recovered >= 18 && failed >= 10,
        format!("m {m}: recovered {recovered}/20; spiked m {ms}: failed {failed}/20"),
    )
}

fn c14_solver_contracts() -> Outcome {
    let mut r = RngStream::new(114, 0);
    let tau = 0.7;
    let obj = |z: &DenseMatrix, a: &DenseMatrix| tau * nuclear_norm(z).unwrap() + 0.5 * (z - a).frobenius_norm().powi(2);
    let mut beaten = 0;
    for _ in 0..50 {
        let a = gaussian(&mut r, 5, 6);
        let p = svt(&a, tau).unwrap();
        let best = obj(&p, &a);
        for k in 0..1000 {
            let scale = 10f64.powi(-(k % 4));
            let d = DenseMatrix::from_fn(5, 6, |_, _| r.normal() * scale);
            beaten += (obj(&(&p + &d), &a) < best - 1e-12) as usize;
        }
    }

    let mut worst: f64 = 0.0;
    let n = 6;
    for k in 0..20 {
        let meas = if k % 2 == 0 {
            Measurement::Sampling(SamplingOperator::random(OperatorBasis::entry(n), 20, true, &mut r).unwrap())
        } else {
            Measurement::Gaussian(gaussian_map_new(&mut r, 15, n, n).unwrap())
        };
        let a = gaussian(&mut r, n, n);
        let y = meas.measure(&a).unwrap();
        let proj = AffineProjector::new(&meas, &y).unwrap();
        let z = gaussian(&mut r, n, n);
        let p1 = proj.project(&z).unwrap();
        let p2 = affine_project(&meas, &y, &p1).unwrap();
        worst = worst.max(p1.max_abs_diff(&p2)).max(proj.residual(&p1).unwrap());
    }
    outcome(
        beaten == 0 && worst <= 1e-10,
        format!("svt beaten {beaten}/50000; projection idempotence/feasibility error {worst:.2e}"),
    )
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 14] = [
        ("approximate Caratheodory", 5, c01_caratheodory),
        ("chi-square tails", 10, c02_chi2),
        ("Johnson-Lindenstrauss", 30, c03_jl),
        ("nuclear-norm duality", 30, c04_duality),
        ("singular/eigenvalue triangle gaps", 10, c05_lidskii),
        ("Golden-Thompson and Lie formula", 20, c06_golden_thompson_lie),
        ("Lieb concavity", 10, c07_lieb),
        ("matrix Bernstein", 60, c08_bernstein),
        ("exact sparse RIP", 60, c09_sparse_rip),
        ("sampling operator expectation", 10, c10_sampling_expectation),
        ("tangent-operator concentration", 120, c11_tangent_concentration),
        ("golfing certificate", 120, c12_golfing),
        ("end-to-end completion", 300, c13_completion),
        ("solver contracts", 10, c14_solver_contracts),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let pass = out.pass && in_time;
        failures += (!pass) as usize;
        println!(
            "criterion {:>2} {:<34} {}  [{:.1}s/{}s] {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit,
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
