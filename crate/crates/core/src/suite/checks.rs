//! The catalog of suite rows.

use std::f64::consts::PI;

use rand::Rng;

use super::{Check, MetricKind, Outcome, SuiteConfig};
use crate::error::Result;
use crate::fracint::{
    cayley_apply, default_step, ek_integral, ek_omega_form, ek_stiefel_form, gg_continued,
    gg_distribution, gg_halfint, gg_integral, laplace, IntegralSpec, Method, Side,
    WallachParameter,
};
use crate::linalg::{loewner_lt, max_abs_diff, Mat, SpdMatrix, StiefelFrame, SymmetricMatrix};
use crate::mc::{
    draw, estimate, estimate_vec, ks_critical_1pct, ks_statistic, z_score, MonteCarloEstimate,
    SampleRng,
};
use crate::radon::{
    dual_radon, duality_sides, projection_profile, radon, rotation_to_frame, verify_dual_theorem,
    verify_radon_theorem, GrassmannConfig, TheoremCheck, ZonalFunction,
};
use crate::sampling::{
    bistiefel_compose, bistiefel_decompose, draw_interval_box, interval_box_volume,
    polar_decompose, sample_matrix_interval, sample_orthogonal, sample_stiefel,
    sample_unit_interval, standard_normal_matrix, unit_interval_dets, WishartSampler,
};
use crate::special::{
    half_dim, siegel_beta, siegel_gamma, siegel_log_gamma, stiefel_volume,
};
use crate::testfn::{Smoothness, Support, TestFunction};

const SPECIAL_TOL: f64 = 1e-10;
const ROUNDTRIP_TOL: f64 = 1e-10;

/// Every row of the suite for this configuration.
pub fn catalog(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rows = Vec::new();
    special_checks(&mut rows);
    core_checks(&mut rows);
    sampling_checks(&mut rows);
    gg_checks(&mut rows);
    ek_checks(&mut rows);
    transform_checks(&mut rows);
    radon_checks(&mut rows);
    theorem_checks(&mut rows, &cfg.dims);
    rows
}

/// A point of the unit interval with spectrum in `(0.1, 0.9)`.
fn interior_point(rank: usize, rng: &mut SampleRng) -> Result<SpdMatrix> {
    let w = sample_unit_interval(rank, rng)?;
    SpdMatrix::new(w.scale(0.8).add(&SymmetricMatrix::scaled_identity(rank, 0.1)))
}

fn describe(s: &SymmetricMatrix) -> String {
    let entries: Vec<String> = s.upper().iter().map(|x| format!("{x:.4}")).collect();
    format!("s=[{}]", entries.join(","))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn block_rotation<R: Rng + ?Sized>(n: usize, fixed: usize, rng: &mut R) -> Result<Mat> {
    let mut g = Mat::identity(n, n);
    g.view_mut((0, 0), (n - fixed, n - fixed))
        .copy_from(&sample_orthogonal(n - fixed, rng)?);
    Ok(g)
}

fn max_z(estimates: &[MonteCarloEstimate], exact: &[f64]) -> f64 {
    estimates
        .iter()
        .zip(exact)
        .map(|(e, &x)| z_score(e, &MonteCarloEstimate::exact(x)).abs())
        .fold(0.0, f64::max)
}

fn special_checks(rows: &mut Vec<Check>) {
    type Closed = (&'static str, &'static str, fn() -> Result<f64>, f64);
    let closed: [Closed; 8] = [
        ("special.gamma.l2-a1.5", "siegel-gamma", || siegel_gamma(2, 1.5), PI / 2.0),
        ("special.gamma.l2-a3", "siegel-gamma", || siegel_gamma(2, 3.0), 1.5 * PI),
        ("special.gamma.l2-a1", "siegel-gamma", || siegel_gamma(2, 1.0), PI),
        ("special.gamma.l3-a1.5", "siegel-gamma", || siegel_gamma(3, 1.5), PI.powf(2.5) / 2.0),
        ("special.beta.l2-a1.5-b1.5", "siegel-beta", || siegel_beta(2, 1.5, 1.5), PI / 6.0),
        ("special.volume.n3-m1", "stiefel-volume", || stiefel_volume(3, 1), 4.0 * PI),
        ("special.volume.n2-m1", "stiefel-volume", || stiefel_volume(2, 1), 2.0 * PI),
        ("special.volume.n2-m2", "stiefel-volume", || stiefel_volume(2, 2), 4.0 * PI),
    ];
    for (id, anchor, value, exact) in closed {
        rows.push(Check::new(id, anchor, move |_| {
            Ok(Outcome::relative("closed form", value()?, exact, SPECIAL_TOL))
        }));
    }

    rows.push(Check::new("special.gamma.ratio-identity", "gamma-ratio", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let l: usize = r.random_range(2..=4);
            let k: usize = r.random_range(1..l);
            let a = l as f64 / 2.0 + 1e-3 + 5.0 * r.random::<f64>();
            let (lf, kf) = (l as f64, k as f64);
            let lhs = siegel_log_gamma(l, a)? - siegel_log_gamma(l, a + kf / 2.0)?;
            let rhs = siegel_log_gamma(k, a + (kf - lf) / 2.0)? - siegel_log_gamma(k, a + kf / 2.0)?;
            worst = worst.max(((lhs - rhs).exp() - 1.0).abs());
        }
        Ok(Outcome::metric("100 draws, l<=4", MetricKind::RelativeError, worst, SPECIAL_TOL))
    }));

    rows.push(Check::new("special.gamma.recursion", "siegel-gamma", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let l: usize = r.random_range(1..=4);
            let a = (l as f64 - 1.0) / 2.0 + 0.05 + 6.0 * r.random::<f64>();
            let ratio = (siegel_log_gamma(l, a + 1.0)? - siegel_log_gamma(l, a)?).exp();
            let product: f64 = (0..l).map(|j| a - j as f64 / 2.0).product();
            worst = worst.max((ratio / product - 1.0).abs());
        }
        Ok(Outcome::metric("100 draws, l<=4", MetricKind::RelativeError, worst, SPECIAL_TOL))
    }));

    rows.push(Check::new("special.beta.symmetry", "siegel-beta", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let l: usize = r.random_range(1..=4);
            let low = (l as f64 - 1.0) / 2.0 + 0.01;
            let (a, b) = (low + 4.0 * r.random::<f64>(), low + 4.0 * r.random::<f64>());
            worst = worst.max((siegel_beta(l, a, b)? - siegel_beta(l, b, a)?).abs());
        }
        Ok(Outcome::metric("100 draws, l<=4", MetricKind::AbsoluteError, worst, 0.0))
    }));

    rows.push(Check::new("special.beta.interval-volume", "siegel-beta", |ctx| {
        let vol = interval_box_volume(2);
        let mc = estimate(ctx.samples, &ctx.rng, |r| {
            let w = draw_interval_box(2, r);
            if unit_interval_dets(&w).is_some() {
                vol
            } else {
                0.0
            }
        });
        let exact = MonteCarloEstimate::exact(siegel_beta(2, 1.5, 1.5)?);
        Ok(Outcome::compare("l=2, volume of Q", mc, exact, ctx.z_cap))
    }));
}

fn random_spd<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> Result<SpdMatrix> {
    let w = WishartSampler::new(rank, rank as f64 + 2.0)?.sample(rng);
    SpdMatrix::new(w.add(&SymmetricMatrix::scaled_identity(rank, 0.01)))
}

fn core_checks(rows: &mut Vec<Check>) {
    rows.push(Check::new("core.sqrt.roundtrip", "square-root", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for i in 0..200 {
            let a = random_spd(2 + i % 3, &mut r)?;
            let b = a.sqrt().to_dense();
            worst = worst.max(max_abs_diff(&(&b * &b), &a.to_dense()));
        }
        Ok(Outcome::metric("200 draws, l in 2..4", MetricKind::AbsoluteError, worst, ROUNDTRIP_TOL))
    }));

    rows.push(Check::new("core.loewner.partial-order", "loewner-order", |ctx| {
        let mut r = ctx.rng.rng();
        let mut violations = 0usize;
        for i in 0..1000 {
            let rank = 2 + i % 2;
            let a = random_spd(rank, &mut r)?.into_sym();
            // half of the triples are chains, the rest unrelated draws
            let (b, c) = if i % 2 == 0 {
                let b = a.add(&random_spd(rank, &mut r)?.scale(0.1));
                let c = b.add(&random_spd(rank, &mut r)?.scale(0.1));
                (b, c)
            } else {
                (random_spd(rank, &mut r)?.into_sym(), random_spd(rank, &mut r)?.into_sym())
            };
            if loewner_lt(&a, &a)? {
                violations += 1;
            }
            if loewner_lt(&a, &b)? && loewner_lt(&b, &c)? && !loewner_lt(&a, &c)? {
                violations += 1;
            }
            if loewner_lt(&a, &b)? && loewner_lt(&b, &a)? {
                violations += 1;
            }
        }
        Ok(Outcome::metric("1000 triples", MetricKind::Violations, violations as f64, 0.0))
    }));

    rows.push(Check::new("core.det.congruence", "determinant", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for i in 0..200 {
            let rank = 1 + i % 4;
            let a = random_spd(rank, &mut r)?;
            let g = standard_normal_matrix(rank, rank, &mut r);
            let lhs = a.congruence(&g).det();
            let gd = g.determinant();
            let rhs = gd * gd * a.det();
            worst = worst.max((lhs / rhs - 1.0).abs());
        }
        Ok(Outcome::metric("200 draws, l<=4", MetricKind::RelativeError, worst, ROUNDTRIP_TOL))
    }));
}

fn sampling_checks(rows: &mut Vec<Check>) {
    rows.push(Check::new("sampling.haar.moments", "haar-measure", |ctx| {
        let (n, m) = (4usize, 2usize);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let width = n * m + pairs.len();
        let est = estimate_vec(ctx.samples, width, &ctx.rng, |r, out| {
            let v = sample_stiefel(n, m, r).expect("valid dims").into_mat();
            for (k, x) in v.iter().enumerate() {
                out[k] = *x;
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                out[n * m + k] = (0..m).map(|c| v[(i, c)] * v[(j, c)]).sum();
            }
        });
        let mut exact = vec![0.0; n * m];
        exact.extend(pairs.iter().map(|&(i, j)| if i == j { m as f64 / n as f64 } else { 0.0 }));
        let z = max_z(&est, &exact);
        Ok(Outcome::metric("n=4, m=2: E[v]=0, E[vv']=(m/n)I", MetricKind::MaxZScore, z, ctx.z_cap))
    }));

    rows.push(Check::new("sampling.haar.invariance", "haar-measure", |ctx| {
        let (n, m, rank) = (4usize, 2usize, 2usize);
        let count = (ctx.samples / 10).max(100);
        let g = sample_orthogonal(n, &mut ctx.rng.derive("rotation").rng())?;
        let stat = |v: &Mat| -> f64 {
            let b = v.rows(n - rank, rank);
            b.iter().map(|x| x * x).sum()
        };
        let moved = draw(count, &ctx.rng.derive("moved"), |r| {
            stat(&(&g * sample_stiefel(n, m, r).expect("valid dims").as_mat()))
        });
        let fresh = draw(count, &ctx.rng.derive("fresh"), |r| {
            stat(sample_stiefel(n, m, r).expect("valid dims").as_mat())
        });
        let ratio = ks_statistic(&moved, &fresh) / ks_critical_1pct(count, count);
        Ok(Outcome::metric(
            format!("n=4, m=2, l=2, {count} draws per side"),
            MetricKind::KsRatio,
            ratio,
            1.0,
        ))
    }));

    rows.push(Check::new("sampling.interval.acceptance", "matrix-interval", |ctx| {
        let rate = estimate(ctx.samples, &ctx.rng, |r| {
            if unit_interval_dets(&draw_interval_box(2, r)).is_some() {
                1.0
            } else {
                0.0
            }
        });
        Ok(Outcome::compare("l=2", rate, MonteCarloEstimate::exact(PI / 12.0), ctx.z_cap))
    }));

    rows.push(Check::new("sampling.interval.mean", "matrix-interval", |ctx| {
        let est = estimate_vec(ctx.samples, 3, &ctx.rng, |r, out| {
            let w = sample_unit_interval(2, r).expect("rank 2");
            out.copy_from_slice(w.upper());
        });
        let z = max_z(&est, &[0.5, 0.0, 0.5]);
        Ok(Outcome::metric("l=2, E[w]=I/2", MetricKind::MaxZScore, z, ctx.z_cap))
    }));

    rows.push(Check::new("sampling.interval.order", "matrix-interval", |ctx| {
        let mut r = ctx.rng.rng();
        let mut violations = 0usize;
        for i in 0..10_000 {
            let rank = 1 + i % 3;
            let s = random_spd(rank, &mut r)?;
            let x = sample_matrix_interval(&s, &mut r)?;
            let zero = SymmetricMatrix::zeros(rank);
            if !(loewner_lt(&zero, &x)? && loewner_lt(&x, &s)?) {
                violations += 1;
            }
        }
        Ok(Outcome::metric("10000 draws, l<=3", MetricKind::Violations, violations as f64, 0.0))
    }));

    rows.push(Check::new("sampling.polar.measure", "polar-decomposition", |ctx| {
        // E[e^{−tr x'x}] over 4×2 standard Gaussian x, directly and through
        // the cone integral of the polar decomposition; r = w(I−w)^{-1}
        // maps Q onto the cone with dr = |I−w|^{−3} dw
        let (n, m) = (4usize, 2usize);
        let direct = estimate(ctx.samples, &ctx.rng.derive("direct"), |r| {
            let x = standard_normal_matrix(n, m, r);
            (-x.iter().map(|v| v * v).sum::<f64>()).exp()
        });
        let ln_c = -(m as f64) * 2f64.ln() + stiefel_volume(n, m)?.ln()
            - (n * m) as f64 / 2.0 * (2.0 * PI).ln();
        let power = (n - m - 1) as f64 / 2.0;
        let vol = interval_box_volume(m);
        let cone = estimate(ctx.samples, &ctx.rng.derive("cone"), |r| {
            let w = draw_interval_box(m, r);
            let Some((dw, dc)) = unit_interval_dets(&w) else {
                return 0.0;
            };
            let inv = SpdMatrix::new(w.complement()).expect("inside Q").inverse();
            let tr = inv.trace() - m as f64;
            vol * (ln_c + power * (dw / dc).ln() - 1.5 * tr).exp() / dc.powi(3)
        });
        Ok(Outcome::compare("n=4, m=2, h=exp(-tr)", direct, cone, ctx.z_cap))
    }));

    rows.push(Check::new("sampling.bistiefel.measure", "bi-stiefel-decomposition", |ctx| {
        // f(v) = exp(v_n²) on V_{4,1}, split with k = 2: a in the unit disc,
        // u on the circle, |I − a'a|^{(n−k−m−1)/2} = 1
        let direct = estimate(ctx.samples, &ctx.rng.derive("direct"), |r| {
            let v = sample_stiefel(4, 1, r).expect("valid dims");
            v.as_mat()[(3, 0)].powi(2).exp()
        });
        let ratio = stiefel_volume(2, 1)? / stiefel_volume(4, 1)?;
        let split = estimate(ctx.samples, &ctx.rng.derive("split"), |r| {
            let a = [2.0 * r.random::<f64>() - 1.0, 2.0 * r.random::<f64>() - 1.0];
            let norm = a[0] * a[0] + a[1] * a[1];
            if norm >= 1.0 {
                return 0.0;
            }
            let u = sample_stiefel(2, 1, r).expect("valid dims");
            let last = u.as_mat()[(1, 0)] * (1.0 - norm).sqrt();
            4.0 * ratio * (last * last).exp()
        });
        Ok(Outcome::compare("n=4, k=2, m=1, f=exp(v_n^2)", direct, split, ctx.z_cap))
    }));

    rows.push(Check::new("sampling.polar.roundtrip", "polar-decomposition", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for _ in 0..200 {
            let x = standard_normal_matrix(5, 2, &mut r);
            let (v, s) = polar_decompose(&x)?;
            worst = worst.max(max_abs_diff(&(v.as_mat() * s.sqrt().to_dense()), &x));
        }
        Ok(Outcome::metric("200 draws, 5x2", MetricKind::AbsoluteError, worst, ROUNDTRIP_TOL))
    }));

    rows.push(Check::new("sampling.bistiefel.roundtrip", "bi-stiefel-decomposition", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for _ in 0..200 {
            let v = sample_stiefel(6, 2, &mut r)?;
            let (a, u) = bistiefel_decompose(&v, 3)?;
            worst = worst.max(u.gram_residual());
            worst = worst.max(max_abs_diff(bistiefel_compose(&a, &u)?.as_mat(), v.as_mat()));
        }
        Ok(Outcome::metric("200 draws, n=6, m=2, k=3", MetricKind::AbsoluteError, worst, ROUNDTRIP_TOL))
    }));
}

fn gg_closed_form(rank: usize, alpha: f64, s: &SpdMatrix) -> Result<f64> {
    let d = half_dim(rank);
    Ok((alpha * s.det().ln() + siegel_log_gamma(rank, d)? - siegel_log_gamma(rank, alpha + d)?).exp())
}

fn gg_checks(rows: &mut Vec<Check>) {
    rows.push(Check::new("fracint.gg.closed-form.l1", "gg-closed-form", |_| {
        let s = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.7]))?;
        let mut worst = 0.0_f64;
        for alpha in [0.4, 1.0, 2.5] {
            let got = gg_integral(&IntegralSpec::new(Side::Left, alpha, s.clone()), &TestFunction::const1(1))?;
            worst = worst.max((got.value / gg_closed_form(1, alpha, &s)? - 1.0).abs());
        }
        Ok(Outcome::metric("s=0.7, alpha in {0.4,1,2.5}", MetricKind::RelativeError, worst, 1e-8))
    }));

    for alpha in [2.0, 2.5] {
        rows.push(Check::new(format!("fracint.gg.closed-form.l2-a{alpha}"), "gg-closed-form", move |ctx| {
            let s = interior_point(2, &mut ctx.rng.derive("point").rng())?;
            let spec = IntegralSpec::new(Side::Left, alpha, s.clone())
                .samples(ctx.samples)
                .rng(ctx.rng)
                .method(Method::Uniform);
            let got = gg_integral(&spec, &TestFunction::const1(2))?;
            let exact = MonteCarloEstimate::exact(gg_closed_form(2, alpha, &s)?);
            Ok(Outcome::compare(describe(&s), got, exact, ctx.z_cap))
        }));
    }

    for (rank, method) in [(1usize, Method::Quadrature), (2, Method::Uniform)] {
        rows.push(Check::new(format!("fracint.gg.reflection.l{rank}"), "reflection", move |ctx| {
            let s = interior_point(rank, &mut ctx.rng.derive("point").rng())?;
            let f = TestFunction::exp_tr(rank);
            let alpha = 2.0;
            let left = IntegralSpec::new(Side::Left, alpha, s.clone())
                .samples(ctx.samples)
                .rng(ctx.rng.derive("left"))
                .method(method);
            let right = IntegralSpec::new(Side::Right, alpha, SpdMatrix::new(s.complement())?)
                .samples(ctx.samples)
                .rng(ctx.rng.derive("right"))
                .method(method);
            let lhs = gg_integral(&left, &f)?;
            let rhs = gg_integral(&right, &f.reflected())?;
            let config = format!("alpha=2, f=exp-tr, {}", describe(&s));
            if method == Method::Quadrature {
                Ok(Outcome::relative(config, lhs.value, rhs.value, 1e-6))
            } else {
                Ok(Outcome::compare(config, lhs, rhs, ctx.z_cap))
            }
        }));
    }

    rows.push(Check::new("fracint.gg.index-law.l1", "index-law", |_| {
        let s = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.62]))?;
        let f = TestFunction::bump(1);
        let mut worst = 0.0_f64;
        for side in [Side::Left, Side::Right] {
            let spec = IntegralSpec::new(side, 1.3, s.clone());
            let direct = gg_integral(&spec, &f)?.value;
            let continued = gg_continued(&spec, &f, 1)?.value;
            worst = worst.max((continued / direct - 1.0).abs());
        }
        Ok(Outcome::metric("alpha=1.3, s=0.62, f=bump, both sides", MetricKind::RelativeError, worst, 1e-6))
    }));

    rows.push(Check::new("fracint.gg.index-law.l2", "index-law", |_| {
        let s = SpdMatrix::new(SymmetricMatrix::new(2, vec![0.85, 0.05, 0.75])?)?;
        let f = TestFunction::bump(2);
        let spec = IntegralSpec::new(Side::Left, 1.3, s.clone()).method(Method::Quadrature);
        let direct = gg_integral(&spec, &f)?.value;
        let continued = gg_continued(&spec, &f, 1)?.value;
        Ok(Outcome::relative(format!("alpha=1.3, f=bump, {}", describe(&s)), continued, direct, 1e-3))
    }));

    rows.push(Check::new("fracint.gg.order-zero.l1", "index-law", |_| {
        let s = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.55]))?;
        let f = TestFunction::bump(1);
        let got = gg_continued(&IntegralSpec::new(Side::Left, 0.0, s.clone()), &f, 1)?.value;
        Ok(Outcome::relative("alpha=0, s=0.55, f=bump", got, f.eval(&s), 1e-3))
    }));

    for (rank, m) in [(1usize, 1usize), (1, 2), (2, 2), (2, 3)] {
        for side in [Side::Left, Side::Right] {
            let id = format!("fracint.gg.half-integer.l{rank}-m{m}-{}", side_name(side));
            rows.push(Check::new(id, "half-integer-gg", move |ctx| {
                let s = interior_point(rank, &mut ctx.rng.derive("point").rng())?;
                let f = TestFunction::exp_tr(rank);
                let omega = gg_halfint(side, m, &f, &s, ctx.samples, &ctx.rng.derive("omega"), Method::Uniform)?;
                let spec = IntegralSpec::new(side, m as f64 / 2.0, s.clone())
                    .samples(ctx.samples)
                    .rng(ctx.rng.derive("direct"));
                let direct = gg_integral(&spec, &f)?;
                Ok(Outcome::compare(format!("f=exp-tr, {}", describe(&s)), omega, direct, ctx.z_cap))
            }));
        }
    }
}

fn ek_checks(rows: &mut Vec<Check>) {
    for (rank, m) in [(1usize, 1usize), (1, 2), (2, 2), (2, 3)] {
        let id = format!("fracint.ek.half-integer.l{rank}-m{m}");
        rows.push(Check::new(id, "half-integer-ek", move |ctx| {
            let s = interior_point(rank, &mut ctx.rng.derive("point").rng())?;
            let f = TestFunction::exp_tr(rank);
            let base = IntegralSpec::new(Side::Left, 2.0, s.clone()).samples(ctx.samples);
            let omega = ek_omega_form(&base.clone().rng(ctx.rng.derive("omega")).method(Method::Uniform), m, &f)?;
            let direct = ek_integral(
                &base.rng(ctx.rng.derive("direct")),
                WallachParameter::Generic(m as f64 / 2.0),
                &f,
            )?;
            Ok(Outcome::compare(format!("alpha=2, f=exp-tr, {}", describe(&s)), omega, direct, ctx.z_cap))
        }));
    }

    for side in [Side::Left, Side::Right] {
        for (label, beta) in [("generic", WallachParameter::Generic(2.0)), ("half", WallachParameter::HalfInteger(1))] {
            let id = format!("fracint.ek.normalization.{}-{label}", side_name(side));
            rows.push(Check::new(id, "ek-normalization", move |ctx| {
                let s = interior_point(2, &mut ctx.rng.derive("point").rng())?;
                let alpha = 2.0;
                let spec = IntegralSpec::new(side, alpha, s.clone())
                    .samples(ctx.samples)
                    .rng(ctx.rng)
                    .method(Method::Uniform);
                let got = ek_integral(&spec, beta, &TestFunction::const1(2))?;
                let exact = 1.0 / siegel_gamma(2, alpha + beta.value())?;
                Ok(Outcome::compare(
                    format!("l=2, alpha=2, beta={}, {}", beta.value(), describe(&s)),
                    got,
                    MonteCarloEstimate::exact(exact),
                    ctx.z_cap,
                ))
            }));
        }
    }

    rows.push(Check::new("fracint.ek.s-independence", "ek-normalization", |ctx| {
        let mut r = ctx.rng.derive("points").rng();
        let mut values = Vec::new();
        for i in 0..5u64 {
            let s = interior_point(2, &mut r)?;
            let spec = IntegralSpec::new(Side::Left, 2.0, s)
                .samples(ctx.samples / 5)
                .rng(ctx.rng.with_substream(i + 1))
                .method(Method::Uniform);
            values.push(ek_integral(&spec, WallachParameter::Generic(2.0), &TestFunction::const1(2))?);
        }
        let mut worst = 0.0_f64;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                worst = worst.max(z_score(&values[i], &values[j]).abs());
            }
        }
        Ok(Outcome::metric("l=2, alpha=beta=2, 5 points", MetricKind::MaxZScore, worst, ctx.z_cap))
    }));

    rows.push(Check::new("fracint.ek.gg-factorization", "ek-gg-factorization", |ctx| {
        let s = interior_point(2, &mut ctx.rng.derive("point").rng())?;
        let (alpha, beta, d) = (2.0, 2.0, half_dim(2));
        let f = TestFunction::exp_tr(2);
        let spec = IntegralSpec::new(Side::Left, alpha, s.clone())
            .samples(ctx.samples)
            .method(Method::Uniform);
        let ek = ek_integral(&spec.clone().rng(ctx.rng.derive("ek")), WallachParameter::Generic(beta), &f)?;
        let scale = ((d - alpha - beta) * s.det().ln() - siegel_log_gamma(2, beta)?).exp();
        let gg = gg_integral(&spec.rng(ctx.rng.derive("gg")), &f.det_weighted(beta - d))?.scaled(scale);
        Ok(Outcome::compare(format!("alpha=beta=2, f=exp-tr, {}", describe(&s)), ek, gg, ctx.z_cap))
    }));

    rows.push(Check::new("fracint.ek.classical.l1", "ek-classical", |_| {
        let s = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.5]))?;
        let got = ek_integral(&IntegralSpec::new(Side::Left, 1.0, s), WallachParameter::Generic(1.0), &TestFunction::trace(1))?;
        Ok(Outcome::relative("alpha=beta=1, s=0.5, f=r", got.value, 0.25, 1e-12))
    }));

    rows.push(Check::new("fracint.ek.stiefel-form", "ek-stiefel-form", |ctx| {
        let s = interior_point(2, &mut ctx.rng.derive("point").rng())?;
        let f = TestFunction::trace(2);
        let stiefel = ek_stiefel_form(2.0, 1, &f, &s, ctx.samples, &ctx.rng.derive("stiefel"), Method::Uniform)?;
        let spec = IntegralSpec::new(Side::Left, 2.0, s.clone())
            .samples(ctx.samples)
            .rng(ctx.rng.derive("omega"))
            .method(Method::Uniform);
        let omega = ek_integral(&spec, WallachParameter::HalfInteger(1), &f)?;
        Ok(Outcome::compare(format!("l=2, m=1, alpha=2, f=trace, {}", describe(&s)), stiefel, omega, ctx.z_cap))
    }));

    rows.push(Check::new("fracint.ek.stiefel-constant", "ek-stiefel-form", |ctx| {
        let s = interior_point(2, &mut ctx.rng.derive("point").rng())?;
        let got = ek_stiefel_form(2.0, 1, &TestFunction::const1(2), &s, ctx.samples, &ctx.rng, Method::Uniform)?;
        let exact = MonteCarloEstimate::exact(4.0 / (3.0 * PI));
        Ok(Outcome::compare(format!("l=2, m=1, alpha=2, {}", describe(&s)), got, exact, ctx.z_cap))
    }));

    rows.push(Check::new("fracint.ek.variance-scaling", "ek-convergence", |ctx| {
        let s = interior_point(2, &mut ctx.rng.derive("point").rng())?;
        let f = TestFunction::exp_tr(2);
        let sizes = [(ctx.samples / 100).max(100), (ctx.samples / 10).max(1000), ctx.samples.max(10_000)];
        let mut errs = Vec::new();
        for (i, &n) in sizes.iter().enumerate() {
            let spec = IntegralSpec::new(Side::Left, 2.0, s.clone())
                .samples(n)
                .rng(ctx.rng.with_substream(i as u64 + 1))
                .method(Method::Uniform);
            errs.push(ek_integral(&spec, WallachParameter::HalfInteger(1), &f)?.stderr);
        }
        let mut worst = 1.0_f64;
        for i in 0..2 {
            let expected = (sizes[i + 1] as f64 / sizes[i] as f64).sqrt();
            let ratio = errs[i] / errs[i + 1] / expected;
            worst = worst.max(ratio).max(1.0 / ratio);
        }
        Ok(Outcome::metric(
            format!("l=2, m=1, alpha=2, n={sizes:?}"),
            MetricKind::ScalingFactor,
            worst,
            2.0,
        ))
    }));
}

fn transform_checks(rows: &mut Vec<Check>) {
    rows.push(Check::new("fracint.cayley.determinant", "cayley-operator", |ctx| {
        let mut r = ctx.rng.rng();
        let det = TestFunction::new("det", 2, Support::Cone, Smoothness::Smooth, |x| x.det());
        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let x = interior_point(2, &mut r)?.into_sym();
            let got = cayley_apply(Side::Left, &det, &x, default_step(&x))?;
            worst = worst.max((got / 1.5 - 1.0).abs());
        }
        Ok(Outcome::metric("l=2, D det = 3/2 at 20 points", MetricKind::RelativeError, worst, 1e-6))
    }));

    rows.push(Check::new("fracint.cayley.linear", "cayley-operator", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let x = interior_point(2, &mut r)?.into_sym();
            worst = worst.max(cayley_apply(Side::Left, &TestFunction::trace(2), &x, default_step(&x))?.abs());
        }
        Ok(Outcome::metric("l=2, D tr = 0 at 20 points", MetricKind::AbsoluteError, worst, 1e-8))
    }));

    rows.push(Check::new("fracint.cayley.square.l1", "cayley-operator", |_| {
        let f = TestFunction::new("r^2", 1, Support::Cone, Smoothness::Smooth, |x| x.get(0, 0).powi(2));
        let x = SymmetricMatrix::identity(1);
        let plus = cayley_apply(Side::Left, &f, &x, default_step(&x))?;
        let minus = cayley_apply(Side::Right, &f, &x, default_step(&x))?;
        let worst = (plus - 2.0).abs().max((minus + 2.0).abs());
        Ok(Outcome::metric("D(r^2) at r=1, both signs", MetricKind::AbsoluteError, worst, 1e-8))
    }));

    rows.push(Check::new("fracint.distribution.order-zero", "gg-distribution", |ctx| {
        let f = TestFunction::bump(2);
        let got = gg_distribution(WallachParameter::HalfInteger(0), &f, ctx.samples, &ctx.rng)?;
        Ok(Outcome::metric(
            "order 0, f=bump",
            MetricKind::AbsoluteError,
            got.value - f.eval(&SymmetricMatrix::zeros(2)),
            0.0,
        ))
    }));

    rows.push(Check::new("fracint.distribution.exponential", "gg-distribution", |ctx| {
        let a = gg_distribution(WallachParameter::Generic(1.0), &TestFunction::exp_tr(1), ctx.samples.min(10_000), &ctx.rng)?;
        let b = gg_distribution(WallachParameter::HalfInteger(1), &TestFunction::exp_tr(2), ctx.samples.min(10_000), &ctx.rng)?;
        let worst = (a.value - 1.0).abs().max((b.value - 1.0).abs());
        Ok(Outcome::metric("f=exp-tr: l=1 alpha=1; l=2 m=1", MetricKind::AbsoluteError, worst, 1e-12))
    }));

    rows.push(Check::new("fracint.distribution.trace", "gg-distribution", |ctx| {
        let alpha = 1.75;
        let f = TestFunction::new("tr*exp(-2tr)", 2, Support::Cone, Smoothness::Smooth, |x| {
            x.trace() * (-2.0 * x.trace()).exp()
        });
        let got = gg_distribution(WallachParameter::Generic(alpha), &f, ctx.samples, &ctx.rng)?;
        let exact = MonteCarloEstimate::exact(alpha * 2f64.powf(-2.0 * alpha));
        Ok(Outcome::compare("l=2, alpha=1.75, f=tr*exp(-2tr)", got, exact, ctx.z_cap))
    }));

    rows.push(Check::new("fracint.laplace.indicator.l1", "laplace-transform", |ctx| {
        let f = TestFunction::new("1_Q", 1, Support::UnitInterval, Smoothness::Continuous, |_| 1.0);
        let got = laplace(&f, &SpdMatrix::identity(1), ctx.samples, &ctx.rng)?;
        Ok(Outcome::relative("z=1, f=1 on Q", got.value, 1.0 - (-1.0f64).exp(), 1e-12))
    }));

    rows.push(Check::new("fracint.laplace.det-power.l2", "laplace-transform", |ctx| {
        let alpha = 2.0;
        let z = SpdMatrix::new(SymmetricMatrix::new(2, vec![1.5, 0.3, 1.0])?)?;
        let f = TestFunction::det_power(2, alpha - half_dim(2));
        let got = laplace(&f, &z, ctx.samples, &ctx.rng)?;
        let exact = siegel_gamma(2, alpha)? * z.det().powf(-alpha);
        Ok(Outcome::compare("alpha=2, z=[1.5,0.3,1]", got, MonteCarloEstimate::exact(exact), ctx.z_cap))
    }));

    rows.push(Check::new("fracint.laplace.factorization.l1", "laplace-factorization", |ctx| {
        let (alpha, z0) = (1.0, 2.0);
        let f = TestFunction::bump(1);
        let inner = f.clone();
        let integrated = TestFunction::new("I^1 bump", 1, Support::Cone, Smoothness::Smooth, move |r| {
            let s = SpdMatrix::new(r.clone()).expect("positive nodes");
            gg_integral(&IntegralSpec::new(Side::Left, alpha, s), &inner)
                .expect("rank one quadrature")
                .value
        });
        let z = SpdMatrix::new(SymmetricMatrix::diagonal(&[z0]))?;
        let lhs = laplace(&integrated, &z, ctx.samples, &ctx.rng)?.value;
        let rhs = z0.powf(-alpha) * laplace(&f, &z, ctx.samples, &ctx.rng)?.value;
        Ok(Outcome::relative("alpha=1, z=2, f=bump", lhs, rhs, 1e-4))
    }));
}

fn radon_checks(rows: &mut Vec<Check>) {
    rows.push(Check::new("radon.rotation.frame", "frame-rotation", |ctx| {
        let mut r = ctx.rng.rng();
        let mut worst = 0.0_f64;
        for i in 0..100 {
            let p = 1 + i % 4;
            let xi = sample_stiefel(7, p, &mut r)?;
            let g = rotation_to_frame(&xi, &mut r);
            let canon = StiefelFrame::bottom_block(7, p)?;
            worst = worst.max(max_abs_diff(&(&g * canon.as_mat()), xi.as_mat()));
            worst = worst.max(max_abs_diff(&(g.transpose() * &g), &Mat::identity(7, 7)));
        }
        Ok(Outcome::metric("100 frames in V_7,p", MetricKind::AbsoluteError, worst, ROUNDTRIP_TOL))
    }));

    rows.push(Check::new("radon.rotation.independence", "radon-transform", |ctx| {
        let cfg = GrassmannConfig::new(6, 2, 4, 2)?;
        let lift = ZonalFunction::new(TestFunction::exp_tr(2), 6, 2)?;
        let xi = sample_stiefel(6, 2, &mut ctx.rng.derive("frame").rng())?;
        let f = |v: &Mat| lift.eval(v);
        let a = radon(&f, &xi, &cfg, ctx.samples, &ctx.rng.derive("first"))?;
        let b = radon(&f, &xi, &cfg, ctx.samples, &ctx.rng.derive("second"))?;
        Ok(Outcome::compare(format!("{cfg}, f=exp-tr"), a, b, ctx.z_cap))
    }));

    rows.push(Check::new("radon.dual.independence", "dual-radon-transform", |ctx| {
        let cfg = GrassmannConfig::new(7, 2, 5, 2)?;
        let lift = ZonalFunction::new(TestFunction::trace(2), 7, 2)?;
        let v = sample_stiefel(7, 2, &mut ctx.rng.derive("frame").rng())?;
        let phi = |x: &Mat| lift.eval(x);
        let a = dual_radon(&phi, &v, &cfg, ctx.samples, &ctx.rng.derive("first"))?;
        let b = dual_radon(&phi, &v, &cfg, ctx.samples, &ctx.rng.derive("second"))?;
        Ok(Outcome::compare(format!("{cfg}, phi=trace"), a, b, ctx.z_cap))
    }));

    rows.push(Check::new("radon.constant", "radon-transform", |ctx| {
        let cfg = GrassmannConfig::new(6, 2, 4, 2)?;
        let xi = sample_stiefel(6, 2, &mut ctx.rng.derive("frame").rng())?;
        let v = sample_stiefel(6, 2, &mut ctx.rng.derive("plane").rng())?;
        let a = radon(&|_: &Mat| 2.5, &xi, &cfg, ctx.samples.min(10_000), &ctx.rng)?;
        let b = dual_radon(&|_: &Mat| 2.5, &v, &cfg, ctx.samples.min(10_000), &ctx.rng)?;
        let worst = (a.value - 2.5).abs().max((b.value - 2.5).abs()).max(a.stderr).max(b.stderr);
        Ok(Outcome::metric(format!("{cfg}, f=2.5"), MetricKind::AbsoluteError, worst, 0.0))
    }));

    rows.push(Check::new("radon.profile.spectrum", "projection-profile", |ctx| {
        let mut r = ctx.rng.rng();
        let mut violations = 0usize;
        for i in 0..1000 {
            let p = 1 + i % 4;
            let rank = 1 + i % 3;
            let xi = sample_stiefel(8, p, &mut r)?;
            let raw = SymmetricMatrix::outer_gram(&xi.bottom_rows(rank)).complement();
            let ev = raw.eigenvalues();
            if ev.iter().any(|&x| !(-1e-12..=1.0 + 1e-12).contains(&x)) {
                violations += 1;
            }
            if projection_profile(&xi, rank)?.sub(&raw).max_abs() > 1e-12 {
                violations += 1;
            }
        }
        Ok(Outcome::metric("1000 frames in V_8,p", MetricKind::Violations, violations as f64, 0.0))
    }));

    rows.push(Check::new("radon.profile.canonical", "projection-profile", |_| {
        let canon = StiefelFrame::bottom_block(6, 2)?;
        let top = StiefelFrame::new(Mat::from_fn(6, 2, |i, j| if i == j { 1.0 } else { 0.0 }))?;
        let a = projection_profile(&canon, 2)?.max_abs();
        let b = projection_profile(&top, 2)?.sub(&SymmetricMatrix::identity(2)).max_abs();
        Ok(Outcome::metric("n=6, p=2, l=2", MetricKind::AbsoluteError, a.max(b), 1e-15))
    }));

    rows.push(Check::new("radon.lift.invariance", "zonal-function", |ctx| {
        let mut r = ctx.rng.rng();
        let lift = ZonalFunction::new(TestFunction::exp_tr(2), 6, 2)?;
        let mut worst = 0.0_f64;
        for _ in 0..200 {
            let v = sample_stiefel(6, 2, &mut r)?;
            let moved = v.rotate_left(&block_rotation(6, 2, &mut r)?)?;
            let turned = v.rotate_right(&sample_orthogonal(2, &mut r)?)?;
            let base = lift.eval(v.as_mat());
            worst = worst
                .max((lift.eval(moved.as_mat()) - base).abs())
                .max((lift.eval(turned.as_mat()) - base).abs());
        }
        Ok(Outcome::metric("200 frames in V_6,2, l=2", MetricKind::AbsoluteError, worst, 1e-12))
    }));

    for (label, right) in [("block", false), ("right", true)] {
        rows.push(Check::new(format!("radon.zonal.{label}-invariance"), "zonal-function", move |ctx| {
            let cfg = GrassmannConfig::new(6, 2, 4, 2)?;
            let lift = ZonalFunction::new(TestFunction::exp_tr(2), 6, 2)?;
            let f = |v: &Mat| lift.eval(v);
            let mut r = ctx.rng.derive("frame").rng();
            let xi = sample_stiefel(6, 2, &mut r)?;
            let other = if right {
                xi.rotate_right(&sample_orthogonal(2, &mut r)?)?
            } else {
                xi.rotate_left(&block_rotation(6, 2, &mut r)?)?
            };
            let a = radon(&f, &xi, &cfg, ctx.samples, &ctx.rng.derive("first"))?;
            let b = radon(&f, &other, &cfg, ctx.samples, &ctx.rng.derive("second"))?;
            Ok(Outcome::compare(format!("{cfg}, f=exp-tr"), a, b, ctx.z_cap))
        }));
    }

    type Pair = (&'static str, fn(usize) -> TestFunction, fn(usize) -> TestFunction);
    let pairs: [Pair; 3] = [
        ("radon.duality", TestFunction::exp_tr, TestFunction::trace),
        ("radon.mass.radon", TestFunction::exp_tr, TestFunction::const1),
        ("radon.mass.dual", TestFunction::const1, TestFunction::trace),
    ];
    for (id, f0, phi0) in pairs {
        rows.push(Check::new(id, "duality", move |ctx| {
            let cfg = GrassmannConfig::new(6, 2, 4, 2)?;
            let side = ((ctx.samples as f64).sqrt() as usize).max(10);
            let (f, phi) = (f0(2), phi0(2));
            let (a, b) = duality_sides(&cfg, &f, &phi, side, side, &ctx.rng)?;
            Ok(Outcome::compare(
                format!("{cfg}, f={}, phi={}, {side}x{side}", f.name(), phi.name()),
                a,
                b,
                ctx.z_cap,
            ))
        }));
    }
}

fn theorem_outcome(cfg: &GrassmannConfig, name: &str, check: TheoremCheck, cap: f64) -> Outcome {
    Outcome::compare(
        format!("{cfg}, f0={name}, {}", describe(&check.profile)),
        check.lhs,
        check.rhs,
        cap,
    )
}

fn theorem_checks(rows: &mut Vec<Check>, dims: &[[usize; 4]]) {
    for &[n, m, k, l] in dims {
        let key = format!("n{n}-m{m}-k{k}-l{l}");
        for name in ["const1", "exp-tr"] {
            rows.push(Check::new(format!("radon.theorem.{key}.{name}"), "radon-zonal-theorem", move |ctx| {
                let cfg = GrassmannConfig::new(n, m, k, l)?;
                cfg.check_radon_theorem()?;
                let f0 = TestFunction::by_name(name, l, 0.0)?;
                let check = verify_radon_theorem(&cfg, &f0, ctx.samples, &ctx.rng)?;
                Ok(theorem_outcome(&cfg, name, check, ctx.z_cap))
            }));
        }
        for name in ["const1", "trace"] {
            rows.push(Check::new(format!("radon.dual-theorem.{key}.{name}"), "dual-radon-zonal-theorem", move |ctx| {
                let cfg = GrassmannConfig::new(n, m, k, l)?;
                cfg.check_dual_theorem()?;
                let phi0 = TestFunction::by_name(name, l, 0.0)?;
                let check = verify_dual_theorem(&cfg, &phi0, ctx.samples, &ctx.rng)?;
                Ok(theorem_outcome(&cfg, name, check, ctx.z_cap))
            }));
        }
    }
}
