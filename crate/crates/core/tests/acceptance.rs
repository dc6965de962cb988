//! Acceptance criteria, one line each. Stochastic checks use 10⁶ samples.

use std::f64::consts::PI;
use std::process::ExitCode;

use matcone::fracint::{
    ek_integral, ek_omega_form, gg_continued, gg_halfint, gg_integral, laplace,
};
use matcone::mc::{estimate, estimate_vec, ks_critical_1pct, ks_statistic, z_score};
use matcone::radon::{duality_sides, verify_dual_theorem, verify_radon_theorem};
use matcone::sampling::{
    draw_interval_box, sample_orthogonal, sample_stiefel, sample_unit_interval,
    standard_normal_matrix, unit_interval_dets,
};
use matcone::special::{siegel_beta, siegel_gamma, siegel_log_gamma, stiefel_volume};
use matcone::suite::{run_suite, Report, SuiteConfig};
use matcone::{
    GrassmannConfig, IntegralSpec, Method, MonteCarloEstimate, RngState, Side, SpdMatrix,
    SymmetricMatrix, TestFunction, WallachParameter,
};
use rand::Rng;

const N: usize = 1_000_000;
const Z_CAP: f64 = 3.0;

type Verdict = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Verdict>);

/// Γ(x) for positive integers and half-integers.
fn gamma_half(x: f64) -> f64 {
    let twice = (2.0 * x).round() as i64;
    assert!(twice >= 1 && (2.0 * x - twice as f64).abs() < 1e-12);
    let (mut g, mut t) = if twice % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while t < x - 1e-12 {
        g *= t;
        t += 1.0;
    }
    g
}

/// Γ_2(x) from scalar values.
fn gamma2(x: f64) -> f64 {
    PI.sqrt() * gamma_half(x) * gamma_half(x - 0.5)
}

fn rel(got: f64, exact: f64) -> f64 {
    (got / exact - 1.0).abs()
}

fn exact(v: f64) -> MonteCarloEstimate {
    MonteCarloEstimate::exact(v)
}

/// Collects labelled sub-checks into one verdict.
#[derive(Default)]
struct Tally {
    parts: Vec<String>,
    failed: bool,
}

impl Tally {
    fn z(&mut self, label: &str, a: &MonteCarloEstimate, b: &MonteCarloEstimate) {
        let z = z_score(a, b);
        self.record(label, format!("z={z:+.2}"), z.abs() <= Z_CAP);
    }

    fn rel(&mut self, label: &str, got: f64, exact: f64, tol: f64) {
        let e = rel(got, exact);
        self.record(label, format!("rel={e:.1e}"), e <= tol);
    }

    fn record(&mut self, label: &str, detail: String, ok: bool) {
        self.failed |= !ok;
        let mark = if ok { "" } else { " FAILED" };
        self.parts.push(format!("{label} {detail}{mark}"));
    }

    fn verdict(self) -> Verdict {
        let text = self.parts.join("; ");
        if self.failed {
            Err(text)
        } else {
            Ok(text)
        }
    }
}

fn interior(rank: usize, seed: u64) -> SpdMatrix {
    let w = sample_unit_interval(rank, &mut RngState::new(seed).rng()).unwrap();
    SpdMatrix::new(w.scale(0.8).add(&SymmetricMatrix::scaled_identity(rank, 0.1))).unwrap()
}

fn closed_form_specials() -> Verdict {
    let mut t = Tally::default();
    t.rel("G2(3/2)", siegel_gamma(2, 1.5).unwrap(), PI / 2.0, 1e-10);
    t.rel("G2(3)", siegel_gamma(2, 3.0).unwrap(), 1.5 * PI, 1e-10);
    t.rel("B2(3/2,3/2)", siegel_beta(2, 1.5, 1.5).unwrap(), PI / 6.0, 1e-10);
    t.rel("vol V3,1", stiefel_volume(3, 1).unwrap(), 4.0 * PI, 1e-10);
    t.verdict()
}

fn gamma_ratio_identity() -> Verdict {
    let mut r = RngState::new(2).rng();
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let l: usize = r.random_range(2..=4);
        let k: usize = r.random_range(1..l);
        let a = l as f64 / 2.0 + 0.01 + 4.0 * r.random::<f64>();
        let (lf, kf) = (l as f64, k as f64);
        let lhs = siegel_log_gamma(l, a).unwrap() - siegel_log_gamma(l, a + kf / 2.0).unwrap();
        let rhs = siegel_log_gamma(k, a + (kf - lf) / 2.0).unwrap()
            - siegel_log_gamma(k, a + kf / 2.0).unwrap();
        worst = worst.max(((lhs - rhs).exp() - 1.0).abs());
    }
    let mut t = Tally::default();
    t.record("100 draws", format!("max rel={worst:.1e}"), worst <= 1e-10);
    t.verdict()
}

fn interval_volume() -> Verdict {
    let rate = estimate(N, &RngState::new(3), |r| {
        f64::from(u8::from(unit_interval_dets(&draw_interval_box(2, r)).is_some()))
    });
    let mut t = Tally::default();
    t.z("acceptance vs pi/12", &rate, &exact(PI / 12.0));
    t.verdict()
}

fn haar_correctness() -> Verdict {
    let (n, m) = (5usize, 3usize);
    let est = estimate_vec(N, n * n, &RngState::new(4), |r, out| {
        let v = sample_stiefel(n, m, r).unwrap();
        let p = v.as_mat() * v.as_mat().transpose();
        out.copy_from_slice(p.as_slice());
    });
    let worst = est
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let target = if i % n == i / n { m as f64 / n as f64 } else { 0.0 };
            z_score(e, &exact(target)).abs()
        })
        .fold(0.0, f64::max);
    let mut t = Tally::default();
    t.record("E[vv']=(3/5)I max", format!("|z|={worst:.2}"), worst <= Z_CAP);

    // block rotations fixing the last two axes
    let count = 100_000;
    let mut g = nalgebra::DMatrix::identity(n, n);
    let rho = sample_orthogonal(n - 2, &mut RngState::new(41).rng()).unwrap();
    g.view_mut((0, 0), (n - 2, n - 2)).copy_from(&rho);
    let stat = |v: &nalgebra::DMatrix<f64>| v.rows(n - 2, 2).iter().map(|x| x * x).sum::<f64>();
    let draws = |seed: u64, rotate: bool| -> Vec<f64> {
        let mut r = RngState::new(seed).rng();
        (0..count)
            .map(|_| {
                let v = sample_stiefel(n, m, &mut r).unwrap().into_mat();
                if rotate {
                    stat(&(&g * v))
                } else {
                    stat(&v)
                }
            })
            .collect()
    };
    let d = ks_statistic(&draws(42, true), &draws(43, false));
    let crit = ks_critical_1pct(count, count);
    t.record("KS", format!("D={d:.4} crit={crit:.4}"), d < crit);
    t.verdict()
}

fn polar_and_bistiefel() -> Verdict {
    let mut t = Tally::default();
    // Gaussian x in R^{4×2}, h(r) = exp(−tr r)
    let (n, m) = (4usize, 2usize);
    let direct = estimate(N, &RngState::new(51), |r| {
        (-standard_normal_matrix(n, m, r).norm_squared()).exp()
    });
    // over the cone through r = w(I − w)^{-1}, dr = |I − w|^{−3} dw on Q
    let c = 0.25 * stiefel_volume(n, m).unwrap() * (2.0 * PI).powf(-4.0);
    let cone = estimate(N, &RngState::new(52), |r| {
        let w = draw_interval_box(2, r);
        let Some((dw, dc)) = unit_interval_dets(&w) else {
            return 0.0;
        };
        let det_r = dw / dc;
        let tr_r = (w.get(0, 0) + w.get(1, 1) - 2.0 * dw) / dc;
        2.0 * c * det_r.sqrt() * (-1.5 * tr_r).exp() / dc.powi(3)
    });
    t.z("polar n=4 m=2", &direct, &cone);

    // f(v) = exp(v_4²) on V_{4,1}, split as [a; u (1−|a|²)^{1/2}], a in R²
    let haar = estimate(N, &RngState::new(53), |r| {
        let v = sample_stiefel(4, 1, r).unwrap();
        v.as_mat()[(3, 0)].powi(2).exp()
    });
    let ratio = stiefel_volume(2, 1).unwrap() / stiefel_volume(4, 1).unwrap();
    let split = estimate(N, &RngState::new(54), |r| {
        let (a1, a2) = (2.0 * r.random::<f64>() - 1.0, 2.0 * r.random::<f64>() - 1.0);
        let rest = 1.0 - a1 * a1 - a2 * a2;
        if rest <= 0.0 {
            return 0.0;
        }
        let angle = 2.0 * PI * r.random::<f64>();
        4.0 * ratio * (angle.sin().powi(2) * rest).exp()
    });
    t.z("bi-Stiefel n=4 k=2 m=1", &haar, &split);
    t.verdict()
}

fn gg_closed_form() -> Verdict {
    let mut t = Tally::default();
    let one = TestFunction::const1(2);
    for (alpha, seed) in [(2.0, 61u64), (2.5, 62)] {
        let s = interior(2, seed);
        let spec = IntegralSpec::new(Side::Left, alpha, s.clone())
            .samples(N)
            .rng(RngState::new(seed + 100))
            .method(Method::Uniform);
        let got = gg_integral(&spec, &one).unwrap();
        let want = s.det().powf(alpha) * gamma2(1.5) / gamma2(alpha + 1.5);
        t.z(&format!("l=2 a={alpha}"), &got, &exact(want));
    }
    for alpha in [0.5, 1.0, 3.5] {
        let s = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.6])).unwrap();
        let got = gg_integral(&IntegralSpec::new(Side::Left, alpha, s), &TestFunction::const1(1)).unwrap();
        // s^α Γ(1)/Γ(α+1)
        t.rel(&format!("l=1 a={alpha}"), got.value, 0.6f64.powf(alpha) / gamma_half(alpha + 1.0), 1e-8);
    }
    t.verdict()
}

fn reflection_and_index_law() -> Verdict {
    let mut t = Tally::default();
    let s = interior(2, 71);
    let f = TestFunction::exp_tr(2);
    let left = IntegralSpec::new(Side::Left, 2.0, s.clone()).samples(N).rng(RngState::new(72)).method(Method::Uniform);
    let right = IntegralSpec::new(Side::Right, 2.0, SpdMatrix::new(s.complement()).unwrap())
        .samples(N)
        .rng(RngState::new(73))
        .method(Method::Uniform);
    t.z(
        "reflection l=2",
        &gg_integral(&left, &f).unwrap(),
        &gg_integral(&right, &f.reflected()).unwrap(),
    );

    let s1 = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.35])).unwrap();
    let f1 = TestFunction::exp_tr(1);
    let a = gg_integral(&IntegralSpec::new(Side::Left, 1.7, s1.clone()), &f1).unwrap().value;
    let b = gg_integral(
        &IntegralSpec::new(Side::Right, 1.7, SpdMatrix::new(s1.complement()).unwrap()),
        &f1.reflected(),
    )
    .unwrap()
    .value;
    t.rel("reflection l=1", a, b, 1e-6);

    let bump1 = TestFunction::bump(1);
    let spec1 = IntegralSpec::new(Side::Left, 1.3, SpdMatrix::new(SymmetricMatrix::diagonal(&[0.62])).unwrap());
    t.rel(
        "index law l=1",
        gg_continued(&spec1, &bump1, 1).unwrap().value,
        gg_integral(&spec1, &bump1).unwrap().value,
        1e-6,
    );
    let bump2 = TestFunction::bump(2);
    let s2 = SpdMatrix::new(SymmetricMatrix::new(2, vec![0.8, -0.06, 0.7]).unwrap()).unwrap();
    let spec2 = IntegralSpec::new(Side::Left, 1.4, s2).method(Method::Quadrature);
    t.rel(
        "index law l=2",
        gg_continued(&spec2, &bump2, 1).unwrap().value,
        gg_integral(&spec2, &bump2).unwrap().value,
        1e-3,
    );
    t.verdict()
}

fn half_integer_equivalence() -> Verdict {
    let mut t = Tally::default();
    for (rank, m) in [(1usize, 1usize), (1, 2), (1, 3), (2, 2), (2, 3)] {
        let s = interior(rank, 80 + (10 * rank + m) as u64);
        let f = TestFunction::exp_tr(rank);
        for side in [Side::Left, Side::Right] {
            let omega = gg_halfint(side, m, &f, &s, N, &RngState::new(81), Method::Uniform).unwrap();
            let spec = IntegralSpec::new(side, m as f64 / 2.0, s.clone())
                .samples(N)
                .rng(RngState::new(82))
                .method(Method::Uniform);
            let direct = gg_integral(&spec, &f).unwrap();
            t.z(&format!("gg {side:?} l={rank} m={m}"), &omega, &direct);
        }
        let spec = IntegralSpec::new(Side::Left, 2.0, s.clone()).samples(N).method(Method::Uniform);
        let omega = ek_omega_form(&spec.clone().rng(RngState::new(83)), m, &f).unwrap();
        let direct = ek_integral(
            &spec.rng(RngState::new(84)),
            WallachParameter::Generic(m as f64 / 2.0),
            &f,
        )
        .unwrap();
        t.z(&format!("ek Left l={rank} m={m}"), &omega, &direct);
    }
    t.verdict()
}

fn ek_normalization(side: Side) -> Verdict {
    let mut t = Tally::default();
    let s = interior(2, 91);
    for (beta, want) in [
        (WallachParameter::Generic(2.0), 1.0 / gamma2(4.0)),
        (WallachParameter::HalfInteger(1), 1.0 / gamma2(2.5)),
    ] {
        let spec = IntegralSpec::new(side, 2.0, s.clone())
            .samples(N)
            .rng(RngState::new(92))
            .method(Method::Uniform);
        let got = ek_integral(&spec, beta, &TestFunction::const1(2)).unwrap();
        t.z(&format!("{side:?} beta={}", beta.value()), &got, &exact(want));
    }
    t.verdict()
}

fn laplace_checks() -> Verdict {
    let mut t = Tally::default();
    let z = SpdMatrix::new(SymmetricMatrix::diagonal(&[2.0])).unwrap();
    let f = TestFunction::bump(1);
    let inner = f.clone();
    let lifted = TestFunction::new(
        "I^1 bump",
        1,
        matcone::testfn::Support::Cone,
        matcone::testfn::Smoothness::Smooth,
        move |r| {
            let s = SpdMatrix::new(r.clone()).unwrap();
            gg_integral(&IntegralSpec::new(Side::Left, 1.0, s), &inner).unwrap().value
        },
    );
    let rng = RngState::new(101);
    let lhs = laplace(&lifted, &z, N, &rng).unwrap().value;
    let rhs = 0.5 * laplace(&f, &z, N, &rng).unwrap().value;
    t.rel("factorization l=1 z=2", lhs, rhs, 1e-4);

    let z2 = SpdMatrix::new(SymmetricMatrix::new(2, vec![1.2, -0.4, 2.0]).unwrap()).unwrap();
    let got = laplace(&TestFunction::det_power(2, 2.5 - 1.5), &z2, N, &RngState::new(102)).unwrap();
    t.z("det power l=2 a=2.5", &got, &exact(gamma2(2.5) * z2.det().powf(-2.5)));
    t.verdict()
}

fn duality() -> Verdict {
    let cfg = GrassmannConfig::new(6, 2, 4, 2).unwrap();
    let (a, b) = duality_sides(
        &cfg,
        &TestFunction::exp_tr(2),
        &TestFunction::trace(2),
        1000,
        1000,
        &RngState::new(111),
    )
    .unwrap();
    let mut t = Tally::default();
    t.z("(6,2,4) exp-tr/trace", &a, &b);
    t.verdict()
}

fn theorem_rows(
    dims: &[[usize; 4]],
    names: [&str; 2],
    run: impl Fn(&GrassmannConfig, &TestFunction, &RngState) -> matcone::Result<matcone::radon::TheoremCheck>,
) -> Verdict {
    let mut t = Tally::default();
    for &[n, m, k, l] in dims {
        let cfg = GrassmannConfig::new(n, m, k, l).unwrap();
        for name in names {
            let f0 = TestFunction::by_name(name, l, 0.0).unwrap();
            let label = format!("({n},{m},{k},l={l}) {name}");
            let check = match run(&cfg, &f0, &RngState::new((n * 1000 + m * 100 + k * 10 + l) as u64)) {
                Ok(c) => c,
                Err(e) => {
                    t.record(&label, format!("error {e}"), false);
                    continue;
                }
            };
            if name == "const1" {
                let ok = check.lhs.value == 1.0
                    && check.rhs.stderr <= 1e-3
                    && (check.rhs.value - 1.0).abs() <= Z_CAP * check.rhs.stderr.max(1e-12);
                t.record(
                    &label,
                    format!("lhs={} rhs={:.6}±{:.1e}", check.lhs.value, check.rhs.value, check.rhs.stderr),
                    ok,
                );
            } else {
                t.z(&label, &check.lhs, &check.rhs);
            }
        }
    }
    t.verdict()
}

fn reproducibility() -> Verdict {
    let cfg = SuiteConfig::default();
    let report = |workers: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
        let rows = pool.install(|| run_suite(&cfg, false)).unwrap();
        Report::new(&cfg, None, rows).to_json()
    };
    let (one, four) = (report(1), report(4));
    let mut t = Tally::default();
    t.record(
        "full suite, seed 42, 1 vs 4 workers",
        format!("{} bytes", one.len()),
        one == four,
    );
    t.verdict()
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("01 closed-form specials", Box::new(closed_form_specials)),
        ("02 gamma ratio identity", Box::new(gamma_ratio_identity)),
        ("03 matrix-interval volume", Box::new(interval_volume)),
        ("04 Haar correctness", Box::new(haar_correctness)),
        ("05 polar and bi-Stiefel measures", Box::new(polar_and_bistiefel)),
        ("06 GG closed form", Box::new(gg_closed_form)),
        ("07 reflection and index law", Box::new(reflection_and_index_law)),
        ("08 half-integer equivalence", Box::new(half_integer_equivalence)),
        ("09 EK normalization, left side", Box::new(|| ek_normalization(Side::Left))),
        ("09 EK normalization, right side", Box::new(|| ek_normalization(Side::Right))),
        ("10 Laplace transform", Box::new(laplace_checks)),
        ("11 duality", Box::new(duality)),
        (
            "12 Radon zonal theorem",
            Box::new(|| {
                theorem_rows(&[[6, 2, 4, 2], [7, 1, 5, 2], [7, 2, 5, 1]], ["const1", "exp-tr"], |c, f, r| {
                    verify_radon_theorem(c, f, N, r)
                })
            }),
        ),
        (
            "13 dual Radon zonal theorem",
            Box::new(|| {
                theorem_rows(&[[7, 2, 5, 2], [8, 2, 5, 2]], ["const1", "trace"], |c, f, r| {
                    verify_dual_theorem(c, f, N, r)
                })
            }),
        ),
        ("14 reproducibility", Box::new(reproducibility)),
    ];
    let mut failures = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
