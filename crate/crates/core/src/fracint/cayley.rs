//! The Cayley-type operators `D_± = (±1)^ℓ det(η_ij ∂/∂r_ij)` with
//! `η_ii = 1`, `η_ij = 1/2` off the diagonal, and the continuation of the
//! Gårding–Gindikin integrals they provide: `I_±^α f = I_±^{α+j} D_±^j f`.

use super::{gg_integral, IntegralSpec, Side};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::mc::MonteCarloEstimate;
use crate::testfn::{Smoothness, TestFunction};

/// Smallest accepted finite-difference step.
pub const MIN_STEP: f64 = 1e-5;

/// `1e−3 · (1 + ‖r‖_max)`.
pub fn default_step(r: &SymmetricMatrix) -> f64 {
    1e-3 * (1.0 + r.max_abs())
}

/// Permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (tail, sign) in permutations(n - 1) {
        // insert n−1 at position p; it passes over n−1−p larger-index slots
        for p in 0..n {
            let mut perm = tail.clone();
            perm.insert(p, n - 1);
            let flips = n - 1 - p;
            out.push((perm, if flips.is_multiple_of(2) { sign } else { -sign }));
        }
    }
    out
}

fn mixed_partial(f: &TestFunction, r: &SymmetricMatrix, vars: &[(usize, usize)], h: f64) -> f64 {
    let order = vars.len();
    let mut total = 0.0;
    for mask in 0..(1u32 << order) {
        let mut x = r.clone();
        let mut sign = 1.0;
        for (k, &(i, j)) in vars.iter().enumerate() {
            let e = if mask & (1 << k) != 0 { 1.0 } else { -1.0 };
            sign *= e;
            x.set(i, j, x.get(i, j) + e * h);
        }
        total += sign * f.eval(&x);
    }
    total / (2.0 * h).powi(order as i32)
}

fn operator(f: &TestFunction, r: &SymmetricMatrix, h: f64) -> f64 {
    let n = r.dim();
    permutations(n)
        .into_iter()
        .map(|(perm, sign)| {
            let vars: Vec<(usize, usize)> = perm.iter().enumerate().map(|(i, &j)| (i, j)).collect();
            let eta: f64 = vars.iter().map(|&(i, j)| if i == j { 1.0 } else { 0.5 }).product();
            sign * eta * mixed_partial(f, r, &vars, h)
        })
        .sum()
}

/// `(D_± f)(r)` by central differences of step `h` over the Leibniz
/// expansion of the operator determinant, with one Richardson step.
pub fn cayley_apply(side: Side, f: &TestFunction, r: &SymmetricMatrix, h: f64) -> Result<f64> {
    if !(h >= MIN_STEP) {
        return Err(Error::StepTooSmall { h });
    }
    f.check_rank(r.dim())?;
    let coarse = operator(f, r, h);
    let fine = operator(f, r, h / 2.0);
    let plus = (4.0 * fine - coarse) / 3.0;
    Ok(match side {
        Side::Right if r.dim() % 2 == 1 => -plus,
        _ => plus,
    })
}

/// `r ↦ (D_± f)(r)` with the default step.
pub fn cayley_function(side: Side, f: &TestFunction) -> TestFunction {
    let inner = f.clone();
    let sign = if side == Side::Left { "+" } else { "-" };
    TestFunction::new(
        format!("D{sign}{}", f.name()),
        f.rank(),
        f.support(),
        Smoothness::Smooth,
        move |r| cayley_apply(side, &inner, r, default_step(r)).expect("default step is above the guard"),
    )
}

/// `(I_±^α f)(s)` evaluated as `(I_±^{α+j} D_±^j f)(s)`. Only `α + j` has
/// to exceed `(ℓ−1)/2`, so this reaches orders where the integral itself
/// diverges. Meaningful for smooth `f` supported inside the unit interval.
pub fn gg_continued(spec: &IntegralSpec, f: &TestFunction, j: usize) -> Result<MonteCarloEstimate> {
    let mut g = f.clone();
    for _ in 0..j {
        g = cayley_function(spec.side, &g);
    }
    let lifted = IntegralSpec {
        alpha: spec.alpha + j as f64,
        ..spec.clone()
    };
    gg_integral(&lifted, &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let total: f64 = perms.iter().map(|p| p.1).sum();
        assert_eq!(total, 0.0);
        let id = perms.iter().find(|p| p.0 == vec![0, 1, 2]).unwrap();
        assert_eq!(id.1, 1.0);
        let swap = perms.iter().find(|p| p.0 == vec![1, 0, 2]).unwrap();
        assert_eq!(swap.1, -1.0);
        let cycle = perms.iter().find(|p| p.0 == vec![1, 2, 0]).unwrap();
        assert_eq!(cycle.1, 1.0);
    }

    #[test]
    fn derivative_of_square() {
        let f = TestFunction::new("r^2", 1, crate::testfn::Support::Cone, Smoothness::Smooth, |r| {
            r.get(0, 0).powi(2)
        });
        let r = SymmetricMatrix::diagonal(&[1.0]);
        let got = cayley_apply(Side::Left, &f, &r, default_step(&r)).unwrap();
        assert!((got - 2.0).abs() < 1e-9);
        let got = cayley_apply(Side::Right, &f, &r, default_step(&r)).unwrap();
        assert!((got + 2.0).abs() < 1e-9);
    }

    #[test]
    fn operator_on_determinant_and_trace() {
        let det = TestFunction::new("det", 2, crate::testfn::Support::Cone, Smoothness::Smooth, |r| r.det());
        let r = SymmetricMatrix::new(2, vec![0.3, 0.1, 0.6]).unwrap();
        let got = cayley_apply(Side::Left, &det, &r, default_step(&r)).unwrap();
        assert!((got - 1.5).abs() < 1e-8, "{got}");
        let got = cayley_apply(Side::Left, &TestFunction::trace(2), &r, default_step(&r)).unwrap();
        assert!(got.abs() < 1e-8);
    }

    #[test]
    fn rank_three_determinant() {
        // D_+ det = ∏ (1 + j/2), j = 0..ℓ−1, which is 3 for ℓ = 3
        let det = TestFunction::new("det", 3, crate::testfn::Support::Cone, Smoothness::Smooth, |r| r.det());
        let r = SymmetricMatrix::new(3, vec![0.5, 0.1, 0.0, 0.4, 0.05, 0.6]).unwrap();
        let got = cayley_apply(Side::Left, &det, &r, default_step(&r)).unwrap();
        assert!((got - 3.0).abs() < 1e-6, "{got}");
    }

    #[test]
    fn step_guard() {
        let r = SymmetricMatrix::identity(1);
        assert!(matches!(
            cayley_apply(Side::Left, &TestFunction::trace(1), &r, 1e-6),
            Err(Error::StepTooSmall { .. })
        ));
    }

    #[test]
    fn index_law_rank_one() {
        let f = TestFunction::bump(1);
        let s = SpdMatrix::new(SymmetricMatrix::diagonal(&[0.62])).unwrap();
        for side in [Side::Left, Side::Right] {
            let spec = IntegralSpec::new(side, 1.3, s.clone());
            let direct = gg_integral(&spec, &f).unwrap().value;
            let continued = gg_continued(&spec, &f, 1).unwrap().value;
            assert!((continued / direct - 1.0).abs() < 1e-6, "{side:?} {continued} vs {direct}");
        }
        // order zero returns the function itself
        let spec = IntegralSpec::new(Side::Left, 0.0, s.clone());
        let got = gg_continued(&spec, &f, 1).unwrap().value;
        assert!((got / f.eval(&s) - 1.0).abs() < 1e-6);
    }

    mod properties {
        use super::*;
        use crate::fracint::{gg_integral, Side};
        use crate::linalg::SymmetricMatrix;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn index_law_rank_one(alpha in 0.3f64..3.0, s in 0.2f64..0.95, left in any::<bool>()) {
                let side = if left { Side::Left } else { Side::Right };
                let spec = IntegralSpec::new(side, alpha, SpdMatrix::new(SymmetricMatrix::diagonal(&[s])).unwrap());
                let f = TestFunction::bump(1);
                let direct = gg_integral(&spec, &f).unwrap().value;
                prop_assume!(direct.abs() > 1e-6);
                let continued = gg_continued(&spec, &f, 1).unwrap().value;
                prop_assert!((continued / direct - 1.0).abs() < 1e-6, "{continued} vs {direct}");
            }

            #[test]
            fn reflection_rank_one(alpha in 0.2f64..4.0, s in 0.05f64..0.95) {
                let f = TestFunction::exp_tr(1);
                let point = |x: f64| SpdMatrix::new(SymmetricMatrix::diagonal(&[x])).unwrap();
                let a = gg_integral(&IntegralSpec::new(Side::Left, alpha, point(s)), &f).unwrap().value;
                let b = gg_integral(&IntegralSpec::new(Side::Right, alpha, point(1.0 - s)), &f.reflected())
                    .unwrap()
                    .value;
                prop_assert!((a / b - 1.0).abs() < 1e-6);
            }
        }
    }
}
