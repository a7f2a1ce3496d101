use cnp_core::series::PowerSeries;
use cnp_core::Cplx;
use proptest::prelude::*;

fn cplx(r: f64, theta: f64) -> Cplx {
    Cplx::from_polar(r, theta)
}

/// `a0 + a1 (z + Σ c_k z^k)` with `|a1|` in `[0.2, 2]` and `|c_k| ≤ 0.15^(k-1)`,
/// so the linear term dominates on the unit disk. Without some such decay
/// the inverse coefficients grow geometrically and cancellation in `h∘s`
/// alone exceeds the tolerance.
fn invertible_series(order: usize) -> impl Strategy<Value = PowerSeries> {
    (
        -1.0..1.0f64,
        0.0..1.0f64,
        0.2..2.0f64,
        0.0..std::f64::consts::TAU,
        prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU), order - 1),
    )
        .prop_map(move |(a0, a0i, r1, t1, rest)| {
            let a1 = cplx(r1, t1);
            let mut c = vec![Cplx::new(a0, a0i), a1];
            for (k, (r, t)) in rest.into_iter().enumerate() {
                c.push(a1 * cplx(r * 0.15f64.powi(k as i32 + 1), t));
            }
            PowerSeries::at_origin(c).unwrap()
        })
}

fn small_series(order: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), order + 1).prop_map(|v| {
        let c = v
            .into_iter()
            .enumerate()
            .map(|(k, (re, im))| Cplx::new(re, im) * 0.6f64.powi(k as i32))
            .collect();
        PowerSeries::at_origin(c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reversion_round_trip(s in invertible_series(64)) {
        let h = s.revert().unwrap();
        let id = h.compose(&s).unwrap();
        prop_assert!((id.coeff(0) - s.center()).norm() < 1e-9);
        prop_assert!((id.coeff(1) - Cplx::new(1.0, 0.0)).norm() < 1e-9);
        for k in 2..=id.order() {
            prop_assert!(id.coeff(k).norm() < 1e-9, "coefficient {k}: {}", id.coeff(k));
        }
    }

    #[test]
    fn product_evaluates_to_product(a in small_series(64), b in small_series(64), r in 0.0..0.3f64, t in 0.0..6.3f64) {
        let z = cplx(r, t);
        let p = a.mul(&b).unwrap();
        let want = a.eval(z) * b.eval(z);
        // dropped tail is at most Σ_{n>64} (n+1) 0.6^n 2 |z|^n
        prop_assert!((p.eval(z) - want).norm() < 1e-12);
    }

    #[test]
    fn division_then_multiplication(num in small_series(40), den in small_series(40), shift in 0usize..3) {
        let zero = Cplx::new(0.0, 0.0);
        // keep den zero-free on the unit disk so 1/den has decaying coefficients
        let den = den.add(&PowerSeries::constant(zero, Cplx::new(3.0, 0.0), 40)).unwrap();
        // give both a common zero of order `shift` at the center
        let zk = PowerSeries::at_origin(
            (0..=40).map(|k| if k == shift { Cplx::new(1.0, 0.0) } else { zero }).collect(),
        )
        .unwrap();
        let num = num.mul(&zk).unwrap();
        let den = den.mul(&zk).unwrap();
        let q = num.div_factor(&den).unwrap();
        let back = q.mul(&den.truncate(q.order())).unwrap();
        for k in 0..=q.order() {
            prop_assert!((back.coeff(k) - num.coeff(k)).norm() < 1e-9, "coefficient {k}");
        }
    }
}
