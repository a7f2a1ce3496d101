use cnp_core::kernels::{BallPoint, KernelExpr};
use cnp_core::linalg::{self, PsdStatus};
use cnp_core::series::PowerSeries;
use cnp_core::Cplx;
use proptest::prelude::*;

fn disk_point(r_max: f64) -> impl Strategy<Value = Cplx> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Cplx::from_polar(r, t))
}

fn disk_points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Cplx>> {
    prop::collection::vec(disk_point(0.9), n)
}

fn ball(pts: &[Cplx]) -> Vec<BallPoint> {
    pts.iter().map(|&z| BallPoint::disk(z)).collect()
}

/// Schur-class series with `Σ|b_k| ≤ 0.95`.
fn schur_series() -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..8).prop_map(|v| {
        let c: Vec<Cplx> = v.into_iter().map(|(a, b)| Cplx::new(a, b)).collect();
        let total: f64 = c.iter().map(|x| x.norm()).sum();
        let s = if total > 0.95 { 0.95 / total } else { 1.0 };
        let mut c: Vec<Cplx> = c.into_iter().map(|x| x * s).collect();
        if c[1].norm() < 1e-3 {
            c[1] = Cplx::new(0.1, 0.0);
        }
        PowerSeries::at_origin(c).unwrap()
    })
}

fn kernels() -> impl Strategy<Value = KernelExpr> {
    let base = prop_oneof![
        Just(KernelExpr::Szego),
        Just(KernelExpr::weighted_hardy((1..=64).map(|n| n as f64).collect()).unwrap()),
        Just(KernelExpr::weighted_hardy((1..=64).map(|n| 1.0 / n as f64).collect()).unwrap()),
        schur_series().prop_map(|b| KernelExpr::Dbr { b }),
    ];
    (base, schur_series(), schur_series(), 0usize..4).prop_map(|(k, phi, f, which)| match which {
        0 => k,
        1 => KernelExpr::pullback(k, phi).unwrap(),
        2 => KernelExpr::congruence(k, f).unwrap(),
        _ => KernelExpr::sum(k, KernelExpr::constant(0.5).unwrap()).unwrap(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conjugate_symmetry(k in kernels(), z in disk_point(0.95), w in disk_point(0.95)) {
        let a = k.eval_disk(z, w).unwrap();
        let b = k.eval_disk(w, z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn pullback_gram_commutes(phi in schur_series(), pts in disk_points(1..12)) {
        let k = KernelExpr::Szego;
        let pulled = linalg::gram(&KernelExpr::pullback(k.clone(), phi.clone()).unwrap(), &ball(&pts)).unwrap();
        let mapped: Vec<Cplx> = pts.iter().map(|&z| phi.eval(z)).collect();
        let direct = linalg::gram(&k, &ball(&mapped)).unwrap();
        prop_assert_eq!(pulled.entries(), direct.entries());
    }

    #[test]
    fn unit_weights_match_szego(z in disk_point(0.8), w in disk_point(0.8)) {
        let wh = KernelExpr::weighted_hardy(vec![1.0; 256]).unwrap();
        let tail = (z.norm() * w.norm()).powi(256) / (1.0 - 0.64);
        prop_assert!((wh.eval_disk(z, w).unwrap() - KernelExpr::Szego.eval_disk(z, w).unwrap()).norm() <= tail + 1e-14);
    }

    #[test]
    fn drury_arveson_one_is_szego(z in disk_point(0.99), w in disk_point(0.99)) {
        let da = KernelExpr::drury_arveson(1).unwrap();
        prop_assert_eq!(da.eval_disk(z, w).unwrap(), KernelExpr::Szego.eval_disk(z, w).unwrap());
    }

    #[test]
    fn congruence_is_diagonal_scaling(k in kernels(), f in schur_series(), pts in disk_points(1..10)) {
        let g = linalg::gram(&k, &ball(&pts)).unwrap();
        let c = linalg::gram(&KernelExpr::congruence(k.clone(), f.clone()).unwrap(), &ball(&pts)).unwrap();
        let d: Vec<Cplx> = pts.iter().map(|&z| f.eval(z)).collect();
        let n = pts.len();
        for i in 0..n {
            for j in 0..n {
                // K_F(z, w) = F(z) K(z, w) conj(F(w))
                let want = d[i] * g.get(i, j) * d[j].conj();
                prop_assert!((c.get(i, j) - want).norm() <= 1e-12 * g.scale().max(1.0));
            }
        }
        if d.iter().all(|x| x.norm() > 1e-6) && g.dim() > 0 {
            let tol = linalg::default_tol(&g);
            if linalg::psd_verdict(&g, tol).status == PsdStatus::Psd {
                let ct = linalg::default_tol(&c).max(tol);
                prop_assert_ne!(linalg::psd_verdict(&c, ct).status, PsdStatus::NotPsd);
            }
        }
    }

    #[test]
    fn schur_product_of_szego_grams(pts in disk_points(2..14), phi in schur_series()) {
        let a = linalg::gram(&KernelExpr::Szego, &ball(&pts)).unwrap();
        let b = linalg::gram(&KernelExpr::pullback(KernelExpr::Szego, phi).unwrap(), &ball(&pts)).unwrap();
        let raw = a.entries().iter().zip(b.entries()).map(|(x, y)| x * y).collect();
        let p = linalg::HermitianMatrix::from_raw(pts.len(), raw, "schur product").unwrap();
        let tol = linalg::default_tol(&p);
        prop_assert!(linalg::min_eig_hermitian(&p).unwrap() >= -tol);
    }

    #[test]
    fn gram_permutation_invariance(k in kernels(), pts in disk_points(2..12), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..pts.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let shuffled: Vec<Cplx> = perm.iter().map(|&i| pts[i]).collect();
        let g = linalg::gram(&k, &ball(&pts)).unwrap();
        let h = linalg::gram(&k, &ball(&shuffled)).unwrap();
        for (a, &i) in perm.iter().enumerate() {
            for (b, &j) in perm.iter().enumerate() {
                prop_assert_eq!(h.get(a, b), g.get(i, j));
            }
        }
        let tol = linalg::default_tol(&g);
        prop_assert_eq!(linalg::psd_verdict(&g, tol).status, linalg::psd_verdict(&h, tol).status);
    }
}
