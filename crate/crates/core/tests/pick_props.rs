use cnp_core::kernels::KernelExpr;
use cnp_core::linalg::{self, PsdStatus};
use cnp_core::pickinterp::{self, InterpolationProblem};
use cnp_core::Cplx;
use proptest::prelude::*;

fn cplx_in(r_max: f64) -> impl Strategy<Value = Cplx> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Cplx::from_polar(r, t))
}

/// Shrinks the targets toward 0 until the Pick matrix has `min_eig > 0.05`.
fn strictly_solvable(nodes: Vec<Cplx>, targets: Vec<Cplx>) -> Option<InterpolationProblem> {
    let mut s = 1.0;
    for _ in 0..60 {
        let t: Vec<Cplx> = targets.iter().map(|x| x * s).collect();
        let p = InterpolationProblem::new(nodes.clone(), t).ok()?;
        let m = linalg::pick_matrix(&KernelExpr::Szego, &p.ball_nodes(), p.targets()).ok()?;
        if linalg::min_eig_hermitian(&m).ok()? > 0.05 {
            return Some(p);
        }
        s *= 0.8;
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn schur_round_trip(nodes in prop::collection::vec(cplx_in(0.9), 1..6), targets in prop::collection::vec(cplx_in(1.0), 6)) {
        let n = nodes.len();
        let p = strictly_solvable(nodes, targets[..n].to_vec());
        prop_assume!(p.is_some());
        let p = p.unwrap();
        let f = pickinterp::schur_interpolant(&p).unwrap();
        prop_assert!(f.params.iter().all(|(_, g)| g.norm() <= 1.0 + 1e-10));
        prop_assert!(f.residuals(&p).iter().all(|r| *r < 1e-8));
        prop_assert!(f.sampled_sup(0.999, 1024) <= 1.0 + 1e-6);
        let v = pickinterp::pick_solvable(&p, &KernelExpr::Szego, 1e-9).unwrap();
        prop_assert_eq!(v.status, PsdStatus::Psd);
    }

    #[test]
    fn success_implies_psd(nodes in prop::collection::vec(cplx_in(0.95), 1..5), targets in prop::collection::vec(cplx_in(1.2), 5)) {
        let n = nodes.len();
        if let Ok(p) = InterpolationProblem::new(nodes, targets[..n].to_vec()) {
            if pickinterp::schur_interpolant(&p).is_ok() {
                let v = pickinterp::pick_solvable(&p, &KernelExpr::Szego, 1e-9).unwrap();
                prop_assert_eq!(v.status, PsdStatus::Psd);
            }
        }
    }
}
