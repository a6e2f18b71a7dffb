use std::f64::consts::FRAC_PI_2;

use unitint::factorization::{
    hierarchical_solve, solve_factored, FactoredSolution, FiberStrategy, SolveOptions,
};
use unitint::hamiltonian::{
    build_so5, zero_hamiltonian, BlockedHamiltonian, ConstantHamiltonian, So5Coefficients, SpinHalfField,
    TrigHamiltonian,
};
use unitint::linalg::pauli::{identity2, sigma_x};
use unitint::linalg::random::random_traceless_hermitian;
use unitint::linalg::{expm, CMatrix, C64, I};
use unitint::ode::Grid;
use unitint::oracle::{compare, propagate_grid};
use unitint::riccati::RiccatiForm;

fn solve(h: &BlockedHamiltonian, t_end: f64, steps: usize, strategy: FiberStrategy) -> FactoredSolution {
    let grid = Grid::new(0.0, t_end, steps).unwrap();
    solve_factored(h, &SolveOptions::new(grid, strategy)).unwrap()
}

fn oracle_end(h: &BlockedHamiltonian, t_end: f64, steps: usize) -> CMatrix {
    propagate_grid(h.hamiltonian().as_ref(), &Grid::new(0.0, t_end, steps).unwrap())
        .unwrap()
        .pop()
        .unwrap()
}

#[test]
fn zero_hamiltonian_gives_identity() {
    for (dim, n, strategy) in [(3, 1, FiberStrategy::Hierarchical), (4, 2, FiberStrategy::Direct)] {
        let h = BlockedHamiltonian::new(zero_hamiltonian(dim), n).unwrap();
        let sol = solve(&h, 1.0, 20, strategy);
        for u in sol.u_samples().unwrap() {
            assert!((&u - &CMatrix::identity(dim)).max_abs() < 1e-15);
        }
        if let Some(p) = &sol.phases {
            assert!(p.mu_total.iter().chain(&p.geometric).chain(&p.dynamical).all(|x| *x == 0.0));
        }
    }
}

#[test]
fn spin_half_rotation() {
    let h = BlockedHamiltonian::new(SpinHalfField::constant([1.0, 0.0, 0.0]), 1).unwrap();
    for strategy in [FiberStrategy::Hierarchical, FiberStrategy::Direct] {
        let sol = solve(&h, 1.0, 1000, strategy);
        let exact = &identity2().scale_real(0.5f64.cos()) + &sigma_x().scale(I * 0.5f64.sin());
        assert!((sol.final_u() - &exact).norm_fro() < 1e-7);
        assert!(sol.phases.as_ref().unwrap().mu_total.iter().all(|m| m.abs() < 1e-14));
    }
}

#[test]
fn constant_su3_matches_exponential() {
    let hm = random_traceless_hermitian(3, 17);
    let h = BlockedHamiltonian::new(ConstantHamiltonian(hm.clone()), 1).unwrap();
    let sol = hierarchical_solve(&h, 1.0, 2000).unwrap();
    let exact = expm(&hm.scale(-I));
    assert!((sol.final_u() - &exact).norm_fro() < 1e-6);
}

#[test]
fn trig_su4_matches_oracle() {
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(4, 2, 1.7, 0.8, 5), 1).unwrap();
    let sol = hierarchical_solve(&h, 1.0, 1000).unwrap();
    let reference = oracle_end(&h, 1.0, 8000);
    let d = compare(sol.final_u(), &reference).unwrap();
    assert!(d.phase_insensitive < 1e-6, "{d:?}");
    assert!(d.plain < 1e-6, "{d:?}");
}

#[test]
fn so5_across_the_pole() {
    let coeffs = So5Coefficients::f54(1.0);
    let h = build_so5(coeffs.clone()).unwrap();
    let grid = Grid::new(0.0, 2.0, 2000).unwrap();
    for form in [RiccatiForm::Matrix, RiccatiForm::So5(coeffs.clone())] {
        let sol = solve_factored(&h, &SolveOptions::new(grid, FiberStrategy::Direct).form(form)).unwrap();
        assert_eq!(sol.trajectory.restarts.len(), 1);
        // ‖z‖_F = √2·tan t reaches 10 shortly before the pole
        let t_r = sol.trajectory.restarts[0].time;
        assert!(t_r < FRAC_PI_2 && (t_r - (10.0 / 2f64.sqrt()).atan()).abs() < 2e-3, "{t_r}");
        let reference = oracle_end(&h, 2.0, 4000);
        assert!(compare(sol.final_u(), &reference).unwrap().plain < 1e-6);
    }
}

#[test]
fn direct_general_block_size() {
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(5, 1, 1.1, 0.7, 8), 2).unwrap();
    let sol = solve(&h, 1.0, 500, FiberStrategy::Direct);
    assert!(sol.phases.is_none());
    let reference = oracle_end(&h, 1.0, 8000);
    assert!(compare(sol.final_u(), &reference).unwrap().plain < 1e-6);
    assert!(matches!(
        solve_factored(&h, &SolveOptions::new(Grid::new(0.0, 1.0, 10).unwrap(), FiberStrategy::Hierarchical)),
        Err(unitint::Error::Unsupported(_))
    ));
}

#[test]
fn factors_satisfy_their_relations() {
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(4, 2, 1.0, 1.5, 3), 1).unwrap();
    let sol = solve(&h, 3.0, 3000, FiberStrategy::Hierarchical);
    for k in (0..=3000).step_by(37) {
        let f = sol.evolution_at(k).unwrap();
        assert!((&f.z + &(&f.gamma1 * &f.w)).max_abs() < 1e-10 * (1.0 + f.z.norm_fro().powi(2)));
        assert!(f.u1.is_unitary(1e-9));
        assert!(f.u2.is_unitary(1e-9));
        assert!(f.u.is_unitary(1e-8));
        // γ₁ = Ũ^(N−n)Ũ^(N−n)† from the upper-left block of Ũ₁ = U₁b⁻¹
        let tilde = &f.u1 * &f.b.inverse().unwrap();
        let ul = tilde.block(0, 0, 3, 3);
        let gi = f.gamma1.inverse().unwrap();
        assert!((&(&ul * &ul.adjoint()) - &(&gi * &gi)).max_abs() < 1e-9);
    }
    assert_eq!(sol.u_at(0).unwrap(), CMatrix::identity(4));
}

#[test]
fn solves_the_schroedinger_equation() {
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(3, 2, 2.0, 1.0, 12), 1).unwrap();
    let sol = solve(&h, 2.0, 2000, FiberStrategy::Hierarchical);
    let us = sol.u_samples().unwrap();
    let times = sol.times();
    let step = times[1] - times[0];
    for k in 1..us.len() - 1 {
        let hm = h.eval(times[k]).unwrap();
        let du = (&us[k + 1] - &us[k - 1]).scale_real(0.5 / step);
        let resid = (&du.scale(I) - &(&hm * &us[k])).norm_fro();
        assert!(resid < 1e-4 * hm.norm_fro());
    }
}

#[test]
fn gauge_freedom_leaves_the_product_unchanged() {
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(4, 1, 1.0, 1.0, 30), 2).unwrap();
    let sol = solve(&h, 1.0, 200, FiberStrategy::Direct);
    let f = sol.evolution_at(150).unwrap();
    let d = CMatrix::block_diag(
        &expm(&random_traceless_hermitian(2, 1).scale(-I)),
        &expm(&random_traceless_hermitian(2, 2).scale(-I)).scale(C64::from_polar(1.0, 0.4)),
    );
    let u1 = &f.u1 * &d;
    let u2 = &d.adjoint() * &f.u2;
    assert!(u1.is_unitary(1e-10));
    assert!((&(&u1 * &u2) - &(&f.u1 * &f.u2)).max_abs() < 1e-10);
}

#[test]
fn phase_examples() {
    let b3 = 1.3;
    let h = BlockedHamiltonian::new(SpinHalfField::constant([0.0, 0.0, b3]), 1).unwrap();
    let sol = solve(&h, 2.0, 400, FiberStrategy::Hierarchical);
    let p = sol.phases.as_ref().unwrap();
    for (k, t) in sol.times().into_iter().enumerate() {
        assert!((p.mu_total[k] + b3 * t / 2.0).abs() < 1e-12);
        assert!(p.geometric[k].abs() < 1e-12);
    }
    // the corner of U is e^{iμ}
    let u = sol.final_u();
    assert!((u[(1, 1)] - C64::from_polar(1.0, -b3)).norm() < 1e-12);
}

#[test]
fn phase_split_and_complex_phase() {
    for (dim, seed) in [(2, 1), (3, 2), (4, 3)] {
        let h = BlockedHamiltonian::new(TrigHamiltonian::random(dim, 2, 1.2, 1.0, seed), 1).unwrap();
        let sol = solve(&h, 1.0, 1000, FiberStrategy::Hierarchical);
        let p = sol.phases.as_ref().unwrap();
        for k in 0..p.len() {
            assert!((p.geometric[k] + p.dynamical_integrated[k] - p.mu_total[k]).abs() < 1e-7);
            if sol.trajectory.restarts.is_empty() {
                let gamma = 1.0 + sol.trajectory.z_at(k).norm_fro().powi(2);
                assert!((p.im_mu[k].exp() - gamma).abs() < 1e-8);
            }
        }
        let totals = sol.level_totals();
        assert_eq!(totals.iter().map(|t| t.level).collect::<Vec<_>>(), (2..=dim).rev().collect::<Vec<_>>());
    }
}
