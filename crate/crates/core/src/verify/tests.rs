use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use super::*;
use crate::linalg::{inner, C64};
use crate::lsd::{decompose, decompose_unverified, LsdOptions, LsdProgram, PPT_TOL};
use crate::sdp::{SdpSolution, SolveStatus, SolverConfig};
use crate::two_qubit::*;

fn blank(rho: &DensityMatrix, case: CaseTag) -> LsdDecomposition {
    LsdDecomposition {
        s: 1.0,
        rho_sep_tilde: rho.matrix().clone(),
        rho_pure_tilde: HermitianMatrix::zeros(4),
        pure_vector: None,
        z1: HermitianMatrix::zeros(4),
        z2: HermitianMatrix::zeros(4),
        a: None,
        b: None,
        theta: None,
        case,
        residuals: WkReport::default(),
        gamma: None,
        certificate: None,
    }
}

/// `werner(0.8) = 0.3·werner(1/3) + 0.7·|ψ⁻⟩⟨ψ⁻|` with `Z₁ = 0`, `Z₂ = 2|ψ⁻⟩⟨ψ⁻|`.
/// The singlet spans the kernel of `werner(1/3)^T1`, and `Z₂^T1` has eigenvalue
/// −1 on the singlet.
fn exact_werner() -> (DensityMatrix, LsdDecomposition) {
    let rho = werner_state(0.8).unwrap();
    let singlet_proj = singlet().projector();
    let mut dec = blank(&rho, CaseTag::FullRank);
    dec.s = 0.3;
    dec.rho_sep_tilde = werner_state(1.0 / 3.0).unwrap().scale(0.3);
    dec.rho_pure_tilde = singlet_proj.scale(0.7);
    dec.pure_vector = Some(singlet());
    dec.z2 = singlet_proj.scale(2.0);
    (rho, dec)
}

fn entangled(seed: u64, make: fn(u64) -> crate::error::Result<DensityMatrix>) -> DensityMatrix {
    (seed..).map(|s| make(s).unwrap()).find(|r| !is_ppt(r, PPT_TOL).unwrap()).unwrap()
}

fn full_rank(seed: u64) -> crate::error::Result<DensityMatrix> {
    random_density(4, seed)
}

fn corpus_state(seed: u64) -> DensityMatrix {
    match seed % 4 {
        0 => entangled(seed, full_rank),
        1 => entangled(seed, rank3_entangled_gamma),
        2 => entangled(seed, rank3_product_gamma),
        _ => analytic_product_sample(seed).unwrap().rho,
    }
}

#[test]
fn validity_of_exact_werner_split() {
    let (rho, dec) = exact_werner();
    let r = check_validity(&rho, &dec).unwrap();
    assert!(r.sum_residual <= 1e-10);
    assert!(r.sep_trace_residual <= 1e-10);
    assert!(r.sep_min_eig >= -1e-10 && r.sep_pt_min_eig.abs() <= 1e-10);
    assert!(r.pure_min_eig.abs() <= 1e-10 && r.pure_second_eig.abs() <= 1e-10);
}

#[test]
fn validity_detects_perturbation() {
    let (rho, mut dec) = exact_werner();
    dec.rho_sep_tilde.add_scaled(0.01, &sigma_tau(3, 3));
    let r = check_validity(&rho, &dec).unwrap();
    assert!((r.sum_residual - 0.02).abs() < 1e-12);
}

#[test]
fn validity_of_separable_case() {
    let rho = random_separable(5, 3).unwrap();
    let r = check_validity(&rho, &blank(&rho, CaseTag::Separable)).unwrap();
    assert_eq!(r.pure_min_eig, 0.0);
    assert_eq!(r.sum_residual, 0.0);
    assert!(r.failures(CaseTag::Separable).is_empty());
}

#[test]
fn wellens_kus_on_exact_werner() {
    let (rho, dec) = exact_werner();
    let r = check_wk_full(&rho, &dec).unwrap();
    assert!(r.wk1 <= 1e-12 && r.wk2 <= 1e-12, "{r:?}");
    assert_eq!(r.mu_hat, Some(0.0));
    assert!((r.alpha_hat - 1.0).abs() < 1e-12);
    let witness = crate::lsd::extract_witness(&dec).unwrap().w;
    assert!((witness.trace_product(&rho).re + 0.7).abs() < 1e-12);
}

#[test]
fn wellens_kus_detects_swapped_duals() {
    let (rho, mut dec) = exact_werner();
    std::mem::swap(&mut dec.z1, &mut dec.z2);
    assert!(check_wk_full(&rho, &dec).unwrap().wk1 >= 0.1);
}

#[test]
fn certified_werner_solution() {
    let rho = werner_state(0.8).unwrap();
    let dec = decompose(&rho, &SolverConfig::default()).unwrap();
    let r = check_wk_full(&rho, &dec).unwrap();
    assert!(r.wk1 <= 1e-6 && r.wk2 <= 1e-6);
    // Full-rank separable part: Z₁ vanishes and W reduces to Z₂^T1.
    assert!(dec.z1.frobenius_norm() <= 1e-6);
    let pure = &dec.rho_pure_tilde;
    let lhs = &(&*partial_transpose_1(&dec.z2) * &**pure) + &**pure;
    assert!(lhs.frobenius_norm() <= 1e-6 * pure.frobenius_norm());
    let z2 = crate::linalg::eig_hermitian(&dec.z2).unwrap();
    assert!(z2.values[2].abs() <= 1e-6 * z2.max());
}

#[test]
fn checks_reject_other_cases() {
    let (rho, dec) = exact_werner();
    let wrong = Error::WrongCase("FullRank".into());
    assert_eq!(check_wk_rank3(&rho, &dec).unwrap_err(), wrong);
    assert_eq!(check_wk_rank3_product(&rho, &dec).unwrap_err(), wrong);
    let r3 = entangled(0, rank3_entangled_gamma);
    let d3 = decompose_unverified(&r3, &LsdOptions::default()).unwrap();
    assert!(matches!(check_wk_full(&r3, &d3), Err(Error::WrongCase(_))));
    assert!(check_wk_rank3(&r3, &d3).unwrap().wk1 <= 1e-6);
}

#[test]
fn rank3_projection_is_identity_on_supported_operators() {
    let gb = gamma_basis(&CanonicalGamma::canonical(0.6));
    let mut rng = seeded_rng(2);
    let v = sample_pure_state(&mut rng);
    let inside = HermitianMatrix::hermitize(&(&(&*gb.p3 * &*v.projector()) * &*gb.p3));
    let z2 = partial_transpose_1(&inside);
    assert!(crate::lsd::projected_pt(&z2, &gb.p3).minus(&inside).max_abs() < 1e-14);
}

#[test]
fn closed_form_product_residuals() {
    for seed in 0..5 {
        let rho = analytic_product_sample(seed).unwrap().rho;
        let dec = decompose_unverified(&rho, &LsdOptions::default()).unwrap();
        assert_eq!(dec.case, CaseTag::Rank3ProductGammaAnalytic);
        let r = check_wk_rank3_product(&rho, &dec).unwrap();
        assert!(r.wk1 <= 1e-8, "seed {seed}: {}", r.wk1);
        assert!(r.analytic.unwrap() <= 1e-9);
        let theta = dec.theta.unwrap();
        assert!((dec.a.unwrap() - theta.cos()).abs() < 1e-15);
        assert!((dec.b.unwrap() - theta.sin()).abs() < 1e-15);
    }
}

#[test]
fn angle_operator_eigenvector() {
    let gb = gamma_basis(&CanonicalGamma::canonical(0.0));
    let basis = [phi_plus(), psi_plus()];
    for theta in [-2.5, -0.4, 0.0, 0.9, 2.0, 3.1] {
        let (a, b) = (f64::cos(theta), f64::sin(theta));
        let mut g = gb.gamma8().scale(a);
        g.add_scaled(b, gb.gamma9());
        // On span{|φ⁺⟩, |ψ⁺⟩} the operator reads [[−a, b], [b, a]].
        let elem = |i: usize, j: usize| inner(basis[i].as_slice(), &g.matvec(basis[j].as_slice()));
        let expected = [[-a, b], [b, a]];
        for (i, row) in expected.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((elem(i, j) - C64::new(*e, 0.0)).norm() < 1e-14);
            }
        }
        let coeffs = [(theta / 2.0).cos(), -(theta / 2.0).sin()];
        let psi = rotated_bell(theta);
        for (k, c) in coeffs.iter().enumerate() {
            assert!((inner(basis[k].as_slice(), psi.as_slice()) - C64::new(*c, 0.0)).norm() < 1e-14);
        }
        let gv = g.matvec(psi.as_slice());
        for (x, y) in gv.iter().zip(psi.as_slice()) {
            assert!((x + y).norm() < 1e-14);
        }
    }
}

fn starting_solution(program: &LsdProgram) -> SdpSolution {
    let (x, z) = program.starting_point();
    let prob = &program.problem;
    SdpSolution {
        p_star: prob.objective(&x),
        d_star: prob.dual_objective(&z),
        gap: prob.eval(&x).trace_product(&z),
        x,
        z,
        iterations: 0,
        status: SolveStatus::MaxIter,
        history: Vec::new(),
    }
}

#[test]
fn starting_point_satisfies_z3_identity() {
    let rho = werner_state(0.8).unwrap();
    let program = LsdProgram::full_rank(&rho).unwrap();
    let sol = starting_solution(&program);
    let r = check_slackness_and_z3(&program, &sol).unwrap();
    assert_eq!(r.z3_identity, 0.0);
    // tr{SZ} ≤ √n‖SZ‖_F for an n×n product.
    assert!(r.slackness >= sol.gap / 12.0);
    assert!(sol.gap > 0.1);
}

#[test]
fn certified_solutions_have_small_slackness() {
    for seed in 0..8 {
        let rho = corpus_state(seed);
        let dec = decompose_unverified(&rho, &LsdOptions { analytic: false, ..LsdOptions::default() }).unwrap();
        let cert = dec.certificate.as_ref().unwrap();
        let r = check_slackness_and_z3(&cert.program, &cert.solution).unwrap();
        assert!(r.slackness <= 1e-6 && r.z3_identity <= 1e-6, "seed {seed}: {r:?}");
    }
}

#[test]
fn witness_check_trivial_operators() {
    let rho = werner_state(0.5).unwrap();
    let sampling = WitnessSampling { samples: 100, grid: 5, seed: 0 };
    let neg = HermitianMatrix::identity(4).scale(-1.0);
    let c = check_witness(&neg, &rho, &sampling, &WitnessDomain::AllProducts).unwrap();
    assert!((c.min_over_samples + 1.0).abs() < 1e-14);
    assert_eq!(c.n_evaluated, 100 + 625);
    let id = HermitianMatrix::identity(4);
    let c = check_witness(&id, &rho, &sampling, &WitnessDomain::AllProducts).unwrap();
    assert!((c.min_over_samples - 1.0).abs() < 1e-14 && (c.tr_w_rho - 1.0).abs() < 1e-14);
    let zero = WitnessSampling { samples: 0, ..sampling };
    assert!(matches!(check_witness(&id, &rho, &zero, &WitnessDomain::AllProducts), Err(Error::InvalidParam(_))));
}

#[test]
fn werner_witness_is_nonnegative_on_products() {
    let rho = werner_state(0.8).unwrap();
    let dec = decompose(&rho, &SolverConfig::default()).unwrap();
    let w = crate::lsd::extract_witness(&dec).unwrap().w;
    let sampling = WitnessSampling { samples: 10_000, grid: 20, seed: 4 };
    let c = check_witness(&w, &rho, &sampling, &WitnessDomain::AllProducts).unwrap();
    assert!(c.min_over_samples >= -1e-7);
    assert!((c.tr_w_rho + 0.7).abs() < 1e-6);
}

#[test]
fn orthogonal_domain_stays_orthogonal() {
    let rho = entangled(1, rank3_entangled_gamma);
    let gamma = orthogonal_pure_state(&rho).unwrap();
    let probe = gamma.projector().scale(-1.0);
    let sampling = WitnessSampling { samples: 500, grid: 6, seed: 9 };
    let c = check_witness(&probe, &rho, &sampling, &WitnessDomain::OrthogonalTo(gamma)).unwrap();
    assert!(c.min_over_samples.abs() < 1e-14);
    assert_eq!(c.n_evaluated, 500 + 2 * 36);
}

#[test]
fn product_grid_shape() {
    let g = product_grid(4);
    assert_eq!(g.len(), 16);
    assert!(g.iter().all(|q| (q[0].norm_sqr() + q[1].norm_sqr() - 1.0).abs() < 1e-15));
    assert!((g[15][1].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn failures_require_wk_fields_for_entangled_cases() {
    let report = WkReport::default();
    assert!(report.failures(CaseTag::Separable).is_empty());
    assert!(report.failures(CaseTag::FullRank).contains(&"wk_residuals_missing"));
    let nan = WkReport { wk1_residual: Some(f64::NAN), wk2_residual: Some(0.0), ..WkReport::default() };
    assert!(nan.failures(CaseTag::FullRank).contains(&"wk1_residual"));
}

#[test]
fn valid_split_examples() {
    let (rho, dec) = exact_werner();
    assert!(is_valid_split(&rho, &dec.rho_sep_tilde, 1e-12).unwrap());
    assert!(!is_valid_split(&rho, &dec.rho_sep_tilde.scale(1.01), 1e-12).unwrap());
    assert!(!is_valid_split(&rho, &rho, 1e-12).unwrap());
}

/// `𝒮 → 𝒮 + δ` with `ϱ̃_sep` rescaled and `ϱ̃_pure = ρ − ϱ̃_sep`.
fn shifted(rho: &DensityMatrix, dec: &LsdDecomposition, delta: f64) -> LsdDecomposition {
    let mut out = dec.clone();
    out.s = dec.s + delta;
    out.rho_sep_tilde = dec.rho_sep_tilde.scale(out.s / dec.s);
    out.rho_pure_tilde = rho.minus(&out.rho_sep_tilde);
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, rng_seed: RngSeed::Fixed(0x15d), ..ProptestConfig::default() })]

    #[test]
    fn shifted_weight_fails_verification(seed in 0u64..100_000) {
        let rho = corpus_state(seed);
        let dec = decompose_unverified(&rho, &LsdOptions::default()).unwrap();
        let opts = VerifyOptions { witness_samples: 200, grid: 4, seed: 0 };
        prop_assert!(verify(&rho, &dec, &opts).unwrap().passed);
        for delta in [1e-3, -1e-3] {
            let r = verify(&rho, &shifted(&rho, &dec, delta), &opts).unwrap();
            prop_assert!(!r.passed, "delta {delta} still passes");
        }
    }

    #[test]
    fn passed_reports_satisfy_invariants(seed in 0u64..100_000) {
        let rho = corpus_state(seed);
        let dec = decompose(&rho, &SolverConfig::default()).unwrap();
        prop_assume!(dec.residuals.passed);
        prop_assert!(dec.rho_sep_tilde.plus(&dec.rho_pure_tilde).minus(&rho).frobenius_norm() <= 1e-8);
        prop_assert!((dec.rho_sep_tilde.trace_re() - dec.s).abs() <= 1e-8);
        prop_assert!(dec.residuals.sep_min_eig >= -1e-8 && dec.residuals.sep_pt_min_eig >= -1e-8);
        prop_assert!(crate::linalg::rank_eps(&dec.rho_pure_tilde, 1e-7).unwrap() == 1);
        let w = crate::lsd::extract_witness(&dec).unwrap().w;
        prop_assert!((w.trace_product(&rho).re - (dec.s - 1.0)).abs() <= 1e-7);
    }

    #[test]
    fn sample_minimum_is_monotone(seed in 0u64..1000, n in 1usize..400, extra in 1usize..400) {
        let mut rng = seeded_rng(seed);
        let v = sample_pure_state(&mut rng);
        let w = HermitianMatrix::identity(4).scale(0.3).minus(&v.projector());
        let rho = werner_state(0.5).unwrap();
        let run = |samples| {
            let sampling = WitnessSampling { samples, grid: 0, seed };
            check_witness(&w, &rho, &sampling, &WitnessDomain::AllProducts).unwrap().min_over_samples
        };
        prop_assert!(run(n + extra) <= run(n));
    }
}
