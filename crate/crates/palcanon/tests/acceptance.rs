//! Acceptance suite. Each test exercises one criterion at its stated
//! tolerance and prints a PASS line with the measured figures
//! (visible with `cargo test --test acceptance -- --nocapture`).

use num_complex::Complex64;
use palcanon::blocks::{generic_spec, BlockSpec, CanonicalFormSpec};
use palcanon::classify::{bundle_equal, bundle_membership, classify_generic, BundleClass};
use palcanon::experiment::{run_experiment, ExperimentConfig, Generator, TrialStatus};
use palcanon::lu::lu_solve;
use palcanon::matrix::{CMatrix, StarKind};
use palcanon::perturb::{
    gamma_even_eps_schedule, gamma_even_predicted, gamma_odd_eps_schedule, gamma_odd_predicted,
    gamma_perturbation_even, gamma_perturbation_odd, h_eps_schedule, h_perturbation, h_predicted,
    verify_prediction,
};
use palcanon::rng::{random_congruence, random_uniform_complex, RngStream};
use palcanon::spectrum::{
    matrix_eigenvalues, pencil_eigenvalues, reciprocal_pairing, DEFAULT_UNIT_TOL,
};
use std::time::Instant;

type C = Complex64;

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |v| v.get())
}

fn experiment(
    n: usize,
    trials: u64,
    star: StarKind,
    generator: Generator,
    seed: u64,
) -> (
    palcanon::experiment::FrequencyTable,
    Vec<palcanon::experiment::TrialRecord>,
) {
    let mut cfg = ExperimentConfig::new(n, trials, star, generator);
    cfg.master_seed = seed;
    cfg.threads = threads();
    run_experiment(&cfg).expect("experiment runs")
}

/// Criterion 1: the n=25/n=24 uniform `*` experiments reproduce the
/// published frequency table within ±0.05 per bin, with the parity law
/// holding exactly and counts ≤ 11 in at least 99.9% of trials.
#[test]
fn acceptance_1_uniform_star_frequency_tables() {
    let trials = 10_000u64;
    let start = Instant::now();
    let (t25, _) = experiment(25, trials, StarKind::ConjugateTranspose, Generator::Uniform, 1);
    let (t24, _) = experiment(24, trials, StarKind::ConjugateTranspose, Generator::Uniform, 2);
    let elapsed = start.elapsed().as_secs_f64();

    assert_eq!(t25.skipped, 0);
    assert!(t25.parity_violations(25).is_empty(), "odd-only violated: {:?}", t25.bins);

    let frac_le_11: f64 =
        t25.bins.iter().filter(|(&c, _)| c <= 11).map(|(_, &f)| f).sum::<u64>() as f64
            / trials as f64;
    assert!(frac_le_11 >= 0.999, "counts ≤ 11 in only {frac_le_11:.4} of trials");

    let published = [(1usize, 0.078), (3, 0.356), (5, 0.395), (7, 0.148), (9, 0.022), (11, 0.001)];
    for &(bin, expected) in &published {
        let got = *t25.bins.get(&bin).unwrap_or(&0) as f64 / trials as f64;
        assert!(
            (got - expected).abs() <= 0.05,
            "n=25 bin {bin}: proportion {got:.4} vs published {expected:.3}"
        );
    }

    assert_eq!(t24.skipped, 0);
    assert!(t24.parity_violations(24).is_empty(), "even-only violated: {:?}", t24.bins);
    let modal = t24.bins.iter().max_by_key(|(_, &f)| f).map(|(&c, _)| c).unwrap();
    assert_eq!(modal, 4, "n=24 modal bin: {:?}", t24.bins);
    let p4 = *t24.bins.get(&4).unwrap() as f64 / trials as f64;
    assert!((p4 - 0.446).abs() <= 0.05, "n=24 bin 4 proportion {p4:.4}");

    // Runtime budget: 10 minutes single-threaded for one 10^4-trial run.
    let single_thread_equiv = elapsed * threads() as f64 / 2.0;
    assert!(
        single_thread_equiv <= 600.0,
        "single-thread-equivalent runtime {single_thread_equiv:.1}s exceeds budget"
    );
    println!(
        "ACCEPTANCE 1 (uniform * tables): PASS — n=25 bins {:?}, n=24 modal 4 at {:.3}, \
         ~{:.0}s single-threaded per run",
        t25.bins, p4, single_thread_equiv
    );
}

/// Criterion 2: the shifted-integer n=25 experiment populates every odd bin
/// 1..25, concentrates ≥ 40% of trials in bins 13..25, and drifts upward
/// with the trial index.
#[test]
fn acceptance_2_shifted_generator_spreads_and_drifts() {
    let trials = 10_000u64;
    let (table, records) = experiment(
        25,
        trials,
        StarKind::ConjugateTranspose,
        Generator::ShiftedInteger,
        3,
    );
    assert_eq!(table.skipped, 0);
    assert!(table.parity_violations(25).is_empty(), "odd-only violated: {:?}", table.bins);

    for bin in (1..=25).step_by(2) {
        let f = *table.bins.get(&bin).unwrap_or(&0);
        assert!(f >= 1, "bin {bin} is empty: {:?}", table.bins);
    }
    let high: u64 = table.bins.iter().filter(|(&c, _)| c >= 13).map(|(_, &f)| f).sum();
    let high_frac = high as f64 / trials as f64;
    assert!(high_frac >= 0.40, "bins 13..25 hold only {high_frac:.3}");

    let mean = |lo: u64, hi: u64| -> f64 {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.trial_index >= lo && r.trial_index <= hi && r.status == TrialStatus::Ok)
            .map(|r| r.unit_count as f64)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let early = mean(1, 1000);
    let late = mean(9000, 10_000);
    assert!(
        late > early,
        "no monotone drift: early mean {early:.2}, late mean {late:.2}"
    );
    println!(
        "ACCEPTANCE 2 (shifted tables): PASS — high bins hold {:.1}%, drift {:.2} → {:.2}",
        100.0 * high_frac,
        early,
        late
    );
}

/// Criterion 3: transpose-case control experiments at n=24 and n=25. The
/// bin structure is exact: no unit eigenvalues for even size, exactly one
/// (the eigenvalue -1) for odd size.
#[test]
fn acceptance_3_transpose_controls() {
    let trials = 1000u64;
    let (t24, _) = experiment(24, trials, StarKind::Transpose, Generator::Uniform, 4);
    assert_eq!(t24.skipped, 0, "skipped trials in the n=24 control");
    assert_eq!(t24.bins.len(), 1, "n=24 bins: {:?}", t24.bins);
    assert_eq!(t24.bins.get(&0), Some(&trials), "n=24 bins: {:?}", t24.bins);

    let (t25, _) = experiment(25, trials, StarKind::Transpose, Generator::Uniform, 5);
    assert_eq!(t25.skipped, 0, "skipped trials in the n=25 control");
    assert_eq!(t25.bins.len(), 1, "n=25 bins: {:?}", t25.bins);
    assert_eq!(t25.bins.get(&1), Some(&trials), "n=25 bins: {:?}", t25.bins);

    // The unit eigenvalue is -1 (within 1e-6) in every sampled trial.
    let mut worst = 0.0f64;
    for trial in (1..=trials).step_by(20) {
        let mut rng = RngStream::new(5, trial);
        let a = random_uniform_complex(25, &mut rng);
        let s = pencil_eigenvalues(&a, StarKind::Transpose).unwrap();
        let nearest = s
            .values
            .iter()
            .map(|v| (v - C::new(-1.0, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
        assert!(nearest <= 1e-6, "trial {trial}: unit eigenvalue {nearest:.2e} from -1");
    }
    println!(
        "ACCEPTANCE 3 (transpose controls): PASS — bins exact, unit eigenvalue within {:.1e} of -1",
        worst
    );
}

/// Criterion 4: classification recovers ℓ exactly for 200 random (n, ℓ)
/// pairs after conjugation by a random congruence with condition ≤ 100.
#[test]
fn acceptance_4_round_trip_classification() {
    let mut rng = RngStream::new(6, 0);
    let mut failures = 0;
    for case in 0..200 {
        let n = 1 + (rng.next_u64() as usize) % 24;
        let ell = (rng.next_u64() as usize) % (n / 2 + 1);
        let spec = generic_spec(n, ell, StarKind::ConjugateTranspose, &mut rng).unwrap();
        let a = spec.realize().unwrap();
        let p = random_congruence(n, &mut rng, 100.0).unwrap();
        let b = a.congruence(&p, StarKind::ConjugateTranspose).unwrap();
        let class =
            classify_generic(&b, StarKind::ConjugateTranspose, DEFAULT_UNIT_TOL, 1e-8).unwrap();
        if class != (BundleClass::GenericStar { ell }) {
            eprintln!("case {case}: n={n} ell={ell} classified {class:?}");
            failures += 1;
        }
    }
    assert_eq!(failures, 0, "{failures} of 200 round trips failed");
    println!("ACCEPTANCE 4 (round-trip classification): PASS — 200/200 recovered ℓ exactly");
}

/// Criterion 5: closed-form perturbation spectra match the eigensolver to
/// 1e-8 for every family, k ≤ 8, both parameter choices, δ = 1e-3.
#[test]
fn acceptance_5_perturbation_predictions() {
    let delta = 1e-3;
    let alphas = [C::new(1.0, 0.0), C::from_polar(1.0, std::f64::consts::FRAC_PI_4)];
    let mus = [C::new(2.0, 0.0), C::from_polar(2.0, std::f64::consts::FRAC_PI_3)];
    let mut checked = 0;
    let mut worst = 0.0f64;

    for k in (2..=8).step_by(2) {
        let eps = gamma_even_eps_schedule(k, delta).unwrap();
        for &alpha in &alphas {
            let m = gamma_perturbation_even(k, alpha, &eps, StarKind::ConjugateTranspose).unwrap();
            let p = gamma_even_predicted(k, alpha, &eps, StarKind::ConjugateTranspose).unwrap();
            let r = verify_prediction(&m, &p, StarKind::ConjugateTranspose, 1e-8).unwrap();
            assert!(r.max_rel_error <= 1e-8, "gamma-even k={k} *: {:.3e}", r.max_rel_error);
            worst = worst.max(r.max_rel_error);
            checked += 1;
        }
        let one = C::new(1.0, 0.0);
        let m = gamma_perturbation_even(k, one, &eps, StarKind::Transpose).unwrap();
        let p = gamma_even_predicted(k, one, &eps, StarKind::Transpose).unwrap();
        let r = verify_prediction(&m, &p, StarKind::Transpose, 1e-8).unwrap();
        assert!(r.max_rel_error <= 1e-8, "gamma-even k={k} T: {:.3e}", r.max_rel_error);
        worst = worst.max(r.max_rel_error);
        checked += 1;
    }

    for k in (3..=8).step_by(2) {
        let eps = gamma_odd_eps_schedule(k, delta).unwrap();
        for &alpha in &alphas {
            let m = gamma_perturbation_odd(k, alpha, &eps, StarKind::ConjugateTranspose).unwrap();
            let p = gamma_odd_predicted(k, alpha, &eps, StarKind::ConjugateTranspose).unwrap();
            let r = verify_prediction(&m, &p, StarKind::ConjugateTranspose, 1e-8).unwrap();
            assert!(r.max_rel_error <= 1e-8, "gamma-odd k={k} *: {:.3e}", r.max_rel_error);
            worst = worst.max(r.max_rel_error);
            checked += 1;
        }
        let one = C::new(1.0, 0.0);
        let m = gamma_perturbation_odd(k, one, &eps, StarKind::Transpose).unwrap();
        let p = gamma_odd_predicted(k, one, &eps, StarKind::Transpose).unwrap();
        let r = verify_prediction(&m, &p, StarKind::Transpose, 1e-8).unwrap();
        assert!(r.max_rel_error <= 1e-8, "gamma-odd k={k} T: {:.3e}", r.max_rel_error);
        worst = worst.max(r.max_rel_error);
        checked += 1;
    }

    for k in 1..=8 {
        let eps = h_eps_schedule(k, delta).unwrap();
        for &mu in &mus {
            for star in [StarKind::ConjugateTranspose, StarKind::Transpose] {
                let m = h_perturbation(k, mu, &eps, star).unwrap();
                let p = h_predicted(k, mu, &eps, star).unwrap();
                let r = verify_prediction(&m, &p, star, 1e-8).unwrap();
                assert!(r.max_rel_error <= 1e-8, "h k={k} {star}: {:.3e}", r.max_rel_error);
                worst = worst.max(r.max_rel_error);
                checked += 1;
            }
        }
    }
    println!(
        "ACCEPTANCE 5 (perturbation predictions): PASS — {checked} cases, worst error {worst:.2e}"
    );
}

/// Criterion 6: bundle classes are stable under perturbations of relative
/// Frobenius norm 1e-8 — 50 generic instances, 100 perturbations each.
#[test]
fn acceptance_6_openness_of_generic_bundles() {
    let mut rng = RngStream::new(8, 0);
    let mut failures = 0;
    for case in 0..50 {
        let star = if case % 2 == 0 {
            StarKind::ConjugateTranspose
        } else {
            StarKind::Transpose
        };
        let n = 2 + (rng.next_u64() as usize) % 15; // n ≤ 16
        let ell = match star {
            StarKind::ConjugateTranspose => (rng.next_u64() as usize) % (n / 2 + 1),
            StarKind::Transpose => n / 2,
        };
        let spec = generic_spec(n, ell, star, &mut rng).unwrap();
        let a = spec.realize().unwrap();
        let p = random_congruence(n, &mut rng, 30.0).unwrap();
        let a = a.congruence(&p, star).unwrap();
        let base = classify_generic(&a, star, DEFAULT_UNIT_TOL, 1e-8).unwrap();
        assert!(base.is_generic(), "case {case} base not generic: {base:?}");

        let scale = 1e-8 * a.frobenius_norm();
        for _ in 0..100 {
            let mut e = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    e[(i, j)] = C::new(rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0));
                }
            }
            let e = e.scale(C::new(scale / e.frobenius_norm(), 0.0));
            let perturbed = a.add(&e).unwrap();
            let class = classify_generic(&perturbed, star, DEFAULT_UNIT_TOL, 1e-8).unwrap();
            if class != base {
                eprintln!("case {case}: class changed {base:?} → {class:?}");
                failures += 1;
            }
        }
    }
    assert_eq!(failures, 0, "{failures} perturbed classifications changed");
    println!("ACCEPTANCE 6 (openness): PASS — 50 instances × 100 perturbations, class stable");
}

/// Criterion 7: reciprocal pairing of 500 random invertible pencils within
/// 1e-8, plus the three bundle-membership fixtures.
#[test]
fn acceptance_7_pairing_and_membership_fixtures() {
    let mut rng = RngStream::new(9, 0);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 500 {
        let n = 1 + (rng.next_u64() as usize) % 32;
        let star = if done % 2 == 0 {
            StarKind::ConjugateTranspose
        } else {
            StarKind::Transpose
        };
        let mut stream = RngStream::new(10, rng.next_u64());
        let a = random_uniform_complex(n, &mut stream);
        let s = match pencil_eigenvalues(&a, star) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let rep = reciprocal_pairing(&s, star, 1e-8).unwrap();
        assert!(
            rep.max_residual <= 1e-8,
            "pairing residual {:.3e} at n={n} {star}",
            rep.max_residual
        );
        worst = worst.max(rep.max_residual);
        done += 1;
    }

    // Membership fixtures: a canonical form belongs to its own bundle, does
    // not belong to one with collapsed parameters, and two forms with the
    // same pattern generate equal bundles.
    let h = |k: usize, mu: C| BlockSpec::TypeII { k, mu };
    let g = |k: usize, alpha: C| BlockSpec::TypeI { k, alpha };
    let e4 = C::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let star = StarKind::ConjugateTranspose;

    let a = CanonicalFormSpec::new(
        star,
        vec![h(1, C::new(3.0, 0.0)), g(1, C::new(1.0, 0.0)), h(2, C::new(5.0, 0.0)), g(1, e4)],
    );
    assert!(bundle_membership(&a, &a).unwrap(), "fixture 1");

    let collapsed = CanonicalFormSpec::new(
        star,
        vec![
            h(1, C::new(3.0, 0.0)),
            g(1, C::new(1.0, 0.0)),
            h(2, C::new(3.0, 0.0)),
            g(1, C::new(1.0, 0.0)),
        ],
    );
    assert!(!bundle_membership(&a, &collapsed).unwrap(), "fixture 2");

    let c1 = CanonicalFormSpec::new(star, vec![h(2, C::new(3.0, 0.0)), g(1, C::new(1.0, 0.0))]);
    let c2 = CanonicalFormSpec::new(star, vec![h(2, C::new(5.0, 0.0)), g(1, e4)]);
    assert!(bundle_equal(&c1, &c2).unwrap(), "fixture 3");

    println!(
        "ACCEPTANCE 7 (pairing + fixtures): PASS — 500 pencils, worst residual {worst:.2e}; \
         3 membership fixtures exact"
    );
}

/// Criterion 8: the dense eigensolver reproduces a known spectrum to 1e-8
/// relative error on 100 synthesized diagonalizable matrices with condition
/// ≤ 1e6, eigenvalue gaps ≥ 1e-6, sizes up to 64.
#[test]
fn acceptance_8_eigensolver_contract() {
    let mut rng = RngStream::new(11, 0);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = 2 + (rng.next_u64() as usize) % 63; // n ≤ 64
        // Distinct eigenvalues with moduli in [0.5, 2] and pairwise gaps
        // well above 1e-6.
        let mut eigs: Vec<C> = Vec::with_capacity(n);
        while eigs.len() < n {
            let z = C::from_polar(
                rng.uniform_range(0.5, 2.0),
                rng.uniform_range(0.0, std::f64::consts::TAU),
            );
            if eigs.iter().all(|w| (w - z).norm() >= 1e-3) {
                eigs.push(z);
            }
        }
        let mut d = CMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = eigs[i];
        }
        // M = V·D·V^{-1} with cond(V) ≤ 300, so cond(M) stays under 1e6.
        let v = random_congruence(n, &mut rng, 300.0).unwrap();
        let vd = v.mul(&d).unwrap();
        let m_t = lu_solve(&v.transpose(), &vd.transpose()).unwrap().x;
        let m = m_t.transpose();

        let computed = matrix_eigenvalues(&m).unwrap();
        let entries: Vec<(C, usize)> = eigs.iter().map(|&z| (z, 1)).collect();
        let report = palcanon::spectrum::match_spectra(&entries, &computed).unwrap();
        let err = report.max_rel_error();
        assert!(err <= 1e-8, "case {case} (n={n}): eigenvalue error {err:.3e}");
        worst = worst.max(err);
    }
    println!("ACCEPTANCE 8 (eigensolver contract): PASS — 100 matrices, worst error {worst:.2e}");
}
