mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zenolab::apparatus::*;
use zenolab::ifm::*;
use zenolab::qstate::*;
use zenolab::ratekin::*;
use zenolab::spatial::*;
use zenolab::unitary::*;
use zenolab::vnmeasure::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagator_inverse(seed in any::<u64>(), d in 1usize..9, t in -5.0f64..5.0) {
        let h = random_hermitian(&mut rng(seed), d, 1.0);
        let prod = herm_propagator(&h, t).unwrap() * herm_propagator(&h, -t).unwrap();
        prop_assert!(max_abs_diff(&prod, &CMatrix::identity(d, d)) < 1e-10);
    }

    #[test]
    fn propagator_composition(seed in any::<u64>(), d in 1usize..9, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let h = random_hermitian(&mut rng(seed), d, 1.0);
        let lhs = herm_propagator(&h, t1).unwrap() * herm_propagator(&h, t2).unwrap();
        prop_assert!(max_abs_diff(&lhs, &herm_propagator(&h, t1 + t2).unwrap()) < 1e-9);
    }

    #[test]
    fn propagator_matches_taylor(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut h = random_hermitian(&mut rng(seed), 6, 1.0);
        let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Rescale so that ‖H‖t stays at most 5.
        h *= C64::new(5.0 / norm, 0.0);
        let u = herm_propagator(&h, t).unwrap();
        prop_assert!(max_abs_diff(&u, &taylor_propagator(&h, t)) < 1e-8);
    }

    #[test]
    fn partial_trace_keeps_trace(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let psi = random_unit_vector(&mut r, da * db);
        let mixed = random_unit_vector(&mut r, da * db);
        let m = (psi.clone() * psi.adjoint() * C64::new(0.7, 0.0)) + mixed.clone() * mixed.adjoint() * C64::new(0.3, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace(&rho, (da, db), keep).unwrap();
            let tr: C64 = red.matrix().trace();
            prop_assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
            prop_assert!(max_asymmetry(red.matrix()) < 1e-12);
        }
    }

    #[test]
    fn quadratic_onset(seed in any::<u64>(), d in 2usize..9) {
        let mut r = rng(seed);
        let h = Hamiltonian::new(random_hermitian(&mut r, d, 1.0)).unwrap();
        let u = StateVector::new(random_unit_vector(&mut r, d)).unwrap();
        let var = energy_variance(&h, &u).unwrap();
        prop_assume!(var > 1e-3);
        let amp = SurvivalAmplitude::new(&h, &u).unwrap();
        let ts = linspace(1e-3, 1e-2, 20);
        let q: Vec<f64> = ts.iter().map(|&t| amp.decay_probability(t)).collect();
        let (a, _) = zenolab::fit::quadratic_quartic_fit(&ts, &q).unwrap();
        prop_assert!((a / var - 1.0).abs() < 0.01, "a = {a}, variance = {var}");
        // Remainder stays O(t⁴) with a constant bounded by the spectrum.
        for (&t, &qt) in ts.iter().zip(&q) {
            prop_assert!((qt - var * t * t).abs() <= 10.0 * var * var * t.powi(4) + 1e-15);
        }
    }

    #[test]
    fn zeno_limit(seed in any::<u64>(), d in 2usize..6) {
        let mut r = rng(seed);
        let raw = random_hermitian(&mut r, d, 1.0);
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let h = Hamiltonian::new(raw / C64::new(norm, 0.0)).unwrap();
        let u = StateVector::new(random_unit_vector(&mut r, d)).unwrap();
        let var = energy_variance(&h, &u).unwrap();
        prop_assume!(var > 1e-3);
        let t = 1.0;
        let n = 10_000u64;
        let p = repeated_measurement_survival(&h, &u, t, n).unwrap();
        let scaled = n as f64 * (1.0 - p);
        prop_assert!((scaled / (var * t * t) - 1.0).abs() < 0.02);
    }

    #[test]
    fn repeated_is_monotone_for_short_times(n in 1u64..200) {
        let h = Hamiltonian::two_level(1.0, 0.3);
        let u = StateVector::basis(2, 0);
        let a = repeated_measurement_survival(&h, &u, 0.5, n).unwrap();
        let b = repeated_measurement_survival(&h, &u, 0.5, n + 1).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn exponential_ignores_n(gamma in 0.0f64..10.0, t in 0.0f64..10.0, n in 1u64..100_000) {
        let law = DecayLaw::new(gamma).unwrap();
        prop_assert_eq!(exponential_survival(law, t, n).to_bits(), exponential_survival(law, t, 1).to_bits());
    }

    #[test]
    fn ideal_record_keeps_populations(seed in any::<u64>(), d in 1usize..5, extra in 0usize..3) {
        let sys = StateVector::new(random_unit_vector(&mut rng(seed), d)).unwrap();
        let out = entangle_measurement(&sys, d + extra).unwrap();
        let before: Vec<f64> = sys.amplitudes().iter().map(|c| c.norm_sqr()).collect();
        for (a, b) in out.reduced.populations().iter().zip(&before) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((out.joint.purity() - 1.0).abs() < 1e-10);
        prop_assert!(out.reduced.purity() <= 1.0 + 1e-12);
    }

    #[test]
    fn full_dephasing_idempotent(seed in any::<u64>(), d in 1usize..6, s in 0.0f64..1.0) {
        let psi = random_unit_vector(&mut rng(seed), d);
        let rho = DensityMatrix::pure(&StateVector::new(psi).unwrap());
        let full = DephasingChannel::computational(1.0).unwrap();
        let once = apply_dephasing(&rho, &full).unwrap();
        let twice = apply_dephasing(&once, &full).unwrap();
        prop_assert_eq!(&once, &twice);
        let partial = apply_dephasing(&rho, &DephasingChannel::computational(s).unwrap()).unwrap();
        prop_assert!(partial.purity() <= rho.purity() + 1e-12);
        prop_assert_eq!(partial.populations(), rho.populations());
    }

    #[test]
    fn dephasing_chain_matches_collapse(v in 0.1f64..2.0, e in -2.0f64..2.0, t in 0.01f64..3.0, n in 1u32..11) {
        let chain = n_step_measured_chain(v, e, t, n as u64).unwrap();
        let collapse = collapse_enumeration(v, e, t, n);
        prop_assert!((chain - collapse.p2).abs() < 1e-10);
        let h = Hamiltonian::two_level(v, e);
        let stay = repeated_measurement_survival(&h, &StateVector::basis(2, 0), t, n as u64).unwrap();
        prop_assert!((stay - collapse.never_left).abs() < 1e-12);
    }

    #[test]
    fn diagonal_states_are_frozen(seed in any::<u64>(), d in 1usize..9) {
        let mut r = rng(seed);
        let h = Hamiltonian::new(random_hermitian(&mut r, d, 3.0)).unwrap();
        let rho = DensityMatrix::diagonal(&random_probabilities(&mut r, d)).unwrap();
        for rate in diagonal_freeze_rate(&rho, &h).unwrap() {
            prop_assert!(rate.abs() < 1e-13);
        }
    }

    #[test]
    fn momentum_factorization(v in 0.1f64..2.0, e in -2.0f64..2.0, gamma in 0.0f64..5.0, t in 0.0f64..3.0) {
        let app = ApparatusProfile::gaussian(1.0, 41).unwrap();
        let model = TwoStatePointerModel::new(v, e, gamma).unwrap();
        let grid = two_state_transition(&model, &app, t).unwrap();
        let joint = joint_space_transition(v, e, gamma, app.p_grid(), app.weights(), t);
        prop_assert!((grid - joint).abs() < 1e-8, "{grid} vs {joint}");
    }

    #[test]
    fn ifm_bookkeeping(n in 1u64..300, present in any::<bool>(), theta in 0.001f64..1.5) {
        let cfg = IfmConfig::new(n, present).unwrap().with_delta_theta(theta).unwrap();
        let out = run_ifm(&cfg);
        prop_assert!((out.p_h + out.p_v + out.p_absorbed - 1.0).abs() < 1e-12);
        if present {
            prop_assert_eq!(out.p_v, 0.0);
        } else {
            prop_assert_eq!(out.p_absorbed, 0.0);
        }
    }

    #[test]
    fn ifm_is_repeated_measurement(n in 1u64..500) {
        let out = run_ifm(&IfmConfig::new(n, true).unwrap());
        // Rotation by Δθ per unit time is generated by Δθ σ_y.
        let dtheta = std::f64::consts::FRAC_PI_2 / n as f64;
        let h = Hamiltonian::new(pauli_y() * C64::new(dtheta, 0.0)).unwrap();
        let p = repeated_measurement_survival(&h, &StateVector::basis(2, 0), n as f64, n).unwrap();
        prop_assert!((out.p_h - p).abs() < 1e-12);
    }

    #[test]
    fn rate_solutions_are_probabilities(seed in any::<u64>(), d in 1usize..11, t in 0.0f64..20.0) {
        let mut r = rng(seed);
        let mut rates = Vec::new();
        for to in 0..d {
            for from in 0..d {
                if to != from && rand::Rng::gen_bool(&mut r, 0.6) {
                    rates.push((to, from, rand::Rng::gen_range(&mut r, 0.0..3.0)));
                }
            }
        }
        let a = RateMatrix::from_off_diagonal(d, &rates).unwrap();
        let p0 = ProbabilityVector::new(random_probabilities(&mut r, d)).unwrap();
        let sol = solve_rate_equation(&a, &p0, t).unwrap();
        prop_assert!((sol.p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(sol.p.as_slice().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rate_semigroup(seed in any::<u64>(), d in 2usize..7, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let mut r = rng(seed);
        let mut rates = Vec::new();
        for to in 0..d {
            for from in 0..d {
                if to != from {
                    rates.push((to, from, rand::Rng::gen_range(&mut r, 0.0..2.0)));
                }
            }
        }
        let a = RateMatrix::from_off_diagonal(d, &rates).unwrap();
        let p0 = ProbabilityVector::new(random_probabilities(&mut r, d)).unwrap();
        let direct = solve_rate_equation(&a, &p0, t1 + t2).unwrap().p;
        let mid = solve_rate_equation(&a, &p0, t1).unwrap().p;
        let split = solve_rate_equation(&a, &mid, t2).unwrap().p;
        for (x, y) in direct.as_slice().iter().zip(split.as_slice()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn expm_matches_pade(seed in any::<u64>(), d in 1usize..9, scale in 0.01f64..20.0) {
        let mut r = rng(seed);
        let m = DMatrix::from_fn(d, d, |_, _| rand::Rng::gen_range(&mut r, -1.0..1.0) * scale);
        let ours = expm(&m);
        let oracle = real_expm(&m);
        let scale_out = oracle.amax().max(1.0);
        prop_assert!((ours - oracle).amax() / scale_out < 1e-11);
    }
}

#[test]
fn dephasing_leaves_classical_decay_untouched() {
    // Populations carry all the classical information; interleaving any number
    // of complete dephasing steps with rate-equation steps changes nothing.
    let a = RateMatrix::from_off_diagonal(3, &[(1, 0, 0.8), (2, 1, 0.3), (0, 2, 0.1)]).unwrap();
    let psi = StateVector::normalized(nalgebra::DVector::from_vec(vec![
        C64::new(0.8, 0.0),
        C64::new(0.3, 0.4),
        C64::new(0.1, -0.2),
    ]))
    .unwrap();
    let rho = DensityMatrix::pure(&psi);
    let full = DephasingChannel::computational(1.0).unwrap();
    let p0 = ProbabilityVector::from_density(&rho).unwrap();
    let reference = solve_rate_equation(&a, &p0, 2.0).unwrap().p;
    for checks in [1, 3, 10, 100] {
        let mut dephased = rho.clone();
        for _ in 0..checks {
            dephased = apply_dephasing(&dephased, &full).unwrap();
        }
        let p = ProbabilityVector::from_density(&dephased).unwrap();
        assert_eq!(solve_rate_equation(&a, &p, 2.0).unwrap().p, reference);
    }
    // Step-wise evolution with and without dephasing between steps.
    let step = a.propagator(0.2);
    let mut plain = nalgebra::DVector::from_column_slice(p0.as_slice());
    let mut checked = plain.clone();
    for _ in 0..10 {
        plain = &step * plain;
        let diag: Vec<f64> = checked.iter().copied().collect();
        let rho = DensityMatrix::diagonal(&diag.iter().map(|v| v.max(0.0)).collect::<Vec<_>>()).unwrap();
        let kept = apply_dephasing(&rho, &full).unwrap().populations();
        checked = &step * nalgebra::DVector::from_vec(kept);
    }
    assert_eq!(plain, checked);
}

#[test]
fn pauli_ignores_coherences() {
    let a = RateMatrix::from_off_diagonal(2, &[(1, 0, 1.0), (0, 1, 0.25)]).unwrap();
    let half = C64::new(0.5, 0.0);
    let plus = DensityMatrix::new(CMatrix::from_element(2, 2, half)).unwrap();
    let mixed = DensityMatrix::maximally_mixed(2);
    assert_eq!(pauli_equation_step(&a, &plus).unwrap(), pauli_equation_step(&a, &mixed).unwrap());
    let sym = RateMatrix::from_off_diagonal(2, &[(1, 0, 0.7), (0, 1, 0.7)]).unwrap();
    assert!(pauli_equation_step(&sym, &mixed).unwrap().iter().all(|v| v.abs() < 1e-15));
    // Agrees with the derivative of the rate-equation solution at t = 0.
    let p0 = ProbabilityVector::from_density(&mixed).unwrap();
    let h = 1e-6;
    let ahead = solve_rate_equation(&a, &p0, h).unwrap().p;
    let rates = pauli_equation_step(&a, &mixed).unwrap();
    for k in 0..2 {
        let fd = (ahead.as_slice()[k] - p0.as_slice()[k]) / h;
        assert!((fd - rates[k]).abs() < 1e-6);
    }
    let sum: f64 = rates.iter().sum();
    assert!(sum.abs() < 1e-12);
}

#[test]
fn freeze_contrast_report() {
    let mut r = rng(11);
    let h = Hamiltonian::new(random_hermitian(&mut r, 4, 1.0)).unwrap();
    let a = RateMatrix::from_off_diagonal(4, &[(1, 0, 2.0), (2, 1, 1.0), (3, 2, 0.5)]).unwrap();
    let rho = DensityMatrix::diagonal(&[0.4, 0.3, 0.2, 0.1]).unwrap();
    let rep = freeze_contrast(&h, &a, &rho, 1.0).unwrap();
    assert!(rep.von_neumann_rates.iter().all(|v| v.abs() < 1e-13));
    assert!(rep.pauli_rates.iter().any(|v| v.abs() > 0.1));
    assert_eq!(rep.frozen_populations, vec![0.4, 0.3, 0.2, 0.1]);
    assert!(rep.pauli_populations[0] < 0.4);
    let decay = RateMatrix::decay(2.5).unwrap();
    let ground = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
    let rep = freeze_contrast(&Hamiltonian::two_level(1.0, 0.0), &decay, &ground, 0.0).unwrap();
    assert_eq!(rep.pauli_rates[0], -2.5);
    let coherent = DensityMatrix::pure(&StateVector::from_slice(&[ONE, ONE]).unwrap());
    assert!(matches!(
        freeze_contrast(&Hamiltonian::two_level(1.0, 0.0), &decay, &coherent, 1.0),
        Err(zenolab::Error::NotDiagonal(_))
    ));
}

#[test]
fn ifm_sweep_monotone() {
    let ns: Vec<u64> = (1..=1000).collect();
    let out = ifm_sweep(&ns, true).unwrap();
    for w in out.windows(2) {
        assert!(w[1].p_h > w[0].p_h);
        assert!(w[1].p_absorbed < w[0].p_absorbed);
    }
    let far = run_ifm(&IfmConfig::new(10_000, true).unwrap());
    let envelope = std::f64::consts::PI.powi(2) / 4.0 / 10_000.0 * 1.05;
    assert!(far.p_absorbed < envelope);
    assert!(far.p_h > 0.999);
}

#[test]
fn ifm_without_object_ends_vertical() {
    for n in [1u64, 2, 5, 17, 100, 1000] {
        let out = run_ifm(&IfmConfig::new(n, false).unwrap());
        assert!(out.p_h < 1e-12, "n = {n}: {}", out.p_h);
        assert!((out.p_v - 1.0).abs() < 1e-12);
    }
}

#[test]
fn apparatus_zeno_tail_and_golden_rule() {
    let app = ApparatusProfile::gaussian(1.0, DEFAULT_PROFILE_POINTS).unwrap();
    let amp = 1.0 / (2.0 * std::f64::consts::PI);
    let width = 2.0;
    let ls = LevelStructure::sampled(-30.0, 30.0, 6001, |_| amp, |e| (-(e * e) / (2.0 * width * width)).exp(), 0.0, 0.0).unwrap();
    let t = 0.01;
    // Small coupling recovers the golden rule.
    let small = transition_probability_alpha(&ls.with_gamma(1e-3), &app, t).unwrap() / t;
    assert!((small / golden_rule_rate(&ls) - 1.0).abs() < 0.02);
    // Against the analytic convolution at every coupling.
    for g in logspace(1e-2, 1e3, 11) {
        let p = transition_probability_alpha(&ls.with_gamma(g), &app, t).unwrap() / t;
        let exact = gaussian_rate(amp, 0.0, width, g, 1.0);
        assert!((p / exact - 1.0).abs() < 1e-3, "gamma {g}: {p} vs {exact}");
    }
    // P_α γ settles to 2πt |Φ(0)|² ∫σ|V|².
    let top: Vec<f64> = [100.0, 1000.0]
        .iter()
        .map(|&g| transition_probability_alpha(&ls.with_gamma(g), &app, t).unwrap() * g)
        .collect();
    assert!((top[1] / top[0] - 1.0).abs() < 0.05);
    let limit = 2.0 * std::f64::consts::PI * t * app.phi0_density() * ls.integrated_rate_density();
    assert!((top[1] / limit - 1.0).abs() < 0.05);
}

#[test]
fn p_alpha_e_matches_refined_quadrature() {
    let app = ApparatusProfile::gaussian(1.0, DEFAULT_PROFILE_POINTS).unwrap();
    let ls = LevelStructure::sampled(-10.0, 10.0, 201, |_| 1.0, |_| 0.5, 1.5, 0.0).unwrap();
    let t = 2.0;
    for e in [-3.0, -0.7, 0.0, 0.4, 2.5] {
        let ours = transition_probability_alpha_e(&ls, &app, e, t);
        let integrand = |p: f64| {
            let x = e + 1.5 * p;
            let dens = (-(p * p) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            4.0 * 0.5 * dens * resonance_factor(x, t)
        };
        let oracle = simpson(&integrand, -8.0, 8.0, 1e-12);
        assert!((ours / oracle - 1.0).abs() < 1e-6, "E = {e}: {ours} vs {oracle}");
    }
}

#[test]
fn apparatus_resolution_self_check() {
    let app = ApparatusProfile::gaussian(1.0, DEFAULT_PROFILE_POINTS).unwrap();
    let model = TwoStatePointerModel::new(1.0, 0.0, 2.0).unwrap();
    let check = resolution_check(&app, |a| two_state_transition(&model, a, 1.0)).unwrap();
    assert!(check.passed, "{check:?}");
}

#[test]
fn two_state_rabi_slope() {
    let app = ApparatusProfile::gaussian(1.0, 33).unwrap();
    let model = TwoStatePointerModel::new(1.0, 0.0, 0.0).unwrap();
    // Narrow window around t = 0.4 inside the first quarter period.
    let ts = linspace(0.39, 0.41, 9);
    let fit = two_state_rate_regime(&model, &app, &ts).unwrap();
    let exact = (2.0f64 * 0.4).sin();
    assert!((fit.slope / exact - 1.0).abs() < 0.05);
}

#[test]
fn two_state_onset_is_quadratic() {
    let app = ApparatusProfile::gaussian(1.0, 2001).unwrap();
    let model = TwoStatePointerModel::new(0.3, 0.0, 20.0).unwrap();
    let ts = logspace(1e-4, 1e-3, 10);
    let fit = two_state_onset_exponent(&model, &app, &ts).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.1);
}

#[test]
fn spatial_conservation_matrix() {
    let gs = GridState::gaussian(48, 1.0, 5.0, -0.05, 0.06, 3.0).unwrap();
    for (lambda, gamma, kinetic) in [(0.0, 0.0, true), (5.0, 0.0, true), (5.0, 1.0, true), (5.0, 0.0, false), (0.0, 2.0, true)] {
        let spec = MasterEquationSpec::new(lambda, gamma, kinetic).unwrap();
        let out = evolve_master(&gs, &spec, 0.02, max_stable_dt(&gs, &spec)).unwrap();
        assert!((out.trace() - gs.trace()).abs() < 1e-6);
        assert!(out.max_asymmetry() < 1e-8);
        if gamma == 0.0 {
            assert!(out.purity() <= gs.purity() + 1e-10);
        }
    }
}

#[test]
fn spatial_parallel_matches_sequential() {
    let gs = GridState::gaussian(64, 1.0, 5.0, 0.0, 0.06, 3.0).unwrap();
    let spec = MasterEquationSpec::new(3.0, 0.5, true).unwrap();
    let dt = max_stable_dt(&gs, &spec);
    let par = evolve_master_with(&gs, &spec, 0.01, dt, &EvolveOptions { parallel: true, record_every: 5, ..Default::default() }).unwrap();
    let seq = evolve_master_with(&gs, &spec, 0.01, dt, &EvolveOptions { parallel: false, record_every: 5, ..Default::default() }).unwrap();
    assert_eq!(par.state, seq.state);
    assert_eq!(par.records, seq.records);
}

#[test]
fn spatial_grid_refinement() {
    let spec = MasterEquationSpec::new(10.0, 0.0, true).unwrap();
    let run = |n: usize| {
        let gs = GridState::gaussian(n, 1.0, 10.0, -0.1, 0.05, 5.0).unwrap();
        let out = evolve_master(&gs, &spec, 0.05, max_stable_dt(&gs, &spec)).unwrap();
        moments(&out)
    };
    let (a, b) = (run(128), run(256));
    for (x, y) in [(a.x_mean, b.x_mean), (a.p_mean, b.p_mean), (a.x2, b.x2), (a.p2, b.p2)] {
        assert!((x - y).abs() <= 1e-3 * y.abs(), "{x} vs {y}");
    }
}

#[test]
fn spatial_momentum_diffusion_without_kinetics() {
    let gs = GridState::gaussian(128, 1.0, 1.0, 0.0, 0.05, 4.0).unwrap();
    let lambda = 3.0;
    let spec = MasterEquationSpec::new(lambda, 0.0, false).unwrap();
    let t = 0.2;
    let out = evolve_master(&gs, &spec, t, 0.01).unwrap();
    let rate = (moments(&out).p2 - moments(&gs).p2) / t;
    assert!((rate / (2.0 * lambda) - 1.0).abs() < 0.02, "{rate}");
}

#[test]
fn spatial_guard_quiet_at_the_bound() {
    // Running exactly at the step bound with strong decoherence must not trip
    // the blow-up guard.
    let gs = GridState::gaussian(32, 1.0, 1.0, 0.0, 0.1, 0.0).unwrap();
    let spec = MasterEquationSpec::new(100.0, 0.0, true).unwrap();
    let dt = max_stable_dt(&gs, &spec);
    assert!(evolve_master(&gs, &spec, 50.0 * dt, dt).is_ok());
}
