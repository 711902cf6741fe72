//! Cross-checks against oracles that share no code with the library.

use std::f64::consts::PI;

use nehari_core::nehari::schatten_of;
use nehari_core::{
    amplify, build_matrix, counterexample_scan, norm_grid, norm_mc, p_zero, singular_values,
    verify_theorem2, Complex64, Integrator, MultiIndex, Symbol,
};
use proptest::prelude::*;

/// J0(x) = (1/π) ∫_0^π cos(x sin t) dt, trapezoid on a periodic integrand.
fn bessel_j0(x: f64) -> f64 {
    // exact once the node count exceeds the frequency
    let n = 40 + x.abs() as usize;
    let h = PI / n as f64;
    let s: f64 = (0..n).map(|k| (x * ((k as f64 + 0.5) * h).sin()).cos()).sum();
    s / n as f64
}

/// ‖Σ z_j/√d‖₁ = ∫_0^∞ (1 - J0(t/√d)^d) / t² dt.
fn linear_l1_oracle(d: usize) -> f64 {
    let scale = (d as f64).sqrt();
    let t_max = 400.0;
    let n = 400_000;
    let h = t_max / n as f64;
    let g = |t: f64| {
        if t == 0.0 {
            // 1 - J0(u)^d ≈ d u²/4 near 0
            return 0.25;
        }
        (1.0 - bessel_j0(t / scale).powi(d as i32)) / (t * t)
    };
    let mut s = g(0.0) + g(t_max);
    for k in 1..n {
        s += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    // beyond t_max the integrand is 1/t² up to a decaying term
    s * h / 3.0 + 1.0 / t_max
}

/// Midpoint rule on the full d-torus, no reduction.
fn direct_l1(coeffs: &[(Vec<u32>, Complex64)], d: usize, n: usize) -> f64 {
    let mut idx = vec![0usize; d];
    let mut total = 0.0;
    loop {
        let theta: Vec<f64> = idx.iter().map(|&i| 2.0 * PI * (i as f64 + 0.5) / n as f64).collect();
        let mut v = Complex64::new(0.0, 0.0);
        for (e, c) in coeffs {
            let phase: f64 = e.iter().zip(&theta).map(|(&k, t)| k as f64 * t).sum();
            v += c * Complex64::from_polar(1.0, phase);
        }
        total += v.norm();
        let mut j = 0;
        loop {
            if j == d {
                return total / (n as f64).powi(d as i32);
            }
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

#[test]
fn bessel_oracle_reproduces_closed_forms() {
    // the truncated tail is O(t_max^-2) for d = 2
    assert!((linear_l1_oracle(1) - 1.0).abs() < 1e-5);
    assert!((linear_l1_oracle(2) - 2.0 * 2f64.sqrt() / PI).abs() < 1e-5);
}

#[test]
fn grid_norm_matches_bessel_oracle() {
    for (d, tol) in [(3usize, 1e-8), (4, 1e-6)] {
        let grid = norm_grid(&Symbol::normalized_linear(d), 1.0, tol).unwrap();
        let oracle = linear_l1_oracle(d);
        assert!((grid.value - oracle).abs() < 10.0 * tol, "d={d}: {} vs {oracle}", grid.value);
    }
}

#[test]
fn monte_carlo_matches_bessel_oracle() {
    for d in [8usize, 20] {
        let mc = norm_mc(&Symbol::normalized_linear(d), 1.0, 400_000, 11).unwrap();
        let oracle = linear_l1_oracle(d);
        assert!((mc.value - oracle).abs() < 5.0 * mc.stderr, "d={d}: {} ± {} vs {oracle}", mc.value, mc.stderr);
    }
}

#[test]
fn grid_norm_matches_direct_midpoint_rule() {
    let coeffs = vec![
        (vec![1, 0, 0], Complex64::new(0.7, -0.2)),
        (vec![0, 2, 0], Complex64::new(-0.4, 0.5)),
        (vec![1, 1, 1], Complex64::new(0.3, 0.0)),
        (vec![0, 0, 0], Complex64::new(0.1, 0.6)),
    ];
    let f = Symbol::from_terms(coeffs.iter().map(|(e, c)| (MultiIndex::new(e.clone()), *c)));
    let grid = norm_grid(&f, 1.0, 1e-8).unwrap();
    let direct = direct_l1(&coeffs, 3, 160);
    assert!((grid.value - direct).abs() < 1e-5, "{} vs {direct}", grid.value);
}

#[test]
fn threshold_is_consistent_with_critical_exponent() {
    let mc = Integrator::MonteCarlo { samples: 3_000_000, seed: 21 };
    let above = counterexample_scan(p_zero() + 0.5, 16, &mc, true).unwrap();
    assert!(above.minimal_d.is_some(), "no d ≤ 16 exceeded 1 at p0 + 0.5");

    let mc = Integrator::MonteCarlo { samples: 400_000, seed: 22 };
    for d in [16usize, 48] {
        let rep = nehari_core::ratio(
            &Symbol::normalized_linear(d),
            &Symbol::normalized_linear(d),
            p_zero(),
            &mc,
        )
        .unwrap();
        assert!(!rep.exceeded_one, "d={d}: ratio {}", rep.ratio);
    }
}

#[test]
fn monte_carlo_is_independent_of_thread_count() {
    let f = Symbol::normalized_linear(12);
    let pooled = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| norm_mc(&f, 1.0, 200_000, 99).unwrap())
    };
    let one = pooled(1);
    let four = pooled(4);
    assert_eq!(one.value.to_bits(), four.value.to_bits());
    assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
}

fn small_symbol() -> impl Strategy<Value = Symbol> {
    prop::collection::vec(((0u32..3, 0u32..3), (-1.0f64..1.0, -1.0f64..1.0)), 1..5).prop_map(|terms| {
        Symbol::from_terms(
            terms.into_iter().map(|((a, b), (re, im))| (MultiIndex::new(vec![a, b]), Complex64::new(re, im))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schatten_norm_is_multiplicative_over_disjoint_variables(
        phi1 in small_symbol(),
        phi2 in small_symbol(),
        p in prop::sample::select(vec![1.0, 2.0, 4.0, f64::INFINITY]),
    ) {
        prop_assume!(!phi1.is_zero() && !phi2.is_zero());
        let product = phi1.multiply(&phi2.shift(2));
        let lhs = schatten_of(&product, p).unwrap();
        let rhs = schatten_of(&phi1, p).unwrap() * schatten_of(&phi2, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn linear_symbols_have_two_equal_singular_values(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7),
    ) {
        let a: Vec<Complex64> = a.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let phi = Symbol::linear(&a);
        prop_assume!(phi.coeff_norm() > 1e-6);
        let sp = singular_values(build_matrix(&phi).unwrap().entries()).unwrap();
        let v = sp.values();
        prop_assert!((v[0] - phi.coeff_norm()).abs() < 1e-10);
        prop_assert!((v[1] - phi.coeff_norm()).abs() < 1e-10);
        prop_assert!(v[2..].iter().all(|s| s.abs() < 1e-10));
    }

    #[test]
    fn amplified_inner_product_is_a_power(
        f in small_symbol(),
        phi in small_symbol(),
        m in 1usize..4,
    ) {
        let (big_f, big_phi) = amplify(&f, &phi, m).unwrap();
        let lhs = big_f.inner(&big_phi);
        let rhs = f.inner(&phi).powu(m as u32);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn linear_bound_holds_up_to_critical_exponent(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        t in 0.0f64..1.0,
    ) {
        let a: Vec<Complex64> = a.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let b: Vec<Complex64> = b.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        prop_assume!(Symbol::linear(&a).coeff_norm() > 1e-3 && Symbol::linear(&b).coeff_norm() > 1e-3);
        let p = 1.0 + t * (p_zero() - 1.0);
        let rep = verify_theorem2(&a, &b, p, 1e-6).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }
}
