//! Hand-checked values through the public API.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use supnorm::amplifier::{amplifier_diagonal_value, build_amplifier, build_is_amplifier, HeckeSystem};
use supnorm::arith::{mod_inverse, p_adic_valuation, primes_in_interval, DirichletCharacter, SquarefreeModulus};
use supnorm::counting::{
    count_admissible_a, enumerate_r_n_matrices, matrix_count_split, CongruenceReductionInstance, MatrixCountInstance,
};
use supnorm::exponents::{final_exponents, hybrid_combination, major_arc_bound, minor_arc_bound, rat};
use supnorm::kloosterman::{kloosterman_sum, KloostermanQuery};
use supnorm::oscillatory::{dirichlet_approximate, major_arc_size, voronoi_integral, Shape, SmoothWindow};
use supnorm::special::{
    bessel_j, bessel_k_imag, bessel_y_imag_pair, voronoi_kernel, whittaker_weight, ArchimedeanParameter, Sign,
    VoronoiKernel,
};
use supnorm::transforms::{dot_transform_closed, phi_eval, tilde_transform_closed_real, tilde_transform_quadrature, TestFunction};

fn sq(n: u64) -> SquarefreeModulus {
    SquarefreeModulus::new(n).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn arithmetic() {
    assert_eq!(mod_inverse(2, 5).unwrap(), 3);
    assert_eq!(mod_inverse(4, 9).unwrap(), 7);
    assert_eq!(p_adic_valuation(360, 3).unwrap(), 2);
    assert_eq!(p_adic_valuation(15, 2).unwrap(), 0);
    assert_eq!(primes_in_interval(10.0, 20.0, &sq(21)), vec![11, 13, 17, 19]);
    assert_eq!(primes_in_interval(10.0, 20.0, &sq(143)), vec![17, 19]);
    assert!(primes_in_interval(14.0, 16.0, &sq(1)).is_empty());
    let real3 = DirichletCharacter::real(sq(3));
    assert!(close(real3.eval(2).re, -1.0, 1e-15));
    assert_eq!(real3.eval(3), Complex64::new(0.0, 0.0));
}

#[test]
fn kloosterman_values() {
    let triv = DirichletCharacter::trivial(sq(1));
    let s = |m, n, c, chi: &DirichletCharacter| kloosterman_sum(&KloostermanQuery::new(m, n, c, chi).unwrap());
    assert!((s(1, 1, 1, &triv) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!((s(1, 1, 3, &triv) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    assert!((s(1, 2, 5, &triv) - Complex64::new(-1.0 - 5f64.sqrt(), 0.0)).norm() < 1e-12);
    let real3 = DirichletCharacter::real(sq(3));
    assert!((s(1, 1, 3, &real3) - Complex64::new(0.0, -(3f64.sqrt()))).norm() < 1e-12);
}

#[test]
fn special_functions() {
    assert!(close(bessel_j(1.0, 1.0).unwrap(), 0.440_050_585_744_933_5, 1e-10));
    assert!(close(bessel_j(5.0, 2.0).unwrap(), 0.007_039_629_755_871_685, 1e-9));
    assert!(close(bessel_k_imag(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3, 1e-9));
    assert!(close(bessel_k_imag(0.0, 10.0).unwrap(), 1.778_006_231_616_765e-5, 1e-9));
    // Y_0(1) = 0.08825696421567696
    assert!(close(bessel_y_imag_pair(0.0, 1.0).unwrap(), 2.0 * 0.088_256_964_215_676_96, 1e-9));
    assert_eq!(bessel_y_imag_pair(1.3, 2.5).unwrap(), bessel_y_imag_pair(-1.3, 2.5).unwrap());

    let hol2 = ArchimedeanParameter::holomorphic(2).unwrap();
    assert!(close(whittaker_weight(&hol2, 1.0 / (2.0 * PI)).unwrap(), 2.0 / std::f64::consts::E, 1e-12));
    let m0 = ArchimedeanParameter::maass(0.0).unwrap();
    assert!(close(whittaker_weight(&m0, 1.0).unwrap(), bessel_k_imag(0.0, 2.0 * PI).unwrap(), 1e-14));

    let plus = VoronoiKernel { param: hol2, sign: Sign::Plus };
    assert!(close(voronoi_kernel(&plus, 1.0).unwrap(), 2.0 * PI * bessel_j(1.0, 4.0 * PI).unwrap(), 1e-12));
    assert_eq!(voronoi_kernel(&VoronoiKernel { param: hol2, sign: Sign::Minus }, 0.3).unwrap(), 0.0);
    let minus = VoronoiKernel { param: m0, sign: Sign::Minus };
    assert!(close(voronoi_kernel(&minus, 1.0).unwrap(), 4.0 * bessel_k_imag(0.0, 4.0 * PI).unwrap(), 1e-14));
}

#[test]
fn holomorphic_weight_peaks_at_k_over_4pi() {
    for k in [2u32, 8, 20] {
        let p = ArchimedeanParameter::holomorphic(k).unwrap();
        let grid: Vec<f64> = (1..4000).map(|i| i as f64 * 1e-3).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| whittaker_weight(&p, *a).unwrap().total_cmp(&whittaker_weight(&p, *b).unwrap()))
            .unwrap();
        assert!((best - k as f64 / (4.0 * PI)).abs() <= 1e-3, "k={k}: {best}");
    }
}

#[test]
fn transforms() {
    let tf42 = TestFunction::new(4, 2).unwrap();
    assert!(close(phi_eval(&tf42, 1.0).unwrap(), -0.002_476_638_964_109_955, 1e-8));
    // second-order vanishing: phi(x) ~ -x^2/384
    assert!(close(phi_eval(&tf42, 1e-6).unwrap(), -1e-12 / 384.0, 1e-6));
    let tf10 = TestFunction::new(10, 2).unwrap();
    let want = 2.0 / (8.0 * PI) / (33.75 * 22.75 * 13.75);
    assert!(close(dot_transform_closed(&tf10, 4).unwrap().value, want, 1e-12));
    assert!(close(tilde_transform_closed_real(&tf42, 0.0).unwrap().value, 1.0 / (144.0 * PI), 1e-12));
    assert!(close(tilde_transform_closed_real(&tf42, 1.0).unwrap().value, 1.0 / (400.0 * PI), 1e-12));
    let tf62 = TestFunction::new(6, 2).unwrap();
    let c = tilde_transform_closed_real(&tf62, 2.0).unwrap().value;
    assert!(close(tilde_transform_quadrature(&tf62, 2.0).unwrap(), c, 1e-6));
}

#[test]
fn oscillatory() {
    let a = dirichlet_approximate(1.0 / 3.0, 10.0).unwrap();
    assert_eq!((a.a, a.q), (1, 3));
    let a = dirichlet_approximate(PI - 3.0, 100.0).unwrap();
    assert_eq!((a.a, a.q), (1, 7));
    assert!(a.beta.abs() <= 1.0 / 700.0);
    let a = dirichlet_approximate(0.5 + 1e-9, 10.0).unwrap();
    assert_eq!((a.a, a.q), (1, 2));

    assert!(close(major_arc_size(10, 1e-6, 1e6, 2.0, 1.0).unwrap(), 0.108_284_271_247_461_9, 1e-9));

    let w = SmoothWindow::new(8.0, 8.0, Shape::LogBump).unwrap();
    let hol = VoronoiKernel { param: ArchimedeanParameter::holomorphic(2).unwrap(), sign: Sign::Plus };
    let i = voronoi_integral(&w, &hol, 1.0).unwrap();
    assert!(i.abs() <= 20.0 * 8f64.powf(0.75) * 1.5);
    let minus = VoronoiKernel { param: ArchimedeanParameter::maass(0.0).unwrap(), sign: Sign::Minus };
    assert!(voronoi_integral(&w, &minus, 10.0).unwrap().abs() < 1e-40);
}

#[test]
fn counting() {
    let rep = count_admissible_a(&CongruenceReductionInstance::new(2, 2, 1, 1, 1, 1, sq(5), 10.0, 10.0).unwrap()).unwrap();
    assert!(rep.clean());

    let at_i = MatrixCountInstance::new(0.0, 1.0, 1, sq(3), 0.01).unwrap();
    let all = enumerate_r_n_matrices(&at_i).unwrap();
    assert_eq!(all.len(), 1);
    assert_eq!((all[0].a, all[0].b, all[0].c, all[0].d), (1, 0, 0, 1));
    let s = matrix_count_split(&at_i).unwrap();
    assert_eq!((s.m, s.m0, s.mstar), (1, 1, 0));
    let near = MatrixCountInstance::new(0.0, 1.0, 1, sq(2), 0.05).unwrap();
    assert!(enumerate_r_n_matrices(&near).unwrap().iter().all(|g| g.c == 0));
}

#[test]
fn amplifier() {
    let chi = DirichletCharacter::trivial(sq(21));
    let vals: BTreeMap<u64, Complex64> =
        [(11, 1.2), (13, -0.4), (17, 0.9), (19, 2.0)].iter().map(|&(p, v)| (p, Complex64::new(v, 0.0))).collect();
    let mut sys = HeckeSystem::new(chi, vals).unwrap();
    let amp = build_amplifier(&sys, 10.0, &sq(21)).unwrap();
    let support: Vec<u64> = amp.coefficients.keys().copied().collect();
    assert_eq!(support, vec![11, 13, 17, 19, 121, 169, 289, 361]);
    assert!((amplifier_diagonal_value(&mut sys, &amp).unwrap() - Complex64::new(4.0, 0.0)).norm() < 1e-12);

    let chi5 = DirichletCharacter::real(sq(5));
    let vals: BTreeMap<u64, Complex64> = [(2, 0.3), (3, -1.1), (5, 0.0), (7, 0.25)]
        .iter()
        .map(|&(p, v)| (p, Complex64::new(v, 0.0)))
        .collect();
    let mut sys = HeckeSystem::new(chi5, vals).unwrap();
    let is = build_is_amplifier(&sys, 100.0, &sq(5)).unwrap();
    assert_eq!(is.lambda1, vec![2, 3, 7]);
    assert!((amplifier_diagonal_value(&mut sys, &is).unwrap() - Complex64::new(3.0, 0.0)).norm() < 1e-12);
}

#[test]
fn exponents() {
    assert_eq!(minor_arc_bound(&rat(7, 64)).monomials.len(), 4);
    assert_eq!(major_arc_bound().monomials.len(), 3);
    let f = final_exponents(&rat(7, 64)).unwrap();
    assert_eq!((f.exponent_n, f.exponent_tstar), (rat(-25, 914), rat(9979, 1828)));
    assert_eq!(rat(-25, 914), rat(-1, 37) - rat(11, 33818));
    let h = hybrid_combination().unwrap();
    assert_eq!(h.final_exponent, rat(-1, 2269));
}
