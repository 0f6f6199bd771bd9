use std::f64::consts::PI;
use std::sync::OnceLock;

use hyperres::counting::{background_counting, counting_function, sector_count};
use hyperres::mode::{f_ratio_direct, lambda_mode, Path};
use hyperres::potential::Potential;
use hyperres::resonance::{all_resonances, ResonanceSet};
use num_complex::Complex64;
use proptest::prelude::*;

const T_MAX: f64 = 10.0;

fn real_set() -> &'static ResonanceSet {
    static S: OnceLock<ResonanceSet> = OnceLock::new();
    S.get_or_init(|| {
        let pot = Potential::step(1, Complex64::new(2.0, 0.0), 1.0).unwrap();
        all_resonances(&pot, T_MAX, 1e-8).unwrap()
    })
}

#[test]
fn real_potential_gives_conjugate_symmetric_resonances() {
    let set = real_set();
    let key = |l: u32, z: Complex64| (l, (z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64);
    let mut a: Vec<_> = set.resonances.iter().map(|r| (key(r.l, r.zeta()), r.zero_order)).collect();
    let mut b: Vec<_> = set.resonances.iter().map(|r| (key(r.l, r.zeta().conj()), r.zero_order)).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn counting_beyond_the_scanned_radius_is_refused() {
    assert!(counting_function(real_set(), T_MAX + 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counting_is_monotone(t1 in 0.0..T_MAX, t2 in 0.0..T_MAX) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (n1, m1) = counting_function(real_set(), lo).unwrap();
        let (n2, m2) = counting_function(real_set(), hi).unwrap();
        prop_assert!(n1 <= n2);
        prop_assert!(m1 <= m2 + 1e-12);
    }

    #[test]
    fn background_counting_is_monotone(n in 1u32..5, t1 in 0.0..30.0f64, dt in 0.0..10.0f64) {
        let (a, _) = background_counting(n, t1);
        let (b, _) = background_counting(n, t1 + dt);
        prop_assert!(a <= b);
    }

    #[test]
    fn sector_counts_are_additive(
        t in 0.5..T_MAX,
        x in 0.0..1.0f64,
        y in 0.0..1.0f64,
        z in 0.0..1.0f64,
    ) {
        let mut th = [0.5 * PI + PI * x, 0.5 * PI + PI * y, 0.5 * PI + PI * z];
        th.sort_by(f64::total_cmp);
        prop_assume!(th[1] - th[0] > 1e-6 && th[2] - th[1] > 1e-6);
        let set = real_set();
        let (a, _) = sector_count(set, t, th[0], th[1]).unwrap();
        let (b, _) = sector_count(set, t, th[1], th[2]).unwrap();
        let (c, _) = sector_count(set, t, th[0], th[2]).unwrap();
        prop_assert_eq!(a + b, c);
    }

    #[test]
    fn full_sector_never_exceeds_the_total(t in 0.5..T_MAX) {
        let set = real_set();
        let (s, _) = sector_count(set, t, 0.5 * PI, 1.5 * PI).unwrap();
        let (n, _) = counting_function(set, t).unwrap();
        prop_assert!(s <= n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scattering_functional_equation(
        n in 1u32..4,
        l in 0u32..20,
        cr in -3.0..3.0f64,
        ci in -3.0..3.0f64,
        a in 0.3..20.0f64,
        th in -1.55..1.55f64,
    ) {
        let pot = Potential::step(n, Complex64::new(cr, ci), 1.0).unwrap();
        let s = Complex64::new(0.5 * n as f64, 0.0) + Complex64::from_polar(a, th);
        let lam = lambda_mode(&pot, l, s).unwrap();
        let num = f_ratio_direct(&pot, l, -s + n as f64, Path::Closed).unwrap();
        let den = f_ratio_direct(&pot, l, s, Path::Closed).unwrap();
        prop_assert!(((lam * den / num).to_complex() - 1.0).norm() < 1e-8);
    }
}
