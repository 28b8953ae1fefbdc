use proptest::prelude::*;
use rug::Float;
use szego_core::apnum::{erfc, gamma, integrate_ts_f64, log_gamma, APComplex};

const BITS: u32 = 128;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_gamma_recurrence(x in -6.0f64..12.0, y in -8.0f64..8.0) {
        prop_assume!(y.abs() > 0.05 || x > 0.05);
        let z = APComplex::new(x, y, BITS);
        let z1 = &z + &APComplex::one(BITS);
        let d = &(&log_gamma(&z1).unwrap() - &log_gamma(&z).unwrap()) - &z.ln();
        // equal modulo 2 pi i
        let (re, im) = d.to_f64_pair();
        let k = (im / std::f64::consts::TAU).round();
        prop_assert!(re.abs() < 1e-25);
        prop_assert!((im - k * std::f64::consts::TAU).abs() < 1e-25);
    }

    #[test]
    fn gamma_recurrence(x in 0.1f64..8.0, y in -4.0f64..4.0) {
        let z = APComplex::new(x, y, BITS);
        let z1 = &z + &APComplex::one(BITS);
        let lhs = gamma(&z1).unwrap();
        let rhs = &z * &gamma(&z).unwrap();
        prop_assert!((&lhs - &rhs).abs_f64() <= 1e-30 * lhs.abs_f64());
    }

    #[test]
    fn erfc_conjugate_symmetry(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let z = APComplex::new(x, y, BITS);
        let a = erfc(&z.conj()).unwrap();
        let b = erfc(&z).unwrap().conj();
        prop_assert!((&a - &b).abs_f64() <= 1e-30 * a.abs_f64().max(1e-300));
    }

    #[test]
    fn erfc_reflection(x in -4.0f64..4.0, y in -4.0f64..4.0) {
        // erfc(z) + erfc(-z) = 2
        let z = APComplex::new(x, y, BITS);
        let s = &erfc(&z).unwrap() + &erfc(&(-&z)).unwrap();
        prop_assert!((&s - &APComplex::new(2.0, 0.0, BITS)).abs_f64() < 1e-25 * s.abs_f64().max(1.0));
    }

    #[test]
    fn quadrature_stable_under_precision(p in 0.0f64..3.0, mu in -0.9f64..2.0) {
        // int_0^1 x^mu e^(p x) dx at two precisions
        let f = |bits: u32| integrate_ts_f64(
            |node| {
                let b = node.precision();
                let lx = Float::with_val(b, node.from_lo.ln_ref());
                let v = (lx * mu + Float::with_val(b, node.x * p)).exp();
                APComplex::from_real(&v, b)
            },
            0.0,
            1.0,
            bits,
        ).unwrap();
        let lo = f(BITS);
        let hi = f(2 * BITS);
        prop_assert!((&lo - &hi.with_precision(BITS)).abs_f64() <= 1e-30 * hi.abs_f64());
        // p = 0 has the closed form 1/(mu + 1)
        if p == 0.0 {
            prop_assert!((lo.re_f64() * (mu + 1.0) - 1.0).abs() < 1e-15);
        }
    }
}
