use nalgebra::{Complex as C64, DMatrix};
use proptest::prelude::*;

use super::*;
use crate::series::{coefficients, PRESET_NAMES};

fn reals(v: &[f64]) -> Vec<APComplex> {
    v.iter().map(|&x| APComplex::new(x, 0.0, 128)).collect()
}

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::for_degree(0)
}

/// Eigenvalues of the balanced companion matrix, f64.
fn companion_roots(coeffs: &[(f64, f64)]) -> Vec<C64<f64>> {
    let lo = coeffs
        .iter()
        .position(|c| c.0 != 0.0 || c.1 != 0.0)
        .unwrap();
    let hi = coeffs
        .iter()
        .rposition(|c| c.0 != 0.0 || c.1 != 0.0)
        .unwrap();
    let c: Vec<C64<f64>> = coeffs[lo..=hi]
        .iter()
        .map(|&(a, b)| C64::new(a, b))
        .collect();
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let mut m = DMatrix::<C64<f64>>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    balance(&mut m);
    // a complex shift breaks the +-lambda symmetry that stalls the QR sweeps
    let shift = C64::new(0.137, 0.071);
    for i in 0..d {
        m[(i, i)] += shift;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 100_000).expect("schur converges");
    schur
        .eigenvalues()
        .expect("complex schur")
        .iter()
        .map(|e| e - shift)
        .collect()
}

/// Parlett-Reinsch diagonal balancing with powers of two.
fn balance(m: &mut DMatrix<C64<f64>>) {
    let d = m.nrows();
    loop {
        let mut changed = false;
        for i in 0..d {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..d {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let (c0, r0) = (c, r);
            let mut f = 1.0;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if f != 1.0 && (c + r) < 0.95 * (c0 + r0) {
                changed = true;
                for j in 0..d {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Worst relative gap between our roots and the oracle. Oracle values
/// closer than `cluster` to each other are compared through their mean,
/// which stays accurate when f64 splits a multiple root.
fn matches(ours: &ZeroSet, oracle: &[C64<f64>], tol: f64) -> f64 {
    assert_eq!(ours.len(), oracle.len());
    let cluster = 1e-5;
    let zs: Vec<C64<f64>> = ours
        .zeros
        .iter()
        .map(|z| C64::new(z.re_f64(), z.im_f64()))
        .collect();
    let mut seen = vec![false; oracle.len()];
    let mut worst = 0.0f64;
    for i in 0..oracle.len() {
        if seen[i] {
            continue;
        }
        let group: Vec<usize> = (0..oracle.len())
            .filter(|&j| !seen[j] && (oracle[j] - oracle[i]).norm() < cluster)
            .collect();
        for &j in &group {
            seen[j] = true;
        }
        let k = group.len() as f64;
        let mean: C64<f64> = group.iter().map(|&j| oracle[j]).sum::<C64<f64>>() / k;
        // our roots near the cluster, as many as the cluster holds
        let mut near: Vec<(f64, C64<f64>)> = zs.iter().map(|z| ((z - mean).norm(), *z)).collect();
        near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let ours_mean: C64<f64> = near[..group.len()].iter().map(|p| p.1).sum::<C64<f64>>() / k;
        worst = worst.max((ours_mean - mean).norm() / (1.0 + mean.norm()));
    }
    assert!(worst < tol, "worst mismatch {worst:e}");
    worst
}

#[test]
fn quadratic_examples() {
    let z = find_zeros(&reals(&[1.0, 0.0, 1.0]), &policy()).unwrap();
    let got: Vec<(f64, f64)> = z.zeros.iter().map(|w| w.to_f64_pair()).collect();
    assert_eq!(z.len(), 2);
    assert!((got[0].0).abs() < 1e-30 && (got[0].1 - 1.0).abs() < 1e-30);
    assert!((got[1].0).abs() < 1e-30 && (got[1].1 + 1.0).abs() < 1e-30);

    let z = find_zeros(&reals(&[1.0, 1.0, 0.5]), &policy()).unwrap();
    let got: Vec<(f64, f64)> = z.zeros.iter().map(|w| w.to_f64_pair()).collect();
    assert!((got[0].0 + 1.0).abs() < 1e-30 && (got[0].1 - 1.0).abs() < 1e-30);
    assert!((got[1].0 + 1.0).abs() < 1e-30 && (got[1].1 + 1.0).abs() < 1e-30);
    assert!(z.residuals.iter().all(|r| *r < 1e-30));
}

#[test]
fn exp_section_four_outside_szego_region() {
    let zs = section_zeros(&SeriesSpec::Exp, 4, &policy()).unwrap();
    assert_eq!(zs.len(), 4);
    for z in &zs.zeros {
        let (x, y) = z.to_f64_pair();
        let r = x.hypot(y);
        assert!(r <= 1.0);
        assert!(r * (1.0 - x).exp() > 1.0);
    }
    let coeffs: Vec<(f64, f64)> = SectionPoly::new(&SeriesSpec::Exp, 4, 128)
        .unwrap()
        .normalized()
        .iter()
        .map(|c| c.to_f64_pair())
        .collect();
    matches(&zs, &companion_roots(&coeffs), 1e-12);
}

#[test]
fn origin_roots_are_stripped() {
    let zs = section_zeros(&SeriesSpec::Sin, 5, &policy()).unwrap();
    assert_eq!(zs.origin_multiplicity, 1);
    assert_eq!(zs.len(), 4);
    // cos section of odd degree drops its zero top coefficient
    let zc = section_zeros(&SeriesSpec::Cos, 5, &policy()).unwrap();
    assert_eq!(zc.origin_multiplicity, 0);
    assert_eq!(zc.len(), 4);
    let z1 = section_zeros(&SeriesSpec::Sin, 1, &policy()).unwrap();
    assert!(z1.is_empty() && z1.origin_multiplicity == 1);
    assert!(matches!(
        find_zeros(&reals(&[0.0, 0.0]), &policy()),
        Err(Error::DegenerateDegree(_))
    ));
}

#[test]
fn ek_examples() {
    let s3 = coefficients(&SeriesSpec::Exp, 3, 128).unwrap();
    let b = ek_bounds(&s3).unwrap();
    assert_eq!((b.alpha, b.beta), (1.0, 3.0));
    let s30 = coefficients(&SeriesSpec::Exp, 30, 128).unwrap();
    assert!((ek_bounds(&s30).unwrap().beta - 30.0).abs() < 1e-12);
    for n in 2..12 {
        assert!(ek_strict(&coefficients(&SeriesSpec::Exp, n, 128).unwrap()).unwrap());
    }
    assert!(!ek_strict(&reals(&[1.0, 1.0])).unwrap());
    assert!(matches!(
        ek_bounds(&reals(&[1.0, -1.0])),
        Err(Error::Positivity { index: 1 })
    ));
}

#[test]
fn bessel_poly_inside_ek_radius() {
    let alpha = crate::series::ExactComplex::int(0);
    let p = crate::series::bessel_even_poly(&alpha, 40, 256).unwrap();
    assert!(ek_strict(&p.coeffs).unwrap());
    let zs = find_zeros(&p.coeffs, &PrecisionPolicy::for_degree(40)).unwrap();
    let radius = crate::series::bessel_ek_radius(&alpha, 40);
    assert!(zs.zeros.iter().all(|z| z.abs_f64() < radius));
}

#[test]
fn catalog_matches_companion_eigenvalues() {
    for name in PRESET_NAMES {
        let spec = SeriesSpec::preset(name).unwrap();
        for n in 2..=12 {
            if spec.check_degree(n).is_err() {
                continue;
            }
            let zs = section_zeros(&spec, n, &policy()).unwrap();
            let coeffs: Vec<(f64, f64)> = SectionPoly::new(&spec, n, 128)
                .unwrap()
                .normalized()
                .iter()
                .map(|c| c.to_f64_pair())
                .collect();
            let oracle = companion_roots(&coeffs);
            matches(&zs, &oracle, 1e-10);
        }
    }
}

#[test]
fn reconstruction_at_degree_fifty() {
    let spec = SeriesSpec::Exp;
    let pol = PrecisionPolicy::for_degree(50);
    let coeffs = SectionPoly::new(&spec, 50, 2 * pol.start_bits)
        .unwrap()
        .normalized();
    let zs = find_zeros(&coeffs, &pol).unwrap();
    let bits = zs.bits_used;
    // lead * prod (z - r_i), expanded
    let mut prod = vec![Complex::with_val(bits, 1)];
    for r in &zs.zeros {
        let mut next = vec![Complex::new(bits); prod.len() + 1];
        for (k, c) in prod.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= Complex::with_val(bits, c * r.as_complex());
        }
        prod = next;
    }
    let lead = coeffs[50].as_complex();
    let tol = 2f64.powi(-(bits as i32) / 4);
    for (k, c) in prod.iter().enumerate() {
        let got = Complex::with_val(bits, c * lead);
        let want = coeffs[k].as_complex();
        let diff = Float::with_val(bits, Complex::with_val(bits, &got - want).abs_ref());
        let rel = (diff / Float::with_val(bits, want.abs_ref())).to_f64();
        assert!(rel < tol, "k={k}: {rel:e}");
    }
}

#[test]
fn escalation_reports_failure_at_cap() {
    // cap below the level needed for a second, confirming run
    let pol = PrecisionPolicy::new(128, 128, 1e-12).unwrap();
    let r = find_zeros(&reals(&[1.0, 0.0, 1.0]), &pol);
    assert!(matches!(r, Err(Error::RootNoConvergence { .. })));
}

#[test]
fn csv_rows() {
    let zs = section_zeros(&SeriesSpec::Sin, 3, &policy()).unwrap();
    let csv = zs.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "sin,3,0,0,0,0");
    let cols: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(cols.len(), 6);
    assert_eq!(cols[0], "sin");
    // sin section of degree 3 at 3z: 3z - 9z^3/2, roots +-sqrt(2/3)
    let re: f64 = cols[3].parse().unwrap();
    assert!((re.abs() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn sorted_by_angle() {
    let zs = section_zeros(&SeriesSpec::Exp, 20, &PrecisionPolicy::for_degree(20)).unwrap();
    let angles: Vec<f64> = zs
        .zeros
        .iter()
        .map(|z| {
            z.im_f64()
                .atan2(z.re_f64())
                .rem_euclid(std::f64::consts::TAU)
        })
        .collect();
    assert!(angles.windows(2).all(|w| w[0] <= w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positive_coefficients_stay_in_ek_ring(c in prop::collection::vec(0.05f64..20.0, 2..12)) {
        let coeffs = reals(&c);
        let b = ek_bounds(&coeffs).unwrap();
        let zs = find_zeros(&coeffs, &policy()).unwrap();
        for z in &zs.zeros {
            prop_assert!(b.contains(z.abs_f64(), 1e-20));
        }
    }

    #[test]
    fn random_polys_match_companion(c in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..10)) {
        prop_assume!(c.last().unwrap().0.abs() + c.last().unwrap().1.abs() > 0.1);
        prop_assume!(c[0].0.abs() + c[0].1.abs() > 0.1);
        let coeffs: Vec<APComplex> = c.iter().map(|&(a, b)| APComplex::new(a, b, 128)).collect();
        let zs = find_zeros(&coeffs, &policy()).unwrap();
        prop_assert!(zs.residuals.iter().all(|r| *r <= 2f64.powi(-(zs.bits_used as i32) / 2)));
        matches(&zs, &companion_roots(&c), 1e-8);
    }
}
