mod common;

use common::{elliptic_grid, oracle_e, oracle_f};
use extremal_spectra::elliptic::{complete_e, complete_k, ellint_e, ellint_f, EllipticArgs};
use std::f64::consts::FRAC_PI_2;

const KAPPA2: f64 = 8.0 / 9.0;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn incomplete_integrals_match_quadrature_oracle() {
    let g = elliptic_grid();
    assert_eq!(g.len(), 100);
    let mut worst: f64 = 0.0;
    for (phi, k2) in g {
        let args = EllipticArgs::new(phi, k2).unwrap();
        let f = ellint_f(args).unwrap();
        let e = ellint_e(args).unwrap();
        let (fo, eo) = (oracle_f(phi, k2), oracle_e(phi, k2));
        worst = worst.max(rel(f, fo)).max(rel(e, eo));
        assert!(rel(f, fo) <= 1e-12, "F({phi}, {k2}) = {f}, oracle {fo}");
        assert!(rel(e, eo) <= 1e-12, "E({phi}, {k2}) = {e}, oracle {eo}");
    }
    assert!(worst <= 1e-12);
}

#[test]
fn complete_integrals_match_oracle() {
    for k2 in [0.0, 0.3, KAPPA2, 0.999] {
        assert!(rel(complete_k(k2), oracle_f(FRAC_PI_2, k2)) <= 1e-12);
        assert!(rel(complete_e(k2), oracle_e(FRAC_PI_2, k2)) <= 1e-12);
    }
}

#[test]
fn ordering_and_monotonicity() {
    for k2 in [0.1, 0.5, KAPPA2, 0.97] {
        let mut prev = (0.0, 0.0);
        for i in 1..=50 {
            let phi = FRAC_PI_2 * i as f64 / 50.0;
            let args = EllipticArgs::new(phi, k2).unwrap();
            let (f, e) = (ellint_f(args).unwrap(), ellint_e(args).unwrap());
            assert!(e <= phi && phi <= f);
            assert!(f > prev.0 && e > prev.1);
            prev = (f, e);
        }
    }
}
