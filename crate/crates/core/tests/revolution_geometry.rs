mod common;

use common::{observed_order, ALPHA, GAMMA};
use extremal_spectra::revolution::{curvature_zeros, unduloid, Profile, UnduloidSurface};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PARAMS: [(f64, f64); 3] = [(0.8, 2.4), (0.5, 1.0), (1.0, 5.0)];

fn central(f: impl Fn(f64) -> f64, v: f64, h: f64) -> f64 {
    (f(v + h) - f(v - h)) / (2.0 * h)
}

#[test]
fn central_differences_converge_at_second_order() {
    let steps = [1e-3, 5e-4, 2.5e-4];
    for (a, g) in PARAMS {
        let s = unduloid(a, g).unwrap();
        let vs: Vec<f64> = (0..40).map(|i| -6.0 + 0.37 * i as f64).collect();
        let mut ex = Vec::new();
        let mut ez = Vec::new();
        for &h in &steps {
            let mut mx: f64 = 0.0;
            let mut mz: f64 = 0.0;
            for &v in &vs {
                mx = mx.max((central(|t| s.x(t), v, h) - s.xp(v)).abs());
                mz = mz.max((central(|t| s.z(t), v, h) - s.zp(v)).abs());
            }
            ex.push(mx);
            ez.push(mz);
        }
        for errs in [&ex, &ez] {
            let p = observed_order(&steps, errs);
            assert!(
                (p - 2.0).abs() <= 0.2,
                "({a}, {g}): order {p}, errors {errs:?}"
            );
        }
    }
}

#[test]
fn constant_mean_curvature_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for (a, g) in PARAMS {
        let s = unduloid(a, g).unwrap();
        let h = 2.0 / (a + g);
        for _ in 0..1000 {
            let v = rng.gen_range(-30.0..30.0);
            let sum = s.meridian_curvature(v) + s.parallel_curvature(v);
            assert!(
                (sum - h).abs() <= 1e-12,
                "({a}, {g}) at v = {v}: {sum} vs {h}"
            );
        }
    }
}

#[test]
fn parallel_curvature_exceeds_nondegeneracy_bound() {
    for (a, g) in PARAMS {
        let s = unduloid(a, g).unwrap();
        let bound = a / (g * g);
        for i in 0..2000 {
            let v = -10.0 + 0.01 * i as f64;
            assert!(s.parallel_curvature(v) > bound);
        }
    }
}

/// Signed curvature `(x′z″ − x″z′)/G^{3/2}` with second derivatives from
/// central differences of the first.
fn quotient_curvature(s: &UnduloidSurface, v: f64) -> f64 {
    let h = 1e-5;
    let (xp, zp) = (s.xp(v), s.zp(v));
    let xpp = central(|t| s.xp(t), v, h);
    let zpp = central(|t| s.zp(t), v, h);
    (xp * zpp - xpp * zp) / (xp * xp + zp * zp).powf(1.5)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn quotient_curvature_has_the_same_zero_set() {
    for (a, g) in PARAMS {
        let s = unduloid(a, g).unwrap();
        let (lo, hi) = (-5.0, 10.0);
        let n = 3000;
        let mut found = Vec::new();
        let f = |v: f64| quotient_curvature(&s, v);
        for i in 0..n {
            let (p, q) = (
                lo + (hi - lo) * i as f64 / n as f64,
                lo + (hi - lo) * (i + 1) as f64 / n as f64,
            );
            if (f(p) > 0.0) != (f(q) > 0.0) {
                found.push(bisect(f, p, q));
            }
        }
        let zeros = curvature_zeros(&s, lo, hi);
        assert_eq!(found.len(), zeros.len(), "({a}, {g})");
        for (x, y) in found.iter().zip(&zeros) {
            assert!((x - y).abs() <= 1e-6, "({a}, {g}): {x} vs {y}");
        }
    }
}

/// Zeros of the meridian curvature solve `sin(2v/(α+γ)) = −(γ−α)/(γ+α)`.
fn arcsin_zeros(a: f64, g: f64, lo: f64, hi: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let r = (g - a) / (g + a);
    let half = 0.5 * (a + g);
    let mut out = Vec::new();
    for n in -10..10 {
        for theta in [-r.asin(), PI + r.asin()] {
            let v = half * (theta + 2.0 * PI * n as f64);
            if (lo..=hi).contains(&v) {
                out.push(v);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn window_zeros_match_arcsin_values() {
    let s = unduloid(ALPHA, GAMMA).unwrap();
    let zeros = curvature_zeros(&s, -5.0, 10.0);
    let oracle = arcsin_zeros(ALPHA, GAMMA, -5.0, 10.0);
    assert_eq!(zeros.len(), 4);
    for (z, o) in zeros.iter().zip(&oracle) {
        assert!((z - o).abs() <= 1e-10);
    }
    for (z, t) in zeros.iter().zip([-4.18879, -0.83776, 5.86431, 9.21534]) {
        assert!((z - t).abs() <= 5e-6, "{z} vs {t}");
    }
    for (z, t) in zeros.iter().zip([-4.22, -0.78, 5.81, 9.26]) {
        assert!((z - t).abs() <= 0.06, "{z} vs coarse reference {t}");
    }
    assert!((s.curvature_zero(0) - zeros[1]).abs() <= 1e-12);
    assert!((s.curvature_zero(1) - zeros[2]).abs() <= 1e-12);
}
