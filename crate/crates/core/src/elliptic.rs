//! Incomplete elliptic integrals of the first and second kind.
//!
//! ```text
//! F(φ, k) = ∫₀^φ dθ / √(1 − k² sin²θ)
//! E(φ, k) = ∫₀^φ √(1 − k² sin²θ) dθ
//! ```
//!
//! Both are evaluated through Carlson's symmetric forms `R_F` and `R_D`
//! (duplication algorithm) on the reduced amplitude `r ∈ (−π/2, π/2]`, and
//! extended to every real amplitude by quasi-periodicity
//! `F(r + nπ, k) = F(r, k) + 2n·K(k)` (likewise for `E`).
//!
//! The modulus is always passed squared (`k2 = k²`), matching the parameter
//! convention `m = k²`.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

/// π split into a head and tail so that `φ − nπ` keeps full precision.
const PI_HI: f64 = std::f64::consts::PI;
const PI_LO: f64 = 1.224_646_799_147_353_2e-16;

/// Relative tolerance driving the Carlson duplication loops.
const CARLSON_TOL: f64 = 1e-16;

const MAX_DUPLICATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EllipticError {
    #[error("elliptic parameter k2 = {k2} outside [0, 1] or amplitude {phi} not finite")]
    Domain { phi: f64, k2: f64 },
    #[error("F(φ, k) diverges for k2 = 1 and |φ| = {phi} ≥ π/2")]
    Divergent { phi: f64 },
}

/// Amplitude and squared modulus of an incomplete elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticArgs {
    pub phi: f64,
    pub k2: f64,
}

impl EllipticArgs {
    pub fn new(phi: f64, k2: f64) -> Result<Self, EllipticError> {
        let args = Self { phi, k2 };
        args.validate()?;
        Ok(args)
    }

    fn validate(&self) -> Result<(), EllipticError> {
        if !self.phi.is_finite() || !(0.0..=1.0).contains(&self.k2) {
            return Err(EllipticError::Domain {
                phi: self.phi,
                k2: self.k2,
            });
        }
        Ok(())
    }
}

/// Carlson's `R_F(x, y, z)`; at most one argument may be zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * CARLSON_TOL).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut scale = 1.0;
    for _ in 0..MAX_DUPLICATIONS {
        if scale * q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        scale *= 0.25;
    }
    let xs = (a - x) / a;
    let ys = (a - y) / a;
    let zs = -xs - ys;
    let e2 = xs * ys - zs * zs;
    let e3 = xs * ys * zs;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// Carlson's `R_D(x, y, z)`; `z > 0` and at most one of `x, y` zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let q = (0.25 * CARLSON_TOL).powf(-1.0 / 6.0)
        * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut scale = 1.0;
    let mut sum = 0.0;
    for _ in 0..MAX_DUPLICATIONS {
        if scale * q < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        sum += scale / (sz * (z + lambda));
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        scale *= 0.25;
    }
    let xs = (a - x) / a;
    let ys = (a - y) / a;
    let zs = -(xs + ys) / 3.0;
    let xy = xs * ys;
    let z2 = zs * zs;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * zs;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * zs;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    scale * series / (a * a.sqrt()) + 3.0 * sum
}

/// Complete integral of the first kind `K(k) = F(π/2, k)`; infinite at `k2 = 1`.
pub fn complete_k(k2: f64) -> f64 {
    if k2 == 1.0 {
        return f64::INFINITY;
    }
    carlson_rf(0.0, 1.0 - k2, 1.0)
}

/// Complete integral of the second kind `E(k) = E(π/2, k)`.
pub fn complete_e(k2: f64) -> f64 {
    if k2 == 1.0 {
        return 1.0;
    }
    let y = 1.0 - k2;
    carlson_rf(0.0, y, 1.0) - k2 / 3.0 * carlson_rd(0.0, y, 1.0)
}

/// Splits `φ ≥ 0` into `n·π + r` with `r ∈ (−π/2, π/2]`.
fn reduce_amplitude(phi: f64) -> (f64, f64) {
    let mut n = (phi / PI_HI).round();
    let mut r = (phi - n * PI_HI) - n * PI_LO;
    if r <= -FRAC_PI_2 {
        n -= 1.0;
        r = (phi - n * PI_HI) - n * PI_LO;
    } else if r > FRAC_PI_2 {
        n += 1.0;
        r = (phi - n * PI_HI) - n * PI_LO;
    }
    (n, r)
}

fn ellint_f_reduced(r: f64, k2: f64) -> f64 {
    let (s, c) = r.sin_cos();
    s * carlson_rf(c * c, 1.0 - k2 * s * s, 1.0)
}

fn ellint_e_reduced(r: f64, k2: f64) -> f64 {
    let (s, c) = r.sin_cos();
    if k2 == 1.0 {
        return s;
    }
    let (x, y) = (c * c, 1.0 - k2 * s * s);
    s * carlson_rf(x, y, 1.0) - k2 / 3.0 * s * s * s * carlson_rd(x, y, 1.0)
}

/// Incomplete elliptic integral of the first kind `F(φ, k)`.
pub fn ellint_f(args: EllipticArgs) -> Result<f64, EllipticError> {
    args.validate()?;
    let EllipticArgs { phi, k2 } = args;
    let mag = phi.abs();
    if k2 == 1.0 && mag >= FRAC_PI_2 {
        return Err(EllipticError::Divergent { phi });
    }
    let (n, r) = reduce_amplitude(mag);
    let mut value = ellint_f_reduced(r, k2);
    if n != 0.0 {
        value += 2.0 * n * complete_k(k2);
    }
    Ok(if phi.is_sign_negative() {
        -value
    } else {
        value
    })
}

/// Incomplete elliptic integral of the second kind `E(φ, k)`.
pub fn ellint_e(args: EllipticArgs) -> Result<f64, EllipticError> {
    args.validate()?;
    let EllipticArgs { phi, k2 } = args;
    let (n, r) = reduce_amplitude(phi.abs());
    let mut value = ellint_e_reduced(r, k2);
    if n != 0.0 {
        value += 2.0 * n * complete_e(k2);
    }
    Ok(if phi.is_sign_negative() {
        -value
    } else {
        value
    })
}
