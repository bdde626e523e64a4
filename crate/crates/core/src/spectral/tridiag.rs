//! Generalized symmetric tridiagonal eigenproblems `K a = Λ M a`.
//!
//! Eigenvalues are isolated by Sturm-sequence bisection: the number of
//! negative pivots in the `LDLᵀ` factorization of `K − σM` equals the number
//! of pencil eigenvalues below `σ` when `M` is positive definite. Vectors
//! come from shifted inverse iteration with `M`-orthogonalization against
//! already accepted vectors of nearby eigenvalues.

use super::SpectralError;

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `true` if every `LDLᵀ` pivot is strictly positive and finite.
    pub fn is_positive_definite(&self) -> bool {
        let mut q = 0.0;
        for i in 0..self.dim() {
            q = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.off[i - 1] * self.off[i - 1] / q
            };
            if !(q > 0.0) || !q.is_finite() {
                return false;
            }
        }
        true
    }

    fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Number of eigenvalues of the pencil `(K, M)` strictly below `sigma`.
pub fn count_below(k: &SymTridiagonal, m: &SymTridiagonal, sigma: f64) -> usize {
    let n = k.dim();
    let mut count = 0;
    let mut q = 0.0;
    for i in 0..n {
        let d = k.diag[i] - sigma * m.diag[i];
        q = if i == 0 {
            d
        } else {
            let e = k.off[i - 1] - sigma * m.off[i - 1];
            d - e * e / q
        };
        if q == 0.0 {
            q = -f64::MIN_POSITIVE.sqrt();
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Dense-free LU with partial pivoting of a general tridiagonal matrix.
struct TridiagonalLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(mut lower: Vec<f64>, mut diag: Vec<f64>, mut upper: Vec<f64>) -> Self {
        let n = diag.len();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] != 0.0 {
                    let fact = lower[i] / diag[i];
                    lower[i] = fact;
                    diag[i + 1] -= fact * upper[i];
                }
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper[i];
                upper[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let scale = diag
            .iter()
            .chain(upper.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        // Exactly singular shifts are expected in inverse iteration.
        for d in diag.iter_mut() {
            if d.abs() < f64::EPSILON * scale * 1e-3 {
                *d = f64::EPSILON * scale * 1e-3;
            }
        }
        Self {
            lower,
            diag,
            upper,
            upper2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.upper[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.upper2[i] * b[i + 2];
            }
            b[i] = acc / self.diag[i];
        }
    }
}

fn shifted_lu(k: &SymTridiagonal, m: &SymTridiagonal, sigma: f64) -> TridiagonalLu {
    let diag = k
        .diag
        .iter()
        .zip(&m.diag)
        .map(|(a, b)| a - sigma * b)
        .collect();
    let off: Vec<f64> = k
        .off
        .iter()
        .zip(&m.off)
        .map(|(a, b)| a - sigma * b)
        .collect();
    TridiagonalLu::factor(off.clone(), diag, off)
}

fn m_dot(m: &SymTridiagonal, x: &[f64], y: &[f64]) -> f64 {
    m.quadratic_form(x, y)
}

/// Bisects for the `index`-th pencil eigenvalue inside `[lo, hi]`, where
/// `count_below(lo) ≤ index < count_below(hi)`.
fn bisect_eigenvalue(
    k: &SymTridiagonal,
    m: &SymTridiagonal,
    index: usize,
    mut lo: f64,
    mut hi: f64,
    abs_floor: f64,
) -> (f64, f64) {
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) || hi - lo <= abs_floor {
            break;
        }
        if count_below(k, m, mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// The `count` smallest eigenpairs of `K a = Λ M a`, ascending, with
/// `M`-orthonormal vectors whose largest-magnitude entry is positive.
pub fn lowest_eigenpairs(
    k: &SymTridiagonal,
    m: &SymTridiagonal,
    count: usize,
) -> Result<Vec<(f64, Vec<f64>)>, SpectralError> {
    let n = k.dim();
    if count == 0 || count > n {
        return Err(SpectralError::Count { count, dim: n });
    }
    if !m.is_positive_definite() {
        return Err(SpectralError::AssemblyIntegrity);
    }
    let mut lo = -1.0;
    while count_below(k, m, lo) > 0 {
        lo *= 2.0;
        if !lo.is_finite() {
            return Err(SpectralError::Solver("no lower spectral bound".into()));
        }
    }
    let mut hi = 1.0;
    while count_below(k, m, hi) < count {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(SpectralError::Solver("no upper spectral bound".into()));
        }
    }
    let abs_floor = 1e-15 * hi;
    let mut values = Vec::with_capacity(count);
    let mut start = lo;
    for index in 0..count {
        let (a, b) = bisect_eigenvalue(k, m, index, start, hi, abs_floor);
        values.push(0.5 * (a + b));
        start = a;
    }

    let scale = k.max_abs().max(m.max_abs());
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for &value in &values {
        let lu = shifted_lu(k, m, value);
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (0.7 * i as f64 + 0.3).sin())
            .collect();
        let neighbours: Vec<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(_, (w, _))| (w - value).abs() <= 1e-7 * value.abs().max(1.0))
            .map(|(i, _)| i)
            .collect();
        for iteration in 0..12 {
            let mut y = m.mul_vec(&x);
            lu.solve(&mut y);
            for _ in 0..2 {
                for &j in &neighbours {
                    let other = &pairs[j].1;
                    let c = m_dot(m, other, &y);
                    for (yi, oi) in y.iter_mut().zip(other) {
                        *yi -= c * oi;
                    }
                }
            }
            let norm = m_dot(m, &y, &y).sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(SpectralError::Solver(format!(
                    "inverse iteration broke down at eigenvalue {value}"
                )));
            }
            y.iter_mut().for_each(|v| *v /= norm);
            x = y;
            if iteration >= 1 {
                let kx = k.mul_vec(&x);
                let mx = m.mul_vec(&x);
                let res = kx
                    .iter()
                    .zip(&mx)
                    .map(|(a, b)| (a - value * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let kn = kx.iter().map(|a| a * a).sum::<f64>().sqrt();
                if res <= 1e-13 * kn.max(scale * f64::EPSILON) {
                    break;
                }
            }
        }
        let pivot = x
            .iter()
            .enumerate()
            .fold((0usize, 0.0f64), |(bi, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bi, bv)
                }
            })
            .0;
        if x[pivot] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        pairs.push((value, x));
    }
    Ok(pairs)
}
