//! Float helpers that work on both `std` and `no_std` builds.
//!
//! Under `no_std` the methods fall back to `libm`; with `std` they forward to
//! the intrinsics so there is no performance difference.

/// Elementary functions on `f64` needed by the models.
pub trait FloatExt {
    fn sqrt_(self) -> f64;
    fn powf_(self, e: f64) -> f64;
    fn exp_(self) -> f64;
    fn ln_(self) -> f64;
    fn abs_(self) -> f64;
}

#[cfg(feature = "std")]
impl FloatExt for f64 {
    #[inline(always)]
    fn sqrt_(self) -> f64 {
        self.sqrt()
    }
    #[inline(always)]
    fn powf_(self, e: f64) -> f64 {
        self.powf(e)
    }
    #[inline(always)]
    fn exp_(self) -> f64 {
        self.exp()
    }
    #[inline(always)]
    fn ln_(self) -> f64 {
        self.ln()
    }
    #[inline(always)]
    fn abs_(self) -> f64 {
        self.abs()
    }
}

#[cfg(not(feature = "std"))]
impl FloatExt for f64 {
    #[inline(always)]
    fn sqrt_(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline(always)]
    fn powf_(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    #[inline(always)]
    fn exp_(self) -> f64 {
        libm::exp(self)
    }
    #[inline(always)]
    fn ln_(self) -> f64 {
        libm::log(self)
    }
    #[inline(always)]
    fn abs_(self) -> f64 {
        libm::fabs(self)
    }
}

/// A power `x^e` specialised at construction time.
///
/// The tube-law exponents sit in the hot loop of the finite-volume update;
/// for integer and half-integer exponents `powi`/`sqrt` are several times
/// faster than `powf` and bit-reproducible across platforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FastPow {
    /// `x^k` with integer `k`.
    Int(i32),
    /// `x^(k/2)` with odd `k`, evaluated as `sqrt(x)^k`.
    Half(i32),
    /// General real exponent.
    General(f64),
}

impl FastPow {
    pub fn new(e: f64) -> Self {
        let r = libm::round(e);
        if e == r && r.abs_() <= 120.0 {
            return FastPow::Int(r as i32);
        }
        let r2 = libm::round(2.0 * e);
        if 2.0 * e == r2 && r2.abs_() <= 120.0 {
            return FastPow::Half(r2 as i32);
        }
        FastPow::General(e)
    }

    /// Evaluate `x^e` for `x > 0`.
    #[inline(always)]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            FastPow::Int(k) => x.powi(k),
            FastPow::Half(k) => x.sqrt_().powi(k),
            FastPow::General(e) => x.powf_(e),
        }
    }
}

/// Solve the dense linear system `a * x = b` in place by Gaussian elimination
/// with partial pivoting. `a` is row-major `n x n`, `b` of length `n`; the
/// solution overwrites `b`. Returns `false` on a (numerically) singular pivot.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    debug_assert!(a.len() >= n * n && b.len() >= n);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs_();
        for row in col + 1..n {
            let v = a[row * n + col].abs_();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut sum = b[col];
        for k in col + 1..n {
            sum -= a[col * n + k] * b[k];
        }
        b[col] = sum / a[col * n + col];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fast_pow_matches_powf() {
        for &(x, e) in &[
            (0.37, 0.5),
            (4.0, -5.0),
            (6.5, 19.0),
            (2.3, -0.5),
            (1.7, 1.2),
            (0.9, 0.0),
        ] {
            assert_relative_eq!(FastPow::new(e).eval(x), f64::powf(x, e), max_relative = 1e-14);
        }
    }

    #[test]
    fn fast_pow_picks_specialised_forms() {
        assert_eq!(FastPow::new(19.0), FastPow::Int(19));
        assert_eq!(FastPow::new(-5.0), FastPow::Int(-5));
        assert_eq!(FastPow::new(0.5), FastPow::Half(1));
        assert_eq!(FastPow::new(-2.5), FastPow::Half(-5));
        assert!(matches!(FastPow::new(1.2), FastPow::General(_)));
    }

    #[test]
    fn dense_solve_recovers_known_solution() {
        // 3x3 system with known solution (1, -2, 3)
        let mut a = [2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let x_true = [1.0, -2.0, 3.0];
        let mut b = [0.0; 3];
        for i in 0..3 {
            b[i] = (0..3).map(|j| a[i * 3 + j] * x_true[j]).sum();
        }
        assert!(solve_dense(&mut a, &mut b, 3));
        for i in 0..3 {
            assert_relative_eq!(b[i], x_true[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn dense_solve_rejects_singular() {
        let mut a = [1.0, 2.0, 2.0, 4.0];
        let mut b = [1.0, 2.0];
        assert!(!solve_dense(&mut a, &mut b, 2));
    }
}
