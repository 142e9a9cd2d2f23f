//! Scalar helpers: sinc variants and compensated summation.

use core::f64::consts::PI;
use core::ops::AddAssign;

/// Below this |z| the sinc series replaces `sin(z) / z`.
pub const SINC_TAYLOR_CUTOFF: f64 = 1e-4;

/// `sin(pi * x)`, exactly zero whenever `x` is an integer.
pub fn sin_pi(x: f64) -> f64 {
    // r = x mod 2 in [-1, 1]; the subtraction is exact.
    let r = x - 2.0 * libm::round(0.5 * x);
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    libm::sin(PI * r)
}

fn sinc_series(z: f64) -> f64 {
    let z2 = z * z;
    1.0 - z2 / 6.0 + z2 * z2 / 120.0
}

/// `sin(z) / z` with `sinc(0) = 1`.
pub fn sinc(z: f64) -> f64 {
    let z = libm::fabs(z);
    if z < SINC_TAYLOR_CUTOFF {
        sinc_series(z)
    } else {
        libm::sin(z) / z
    }
}

/// `sinc(pi * x)`. Integer `x != 0` gives an exact zero.
pub fn sinc_pi(x: f64) -> f64 {
    let x = libm::fabs(x);
    let z = PI * x;
    if z < SINC_TAYLOR_CUTOFF {
        sinc_series(z)
    } else {
        sin_pi(x) / z
    }
}

/// Kahan-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    err: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.err;
        let t = self.sum + y;
        self.err = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl From<KahanSum> for f64 {
    fn from(k: KahanSum) -> f64 {
        k.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for v in iter {
            k.add(v);
        }
        k
    }
}

/// Compensated sum of a slice, in order.
pub fn kahan_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<KahanSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for k in -50i32..=50 {
            assert_eq!(sin_pi(f64::from(k)), 0.0, "k = {k}");
        }
        assert_eq!(sin_pi(1.0e15 + 1.0), 0.0);
    }

    #[test]
    fn sin_pi_matches_sin() {
        for &x in &[0.1, 0.25, 0.5, 0.75, 1.3, -2.7, 17.123, 0.3703965] {
            assert!((sin_pi(x) - libm::sin(PI * x)).abs() < 1e-14, "x = {x}");
        }
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
    }

    #[test]
    fn sinc_at_zero_and_series_cutoff() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc_pi(0.0), 1.0);
        // the series and the direct quotient agree at the cutoff
        for z in [SINC_TAYLOR_CUTOFF * 0.999_999, SINC_TAYLOR_CUTOFF] {
            assert!((sinc_series(z) - libm::sin(z) / z).abs() <= 2.0 * f64::EPSILON);
        }
        assert!((sinc(1e-5) - (1.0 - 1e-10 / 6.0)).abs() < 1e-18);
    }

    #[test]
    fn sinc_is_even() {
        for &z in &[1e-6, 0.3, 2.0, 1234.5] {
            assert_eq!(sinc(z), sinc(-z));
            assert_eq!(sinc_pi(z), sinc_pi(-z));
        }
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let mut values = std::vec![1.0e16];
        values.extend(core::iter::repeat(1.0).take(1000));
        values.push(-1.0e16);
        assert_eq!(kahan_sum(&values), 1000.0);
    }
}
