//! Overflow-safe special functions used by the squeezed-state amplitudes.
//!
//! Factorials, powers and Hermite polynomials of high order overflow `f64`
//! long before the probabilities they combine into do, so everything here is
//! carried as a sign plus a natural-log magnitude and only exponentiated once
//! at the end.

use std::ops::Mul;

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Zero is represented by `sign == 0` and `log_magnitude == -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaledValue {
    sign: i8,
    log_magnitude: f64,
}

impl LogScaledValue {
    pub const ZERO: LogScaledValue = LogScaledValue {
        sign: 0,
        log_magnitude: f64::NEG_INFINITY,
    };
    pub const ONE: LogScaledValue = LogScaledValue {
        sign: 1,
        log_magnitude: 0.0,
    };

    /// Builds a value from its parts. A zero sign forces `log_magnitude = -inf`.
    pub fn new(sign: i8, log_magnitude: f64) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogScaledValue {
                sign: sign.signum(),
                log_magnitude,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScaledValue {
                sign: if x > 0.0 { 1 } else { -1 },
                log_magnitude: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Converts back to `f64`; underflows to `±0` and overflows to `±inf`.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_magnitude.exp()
        }
    }

    /// Multiplies by `exp(log_factor)`.
    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogScaledValue {
                sign: self.sign,
                log_magnitude: self.log_magnitude + log_factor,
            }
        }
    }
}

impl Mul for LogScaledValue {
    type Output = LogScaledValue;

    fn mul(self, rhs: LogScaledValue) -> LogScaledValue {
        if self.sign == 0 || rhs.sign == 0 {
            LogScaledValue::ZERO
        } else {
            LogScaledValue {
                sign: self.sign * rhs.sign,
                log_magnitude: self.log_magnitude + rhs.log_magnitude,
            }
        }
    }
}

/// Magnitude above which the recurrence pair is folded into the log scale.
const RESCALE_THRESHOLD: f64 = 1e150;

/// Physicists' Hermite polynomial `H_n(x)` as a [`LogScaledValue`].
///
/// Runs `H_{k+1} = 2x H_k - 2k H_{k-1}` on a rescaled pair; whenever the
/// current term exceeds [`RESCALE_THRESHOLD`] both terms are divided by it
/// and the logarithm is accumulated separately.
pub fn hermite_log_scaled(n: usize, x: f64) -> LogScaledValue {
    HermiteSequence::new(x).nth(n).expect("infinite sequence")
}

/// Iterator over `H_0(x), H_1(x), ...` in log-scaled form.
///
/// Used when a whole ladder of Hermite values is needed, avoiding the
/// quadratic cost of calling [`hermite_log_scaled`] per index.
#[derive(Debug, Clone)]
pub struct HermiteSequence {
    x: f64,
    k: usize,
    prev: f64,
    curr: f64,
    log_scale: f64,
}

impl HermiteSequence {
    pub fn new(x: f64) -> Self {
        HermiteSequence {
            x,
            k: 0,
            prev: 0.0,
            curr: 1.0,
            log_scale: 0.0,
        }
    }
}

impl Iterator for HermiteSequence {
    type Item = LogScaledValue;

    fn next(&mut self) -> Option<LogScaledValue> {
        let out = LogScaledValue::from_f64(self.curr).scale_log(self.log_scale);
        // advance to H_{k+1}
        let next = 2.0 * self.x * self.curr - 2.0 * self.k as f64 * self.prev;
        self.prev = self.curr;
        self.curr = next;
        self.k += 1;
        let mag = self.curr.abs().max(self.prev.abs());
        if mag > RESCALE_THRESHOLD {
            self.prev /= mag;
            self.curr /= mag;
            self.log_scale += mag.ln();
        }
        Some(out)
    }
}

/// `ln(k!)` for `k = 0..=n_max`, accumulated with compensated summation.
pub fn ln_factorial_table(n_max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n_max + 1);
    let mut acc = NeumaierSum::default();
    table.push(0.0);
    for k in 1..=n_max {
        acc.add((k as f64).ln());
        table.push(acc.total());
    }
    table
}

/// Neumaier's improved Kahan summation.
///
/// Order-sensitive only at the level of the final rounding, which is what
/// lets per-point series be assembled in any order with identical output.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of an iterator of `f64`.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_low_orders() {
        let h0 = hermite_log_scaled(0, 3.7);
        assert_eq!(h0.sign(), 1);
        assert_eq!(h0.log_magnitude(), 0.0);

        let h1 = hermite_log_scaled(1, -2.0);
        assert_eq!(h1.sign(), -1);
        assert!((h1.log_magnitude().exp() - 4.0).abs() < 1e-15);

        // H_2(x) = 4x^2 - 2
        let h2 = hermite_log_scaled(2, 0.5);
        assert_eq!(h2.sign(), -1);
        assert!((h2.to_f64() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn odd_hermite_vanishes_exactly_at_origin() {
        for n in (1..400).step_by(2) {
            assert!(
                hermite_log_scaled(n, 0.0).is_zero(),
                "H_{n}(0) not exactly zero"
            );
        }
        assert!(!hermite_log_scaled(400, 0.0).is_zero());
    }

    #[test]
    fn no_overflow_in_extreme_corner() {
        let h = hermite_log_scaled(2000, 100.0);
        assert_eq!(h.sign(), 1);
        assert!(h.log_magnitude().is_finite());
        // bounded above by the leading term (2x)^n for x > sqrt(n)
        let lead = 2000.0 * (200.0f64).ln();
        assert!(h.log_magnitude() < lead && h.log_magnitude() > lead - 200.0);

        let h = hermite_log_scaled(2000, -100.0);
        assert_eq!(h.sign(), 1);
        let h = hermite_log_scaled(1999, -100.0);
        assert_eq!(h.sign(), -1);
    }

    #[test]
    fn sequence_matches_single_evaluation() {
        let seq: Vec<_> = HermiteSequence::new(1.3).take(300).collect();
        for n in [0, 1, 7, 150, 299] {
            assert_eq!(seq[n], hermite_log_scaled(n, 1.3));
        }
    }

    #[test]
    fn log_scaled_roundtrip() {
        for x in [-3.5, -1e-300, 0.0, 2.0, 1e300] {
            let v = LogScaledValue::from_f64(x);
            assert_eq!(v.to_f64().signum(), x.signum());
            assert!((v.to_f64() - x).abs() <= 1e-12 * x.abs());
        }
        assert!(LogScaledValue::new(0, 5.0).is_zero());
        assert!(LogScaledValue::new(1, f64::NEG_INFINITY).is_zero());
        let p = LogScaledValue::from_f64(-2.0) * LogScaledValue::from_f64(3.0);
        assert!((p.to_f64() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn ln_factorial_matches_direct_product() {
        let table = ln_factorial_table(170);
        let mut f = 1.0f64;
        for k in 1..=170 {
            f *= k as f64;
            assert!((table[k] - f.ln()).abs() <= 1e-13 * table[k].max(1.0));
        }
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }
}
