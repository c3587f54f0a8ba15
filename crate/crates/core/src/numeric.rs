use alloc::vec::Vec;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sums the terms largest magnitude first with compensation.
pub(crate) fn sum_descending(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| libm::fabs(*b).total_cmp(&libm::fabs(*a)));
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// `points` log-spaced values from `min` to `max` inclusive.
///
/// Returns an empty vector for `points == 0` and `[min]` for a single point.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![min],
        _ => {
            let (lo, hi) = (libm::log(min), libm::log(max));
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i == 0 {
                        min
                    } else if i == points - 1 {
                        max
                    } else {
                        libm::exp(lo + step * i as f64)
                    }
                })
                .collect()
        }
    }
}

/// C(n, k) as a float; exact for the small n used here.
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(c)
}

/// Bisection for a non-increasing `f`: returns the smallest representable `x`
/// in `[lo, hi]` (to float resolution) with `f(x) <= target`.
///
/// The caller guarantees `f(lo) > target >= f(hi)`. Uses geometric midpoints
/// while the bracket spans more than a factor of two.
pub(crate) fn bisect_non_increasing<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    for _ in 0..2000 {
        let mid = if lo > 0.0 && hi / lo > 2.0 {
            libm::sqrt(lo * hi)
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
