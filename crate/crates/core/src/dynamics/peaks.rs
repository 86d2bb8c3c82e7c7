use crate::scalar::Real;

/// Centered running mean over `window` grid intervals (trapezoid weights),
/// which removes micromotion at the modulation period when the grid resolves
/// one period in exactly `window` steps. The window shrinks near the ends.
pub fn period_average<T: Real>(values: &[T], window: usize) -> Vec<T> {
    let n = values.len();
    if window < 2 || n == 0 {
        return values.to_vec();
    }
    let half = window / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + window - half).min(n - 1);
            if hi == lo {
                return values[i];
            }
            let mut acc = (values[lo] + values[hi]) / T::lit(2.0);
            for v in &values[lo + 1..hi] {
                acc += *v;
            }
            acc / T::from_usize_lossy(hi - lo)
        })
        .collect()
}

/// Time of the first interior local maximum above `threshold`, refined by a
/// parabola through the three samples around it. Assumes a uniform grid.
pub fn first_peak<T: Real>(times: &[T], values: &[T], threshold: T) -> Option<T> {
    debug_assert_eq!(times.len(), values.len());
    (1..values.len().saturating_sub(1)).find_map(|i| {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > threshold && b >= a && b > c {
            let curv = a - T::lit(2.0) * b + c;
            let offset = if curv < T::zero() {
                T::lit(0.5) * (a - c) / curv
            } else {
                T::zero()
            };
            Some(times[i] + offset * (times[i + 1] - times[i]))
        } else {
            None
        }
    })
}
