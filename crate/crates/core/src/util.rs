//! Small numeric helpers shared across modules.

/// Cubic hermite step: 0 at t <= 0, 1 at t >= 1, C1 monotone in between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * (3.0 - 2.0 * t)
    }
}

/// Bisection for a monotone non-decreasing `f` on `[lo, hi]`, returning a
/// point where `f` crosses `target`. Falls back to the nearer endpoint when
/// the target is out of range.
pub fn bisect_monotone<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    if f(hi) <= target {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Fractional area of `{f < c}` in a triangle with vertex values `v` under
/// the linear interpolation model. Exact for the PL interpolant; ties in the
/// vertex values are handled by the same formulas.
pub fn tri_sublevel_fraction(v: [f64; 3], c: f64) -> f64 {
    let mut a = v;
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite field values"));
    let [f0, f1, f2] = a;
    if c <= f0 {
        0.0
    } else if c >= f2 {
        1.0
    } else if c < f1 {
        // small triangle near the minimum vertex; f1 > f0 here
        (c - f0) * (c - f0) / ((f1 - f0) * (f2 - f0))
    } else {
        // complement of the small triangle near the maximum; f2 > f1 here
        1.0 - (f2 - c) * (f2 - c) / ((f2 - f0) * (f2 - f1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tri_fraction_basic() {
        // values 0, 1, 2: at c = 1 the sublevel is the half below the mid vertex
        let f = tri_sublevel_fraction([0.0, 1.0, 2.0], 1.0);
        assert!((f - 0.5).abs() < 1e-15);
        assert_eq!(tri_sublevel_fraction([0.0, 1.0, 2.0], -0.1), 0.0);
        assert_eq!(tri_sublevel_fraction([0.0, 1.0, 2.0], 2.0), 1.0);
    }

    #[test]
    fn tri_fraction_ties() {
        // flat triangle: step behaviour
        assert_eq!(tri_sublevel_fraction([1.0, 1.0, 1.0], 1.0), 0.0);
        assert_eq!(tri_sublevel_fraction([1.0, 1.0, 1.0], 1.1), 1.0);
        // doubled minimum: fraction 1 - (1-t)^2
        let f = tri_sublevel_fraction([0.0, 0.0, 1.0], 0.5);
        assert!((f - 0.75).abs() < 1e-15);
        // doubled maximum: fraction t^2
        let f = tri_sublevel_fraction([0.0, 1.0, 1.0], 0.5);
        assert!((f - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bisect_finds_crossing() {
        let c = bisect_monotone(|x| x * x, 0.0, 2.0, 2.0);
        assert!((c - 2f64.sqrt()).abs() < 1e-12);
    }
}
