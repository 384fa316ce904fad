// SPDX-License-Identifier: Apache-2.0

//! Derivative-free scalar maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`; stops once the bracket is narrower than `tol`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    // Keep whichever probe is best; the midpoint is not always better.
    [(mid, fm), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((mid, fm), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Scans `points` equally spaced abscissae of `[lo, hi]`, then refines the
/// best one by golden section inside its neighbouring grid cells.
pub fn scan_then_golden<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, points: usize, tol: f64) -> (f64, f64) {
    assert!(points >= 2 && hi > lo);
    let step = (hi - lo) / (points - 1) as f64;
    let (mut best_k, mut best_f) = (0, f64::NEG_INFINITY);
    for k in 0..points {
        let v = f(lo + k as f64 * step);
        if v > best_f {
            best_k = k;
            best_f = v;
        }
    }
    let a = lo + best_k.saturating_sub(1) as f64 * step;
    let b = (lo + (best_k + 1) as f64 * step).min(hi);
    let (x, fx) = golden_max(&mut f, a, b, tol);
    if fx >= best_f {
        (x, fx)
    } else {
        (lo + best_k as f64 * step, best_f)
    }
}
