//! Bracketing root finders.
//!
//! Everything here is plain bisection: the functions we solve are high
//! iterates of quadratic maps and are too ill-conditioned for derivative
//! based methods.

use crate::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol` or `f` vanishes exactly.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64, what: &str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::BracketFailure {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= tol || mid == a || mid == b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Walks from `start` towards `stop` in steps of `step` and returns the
/// first sub-interval `(a, b)` (in walking order) on which `f` changes sign.
pub fn scan_sign_change<F>(mut f: F, start: f64, stop: f64, step: f64) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let dir = if stop >= start { 1.0 } else { -1.0 };
    let step = step.abs();
    let count = ((stop - start).abs() / step).ceil() as usize;
    let mut prev_x = start;
    let mut prev_f = f(start);
    for i in 1..=count {
        let x = if i == count {
            stop
        } else {
            start + dir * step * i as f64
        };
        let fx = f(x);
        if prev_f == 0.0 {
            return Some((prev_x, prev_x));
        }
        if fx.is_finite() && prev_f.is_finite() && fx.signum() != prev_f.signum() {
            return Some((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    None
}

/// Locates the switch point of a monotone predicate between `outside`
/// (where it is false) and `inside` (where it is true).
pub fn bisect_predicate<P>(mut pred: P, outside: f64, inside: f64, tol: f64) -> f64
where
    P: FnMut(f64) -> bool,
{
    let (mut out, mut inn) = (outside, inside);
    for _ in 0..200 {
        if (inn - out).abs() <= tol {
            break;
        }
        let mid = 0.5 * (out + inn);
        if mid == out || mid == inn {
            break;
        }
        if pred(mid) {
            inn = mid;
        } else {
            out = mid;
        }
    }
    0.5 * (out + inn)
}

/// Marches outward from `guess` on both sides with geometrically growing
/// steps and returns every root bracketed before the step exceeds
/// `max_reach`, nearest first.
///
/// A pair of close roots can sit between two samples without a sign change.
/// Wherever `|f|` dips at a sample, the extremum is refined and, if it
/// crosses zero, both roots of the pair are returned.
pub fn nearby_roots<F>(mut f: F, guess: f64, min_step: f64, max_reach: f64, lo: f64, hi: f64) -> Vec<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut roots = Vec::new();
    let f0 = f(guess);
    if f0 == 0.0 {
        return vec![guess];
    }
    for dir in [-1.0, 1.0] {
        let mut back: Option<(f64, f64)> = None;
        let mut prev_x = guess;
        let mut prev_f = f0;
        let mut reach = min_step;
        while reach <= max_reach {
            let x = (guess + dir * reach).clamp(lo, hi);
            let fx = f(x);
            if !fx.is_finite() || !prev_f.is_finite() {
                break;
            }
            if fx.signum() != prev_f.signum() {
                let (a, b) = if prev_x < x { (prev_x, x) } else { (x, prev_x) };
                if let Ok(r) = bisect(&mut f, a, b, 1e-15, "nearby root") {
                    roots.push(r);
                }
                break;
            }
            if let Some((bx, bf)) = back {
                if prev_f.abs() < bf.abs() && prev_f.abs() < fx.abs() {
                    let (a, b) = if bx < x { (bx, x) } else { (x, bx) };
                    let s = prev_f.signum();
                    let m = golden_min(|t| s * f(t), a, b);
                    if s * f(m) < 0.0 {
                        roots.extend(bisect(&mut f, a, m, 1e-15, "nearby root"));
                        roots.extend(bisect(&mut f, m, b, 1e-15, "nearby root"));
                        break;
                    }
                }
            }
            if x == lo || x == hi {
                break;
            }
            back = Some((prev_x, prev_f));
            prev_x = x;
            prev_f = fx;
            reach *= 1.25;
        }
    }
    roots.sort_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()));
    roots
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_min<F>(mut f: F, mut a: f64, mut b: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if c == d || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}
