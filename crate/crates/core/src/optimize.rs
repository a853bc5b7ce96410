//! Scalar root finding and bounded minimization.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RootResult {
    Root { x: f64, fx: f64, iterations: u32 },
    NoSignChange,
    MaxIterations { x: f64, iterations: u32 },
}

/// Brent's method on [a, b]. `f` must change sign between the endpoints.
pub(crate) fn brent_root<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, max_iter: u32) -> RootResult {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return RootResult::NoSignChange;
    }
    if fa == 0.0 {
        return RootResult::Root { x: a, fx: fa, iterations: 0 };
    }
    if fb == 0.0 {
        return RootResult::Root { x: b, fx: fb, iterations: 0 };
    }
    if (fa > 0.0) == (fb > 0.0) {
        return RootResult::NoSignChange;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for it in 1..=max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return RootResult::Root { x: b, fx: fb, iterations: it };
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return RootResult::MaxIterations { x: b, iterations: it };
        }
    }
    RootResult::MaxIterations { x: b, iterations: max_iter }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: u32,
}

/// Golden-section minimization over [a, b] until the bracket is narrower than `tol`.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut it = 0;
    while b - a > tol && it < 500 {
        it += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let fa = f(a);
    let fb = f(b);
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if fa < best.1 {
        best = (a, fa);
    }
    if fb < best.1 {
        best = (b, fb);
    }
    Minimum { x: best.0, fx: best.1, iterations: it }
}

/// Golden section that starts from a triple a < x < c with f(x) <= f(a), f(c) and
/// keeps that property, so the returned point beats both ends of its final bracket.
pub(crate) fn golden_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    (mut a, mut fa): (f64, f64),
    (mut x, mut fx): (f64, f64),
    (mut c, mut fc): (f64, f64),
    tol: f64,
) -> Minimum {
    const R: f64 = 1.0 - INV_PHI;
    let mut it = 0;
    while c - a > tol && it < 500 {
        it += 1;
        // Probe the larger side.
        let (u, right) = if c - x > x - a { (x + R * (c - x), true) } else { (x - R * (x - a), false) };
        let fu = f(u);
        if fu < fx {
            if right {
                a = x;
                fa = fx;
            } else {
                c = x;
                fc = fx;
            }
            x = u;
            fx = fu;
        } else if right {
            c = u;
            fc = fu;
        } else {
            a = u;
            fa = fu;
        }
    }
    let _ = (fa, fc);
    Minimum { x, fx, iterations: it }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        match brent_root(|x| x * x * x - 2.0, 0.0, 2.0, 100) {
            RootResult::Root { x, .. } => assert!((x - 2f64.cbrt()).abs() < 1e-14),
            r => panic!("{r:?}"),
        }
        assert_eq!(brent_root(|x| x * x + 1.0, -1.0, 1.0, 100), RootResult::NoSignChange);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let m = golden_section(|x| (x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-8);
        let m = golden_section(|x| x, -1.0, 2.0, 1e-9);
        assert_eq!(m.x, -1.0);
    }

    #[test]
    fn bracketed_golden() {
        let f = |x: f64| (x + 3.1).powi(2);
        let m = golden_bracketed(f, (-4.0, f(-4.0)), (-3.0, f(-3.0)), (-2.0, f(-2.0)), 1e-6);
        assert!((m.x + 3.1).abs() < 1e-6);
        assert!(f(m.x + 1e-6) >= m.fx && f(m.x - 1e-6) >= m.fx);
    }
}
