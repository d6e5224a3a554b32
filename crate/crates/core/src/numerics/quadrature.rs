//! Composite Gauss-Legendre quadrature with global panel doubling.
//!
//! Every integral over a momentum angle or a rescaled time goes through
//! [`integrate`]. Panels are refined uniformly (never adaptively by local
//! error) so the doubling difference is a clean convergence certificate.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Points per panel.
pub const GL_ORDER: usize = 16;

/// Values a quadrature can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    /// Magnitude of the last doubling difference.
    pub est_error: f64,
    /// Panels per sub-interval at the final level.
    pub panels: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub tol: f64,
    pub min_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-12,
            min_panels: 1,
            max_panels: 1 << 14,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn min_panels(mut self, n: usize) -> Self {
        self.min_panels = n.max(1);
        self
    }

    pub fn max_panels(mut self, n: usize) -> Self {
        self.max_panels = n.max(1);
        self
    }
}

/// Nodes and weights of the 16-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre_16() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = gauss_legendre(GL_ORDER);
        let mut out = [(0.0, 0.0); GL_ORDER];
        out.copy_from_slice(&rule);
        out
    })
}

/// Gauss-Legendre nodes and weights by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    rule
}

/// Fixed composite rule: `panels` equal panels of 16-point Gauss-Legendre.
pub fn composite<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64, panels: usize) -> T {
    let rule = gauss_legendre_16();
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut acc = T::zero();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let mut panel = T::zero();
        for &(x, w) in rule.iter() {
            panel = panel + f(mid + half * x) * w;
        }
        acc = acc + panel * half;
    }
    acc
}

/// Integrates `f` over `[a, b]`, doubling panels until two successive levels
/// differ by less than `opts.tol`.
pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadratureResult<T> {
    integrate_split(f, &[a, b], opts)
}

/// Like [`integrate`], with the interval pre-split at `breaks` (sorted,
/// including both end points) so kinks and jumps sit on panel edges.
pub fn integrate_split<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, breaks: &[f64], opts: QuadOptions) -> QuadratureResult<T> {
    assert!(breaks.len() >= 2, "need at least two break points");
    let eval = |f: &mut F, panels: usize| {
        let mut total = T::zero();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                total = total + composite(f, w[0], w[1], panels);
            } else if w[1] < w[0] {
                total = total - composite(f, w[1], w[0], panels);
            }
        }
        total
    };
    let mut panels = opts.min_panels.max(1);
    let mut prev = eval(&mut f, panels);
    loop {
        let next_panels = panels * 2;
        let next = eval(&mut f, next_panels);
        let diff = (next - prev).magnitude();
        if diff < opts.tol && next.is_finite_value() {
            return QuadratureResult {
                value: next,
                est_error: diff,
                panels: next_panels,
                converged: true,
            };
        }
        if next_panels >= opts.max_panels || !next.is_finite_value() {
            return QuadratureResult {
                value: next,
                est_error: diff,
                panels: next_panels,
                converged: false,
            };
        }
        panels = next_panels;
        prev = next;
    }
}

/// Sorted break points inside `[a, b]` with the end points prepended/appended.
pub fn breakpoints(a: f64, b: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = interior.into_iter().filter(|x| *x > a && *x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let mut out = Vec::with_capacity(pts.len() + 2);
    out.push(a);
    out.extend(pts);
    out.push(b);
    out
}
