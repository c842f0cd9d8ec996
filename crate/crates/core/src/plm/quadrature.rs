//! Composite Gauss-Legendre quadrature split at caller-supplied breakpoints.
//!
//! The spectral integrands are piecewise smooth (raised-cosine pieces times a
//! super-Gaussian), so integrating each smooth piece separately with panels no
//! wider than [`MAX_PANEL_GHZ`] converges to near machine precision.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss-Legendre points per panel.
pub const NODES: usize = 16;
/// Widest panel, GHz.
pub const MAX_PANEL_GHZ: f64 = 1.0;

struct Rule {
    nodes: [f64; NODES],
    weights: [f64; NODES],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; NODES];
        let mut weights = [0.0; NODES];
        let n = NODES as f64;
        for i in 0..NODES {
            // Chebyshev initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(NODES, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(NODES, x);
            dp = if d != 0.0 { d } else { dp };
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for i in 0..NODES {
        acc += r.weights[i] * f(mid + half * r.nodes[i]);
    }
    acc * half
}

/// Integral of `f` over `[a, b]`, splitting at every breakpoint inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breakpoints: &[f64]) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        if width <= 0.0 {
            continue;
        }
        let panels = (width / MAX_PANEL_GHZ).ceil().max(1.0) as usize;
        let h = width / panels as f64;
        for p in 0..panels {
            let pa = lo + h * p as f64;
            let pb = if p + 1 == panels { hi } else { pa + h };
            total += gauss_panel(&f, pa, pb);
        }
    }
    total
}
