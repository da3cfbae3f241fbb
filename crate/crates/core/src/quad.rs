//! Composite Gauss–Legendre rules and the handful of singular integrals the
//! rest of the crate needs in closed-ish form.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Points per panel. Exact for polynomials of degree 39.
pub const PANEL_ORDER: usize = 20;

/// Reference nodes/weights on [-1, 1].
pub fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut pairs = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap())
            .as_node_weight_pairs()
            .to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// Nodes and weights of the panel rule mapped to [a, b].
pub fn panel(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    reference_rule().iter().map(move |&(x, w)| (m + h * x, h * w))
}

pub fn gl<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    panel(a, b).map(|(x, w)| w * f(x)).sum()
}

/// Composite rule on `pieces` equal panels.
pub fn gl_composite<F: FnMut(f64) -> f64>(a: f64, b: f64, pieces: usize, mut f: F) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| gl(a + i as f64 * h, a + (i + 1) as f64 * h, &mut f))
        .sum()
}

/// ∫_a^b f where f has a kink or peak at `pivot` ∈ [a, b]: panels halve in
/// length toward the pivot on both sides.
pub fn gl_graded<F: FnMut(f64) -> f64>(a: f64, b: f64, pivot: f64, mut f: F) -> f64 {
    graded_rule(a, b, pivot, 60).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Nodes and weights of [`gl_graded`] with `halvings` geometric panels per side.
pub fn graded_rule(a: f64, b: f64, pivot: f64, halvings: usize) -> Vec<(f64, f64)> {
    debug_assert!(a <= pivot && pivot <= b);
    let mut out = Vec::with_capacity(2 * (halvings + 1) * PANEL_ORDER);
    let mut side = |len: f64, dir: f64| {
        let mut hi = len;
        for _ in 0..halvings {
            let lo = 0.5 * hi;
            let (x0, x1) = (pivot + dir * lo, pivot + dir * hi);
            out.extend(panel(x0.min(x1), x0.max(x1)));
            hi = lo;
        }
        let (x0, x1) = (pivot, pivot + dir * hi);
        out.extend(panel(x0.min(x1), x0.max(x1)));
    };
    if pivot > a {
        side(pivot - a, -1.0);
    }
    if b > pivot {
        side(b - pivot, 1.0);
    }
    out
}

/// ∫_0^b θ^s g(θ) dθ for s > −1 with g smooth, via u = θ^{s+1}.
pub fn power_integral<F: FnMut(f64) -> f64>(s: f64, b: f64, mut g: F) -> f64 {
    let e = s + 1.0;
    let ub = b.powf(e);
    gl_composite(0.0, ub, 4, |u| g(u.powf(1.0 / e))) / e
}

/// ∫_a^b |2 sin(θ/2)|^s dθ for −π ≤ a < b ≤ π, s > −1.
pub fn chord_power_integral(s: f64, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a < 0.0 && b > 0.0 {
        return chord_power_integral(s, a, 0.0) + chord_power_integral(s, 0.0, b);
    }
    if b <= 0.0 {
        return chord_power_integral(s, -b, -a);
    }
    let g = |t: f64| {
        if t == 0.0 {
            1.0
        } else {
            (2.0 * (0.5 * t).sin() / t).powf(s)
        }
    };
    let chord = |t: f64| (2.0 * (0.5 * t).sin()).powf(s);
    if s >= 0.0 {
        // bounded integrand; only the derivative is singular at 0
        return if a == 0.0 { gl_graded(0.0, b, 0.0, chord) } else { gl_composite(a, b, 4, chord) };
    }
    if a >= 2.0 * (b - a) {
        return gl_composite(a, b, 2, chord);
    }
    // ∫_0^x via the θ^{s+1} substitution on [0, min(x, 1)]
    let from_zero = |x: f64| {
        let near = power_integral(s, x.min(1.0), g);
        if x > 1.0 {
            near + gl_composite(1.0, x, 4, chord)
        } else {
            near
        }
    };
    from_zero(b) - from_zero(a)
}

/// ∫_0^U h(θ) dθ for integrands with h(θ) ≈ c0·θ^{−δ} as θ → 0 and
/// 0 < 1 − δ possibly tiny. The leading term is integrated exactly; the
/// remainder is integrated in x = −ln θ on unit panels until it is
/// negligible.
pub fn singular_endpoint_integral<F: Fn(f64) -> f64>(h: F, c0: f64, delta: f64, upper: f64) -> f64 {
    let eps = 1.0 - delta;
    let lead = c0 * upper.powf(eps) / eps;
    let rem = |x: f64| {
        let t = (-x).exp();
        (h(t) - c0 * t.powf(-delta)) * t
    };
    let x0 = -upper.ln();
    let mut total = 0.0;
    let mut k = 0usize;
    let mut quiet = 0;
    while k < 4000 {
        let a = x0 + k as f64;
        let piece = gl(a, a + 1.0, rem);
        total += piece;
        let scale = lead.abs().max(total.abs()).max(f64::MIN_POSITIVE);
        if piece.abs() < 1e-15 * scale {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
    }
    lead + total
}
