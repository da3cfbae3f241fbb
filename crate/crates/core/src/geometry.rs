use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const UNIT_TOL: f64 = 1e-12;

/// Uniform grid of `n` nodes θ_j = 2πj/n on the circle, each carrying mass 1/n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCircle {
    n: usize,
}

impl GridCircle {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("grid size {n} is not a power of two ≥ 2")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_measure(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n as f64
    }

    /// θ_j mapped into (−π, π].
    pub fn signed_theta(&self, j: usize) -> f64 {
        let t = self.theta(j % self.n);
        if t > PI {
            t - 2.0 * PI
        } else {
            t
        }
    }

    pub fn node(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(j))
    }

    /// Cell of node j as an angular interval [θ_j − π/n, θ_j + π/n] in (−π, π] coordinates.
    pub fn cell(&self, j: usize) -> (f64, f64) {
        let c = self.signed_theta(j);
        let h = PI / self.n as f64;
        (c - h, c + h)
    }

    /// Nodes η with ρ(ζ, η) < r, as a contiguous (cyclic) node arc.
    pub fn ball_nodes(&self, center: Complex64, r: f64) -> NodeArc {
        let n = self.n;
        if r > 2.0 {
            return NodeArc::full(n);
        }
        let phi = center.arg();
        // nearest node, then walk outwards while strictly inside
        let j0 = ((phi / (2.0 * PI) * n as f64).round() as i64).rem_euclid(n as i64) as usize;
        let inside = |j: usize| rho_unchecked(center, self.node(j)) < r;
        if !inside(j0) {
            // r is below the distance to the nearest node; the ball may still contain the
            // neighbour on the other side if the center sits between nodes
            for cand in [(j0 + 1) % n, (j0 + n - 1) % n] {
                if inside(cand) {
                    return NodeArc { start: cand, len: 1, n };
                }
            }
            return NodeArc { start: j0, len: 0, n };
        }
        let mut left = 0usize;
        while left + 1 < n && inside((j0 + n - left - 1) % n) {
            left += 1;
        }
        let mut right = 0usize;
        while left + right + 1 < n && inside((j0 + right + 1) % n) {
            right += 1;
        }
        NodeArc { start: (j0 + n - left) % n, len: left + right + 1, n }
    }
}

/// A cyclic run of consecutive grid nodes `start, start+1, …` of length `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeArc {
    pub start: usize,
    pub len: usize,
    pub n: usize,
}

impl NodeArc {
    pub fn full(n: usize) -> Self {
        Self { start: 0, len: n, n }
    }

    pub fn is_full(&self) -> bool {
        self.len >= self.n
    }

    pub fn measure(&self) -> f64 {
        self.len as f64 / self.n as f64
    }

    pub fn contains(&self, j: usize) -> bool {
        (j + self.n - self.start) % self.n < self.len
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i) % self.n)
    }

    /// Arc with the same midpoint and `factor` times the length, clamped to the circle.
    pub fn dilate(&self, factor: f64) -> NodeArc {
        let new_len = (self.len as f64 * factor).round() as usize;
        if new_len >= self.n {
            return NodeArc::full(self.n);
        }
        let extra = new_len.saturating_sub(self.len);
        let start = (self.start + self.n - extra / 2 % self.n) % self.n;
        NodeArc { start, len: new_len.max(self.len), n: self.n }
    }
}

fn rho_unchecked(z: Complex64, w: Complex64) -> f64 {
    (Complex64::new(1.0, 0.0) - z * w.conj()).norm()
}

/// The nonisotropic quasi-metric |1 − ζη̄| on the circle.
pub fn rho(zeta: Complex64, eta: Complex64) -> Result<f64> {
    for (name, v) in [("ζ", zeta), ("η", eta)] {
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("{name} = {v} is not unimodular")));
        }
    }
    Ok(rho_unchecked(zeta, eta))
}

/// Ball {η : |1 − ζη̄| < r}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: Complex64,
    pub radius: f64,
}

impl Arc {
    /// Angular half-width 2·arcsin(min(r,2)/2).
    pub fn half_width(&self) -> f64 {
        2.0 * (self.radius.min(2.0) / 2.0).asin()
    }

    pub fn is_full(&self) -> bool {
        self.radius > 2.0
    }

    /// Normalized arc length.
    pub fn measure(&self) -> f64 {
        if self.is_full() {
            1.0
        } else {
            self.half_width() / PI
        }
    }

    pub fn contains(&self, eta: Complex64) -> bool {
        rho_unchecked(self.center, eta) < self.radius
    }

    pub fn grid_nodes(&self, grid: &GridCircle) -> NodeArc {
        grid.ball_nodes(self.center, self.radius)
    }
}

pub fn arc_ball(zeta: Complex64, r: f64) -> Result<Arc> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("ball radius {r} must be positive")));
    }
    if (zeta.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("center {zeta} is not unimodular")));
    }
    Ok(Arc { center: zeta, radius: r })
}

/// Radial discretization graded toward r = 1 together with an angular grid.
///
/// Panels: r ∈ [0, 1/2], then 1 − r ∈ [2^{−l−1}, 2^{−l}] for l = 1..depth−1,
/// and a last panel 1 − r ∈ (0, 2^{−depth}]. Each panel carries the
/// 20-point Gauss–Legendre rule, so the area weights integrate polynomials
/// in r of degree ≤ 39 exactly over [0, 1].
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub circle: GridCircle,
    pub depth: usize,
    /// radial nodes, increasing
    pub r: Vec<f64>,
    /// 1 − r, kept separately for precision near the boundary
    pub t: Vec<f64>,
    /// plain dr weights
    pub w_dr: Vec<f64>,
    /// weights for 2r dr
    pub w_area: Vec<f64>,
    /// weights for 2r dr / (1 − r²)
    pub w_lp: Vec<f64>,
}

impl PolarGrid {
    pub fn new(depth: usize, n: usize) -> Result<Self> {
        if depth < 4 {
            return Err(Error::Domain(format!("depth {depth} < 4")));
        }
        let circle = GridCircle::new(n)?;
        // panels in t = 1 − r, from the interior outwards
        let mut panels = vec![(0.5, 1.0)];
        for l in 1..depth {
            panels.push((0.5f64.powi(l as i32 + 1), 0.5f64.powi(l as i32)));
        }
        panels.push((0.0, 0.5f64.powi(depth as i32)));
        let mut nodes: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in panels {
            nodes.extend(quad::panel(lo, hi));
        }
        nodes.sort_by(|a, b| b.0.total_cmp(&a.0)); // decreasing t = increasing r
        let t: Vec<f64> = nodes.iter().map(|x| x.0).collect();
        let w_dr: Vec<f64> = nodes.iter().map(|x| x.1).collect();
        let r: Vec<f64> = t.iter().map(|t| 1.0 - t).collect();
        let w_area: Vec<f64> = r.iter().zip(&w_dr).map(|(r, w)| 2.0 * r * w).collect();
        let w_lp: Vec<f64> = r
            .iter()
            .zip(&t)
            .zip(&w_dr)
            .map(|((r, t), w)| 2.0 * r * w / (t * (2.0 - t)))
            .collect();
        Ok(Self { circle, depth, r, t, w_dr, w_area, w_lp })
    }

    pub fn levels(&self) -> usize {
        self.r.len()
    }

    /// Reported truncation parameter: width of the finest graded panel.
    pub fn eps_r(&self) -> f64 {
        0.5f64.powi(self.depth as i32)
    }

    /// 1 − r_i², computed without cancellation.
    pub fn one_minus_r2(&self, i: usize) -> f64 {
        self.t[i] * (2.0 - self.t[i])
    }

    /// Index range of radial nodes belonging to dyadic level l (1 − r ∈ [2^{−l−1}, 2^{−l}]);
    /// l = 0 is the interior panel and l = depth the closing panel.
    pub fn level_range(&self, l: usize) -> std::ops::Range<usize> {
        let k = quad::PANEL_ORDER;
        l * k..(l + 1) * k
    }
}

/// Nonisotropic Carleson square S_a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub apex: Complex64,
}

impl CarlesonSquare {
    pub fn new(apex: Complex64) -> Result<Self> {
        let m = apex.norm();
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Domain(format!("apex {apex} must lie in the punctured disk")));
        }
        Ok(Self { apex })
    }

    pub fn contains(&self, w: Complex64) -> bool {
        let s = w.norm();
        if s >= 1.0 || s == 0.0 {
            return false;
        }
        let side = 1.0 - self.apex.norm();
        let dir = self.apex / self.apex.norm();
        1.0 - s <= side && rho_unchecked(w / s, dir) <= side
    }
}

/// Quasi-metric on the punctured closed disk: max{||z| − |w||, |1 − z*·conj(w*)|}.
pub fn disk_metric(z: Complex64, w: Complex64) -> Result<f64> {
    let (a, b) = (z.norm(), w.norm());
    if a == 0.0 || b == 0.0 || a > 1.0 + UNIT_TOL || b > 1.0 + UNIT_TOL {
        return Err(Error::Domain("points must lie in the closed disk minus the origin".into()));
    }
    Ok((a - b).abs().max(rho_unchecked(z / a, w / b)))
}
