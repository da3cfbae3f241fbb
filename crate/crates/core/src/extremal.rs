//! Witness families: f_{δ,p} = ((1+z)/(1−z))^{δ/p}, the Carleson-square
//! bump φ_δ paired with ω_δ, and the logarithmic spike.
//!
//! Boundary and mixed norms of f_{δ,p} are computed from the closed form, not
//! from truncated Taylor series, because the series are not summable on the
//! circle. δ is carried as ε = 1 − δ so that δ → 1 keeps full precision.

use std::f64::consts::PI;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridCircle, PolarGrid};
use crate::operators::{BoundaryFunction, DiskFunction, HoloFunction};
use crate::quad::{chord_power_integral, gl, graded_rule};
use crate::weights::{omega_delta, Weight};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FDelta {
    pub p: f64,
    /// ε = 1 − δ
    pub eps: f64,
}

impl FDelta {
    pub fn new(delta: f64, p: f64) -> Result<Self> {
        Self::from_eps(1.0 - delta, p)
    }

    pub fn from_eps(eps: f64, p: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 && p > 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("f_δ,p needs 0 < δ < 1 and p > 1 (ε={eps}, p={p})")));
        }
        Ok(Self { p, eps })
    }

    /// ε = min(10⁻³, ½·q^{−q/2}) with q = max(p, p′): inside the δ_q range
    /// for both the family and its dual exponent.
    pub fn near_one(p: f64) -> Result<Self> {
        let q = p.max(p / (p - 1.0));
        Self::from_eps((0.5 * q.powf(-0.5 * q)).min(1e-3), p)
    }

    pub fn delta(&self) -> f64 {
        1.0 - self.eps
    }

    /// a = δ/p
    pub fn a(&self) -> f64 {
        self.delta() / self.p
    }

    /// Taylor coefficients up to z^K as the Cauchy product of the binomial
    /// series of (1+z)^a and (1−z)^{−a}.
    pub fn coeffs(&self, k: usize) -> HoloFunction {
        let a = self.a();
        let mut b = vec![1.0; k + 1];
        let mut c = vec![1.0; k + 1];
        for j in 0..k {
            b[j + 1] = b[j] * (a - j as f64) / (j + 1) as f64;
            c[j + 1] = c[j] * (a + j as f64) / (j + 1) as f64;
        }
        let coeffs = (0..=k)
            .into_par_iter()
            .map(|n| Complex64::new((0..=n).map(|j| b[j] * c[n - j]).sum(), 0.0))
            .collect();
        HoloFunction::new(coeffs)
    }

    /// f at z = 1 − w, for w = 1 − z given directly (keeps precision near z = 1).
    fn at_w(&self, w: Complex64) -> Complex64 {
        ((2.0 * ONE - w) / w).powf(self.a())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.at_w(ONE - z)
    }

    /// 1 − re^{iθ} with r = 1 − t, accurate for tiny t and θ.
    fn w_of(t: f64, theta: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, theta);
        Complex64::new(0.0, -2.0 * (0.5 * theta).sin()) * Complex64::from_polar(1.0, 0.5 * theta) + e * t
    }

    /// (I + R)f + β at z = (1 − t)e^{iθ}; (I + R)f = f·(1 + 2az/(1 − z²)).
    fn lifted(&self, t: f64, theta: f64, beta: f64) -> Complex64 {
        let w = Self::w_of(t, theta);
        let z = ONE - w;
        let f = self.at_w(w);
        f * (ONE + 2.0 * self.a() * z / (w * (2.0 * ONE - w))) + beta
    }

    /// Boundary value at e^{iθ}, θ ∈ (−π, π] \ {0}: |cot(θ/2)|^a e^{±iaπ/2}.
    pub fn boundary(&self, theta: f64) -> Complex64 {
        let c = 1.0 / (0.5 * theta).tan();
        let a = self.a();
        Complex64::from_polar(c.abs().powf(a), 0.5 * a * PI * c.signum())
    }

    /// (1/π)∫_0^π h with h ≈ c0 θ^{ε−1} at 0: leading term exactly, the rest
    /// in v = θ^a on panels graded toward 0, then [π/2, π] graded toward π.
    fn boundary_integral<H: Fn(f64) -> f64 + Sync>(&self, h: H, c0: f64) -> f64 {
        let (a, eps) = (self.a(), self.eps);
        let upper = 0.5 * PI;
        let lead = c0 * upper.powf(eps) / eps;
        let rem: f64 = graded_rule(0.0, upper.powf(a), 0.0, 60)
            .into_par_iter()
            .map(|(v, wt)| {
                let theta = v.powf(1.0 / a);
                if theta < 1e-280 || v == 0.0 {
                    return 0.0;
                }
                wt * (h(theta) - c0 * theta.powf(eps - 1.0)) * theta / (a * v)
            })
            .sum();
        let tail: f64 = graded_rule(upper, PI, PI, 60).into_par_iter().map(|(x, wt)| wt * h(x)).sum();
        (lead + rem + tail) / PI
    }

    /// ‖f + β‖_{H^p} for real β, from the boundary closed form.
    pub fn hardy_norm(&self, beta: f64) -> f64 {
        let p = self.p;
        let c0 = 2f64.powf(self.delta());
        self.boundary_integral(|t| (self.boundary(t) + beta).norm().powf(p), c0).powf(1.0 / p)
    }

    /// ‖f‖_{H^p} = cos(πδ/2)^{−1/p}.
    pub fn hardy_norm_exact(&self) -> f64 {
        (0.5 * PI * self.eps).sin().powf(-1.0 / self.p)
    }

    /// I(θ) = ∫_0^1 |(1 − r²)((I + R)f + β)(re^{iθ})|² 2r dr/(1 − r²).
    pub fn inner_integral(&self, theta: f64, beta: f64) -> f64 {
        let scale = theta.min(PI - theta).max(1e-300);
        let t_min = scale * 2f64.powi(-40);
        let h = |t: f64| {
            let d = self.lifted(t, theta, beta);
            t * (2.0 - t) * 2.0 * (1.0 - t) * d.norm_sqr()
        };
        let mut total = 0.0;
        let mut hi = 1.0;
        while hi > t_min {
            let lo = 0.5 * hi;
            total += gl(lo, hi, h);
            hi = lo;
        }
        total + gl(0.0, hi, h)
    }

    /// ‖f + β‖_{F_0^{p,2}} from the closed form in the disk.
    pub fn triebel_norm(&self, beta: f64) -> f64 {
        let (a, p) = (self.a(), self.p);
        let c0 = (2.0 * a * 4f64.powf(a)).powf(0.5 * p);
        let h = |theta: f64| {
            if theta < 1e-14 {
                // relative corrections are O(θ^{2a}); the neglected piece is
                // O(c0·10^{−14(ε+2a)}), tiny next to the c0/ε lead
                return c0 * theta.powf(self.eps - 1.0);
            }
            self.inner_integral(theta, beta).powf(0.5 * p)
        };
        self.boundary_integral(h, c0).powf(1.0 / p)
    }

    /// (u, v) = (Re f, Im f) on the grid; node 0 is sampled at half a cell.
    pub fn u_v_boundary(&self, grid: GridCircle) -> (BoundaryFunction, BoundaryFunction) {
        let half = 0.5 * 2.0 * PI / grid.n() as f64;
        let vals: Vec<Complex64> = (0..grid.n())
            .map(|j| {
                let t = grid.signed_theta(j);
                let t = if j == 0 { half } else { t };
                self.eval(Complex64::from_polar(1.0, t))
            })
            .collect();
        let u: Vec<f64> = vals.iter().map(|z| z.re).collect();
        let v: Vec<f64> = vals.iter().map(|z| z.im).collect();
        (
            BoundaryFunction::from_real(grid, &u).expect("grid-sized"),
            BoundaryFunction::from_real(grid, &v).expect("grid-sized"),
        )
    }

    pub fn u_norm(&self) -> f64 {
        (0.5 * PI * self.a()).cos() * self.hardy_norm_exact()
    }

    pub fn v_norm(&self) -> f64 {
        (0.5 * PI * self.a()).sin() * self.hardy_norm_exact()
    }

    /// ‖𝒞(u)‖/‖u‖ with 2𝒞(u) = f + 1.
    pub fn cauchy_u_ratio(&self) -> f64 {
        0.5 * self.hardy_norm(1.0) / self.u_norm()
    }

    /// ‖𝒞(v)‖/‖v‖ with 2i𝒞(v) = f − 1.
    pub fn cauchy_v_ratio(&self) -> f64 {
        0.5 * self.hardy_norm(-1.0) / self.v_norm()
    }

    /// ‖𝒞(v)‖_{F_0^{p,2}}/‖v‖_{L^p}.
    pub fn cauchy_v_triebel_ratio(&self) -> f64 {
        0.5 * self.triebel_norm(-1.0) / self.v_norm()
    }

    /// ψ = f − cos(πa)·f̄ has |ψ| = sin(πa)|f| and 𝒞ψ = f − cos(πa), so
    /// ‖𝒞ψ‖/‖ψ‖ → 1/sin(π/p) as δ → 1.
    pub fn riesz_ratio(&self) -> f64 {
        let a = self.a();
        self.hardy_norm(-(PI * a).cos()) / ((PI * a).sin() * self.hardy_norm_exact())
    }
}

/// Taylor coefficients of f_{δ,p} (see [`FDelta::coeffs`]).
pub fn f_delta_p(delta: f64, p: f64, k: usize) -> Result<HoloFunction> {
    Ok(FDelta::new(delta, p)?.coeffs(k))
}

/// Independent coefficient oracle: f = exp(2a Σ_{j odd} z^j/j), so
/// k f_k = 2a Σ_{j odd ≤ k} f_{k−j}.
pub fn f_delta_p_exp_recurrence(delta: f64, p: f64, k: usize) -> Vec<f64> {
    let a = delta / p;
    let mut f = vec![0.0; k + 1];
    f[0] = 1.0;
    for n in 1..=k {
        let s: f64 = (1..=n).step_by(2).map(|j| f[n - j]).sum();
        f[n] = 2.0 * a * s / n as f64;
    }
    f
}

/// Square S_{ρ,e^{iη}} = {1 − r < ρ, |1 − e^{i(θ−η)}| < ρ}: angular half-width.
pub fn square_half_width(rho: f64) -> f64 {
    2.0 * (0.5 * rho).asin()
}

/// Cell averages of |2 sin(θ/2)|^s restricted to |θ − η| < w (θ, η signed).
fn restricted_cell_averages(grid: GridCircle, s: f64, eta: f64, w: f64) -> Vec<f64> {
    let h = 2.0 * PI / grid.n() as f64;
    (0..grid.n())
        .map(|j| {
            let (lo, hi) = grid.cell(j);
            // shift the cell next to η, then clip
            let shift = ((0.5 * (lo + hi) - eta) / (2.0 * PI)).round() * 2.0 * PI;
            let (lo, hi) = ((lo - shift).max(eta - w), (hi - shift).min(eta + w));
            if hi <= lo {
                return 0.0;
            }
            let wrap = |x: f64| x - (x / (2.0 * PI)).round() * 2.0 * PI;
            let (a, b) = (wrap(lo), wrap(lo) + (hi - lo));
            let integral = if b > PI {
                chord_power_integral(s, a, PI) + chord_power_integral(s, -PI, b - 2.0 * PI)
            } else {
                chord_power_integral(s, a, b)
            };
            integral / h
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PhiDelta {
    pub p: f64,
    pub delta: f64,
    pub rho: f64,
    pub phi: DiskFunction,
    pub weight: Weight,
}

/// φ_δ(re^{iθ}) = |1 − e^{iθ}|^{δ−1}(1 − r)𝒳_{S_{ρ,1}}, sampled as exact
/// angular cell averages, together with ω_δ.
pub fn phi_delta(p: f64, delta: f64, rho: f64, grid: &Shared<PolarGrid>) -> Result<PhiDelta> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain(format!("ρ = {rho} outside (0, 1/2)")));
    }
    let weight = omega_delta(grid.circle, p, delta)?;
    let ang = restricted_cell_averages(grid.circle, delta - 1.0, 0.0, square_half_width(rho));
    let n = grid.circle.n();
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.levels() * n];
    for i in 0..grid.levels() {
        let t = grid.t[i];
        if t < rho {
            for j in 0..n {
                samples[i * n + j] = Complex64::new(t * ang[j], 0.0);
            }
        }
    }
    Ok(PhiDelta { p, delta, rho, phi: DiskFunction { grid: grid.clone(), samples }, weight })
}

/// (1 − |z|²)𝒳_{S_{ρ,−1}} with exact angular cell averages of the indicator.
pub fn test_indicator(rho: f64, grid: &Shared<PolarGrid>) -> DiskFunction {
    let ang = restricted_cell_averages(grid.circle, 0.0, PI, square_half_width(rho));
    let samples = (0..grid.levels())
        .flat_map(|i| {
            let t = grid.t[i];
            let s = if t < rho { t * (2.0 - t) } else { 0.0 };
            ang.iter().map(move |a| Complex64::new(s * a, 0.0))
        })
        .collect();
    DiskFunction { grid: grid.clone(), samples }
}

/// Closed-form norms of the φ_δ construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiDeltaNorms {
    /// ‖φ_δ‖_{L¹(dν)}
    pub l1: f64,
    /// ‖φ_δ‖_{L^{p,2}(ω_δ)}
    pub mixed: f64,
    /// ‖(1 − |z|²)𝒳_{S_{ρ,−1}}‖_{L^{p,2}(ω_δ)}
    pub test_mixed: f64,
}

/// In |φ_δ|^p ω_δ the angular exponents combine to δ − 1 for every p, so all
/// three norms are products of one angular and one radial integral.
pub fn phi_delta_norms(p: f64, delta: f64, rho: f64) -> PhiDeltaNorms {
    let w = square_half_width(rho);
    let ang = chord_power_integral(delta - 1.0, -w, w) / (2.0 * PI);
    let r0 = 1.0 - rho;
    // ∫_{1−ρ}^1 2r(1−r) dr and ∫ 2r(1−r)/(1+r) dr
    let rad_l1 = (1.0 - 2.0 / 3.0) - (r0 * r0 - 2.0 * r0.powi(3) / 3.0);
    let prim = |r: f64| -r * r + 4.0 * r - 4.0 * (1.0 + r).ln();
    let rad_mixed = prim(1.0) - prim(r0);
    let s_test = (p - 1.0) * (1.0 - delta);
    let ang_test = (chord_power_integral(s_test, PI - w, PI) + chord_power_integral(s_test, -PI, -PI + w)) / (2.0 * PI);
    let rad_test = 0.5 * (1.0 - r0 * r0).powi(2);
    PhiDeltaNorms {
        l1: ang * rad_l1,
        mixed: ang.powf(1.0 / p) * rad_mixed.sqrt(),
        test_mixed: ang_test.powf(1.0 / p) * rad_test.sqrt(),
    }
}

/// φ(w) = 1 / log(2/(1 − |w|²)).
pub fn log_spike(grid: &Shared<PolarGrid>) -> DiskFunction {
    DiskFunction::from_fn(grid, |_, t, _| Complex64::new(1.0 / (2.0 / (t * (2.0 - t))).ln(), 0.0))
}

/// ∫_𝔻 |φ(w)| / |1 − z w̄|² dν(w) for a radial φ, with the radial profile
/// integrated on graded panels and the angular part in closed form:
/// (1/2π)∫ |1 − ρe^{iθ}|^{−2} dθ = 1/(1 − ρ²), ρ = |z|r.
pub fn abs_bergman_radial<F: Fn(f64) -> f64 + Sync>(profile: F, z_abs: f64) -> f64 {
    // profile(t), t = 1 − r; peak of the kernel at t ≈ 1 − |z|
    // and profiles may be singular at t = 0, so grade toward both
    let pivot = (1.0 - z_abs).clamp(0.0, 1.0);
    let mut rule = graded_rule(0.0, 0.5 * pivot, 0.0, 60);
    rule.extend(graded_rule(0.5 * pivot, 1.0, pivot, 60));
    rule.into_par_iter()
        .map(|(t, wt)| {
            let r = 1.0 - t;
            let rho = z_abs * r;
            wt * profile(t).abs() * 2.0 * r / ((1.0 - rho) * (1.0 + rho))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_match_exp_recurrence_and_are_positive() {
        for &(d, p) in &[(0.9, 2.0), (0.5, 1.25), (0.999, 8.0)] {
            let f = f_delta_p(d, p, 400).unwrap();
            let g = f_delta_p_exp_recurrence(d, p, 400);
            for (k, (x, y)) in f.coeffs.iter().zip(&g).enumerate() {
                assert!(x.re > 0.0 && x.im == 0.0);
                assert!((x.re - y).abs() <= 1e-12 * y.abs(), "k={k}: {} vs {y}", x.re);
            }
            assert_eq!(f.coeffs[0].re, 1.0);
            assert!((f.coeffs[1].re - 2.0 * d / p).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficients_match_finite_differences() {
        // Cauchy integral on a small circle as a high-order difference scheme
        let fd = FDelta::new(0.7, 3.0).unwrap();
        let c = fd.coeffs(6);
        let m = 64;
        let r = 0.25;
        for k in 0..=6 {
            let s: Complex64 = (0..m)
                .map(|j| {
                    let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
                    fd.eval(z) * z.powi(-(k as i32))
                })
                .sum::<Complex64>()
                / m as f64;
            assert!((s.re - c.coeffs[k].re).abs() < 1e-8 * c.coeffs[k].re, "k={k}");
        }
        let small = FDelta::new(1e-9, 2.0).unwrap().coeffs(5);
        assert!(small.coeffs[1..].iter().all(|a| a.norm() < 1e-9));
    }

    #[test]
    fn boundary_tangent_identity() {
        let g = GridCircle::new(1024).unwrap();
        for &(d, p) in &[(0.9, 2.0), (0.95, 4.0), (0.6, 1.5)] {
            let fd = FDelta::new(d, p).unwrap();
            let (u, v) = fd.u_v_boundary(g);
            let tan = (0.5 * PI * fd.a()).tan();
            for j in 1..1024 {
                let (uu, vv) = (u.samples()[j].re, v.samples()[j].re);
                assert!((vv.abs() - tan * uu).abs() <= 1e-8 * (1.0 + uu.abs()), "j={j}");
            }
            // closed form of the boundary agrees with the complex power
            for j in [1usize, 100, 511, 900] {
                let t = g.signed_theta(j);
                assert!((fd.boundary(t) - fd.eval(Complex64::from_polar(1.0, t))).norm() < 1e-12);
            }
        }
        let fd = FDelta::new(0.9, 2.0).unwrap();
        assert!(fd.boundary(PI).norm() < 1e-7);
    }

    #[test]
    fn abel_means_match_closed_boundary() {
        let fd = FDelta::new(0.8, 2.0).unwrap();
        let f = fd.coeffs(1 << 15);
        let r = 1.0 - 2f64.powi(-11);
        for theta in [0.3, 1.0, 2.0, 2.5, -1.2] {
            let abel = f.eval(Complex64::from_polar(r, theta));
            let exact = fd.boundary(theta);
            assert!((abel - exact).norm() < 0.01 * exact.norm(), "θ={theta}");
        }
    }

    #[test]
    fn hardy_quadrature_matches_closed_form() {
        for &(eps, p) in &[(0.3, 2.0), (0.05, 4.0), (1e-4, 8.0), (1e-6, 1.1)] {
            let fd = FDelta::from_eps(eps, p).unwrap();
            let q = fd.hardy_norm(0.0);
            let e = fd.hardy_norm_exact();
            assert!((q - e).abs() < 1e-9 * e, "ε={eps} p={p}: {q} vs {e}");
        }
    }

    #[test]
    fn p2_norms_match_coefficient_sums() {
        // ‖f‖²_{H²} = Σ f_k², ‖f‖²_{F^{2,2}} = Σ f_k² (k+1)/(k+2), with a
        // power-law tail f_k ≈ C k^{a−1}
        let fd = FDelta::new(0.5, 2.0).unwrap();
        let a = fd.a();
        let k = 20_000;
        let f = f_delta_p_exp_recurrence(0.5, 2.0, k);
        let c = f[k] * (k as f64).powf(1.0 - a);
        let tail = c * c * (k as f64).powf(2.0 * a - 1.0) / (1.0 - 2.0 * a);
        let h2: f64 = f.iter().map(|x| x * x).sum::<f64>() + tail;
        let f2: f64 = f.iter().enumerate().map(|(i, x)| x * x * (i as f64 + 1.0) / (i as f64 + 2.0)).sum::<f64>() + tail;
        assert!((fd.hardy_norm_exact().powi(2) - h2).abs() < 1e-4 * h2);
        let t = fd.triebel_norm(0.0).powi(2);
        assert!((t - f2).abs() < 1e-4 * f2, "{t} vs {f2}");
        // constant shift: (I+R)(f+β) adds β, coefficient 0 changes
        let t1 = fd.triebel_norm(1.0).powi(2);
        let want = f2 + (4.0 - 1.0) * 0.5;
        assert!((t1 - want).abs() < 1e-4 * want, "{t1} vs {want}");
    }

    #[test]
    fn triebel_leading_constant() {
        let fd = FDelta::from_eps(0.01, 3.0).unwrap();
        let a = fd.a();
        let c0 = 2.0 * a * 4f64.powf(a);
        for theta in [1e-4, 1e-6, 1e-9] {
            let ratio = fd.inner_integral(theta, 0.0) * theta.powf(2.0 * a) / c0;
            // I(θ) = c0 θ^{−2a} + O(1)
            assert!((ratio - 1.0).abs() < 10.0 * theta.powf(2.0 * a), "θ={theta}: {ratio}");
        }
    }

    #[test]
    fn phi_delta_closed_forms_match_grid() {
        let pg = Shared::new(PolarGrid::new(14, 4096).unwrap());
        for &(p, d) in &[(2.0, 0.4), (2.0, 0.1), (3.0, 0.2)] {
            let pd = phi_delta(p, d, 0.25, &pg).unwrap();
            let exact = phi_delta_norms(p, d, 0.25);
            let l1: f64 = (0..pg.levels())
                .map(|i| pg.w_area[i] * pd.phi.row(i).iter().map(|v| v.norm()).sum::<f64>())
                .sum::<f64>()
                / 4096.0;
            assert!((l1 - exact.l1).abs() < 1e-9 * exact.l1, "{l1} vs {}", exact.l1);
            let ind = test_indicator(0.25, &pg);
            let tm = crate::norms::mixed_norm(&ind, crate::norms::NormSpec::weighted(p, &pd.weight)).unwrap();
            assert!((tm.value - exact.test_mixed).abs() < 1e-3 * exact.test_mixed);
        }
        assert!(phi_delta(2.0, 0.5, 0.6, &pg).is_err());
    }

    #[test]
    fn log_spike_basics() {
        let pg = Shared::new(PolarGrid::new(14, 16).unwrap());
        let s = log_spike(&pg);
        // r = 0 is not a grid radius; evaluate the profile there directly
        let at0 = DiskFunction::from_fn(&pg, |_, _, _| Complex64::new(1.0 / (2.0f64 / 1.0).ln(), 0.0));
        assert!((at0.samples[0].re - 1.0 / 2f64.ln()).abs() < 1e-15);
        let m = crate::norms::mixed_norm(&s, crate::norms::NormSpec::unweighted(2.0)).unwrap();
        assert!(!m.divergent && m.value.is_finite());
        // radial |ℬ| at z = 0 is ∫ φ dν
        let direct = abs_bergman_radial(|t| 1.0 / (2.0 / (t * (2.0 - t))).ln(), 0.0);
        let area: f64 = (0..pg.levels()).map(|i| pg.w_area[i] * s.row(i)[0].re).sum();
        let oracle = quadrature::integrate(|t| 2.0 * (1.0 - t) / (2.0 / (t * (2.0 - t))).ln(), 0.0, 1.0, 1e-13).integral;
        assert!((direct - oracle).abs() < 1e-9, "{direct} vs {oracle}");
        // the polar grid closes with one panel on (0, 2^{-14}], where the
        // profile is only logarithmically small
        assert!((area - oracle).abs() < 1e-4 * oracle, "{area} vs {oracle}");
    }
}
