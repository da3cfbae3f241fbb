//! Weighted norm functionals on the circle and the disk.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridCircle, PolarGrid};
use crate::operators::{deriv_compose, BoundaryFunction, DiskFunction, HoloFunction};
use crate::weights::Weight;

/// Relative ℓ² tail below which a Taylor series is summed directly at r = 1.
pub const TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct NormSpec<'a> {
    pub p: f64,
    pub weight: Option<&'a Weight>,
}

impl<'a> NormSpec<'a> {
    pub fn unweighted(p: f64) -> Self {
        Self { p, weight: None }
    }

    pub fn weighted(p: f64, w: &'a Weight) -> Self {
        Self { p, weight: Some(w) }
    }

    fn check(&self, grid: GridCircle) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::Domain(format!("exponent p = {} must be finite and positive", self.p)));
        }
        match self.weight {
            Some(w) if w.grid() != grid => Err(Error::GridMismatch(format!(
                "weight on N = {} but function on N = {}",
                w.grid().n(),
                grid.n()
            ))),
            _ => Ok(()),
        }
    }

    /// (Σ_j |v_j|^p ω_j / N)^{1/p}
    fn reduce(&self, values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let p = self.p;
        let s: f64 = match self.weight {
            Some(w) => values.iter().zip(w.samples()).map(|(v, w)| v.abs().powf(p) * w).sum(),
            None => values.iter().map(|v| v.abs().powf(p)).sum(),
        };
        (s / n).powf(1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    /// set when the value is a truncation-dependent stand-in for a divergent
    /// quantity, or when a series had to be Abel-summed
    pub flagged: bool,
}

pub fn lp_norm(psi: &BoundaryFunction, spec: NormSpec) -> Result<f64> {
    spec.check(psi.grid())?;
    Ok(spec.reduce(&psi.abs()))
}

pub fn lp_norm_values(values: &[f64], grid: GridCircle, spec: NormSpec) -> Result<f64> {
    if values.len() != grid.n() {
        return Err(Error::GridMismatch("sample count differs from the grid".into()));
    }
    spec.check(grid)?;
    Ok(spec.reduce(values))
}

/// ⟨φ, ψ⟩_𝕊 = ∫ φ ψ̄ dσ.
pub fn pairing_circle(phi: &BoundaryFunction, psi: &BoundaryFunction) -> Result<Complex64> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch("pairing of functions on different grids".into()));
    }
    let n = phi.grid().n() as f64;
    Ok(phi.samples().iter().zip(psi.samples()).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n)
}

/// Boundary values of a Taylor series: direct summation when the tail is
/// negligible, otherwise Abel means at r = 1 − max(2^{-14}, 8/K) (flagged).
pub fn boundary_values(f: &HoloFunction, grid: GridCircle) -> (BoundaryFunction, bool) {
    let mass: f64 = f.coeffs.iter().map(|a| a.norm_sqr()).sum();
    if f.tail_mass() <= TAIL_TOL * mass.max(f64::MIN_POSITIVE) {
        (f.boundary(grid), false)
    } else {
        let eps = (8.0 / f.coeffs.len().max(1) as f64).max(2f64.powi(-14));
        let s = f.on_circle(grid, 1.0 - eps);
        (BoundaryFunction::new(grid, s).expect("grid-sized samples"), true)
    }
}

pub fn hp_norm(f: &HoloFunction, grid: GridCircle, spec: NormSpec) -> Result<NormValue> {
    let (b, flagged) = boundary_values(f, grid);
    Ok(NormValue { value: lp_norm(&b, spec)?, flagged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNorm {
    pub value: f64,
    pub divergent: bool,
    /// Σ_θ-averaged inner-integral contribution of each radial level
    pub level_contributions: Vec<f64>,
}

/// Inner integral I(θ_j) = ∫_0^1 |φ(rζ_j)|² 2r dr/(1−r²) on the polar grid.
pub fn inner_square_integral(phi: &DiskFunction) -> Vec<f64> {
    let g = &phi.grid;
    let n = g.circle.n();
    (0..g.levels())
        .into_par_iter()
        .fold(
            || vec![0.0; n],
            |mut acc, i| {
                let w = g.w_lp[i];
                acc.iter_mut().zip(phi.row(i)).for_each(|(a, v)| *a += w * v.norm_sqr());
                acc
            },
        )
        .reduce(
            || vec![0.0; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn level_contributions(phi: &DiskFunction) -> Vec<f64> {
    let g: &PolarGrid = &phi.grid;
    let n = g.circle.n() as f64;
    (0..g.depth + 1)
        .map(|l| {
            g.level_range(l)
                .map(|i| g.w_lp[i] * phi.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>() / n)
                .sum()
        })
        .collect()
}

/// ‖φ‖_{L^{p,2}(ω)}. Divergence is flagged when the finest graded radial
/// level still carries more than half the contribution of the middle level
/// (the closing panel holds the whole remaining tail, so it is not compared).
pub fn mixed_norm(phi: &DiskFunction, spec: NormSpec) -> Result<MixedNorm> {
    spec.check(phi.grid.circle)?;
    let inner = inner_square_integral(phi);
    let root: Vec<f64> = inner.iter().map(|v| v.sqrt()).collect();
    let contrib = level_contributions(phi);
    let depth = phi.grid.depth;
    let last = contrib[depth - 1];
    let mid = contrib[depth / 2];
    Ok(MixedNorm { value: spec.reduce(&root), divergent: last > 0.5 * mid && last > 0.0, level_contributions: contrib })
}

/// (1 − r²)(I + R)f on the polar grid.
pub fn triebel_density(f: &HoloFunction, grid: &std::sync::Arc<PolarGrid>) -> DiskFunction {
    deriv_compose(f).on_polar_with(grid, |_, s, v| v * s)
}

pub fn triebel_norm(f: &HoloFunction, grid: &std::sync::Arc<PolarGrid>, spec: NormSpec) -> Result<MixedNorm> {
    mixed_norm(&triebel_density(f, grid), spec)
}

/// ⟨φ, χ⟩_𝔹 = ∫ φ χ̄ dν/(1 − |z|²).
pub fn pairing_disk(phi: &DiskFunction, chi: &DiskFunction) -> Result<Complex64> {
    if !std::sync::Arc::ptr_eq(&phi.grid, &chi.grid)
        && (phi.grid.circle != chi.grid.circle || phi.grid.r != chi.grid.r)
    {
        return Err(Error::GridMismatch("disk functions on different polar grids".into()));
    }
    let g = &phi.grid;
    let n = g.circle.n() as f64;
    Ok((0..g.levels())
        .map(|i| {
            let s: Complex64 = phi.row(i).iter().zip(chi.row(i)).map(|(a, b)| a * b.conj()).sum();
            s * g.w_lp[i]
        })
        .sum::<Complex64>()
        / n)
}
