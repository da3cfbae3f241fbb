use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::{sweep_max_ratio, CyclicPrefix};
use crate::error::{Error, Result};
use crate::geometry::{GridCircle, NodeArc};
use crate::quad;

/// Closed-form tag: ω(e^{iθ}) = |1 − e^{iθ}|^s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    pub exponent: f64,
}

impl PowerWeight {
    /// Exact average of |1 − e^{iθ}|^s over the cell of node j.
    pub fn cell_average(&self, grid: &GridCircle, j: usize) -> f64 {
        let (a, b) = grid.cell(j);
        let (a, b) = if b > PI { (a - 2.0 * PI, b - 2.0 * PI) } else { (a, b) };
        quad::chord_power_integral(self.exponent, a, b) / (b - a)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (2.0 * (0.5 * theta).sin()).abs().powf(self.exponent)
    }
}

/// Positive boundary samples on a uniform grid.
///
/// Samples of tagged power weights are exact cell averages, so arc integrals
/// over whole cells are exact integrals of the closed form.
#[derive(Debug, Clone)]
pub struct Weight {
    grid: GridCircle,
    samples: Vec<f64>,
    tag: Option<PowerWeight>,
    prefix: CyclicPrefix,
}

impl Weight {
    pub fn new(grid: GridCircle, samples: Vec<f64>) -> Result<Self> {
        Self::build(grid, samples, None)
    }

    fn build(grid: GridCircle, samples: Vec<f64>, tag: Option<PowerWeight>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.n()
            )));
        }
        if let Some((j, v)) = samples.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("weight sample {j} = {v} is not positive and finite")));
        }
        let prefix = CyclicPrefix::new(&samples);
        Ok(Self { grid, samples, tag, prefix })
    }

    pub fn constant(grid: GridCircle, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.n()])
    }

    pub fn power(grid: GridCircle, exponent: f64) -> Result<Self> {
        if exponent <= -1.0 {
            return Err(Error::Domain(format!("|1 − e^{{iθ}}|^{exponent} is not integrable")));
        }
        let tag = PowerWeight { exponent };
        let samples = (0..grid.n()).into_par_iter().map(|j| tag.cell_average(&grid, j)).collect();
        Self::build(grid, samples, Some(tag))
    }

    pub fn grid(&self) -> GridCircle {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn tag(&self) -> Option<PowerWeight> {
        self.tag
    }

    pub fn prefix(&self) -> &CyclicPrefix {
        &self.prefix
    }

    /// ω(B) = ∫_B ω dσ for a node arc.
    pub fn mass(&self, arc: &NodeArc) -> f64 {
        self.prefix.arc_sum(arc) / self.grid.n() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.prefix.total() / self.grid.n() as f64
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let samples = self.samples.iter().map(|v| v * c).collect();
        Self::build(self.grid, samples, None)
    }

    pub fn rotated(&self, shift: usize) -> Result<Self> {
        let n = self.grid.n();
        let samples = (0..n).map(|j| self.samples[(j + n - shift % n) % n]).collect();
        Self::build(self.grid, samples, None)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).flexible(true).from_writer(w);
        if let Some(t) = self.tag {
            out.write_record([format!("power s={}", t.exponent)])?;
        } else {
            out.write_record(["theta", "omega"])?;
        }
        for (j, v) in self.samples.iter().enumerate() {
            out.write_record([format!("{:.17e}", self.grid.theta(j)), format!("{v:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the format written by [`Weight::write_csv`]. A `power s=…` header
    /// rebuilds the closed form on a grid sized by the number of data rows.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(r);
        let mut rows = rdr.records();
        let head = rows
            .next()
            .ok_or_else(|| Error::Parse("empty weight file".into()))??;
        let tag = head.get(0).and_then(|h| h.trim().strip_prefix("power s=")).map(str::to_owned);
        let mut samples = Vec::new();
        for rec in rows {
            let rec = rec?;
            let v = rec
                .get(1)
                .ok_or_else(|| Error::Parse("weight row needs two columns".into()))?;
            samples.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad weight value {v:?}: {e}")))?,
            );
        }
        let grid = GridCircle::new(samples.len())?;
        match tag {
            Some(s) => {
                let s: f64 = s.parse().map_err(|e| Error::Parse(format!("bad exponent {s:?}: {e}")))?;
                Self::power(grid, s)
            }
            None => Self::new(grid, samples),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApReport {
    pub p: f64,
    pub value: f64,
    pub argmax: NodeArc,
    pub grid_n: usize,
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// [ω]_{A_p} = sup_B ⟨ω⟩_B ⟨ω′⟩_B^{p−1} over all node arcs.
pub fn ap_constant(w: &Weight, p: f64) -> Result<ApReport> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("A_p needs p > 1, got {p}")));
    }
    let dual = dual_weight(w, p)?;
    let n = w.grid.n();
    let (pw, pd) = (&w.prefix, &dual.prefix);
    let eval = |start: usize, len: usize| {
        let l = len as f64;
        (pw.sum(start, len) / l) * (pd.sum(start, len) / l).powf(p - 1.0)
    };
    let full = eval(0, n);
    let (value, argmax) = (1..n)
        .into_par_iter()
        .map(|len| {
            let mut best = (f64::NEG_INFINITY, NodeArc { start: 0, len, n });
            for s in 0..n {
                let v = eval(s, len);
                if !v.is_finite() {
                    return (v, NodeArc { start: s, len, n });
                }
                if v > best.0 {
                    best = (v, NodeArc { start: s, len, n });
                }
            }
            best
        })
        .reduce(
            || (full, NodeArc::full(n)),
            |a, b| {
                if !b.0.is_finite() || (a.0.is_finite() && b.0 > a.0) {
                    b
                } else {
                    a
                }
            },
        );
    if !value.is_finite() {
        return Err(Error::Numeric(format!("A_{p} ratio {value} on arc {argmax:?}")));
    }
    Ok(ApReport { p, value, argmax, grid_n: n })
}

/// [ω]_{A_1} = max_j M(ω)(ζ_j)/ω(ζ_j).
pub fn a1_constant(w: &Weight) -> f64 {
    let ones = vec![1.0; w.samples.len()];
    let m = sweep_max_ratio(&w.samples, &ones);
    m.iter().zip(&w.samples).map(|(m, v)| m / v).fold(f64::NEG_INFINITY, f64::max)
}

/// ω′ = ω^{−1/(p−1)}. Power weights are re-averaged from the dual closed form
/// rather than raised pointwise.
pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("dual weight needs p > 1, got {p}")));
    }
    let e = -1.0 / (p - 1.0);
    match w.tag {
        Some(t) => Weight::power(w.grid, t.exponent * e),
        None => Weight::new(w.grid, w.samples.iter().map(|v| v.powf(e)).collect()),
    }
}

/// ω_δ(e^{iθ}) = |1 − e^{iθ}|^{(p−1)(1−δ)}.
pub fn omega_delta(grid: GridCircle, p: f64, delta: f64) -> Result<Weight> {
    if !(p > 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("ω_δ needs p > 1, 0 < δ < 1 (p={p}, δ={delta})")));
    }
    Weight::power(grid, (p - 1.0) * (1.0 - delta))
}

#[derive(Debug, Clone)]
pub struct Majorant {
    pub weight: Weight,
    /// operational bound used for ‖M‖ on L^{q′}
    pub m_bound: f64,
    pub terms: usize,
}

/// Rubio de Francia iteration ω = Σ_k M^k φ / (2‖M‖)^k with ‖M‖ ≤ c·q.
pub fn rubio_majorant(phi: &Weight, q: f64, tol: f64) -> Result<Majorant> {
    if !(q > 1.0) {
        return Err(Error::Domain(format!("q must exceed 1, got {q}")));
    }
    let qp = conjugate(q);
    let ones = vec![1.0; phi.samples.len()];
    let norm = |v: &[f64]| (v.iter().map(|x| x.powf(qp)).sum::<f64>() / v.len() as f64).powf(1.0 / qp);
    let mut c = 4.0;
    for _ in 0..8 {
        let m_bound = c * q;
        let mut sum = phi.samples.clone();
        let mut term = phi.samples.clone();
        let mut terms = 1;
        loop {
            let next: Vec<f64> = sweep_max_ratio(&term, &ones).iter().map(|v| v / (2.0 * m_bound)).collect();
            let sup = next.iter().cloned().fold(0.0, f64::max);
            let min = sum.iter().cloned().fold(f64::INFINITY, f64::min);
            if sup < tol * min {
                break;
            }
            if terms >= 64 {
                return Err(Error::Numeric("Rubio de Francia series did not settle in 64 terms".into()));
            }
            for (s, t) in sum.iter_mut().zip(&next) {
                *s += t;
            }
            term = next;
            terms += 1;
        }
        let weight = Weight::new(phi.grid, sum)?;
        let a1 = a1_constant(&weight);
        let ok_a1 = a1 <= 2.0 * m_bound * (1.0 + tol);
        let ok_norm = norm(&weight.samples) <= 2.0 * norm(&phi.samples) + tol;
        if ok_a1 && ok_norm {
            return Ok(Majorant { weight, m_bound, terms });
        }
        c *= 2.0;
    }
    Err(Error::Numeric("no operational maximal bound verified".into()))
}

/// K(w) of the extrapolation theorem; for p > p₀ the exponent is (p − p₀)/(p − 1).
pub fn extrapolation_factor<F: Fn(f64) -> f64>(
    ap: f64,
    p: f64,
    p0: f64,
    m_norm_p: f64,
    m_norm_dual: f64,
    big_n: F,
) -> f64 {
    if p < p0 {
        big_n(ap * (2.0 * m_norm_p).powf(p0 - p))
    } else if p > p0 {
        big_n(ap.powf((p0 - 1.0) / (p - 1.0)) * (2.0 * m_norm_dual).powf((p - p0) / (p - 1.0)))
    } else {
        big_n(ap)
    }
}
