use std::sync::Arc as Shared;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{sweep, Check, ExperimentReport, RunConfig, SlopeFit, Target};
use crate::dyadic::{build_adjacent_systems, build_sparse_family, lerner_bound_fraction, verify_systems, whitney_cover};
use crate::error::Result;
use crate::extremal::{abs_bergman_radial, log_spike};
use crate::geometry::{GridCircle, PolarGrid};
use crate::norms::{lp_norm, lp_norm_values, mixed_norm, NormSpec};
use crate::operators::{
    abs_bergman_lower, bergman, cauchy, cauchy_via_derivative_identity, g_function, hl_maximal, q_operator,
    sparse_t, BoundaryFunction, DiskFunction, HoloFunction, SparseOperatorInput,
};
use crate::weights::{ap_constant, dual_weight, omega_delta, Weight};

const NAN: f64 = f64::NAN;

/// Piecewise a + b·sin(6θ) with a handful of random jumps.
pub fn piecewise_smooth(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let breaks: Vec<usize> = (0..5).map(|_| rng.gen_range(0..n)).collect();
    let coef: Vec<(f64, f64)> = (0..6).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0))).collect();
    (0..n)
        .map(|j| {
            let (a, b) = coef[breaks.iter().filter(|&&b| j >= b).count()];
            a + b * (j as f64 / n as f64 * 6.0).sin()
        })
        .collect()
}

fn random_mask(rng: &mut impl Rng, n: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for _ in 0..rng.gen_range(1..5) {
        let (s, l) = (rng.gen_range(0..n), rng.gen_range(1..n / 4));
        (s..s + l).for_each(|j| m[j % n] = true);
    }
    m
}

/// Axioms of the adjacent systems, sparsity of every constructed family,
/// Whitney partitions of random open sets and the pointwise Lerner bound.
pub fn run_dyadic_suite(n: usize, k_max: usize, trials: usize, cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["trial", "system", "layers", "cubes", "sparse", "lerner_fraction"];
    let mut rep = ExperimentReport::new("dyadic-suite", cfg, &cols);
    rep.meta.grid_n = n;
    let grid = GridCircle::new(n)?;
    let systems = build_adjacent_systems(grid, k_max)?;
    for c in verify_systems(&systems) {
        rep.checks.push(Check::exact(&c.name, c.pass, c.detail));
    }

    let seeds: Vec<u64> = (0..trials as u64).map(|t| cfg.seed.wrapping_add(t)).collect();
    let rows = sweep(&seeds, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let psi = piecewise_smooth(&mut rng, n);
        let sys = &systems[(s % 3) as usize];
        let fam = build_sparse_family(&psi, sys, &sys.root(), 0.5);
        let sparse = fam.verify_sparsity();
        let (frac, _) = lerner_bound_fraction(&psi, sys, &fam, 1e-9);
        (sys.id, fam.layers.len(), fam.cubes().count(), sparse, frac)
    });
    let mut sparse_fail = None;
    for (t, (id, layers, cubes, sparse, frac)) in rows.into_iter().enumerate() {
        if let Err(e) = &sparse {
            sparse_fail.get_or_insert(format!("trial {t}: {e}"));
        }
        rep.rows.push(vec![t as f64, id as f64, layers as f64, cubes as f64, sparse.is_ok() as u8 as f64, frac]);
    }
    rep.checks.push(Check::exact(
        "sparsity of every family",
        sparse_fail.is_none(),
        sparse_fail.unwrap_or_else(|| format!("{trials} families")),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5717);
    let mut whitney_fail = None;
    for t in 0..trials {
        let omega = random_mask(&mut rng, n);
        let sys = &systems[t % 3];
        let cover = whitney_cover(&omega, sys, 2.0)?;
        let mut cnt = vec![0u32; n];
        cover.all_cubes().for_each(|q| q.nodes().for_each(|j| cnt[j] += 1));
        let ok = (0..n).all(|j| cnt[j] == omega[j] as u32);
        let inside = cover.cubes.iter().all(|q| q.dilated_ball(&grid, cover.r).nodes().all(|j| omega[j]));
        if !(ok && inside) {
            whitney_fail.get_or_insert(format!("mask {t}"));
        }
    }
    rep.checks.push(Check::exact(
        "Whitney cover partitions Ω",
        whitney_fail.is_none(),
        whitney_fail.unwrap_or_else(|| format!("{trials} random open sets")),
    ));

    let worst = rep.column("lerner_fraction").into_iter().fold(1.0f64, f64::min);
    rep.checks.push(Check::tolerance(
        "pointwise sparse bound node fraction",
        worst >= 0.99,
        format!("min fraction {worst:.4} over {trials} inputs (slack 1e-9)"),
    ));
    Ok(rep.finish())
}

/// Λ(Ω) over one lifted ball: polar product of a radial window and an arc.
fn lifted_ratio(pg: &PolarGrid, w: &Weight, w_inv: &Weight, a: Complex64, r: f64) -> Option<f64> {
    let (m, arc) = (a.norm(), pg.circle.ball_nodes(a / a.norm(), r));
    let radial: f64 = (0..pg.levels()).filter(|&i| (pg.r[i] - m).abs() < r).map(|i| pg.w_area[i]).sum();
    if radial == 0.0 || arc.len == 0 {
        return None;
    }
    // ν(Δ) and both integrals factor into radial mass × arc integral
    let vol = radial * arc.measure();
    Some((radial * w.mass(&arc)) * (radial * w_inv.mass(&arc)) / (vol * vol))
}

/// Buckley witnesses σ𝒳_I for the Hardy–Littlewood maximal function and the
/// sampled A₂ constant of the radially lifted weight.
pub fn run_buckley_and_a2(ps: &[f64], deltas: &[f64], cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["p", "delta", "ap", "ratio", "envelope", "ratio_over_envelope", "lifted_a2", "lifted_over_a2"];
    let mut rep = ExperimentReport::new("buckley-a2", cfg, &cols);
    let grid = GridCircle::new(cfg.grid_n)?;
    let pg = Shared::new(PolarGrid::new(cfg.depth, cfg.grid_n)?);
    let pts: Vec<(f64, f64)> = ps.iter().flat_map(|&p| deltas.iter().map(move |&d| (p, d))).collect();
    let seed = cfg.seed;
    let row = |w: &Weight, p: f64, d: f64| -> Result<Vec<f64>> {
        let ap = ap_constant(w, p)?.value;
        let sigma = dual_weight(w, p)?;
        let arc = grid.ball_nodes(grid.node(0), 0.25);
        let vals: Vec<f64> = (0..grid.n()).map(|j| if arc.contains(j) { sigma.samples()[j] } else { 0.0 }).collect();
        let psi = BoundaryFunction::from_real(grid, &vals)?;
        let spec = NormSpec::weighted(p, w);
        let ratio = lp_norm_values(&hl_maximal(&psi), grid, spec)? / lp_norm(&psi, spec)?;
        let env = ap.powf(1.0 / (p - 1.0));
        let (lifted, a2) = if p == 2.0 {
            let w_inv = dual_weight(w, 2.0)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ d.to_bits());
            let mut best = 0.0f64;
            let mut done = 0;
            while done < 1000 {
                let a = Complex64::from_polar(rng.gen_range(0.01..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
                let r = 2f64.powf(rng.gen_range(-10.0..1.0));
                if let Some(v) = lifted_ratio(&pg, w, &w_inv, a, r) {
                    best = best.max(v);
                    done += 1;
                }
            }
            (best, ap)
        } else {
            (NAN, NAN)
        };
        Ok(vec![p, d, ap, ratio, env, ratio / env, lifted, lifted / a2])
    };
    for r in sweep(&pts, |&(p, d)| row(&omega_delta(grid, p, d)?, p, d)) {
        rep.rows.push(r?);
    }
    for &p in ps {
        let sel: Vec<&Vec<f64>> = rep.rows.iter().filter(|r| r[0] == p).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = sel.iter().map(|r| (r[2], r[3])).unzip();
        let t = Target::AtMost { bound: 1.0 / (p - 1.0) + 0.1 };
        rep.fit.push(SlopeFit::log_log(&format!("‖Mσ𝒳‖/‖σ𝒳‖ vs [ω]_Ap, p = {p}"), &xs, &ys, t, false));
    }
    let c = rep.column("ratio_over_envelope").into_iter().fold(0.0f64, f64::max);
    rep.warnings.push(format!("largest ratio / [ω]^(1/(p−1)) observed: {c:.4}"));
    let lifted: Vec<f64> = rep.column("lifted_over_a2").into_iter().filter(|x| x.is_finite()).collect();
    if !lifted.is_empty() {
        let c = lifted.iter().cloned().fold(0.0f64, f64::max);
        rep.checks.push(Check::tolerance(
            "lifted A2 ≤ C·[ω]_A2 (C = 1)",
            c <= 1.0 + 1e-9,
            format!("largest lifted/[ω] over 10³ balls per weight: {c:.6}"),
        ));
    }
    // ω ≡ 1: everything is 1
    let one = Weight::constant(grid, 1.0)?;
    let base = row(&one, 2.0, 0.5)?;
    let worst = [base[2], base[6]].iter().map(|v| (v - 1.0).abs()).fold(0.0f64, f64::max);
    rep.checks.push(Check::exact("ω ≡ 1 gives constants 1", worst < 1e-12, format!("{worst:.1e}")));
    Ok(rep.finish())
}

fn random_interior(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Fourier-path 𝒞 and ℬ against direct kernel sums at interior points.
/// Errors are relative to the largest value over the points of one input.
pub fn run_oracle_diff(inputs: usize, points: usize, cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["input", "cauchy_rel_err", "bergman_rel_err"];
    let mut rep = ExperimentReport::new("oracle-diff", cfg, &cols);
    let grid = GridCircle::new(cfg.grid_n)?;
    let pg = Shared::new(PolarGrid::new(cfg.depth, cfg.grid_n)?);
    let n = grid.n();
    let nodes: Vec<Complex64> = (0..n).map(|j| grid.node(j)).collect();
    for t in 0..inputs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 + t as u64));
        let zs: Vec<Complex64> = (0..points).map(|_| random_interior(&mut rng)).collect();

        let vals = piecewise_smooth(&mut rng, n);
        let psi = BoundaryFunction::from_real(grid, &vals)?;
        let fourier = cauchy(&psi);
        let direct: Vec<Complex64> = zs
            .par_iter()
            .map(|&z| psi.samples().iter().zip(&nodes).map(|(v, e)| v / (1.0 - z * e.conj())).sum::<Complex64>() / n as f64)
            .collect();
        let c_err = rel_err(&zs, |z| fourier.eval(z), &direct);

        let c: Vec<Complex64> = (0..36).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let phi = DiskFunction::from_fn(&pg, |r, _, th| {
            let (z, zb) = (Complex64::from_polar(r, th), Complex64::from_polar(r, -th));
            (0..36).map(|i| c[i] * z.powu((i / 6) as u32) * zb.powu((i % 6) as u32)).sum()
        });
        let fourier = bergman(&phi);
        let direct: Vec<Complex64> = zs
            .par_iter()
            .map(|&z| {
                (0..pg.levels())
                    .map(|i| {
                        let row = phi.row(i);
                        let s: Complex64 = row
                            .iter()
                            .zip(&nodes)
                            .map(|(v, e)| {
                                let k = 1.0 - z * pg.r[i] * e.conj();
                                v / (k * k)
                            })
                            .sum();
                        s * pg.w_area[i] / n as f64
                    })
                    .sum()
            })
            .collect();
        let b_err = rel_err(&zs, |z| fourier.eval(z), &direct);
        rep.rows.push(vec![t as f64, c_err, b_err]);
    }
    let worst = rep.rows.iter().map(|r| r[1].max(r[2])).fold(0.0f64, f64::max);
    rep.checks.push(Check::tolerance(
        "Fourier path vs kernel quadrature",
        worst <= 1e-5,
        format!("max relative error {worst:.2e} ({inputs} inputs × {points} points)"),
    ));
    Ok(rep.finish())
}

fn rel_err(zs: &[Complex64], f: impl Fn(Complex64) -> Complex64, direct: &[Complex64]) -> f64 {
    let scale = direct.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    zs.iter().zip(direct).map(|(&z, d)| (f(z) - d).norm()).fold(0.0f64, f64::max) / scale
}

/// Algebraic identities: Cauchy idempotence, ℬ(w^m) = z^m, 𝒬(1) = 1 − |z|²,
/// the A_p/A_p′ duality and the derivative form of 𝒞.
pub fn run_identities(cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("identities", cfg, &["case", "deviation"]);
    let grid = GridCircle::new(cfg.grid_n)?;
    let pg = Shared::new(PolarGrid::new(cfg.depth, cfg.grid_n)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tol = 1e-10;
    let max_diff = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0f64, f64::max);
    let push = |rep: &mut ExperimentReport, name: &str, dev: f64| {
        rep.rows.push(vec![rep.rows.len() as f64, dev]);
        rep.checks.push(Check::exact(name, dev <= tol, format!("{dev:.2e}")));
    };

    let psi = BoundaryFunction::from_real(grid, &piecewise_smooth(&mut rng, grid.n()))?;
    let once = cauchy(&psi);
    let twice = cauchy(&once.boundary(grid));
    push(&mut rep, "𝒞 idempotent", max_diff(&once.coeffs, &twice.coeffs));

    let dev = (0..=16)
        .map(|m| {
            let b = bergman(&HoloFunction::monomial(m).on_polar(&pg));
            let mut want = vec![Complex64::new(0.0, 0.0); b.coeffs.len()];
            want[m] = Complex64::new(1.0, 0.0);
            max_diff(&b.coeffs, &want)
        })
        .fold(0.0f64, f64::max);
    push(&mut rep, "ℬ(w^m) = z^m, m ≤ 16", dev);

    let one = DiskFunction::from_fn(&pg, |_, _, _| Complex64::new(1.0, 0.0));
    let q = q_operator(&one);
    let n = grid.n();
    let dev = (0..pg.levels())
        .flat_map(|i| {
            let s = pg.one_minus_r2(i);
            q.row(i).iter().map(move |v| (v - s).norm())
        })
        .fold(0.0f64, f64::max);
    push(&mut rep, "𝒬(1) = 1 − |z|²", dev);

    // duality on random weights, at a grid size where O(N²) is cheap
    let small = GridCircle::new(256)?;
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let p = rng.gen_range(1.2..6.0);
        let w = Weight::new(small, (0..256).map(|_| rng.gen_range(0.0f64..3.0).exp()).collect())?;
        let a = ap_constant(&w, p)?.value;
        let b = ap_constant(&dual_weight(&w, p)?, p / (p - 1.0))?.value;
        dev = dev.max((b / a.powf(1.0 / (p - 1.0)) - 1.0).abs());
    }
    push(&mut rep, "[ω′]_Ap′ = [ω]_Ap^{1/(p−1)} (50 weights)", dev);

    let dev = max_diff(&cauchy_via_derivative_identity(&psi).coeffs[..n / 2], &once.coeffs[..n / 2]);
    push(&mut rep, "𝒞 = (I+R)𝒞 − z(I+R)𝒞(ζ̄·)", dev);
    Ok(rep.finish())
}

/// λ|{G(ψ) > λ}| against ‖ψ‖_{L¹} for normalized spikes of shrinking width.
pub fn run_weak_type(cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["width", "l1", "weak", "ratio"];
    let mut rep = ExperimentReport::new("weak-type", cfg, &cols);
    let grid = GridCircle::new(cfg.grid_n)?;
    let pg = PolarGrid::new(cfg.depth, cfg.grid_n)?;
    let n = grid.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for k in 0..10 {
        let len = 1usize << k;
        let start = rng.gen_range(0..n);
        let mut vals = vec![0.0; n];
        (start..start + len).for_each(|j| vals[j % n] = n as f64 / len as f64);
        let psi = BoundaryFunction::from_real(grid, &vals)?;
        let l1 = psi.abs().iter().sum::<f64>() / n as f64;
        let mut g = g_function(&psi, &pg);
        g.sort_by(|a, b| b.total_cmp(a));
        let weak = g.iter().enumerate().map(|(i, v)| v * (i + 1) as f64 / n as f64).fold(0.0f64, f64::max);
        rep.rows.push(vec![len as f64 / n as f64, l1, weak, weak / l1]);
    }
    let ratios = rep.column("ratio");
    let c = ratios.iter().cloned().fold(0.0f64, f64::max);
    rep.add_fit("weak ratio vs spike width", "width", "ratio", Target::Within { center: 0.0, tol: 0.1 }, false);
    rep.checks.push(Check::tolerance(
        "one C across the spike family",
        c.is_finite() && ratios.iter().all(|&r| r > 0.0),
        format!("C = {c:.4}"),
    ));
    Ok(rep.finish())
}

/// ‖𝒯_l^𝒮ψ‖_{L³(ω_δ)}/‖ψ‖_{L³(ω_δ)} over l and δ.
pub fn run_sparse_growth(deltas: &[f64], ls: &[u32], cfg: &RunConfig) -> Result<ExperimentReport> {
    let p = 3.0;
    let cols = ["delta", "l", "ap", "ratio"];
    let mut rep = ExperimentReport::new("sparse-growth", cfg, &cols);
    let grid = GridCircle::new(cfg.grid_n)?;
    let k_max = grid.n().trailing_zeros() as usize;
    let systems = build_adjacent_systems(grid, k_max)?;
    let sys = &systems[2];
    let rows = sweep(deltas, |&d| -> Result<Vec<Vec<f64>>> {
        let w = omega_delta(grid, p, d)?;
        let ap = ap_constant(&w, p)?.value;
        let sigma = dual_weight(&w, p)?;
        let arc = grid.ball_nodes(grid.node(0), 0.25);
        let vals: Vec<f64> = (0..grid.n()).map(|j| if arc.contains(j) { sigma.samples()[j] } else { 0.0 }).collect();
        let psi = BoundaryFunction::from_real(grid, &vals)?;
        let fam = build_sparse_family(&vals, sys, &sys.root(), 0.5);
        let spec = NormSpec::weighted(p, &w);
        let base = lp_norm(&psi, spec)?;
        ls.iter()
            .map(|&l| {
                let t = sparse_t(&psi, &SparseOperatorInput { family: &fam, l, weight: Some(&w) })?;
                Ok(vec![d, l as f64, ap, lp_norm(&t, spec)? / base])
            })
            .collect()
    });
    for r in rows {
        rep.rows.extend(r?);
    }
    let pick = |sel: &dyn Fn(&Vec<f64>) -> bool, x: usize| -> (Vec<f64>, Vec<f64>) {
        rep.rows.iter().filter(|r| sel(r)).map(|r| (r[x], r[3])).unzip()
    };
    let d_mid = deltas[deltas.len() / 2];
    let (xs, ys) = pick(&|r| r[0] == d_mid, 1);
    let by_l = SlopeFit::log_log(&format!("ratio vs l at δ = {d_mid}"), &xs, &ys, Target::AtMost { bound: 0.6 }, false);
    let (xs, ys) = pick(&|r| r[1] == ls[0] as f64, 2);
    let by_a = SlopeFit::log_log(&format!("ratio vs [ω]_A3 at l = {}", ls[0]), &xs, &ys, Target::AtMost { bound: 0.6 }, false);
    rep.fit.push(by_l);
    rep.fit.push(by_a);
    Ok(rep.finish())
}

/// |ℬ|(log spike) along z = r against log log(2/(1 − r²)).
pub fn run_log_spike(cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["j", "r", "abs_bergman", "radial_oracle", "loglog", "ratio"];
    let mut rep = ExperimentReport::new("log-spike", cfg, &cols);
    let pg = Shared::new(PolarGrid::new(cfg.depth, cfg.grid_n)?);
    let phi = log_spike(&pg);
    let js: Vec<i32> = (4..=13).collect();
    let rows = sweep(&js, |&j| {
        let r = 1.0 - 2f64.powi(-j);
        let v = abs_bergman_lower(&phi, Complex64::new(r, 0.0));
        let o = abs_bergman_radial(|t| 1.0 / (2.0 / (t * (2.0 - t))).ln(), r);
        let ll = (2.0 / (1.0 - r * r)).ln().ln();
        vec![j as f64, r, v, o, ll, v / ll]
    });
    rep.rows = rows;
    let vals = rep.column("abs_bergman");
    let monotone = vals.windows(2).all(|w| w[1] > w[0]);
    rep.checks.push(Check::tolerance("monotone growth in r", monotone, format!("{:.4} → {:.4}", vals[0], vals[vals.len() - 1])));
    let ratios = rep.column("ratio");
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    rep.checks.push(Check::tolerance(
        "single c > 0 below the ratio",
        lo > 0.0 && lo >= 0.5 * hi,
        format!("c = {lo:.4}, ratio range [{lo:.4}, {hi:.4}]"),
    ));
    let dev = rep.rows.iter().map(|r| (r[2] - r[3]).abs() / r[3]).fold(0.0f64, f64::max);
    rep.checks.push(Check::tolerance("grid vs radial oracle", dev <= 1e-3, format!("max relative gap {dev:.2e}")));
    let m = mixed_norm(&phi, NormSpec::unweighted(2.0))?;
    rep.checks.push(Check::tolerance(
        "spike in L^{2,2}",
        !m.divergent && m.value.is_finite(),
        format!("norm {:.4}", m.value),
    ));
    rep.add_fit("|ℬ|(spike) vs log log", "loglog", "abs_bergman", Target::Report, false);
    Ok(rep.finish())
}
