use std::f64::consts::PI;
use std::sync::Arc as Shared;

use super::{sweep, Check, ExperimentReport, RunConfig, SlopeFit, Target};
use crate::error::Result;
use crate::extremal::{phi_delta, phi_delta_norms, FDelta};
use crate::geometry::{GridCircle, PolarGrid};
use crate::norms::{mixed_norm, NormSpec};
use crate::operators::q_operator;
use crate::weights::ap_constant;

/// √p′ branch, Riesz branch and ‖𝒞u‖/‖u‖ growth over a list of p′ values,
/// plus the p = 2 Riesz floor.
pub fn run_hardy_sharpness(p_duals: &[f64], cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["p_dual", "p", "eps", "sqrt_branch", "riesz_ratio", "riesz_exact", "cauchy_u_ratio"];
    let mut rep = ExperimentReport::new("hardy-sharpness", cfg, &cols);
    let rows = sweep(p_duals, |&q| -> Result<Vec<f64>> {
        let p = q / (q - 1.0);
        // witness for the √p′ branch lives at exponent p′
        let wq = FDelta::near_one(q)?;
        let wp = FDelta::near_one(p)?;
        Ok(vec![
            q,
            p,
            wq.eps,
            wq.cauchy_v_triebel_ratio(),
            wp.riesz_ratio(),
            1.0 / (PI / p).sin(),
            wp.cauchy_u_ratio(),
        ])
    });
    for r in rows {
        rep.rows.push(r?);
    }
    rep.add_fit("sqrt_branch vs p'", "p_dual", "sqrt_branch", Target::Within { center: 0.5, tol: 0.1 }, true);
    rep.add_fit("riesz_ratio vs p'", "p_dual", "riesz_ratio", Target::Within { center: 1.0, tol: 0.15 }, true);
    rep.add_fit("cauchy_u_ratio vs p'", "p_dual", "cauchy_u_ratio", Target::Within { center: 1.0, tol: 0.15 }, true);
    let at2 = FDelta::near_one(2.0)?.riesz_ratio();
    rep.checks.push(Check::tolerance(
        "riesz ratio at p = 2",
        at2 >= 0.95 && at2 <= 1.0 + 1e-9,
        format!("{at2:.6} (projection norm 1 at p = 2)"),
    ));
    if rep.rows.iter().flatten().any(|v| !v.is_finite()) {
        rep.checks.push(Check::tolerance("finite ratios", false, "non-finite entry".into()));
    }
    Ok(rep.finish())
}

/// The four assertions on f_{δ,p}: the boundary tangent identity, the
/// (1−δ)^{−1/p} and √p laws, and the p′ resp. p growth of 𝒞u and 𝒞v.
pub fn run_extremal_laws(cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = ["p", "delta", "hardy", "hardy_exact", "hardy_scaled", "triebel", "sqrtp_ratio", "cauchy_u_ratio", "cauchy_v_ratio"];
    let mut rep = ExperimentReport::new("extremal-laws", cfg, &cols);
    let nan = f64::NAN;

    // boundary identity on the grid
    let grid = GridCircle::new(cfg.grid_n)?;
    let mut worst = 0.0f64;
    for &p in &[2.0, 4.0, 8.0] {
        for &d in &[0.9, 0.95, 0.975] {
            let fd = FDelta::new(d, p)?;
            let (u, v) = fd.u_v_boundary(grid);
            let tan = (0.5 * PI * fd.a()).tan();
            for j in 1..grid.n() {
                let (uu, vv) = (u.samples()[j].re, v.samples()[j].re);
                worst = worst.max((vv.abs() - tan * uu).abs() / uu.abs().max(1.0));
            }
        }
    }
    rep.checks.push(Check::tolerance("|v| = tan(aπ/2)u", worst <= 1e-8, format!("max deviation {worst:.2e}")));

    // norm laws
    let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0].iter().flat_map(|&p| [0.9, 0.95, 0.975].map(move |d| (p, d))).collect();
    let rows = sweep(&pts, |&(p, d)| -> Result<Vec<f64>> {
        let fd = FDelta::new(d, p)?;
        let h = fd.hardy_norm(0.0);
        let t = fd.triebel_norm(0.0);
        Ok(vec![p, d, h, fd.hardy_norm_exact(), h * (1.0 - d).powf(1.0 / p), t, h / (p.sqrt() * t), nan, nan])
    });
    for r in rows {
        rep.rows.push(r?);
    }
    let band = |rep: &ExperimentReport, col: &str| {
        let v: Vec<f64> = rep.column(col).into_iter().filter(|x| x.is_finite()).collect();
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        (hi / lo, lo, hi)
    };
    let (r, lo, hi) = band(&rep, "hardy_scaled");
    rep.checks.push(Check::tolerance("‖f‖(1−δ)^{1/p} band", r <= 2.0, format!("[{lo:.4}, {hi:.4}] ratio {r:.3}")));
    let (r, lo, hi) = band(&rep, "sqrtp_ratio");
    rep.checks.push(Check::tolerance("‖f‖_H/(√p‖f‖_F) band", r <= 2.0, format!("[{lo:.4}, {hi:.4}] ratio {r:.3}")));
    let qerr = rep
        .rows
        .iter()
        .map(|row| (row[2] - row[3]).abs() / row[3])
        .fold(0.0f64, f64::max);
    rep.checks.push(Check::tolerance("hardy quadrature vs closed form", qerr < 1e-8, format!("{qerr:.2e}")));

    // small p: growth vs p′
    let small = [1.05, 1.1, 1.25, 1.5];
    let u_rows = sweep(&small, |&p| -> Result<(f64, f64)> {
        let fd = FDelta::near_one(p)?;
        Ok((fd.delta(), fd.cauchy_u_ratio()))
    });
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&p, r) in small.iter().zip(u_rows) {
        let (d, ratio) = r?;
        rep.rows.push(vec![p, d, nan, nan, nan, nan, nan, ratio, nan]);
        xs.push(p / (p - 1.0));
        ys.push(ratio);
    }
    rep.fit.push(SlopeFit::log_log("‖𝒞u‖/‖u‖ vs p'", &xs, &ys, Target::Within { center: 1.0, tol: 0.15 }, true));

    // large p: growth vs p
    let large = [2.0, 4.0, 8.0, 16.0];
    let v_rows = sweep(&large, |&p| -> Result<(f64, f64)> {
        let fd = FDelta::near_one(p)?;
        Ok((fd.delta(), fd.cauchy_v_ratio()))
    });
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&p, r) in large.iter().zip(v_rows) {
        let (d, ratio) = r?;
        rep.rows.push(vec![p, d, nan, nan, nan, nan, nan, nan, ratio]);
        xs.push(p);
        ys.push(ratio);
    }
    rep.fit.push(SlopeFit::log_log("‖𝒞v‖/‖v‖ vs p", &xs, &ys, Target::Within { center: 1.0, tol: 0.15 }, true));
    Ok(rep.finish())
}

/// ‖𝒞ψ‖/‖ψ‖ for ψ = f − cos(πa)f̄ against 1/sin(π/p).
pub fn run_riesz_constant(ps: &[f64], cfg: &RunConfig) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("riesz-constant", cfg, &["p", "eps", "ratio", "exact", "ratio_over_exact"]);
    let rows = sweep(ps, |&p| -> Result<Vec<f64>> {
        let fd = FDelta::near_one(p)?;
        let r = fd.riesz_ratio();
        let e = 1.0 / (PI / p).sin();
        Ok(vec![p, fd.eps, r, e, r / e])
    });
    for r in rows {
        rep.rows.push(r?);
    }
    let q = rep.column("ratio_over_exact");
    let worst = q.iter().map(|x| (x - 1.0).abs()).fold(0.0f64, f64::max);
    rep.checks.push(Check::tolerance("witness attains 1/sin(π/p)", worst <= 0.05, format!("max |ratio/exact − 1| = {worst:.4}")));
    Ok(rep.finish())
}

/// φ_δ / ω_δ sweep: A_p growth, the φ_δ norm laws, and the 𝒬 lower bound.
pub fn run_weighted_sharpness(p: f64, deltas: &[f64], rho: f64, cfg: &RunConfig) -> Result<ExperimentReport> {
    let cols = [
        "delta",
        "inv_delta",
        "ap",
        "phi_mixed",
        "phi_l1",
        "test_mixed",
        "phi_mixed_grid",
        "q_norm",
        "ratio",
        "identity",
    ];
    let mut rep = ExperimentReport::new("weighted-sharpness", cfg, &cols);
    let pg = Shared::new(PolarGrid::new(cfg.depth, cfg.grid_n)?);
    let rows = sweep(deltas, |&d| -> Result<Vec<f64>> {
        let pd = phi_delta(p, d, rho, &pg)?;
        let ap = ap_constant(&pd.weight, p)?.value;
        let exact = phi_delta_norms(p, d, rho);
        let spec = NormSpec::weighted(p, &pd.weight);
        let grid_mixed = mixed_norm(&pd.phi, spec)?.value;
        let q = mixed_norm(&q_operator(&pd.phi), spec)?.value;
        Ok(vec![
            d,
            1.0 / d,
            ap,
            exact.mixed,
            exact.l1,
            exact.test_mixed,
            grid_mixed,
            q,
            q / exact.mixed,
            exact.mixed * ap.powf(1.0 / p),
        ])
    });
    for r in rows {
        rep.rows.push(r?);
    }
    rep.add_fit("[ω_δ]_Ap vs 1/δ", "inv_delta", "ap", Target::Within { center: p - 1.0, tol: 0.1 }, true);
    rep.add_fit("‖φ_δ‖_Lp2(ω_δ) vs 1/δ", "inv_delta", "phi_mixed", Target::Within { center: 1.0 / p, tol: 0.1 }, true);
    rep.add_fit("‖φ_δ‖_L1 vs 1/δ", "inv_delta", "phi_l1", Target::Within { center: 1.0, tol: 0.1 }, true);
    rep.add_fit("test indicator norm vs 1/δ", "inv_delta", "test_mixed", Target::Within { center: 0.0, tol: 0.1 }, false);
    rep.add_fit("‖𝒬φ‖/‖φ‖ vs [ω_δ]_Ap", "ap", "ratio", Target::AtLeast { bound: 1.0 / p - 0.05 }, true);
    rep.add_fit("‖φ‖[ω]^{1/p} vs 1/δ", "inv_delta", "identity", Target::Within { center: 1.0, tol: 0.15 }, false);
    Ok(rep.finish())
}
