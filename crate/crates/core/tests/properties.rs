use proptest::prelude::*;
use sharpbergman::dyadic::{build_adjacent_systems, median, rearrangement};
use sharpbergman::experiments::{run_weighted_sharpness, RunConfig};
use sharpbergman::extremal::{f_delta_p, f_delta_p_exp_recurrence};
use sharpbergman::norms::{lp_norm, NormSpec};
use sharpbergman::operators::cauchy;
use sharpbergman::weights::{ap_constant, dual_weight, Weight};
use sharpbergman::{BoundaryFunction, Complex64, GridCircle};

const N: usize = 64;

fn grid() -> GridCircle {
    GridCircle::new(N).unwrap()
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, N)
}

fn weight_samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, N).prop_map(|v| v.into_iter().map(f64::exp).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_norm_homogeneous_and_subadditive(a in samples(), b in samples(), w in weight_samples(), c in -4.0f64..4.0, p in 1.0f64..6.0) {
        let g = grid();
        let w = Weight::new(g, w).unwrap();
        let spec = NormSpec::weighted(p, &w);
        let fa = BoundaryFunction::from_real(g, &a).unwrap();
        let fb = BoundaryFunction::from_real(g, &b).unwrap();
        let na = lp_norm(&fa, spec).unwrap();
        let scaled = fa.map(|_, v| v * c);
        prop_assert!((lp_norm(&scaled, spec).unwrap() - c.abs() * na).abs() <= 1e-10 * (1.0 + na));
        let sum = fa.map(|j, v| v + fb.samples()[j]);
        prop_assert!(lp_norm(&sum, spec).unwrap() <= na + lp_norm(&fb, spec).unwrap() + 1e-10);
    }

    #[test]
    fn ap_constant_invariants(w in weight_samples(), p in 1.2f64..5.0, shift in 0usize..N, c in 0.1f64..10.0) {
        let w = Weight::new(grid(), w).unwrap();
        let a = ap_constant(&w, p).unwrap().value;
        prop_assert!(a >= 1.0 - 1e-12);
        let rot = ap_constant(&w.rotated(shift).unwrap(), p).unwrap().value;
        let sc = ap_constant(&w.scaled(c).unwrap(), p).unwrap().value;
        prop_assert!((rot / a - 1.0).abs() < 1e-12);
        prop_assert!((sc / a - 1.0).abs() < 1e-12);
        let d = ap_constant(&dual_weight(&w, p).unwrap(), p / (p - 1.0)).unwrap().value;
        prop_assert!((d / a.powf(1.0 / (p - 1.0)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn median_is_translation_equivariant_and_bounded(v in samples(), c in -3.0f64..3.0, k in 0usize..6, i in 0usize..64, s in 0usize..3) {
        let systems = build_adjacent_systems(grid(), 6).unwrap();
        let q = systems[s].cube(k, i % (1 << k));
        let m = median(&v, &q);
        let lo = q.nodes().map(|j| v[j]).fold(f64::INFINITY, f64::min);
        let hi = q.nodes().map(|j| v[j]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        prop_assert_eq!(median(&shifted, &q), m + c);
    }

    #[test]
    fn rearrangement_is_nonincreasing_and_equimeasurable(v in samples()) {
        let mut prev = f64::INFINITY;
        for i in 0..=N {
            let x = rearrangement(&v, N, i as f64 / N as f64);
            prop_assert!(x <= prev);
            prev = x;
        }
        let l1: f64 = v.iter().map(|x| x.abs()).sum();
        let r1: f64 = (0..N).map(|i| rearrangement(&v, N, i as f64 / N as f64)).sum();
        prop_assert!((l1 - r1).abs() < 1e-9);
    }

    #[test]
    fn cauchy_is_linear_and_idempotent(a in samples(), b in samples(), c in -2.0f64..2.0) {
        let g = grid();
        let fa = BoundaryFunction::from_real(g, &a).unwrap();
        let fb = BoundaryFunction::from_real(g, &b).unwrap();
        let comb = fa.map(|j, v| v * c + fb.samples()[j]);
        let (ca, cb, cc) = (cauchy(&fa), cauchy(&fb), cauchy(&comb));
        for k in 0..cc.coeffs.len() {
            prop_assert!((cc.coeffs[k] - (ca.coeffs[k] * c + cb.coeffs[k])).norm() < 1e-12);
        }
        let twice = cauchy(&ca.boundary(g));
        for (x, y) in ca.coeffs.iter().zip(&twice.coeffs) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn f_delta_coefficients_match_exp_recurrence(delta in 0.05f64..0.99, p in 1.1f64..16.0) {
        let f = f_delta_p(delta, p, 64).unwrap();
        let g = f_delta_p_exp_recurrence(delta, p, 64);
        for (k, (a, b)) in f.coeffs.iter().zip(&g).enumerate() {
            prop_assert!(a.im == 0.0 && a.re > 0.0, "k = {}", k);
            prop_assert!((a.re - b).abs() <= 1e-10 * b.abs().max(1.0), "k = {}: {} vs {}", k, a.re, b);
        }
    }
}

#[test]
fn weighted_row_is_deterministic() {
    let cfg = RunConfig { grid_n: 1024, depth: 12, ..RunConfig::default() };
    let a = run_weighted_sharpness(2.0, &[0.1], 0.25, &cfg).unwrap();
    let b = run_weighted_sharpness(2.0, &[0.1], 0.25, &cfg).unwrap();
    assert_eq!(a.rows.len(), 1);
    let bits = |r: &Vec<f64>| r.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.rows[0]), bits(&b.rows[0]));
}

#[test]
fn report_roundtrips_through_json_and_csv() {
    let cfg = RunConfig { grid_n: 1024, depth: 12, ..RunConfig::default() };
    let rep = run_weighted_sharpness(2.0, &[0.2, 0.1], 0.25, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    rep.write_json(std::fs::File::create(&path).unwrap()).unwrap();
    let back: sharpbergman::ExperimentReport = serde_json::from_reader(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.meta, rep.meta);
    assert_eq!(back.fit.len(), rep.fit.len());
    let mut csv = Vec::new();
    rep.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), rep.meta.columns.join(","));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn complex_reexport_is_the_sample_type() {
    let g = grid();
    let f = BoundaryFunction::from_fn(g, |t| Complex64::from_polar(1.0, 3.0 * t));
    assert!((f.coeff(3) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
}
