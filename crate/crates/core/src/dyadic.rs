//! Adjacent dyadic systems of circle arcs and the decompositions built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridCircle, NodeArc};
use crate::operators::{hl_maximal, BoundaryFunction};

/// Ball constants: B(ζ_Q, c₁ℓ(Q)) ⊆ Q ⊆ B(ζ_Q, C₁ℓ(Q)), ℓ(Q) = 2^{−k}.
pub const SMALL_C1: f64 = 0.5;
pub const BIG_C1: f64 = 6.0;
/// Number of adjacent systems.
pub const SYSTEMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub system: usize,
    pub generation: usize,
    pub index: usize,
    pub start: usize,
    pub len: usize,
    pub n: usize,
    pub center: usize,
}

impl DyadicCube {
    pub fn arc(&self) -> NodeArc {
        NodeArc { start: self.start, len: self.len, n: self.n }
    }

    pub fn contains(&self, j: usize) -> bool {
        self.arc().contains(j)
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i) % self.n)
    }

    /// ℓ(Q) = 2^{−k}.
    pub fn side(&self) -> f64 {
        0.5f64.powi(self.generation as i32)
    }

    pub fn measure(&self) -> f64 {
        self.len as f64 / self.n as f64
    }

    pub fn is_leaf(&self) -> bool {
        self.len == 1
    }

    /// Node set of B(ζ_Q, factor·C₁ℓ(Q)).
    pub fn dilated_ball(&self, grid: &GridCircle, factor: f64) -> NodeArc {
        grid.ball_nodes(grid.node(self.center), factor * BIG_C1 * self.side())
    }

    pub fn is_inside(&self, other: &DyadicCube) -> bool {
        self.system == other.system
            && self.generation >= other.generation
            && self.nodes().all(|j| other.contains(j))
    }
}

/// One binary hierarchy of arcs, shifted by a fixed number of nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DyadicSystem {
    pub id: usize,
    pub shift: usize,
    pub k_max: usize,
    pub grid: GridCircle,
}

impl DyadicSystem {
    pub fn cube(&self, generation: usize, index: usize) -> DyadicCube {
        let n = self.grid.n();
        let len = n >> generation;
        let start = (self.shift + index * len) % n;
        let arc = NodeArc { start, len, n };
        let center = if self.id == 1 && arc.contains(0) { 0 } else { (start + len / 2) % n };
        DyadicCube { system: self.id, generation, index, start, len, n, center }
    }

    pub fn generation(&self, k: usize) -> impl Iterator<Item = DyadicCube> + '_ {
        (0..1usize << k).map(move |i| self.cube(k, i))
    }

    pub fn root(&self) -> DyadicCube {
        self.cube(0, 0)
    }

    /// The generation-k cube containing node j.
    pub fn cube_of(&self, k: usize, j: usize) -> DyadicCube {
        let n = self.grid.n();
        let len = n >> k;
        self.cube(k, ((j + n - self.shift) % n) / len)
    }

    pub fn children(&self, q: &DyadicCube) -> Vec<DyadicCube> {
        if q.generation >= self.k_max {
            return Vec::new();
        }
        vec![self.cube(q.generation + 1, 2 * q.index), self.cube(q.generation + 1, 2 * q.index + 1)]
    }

    /// Cubes of this system inside `q` that contain node j, from `q` down to the finest generation.
    pub fn chain(&self, q: &DyadicCube, j: usize) -> Vec<DyadicCube> {
        (q.generation..=self.k_max).map(|k| self.cube_of(k, j)).collect()
    }

    pub fn to_json_tree(&self, depth: usize) -> serde_json::Value {
        fn node(sys: &DyadicSystem, q: DyadicCube, depth: usize) -> serde_json::Value {
            let kids: Vec<_> = if q.generation < depth {
                sys.children(&q).into_iter().map(|c| node(sys, c, depth)).collect()
            } else {
                Vec::new()
            };
            serde_json::json!({
                "system": q.system,
                "generation": q.generation,
                "index": q.index,
                "nodes": [q.start, q.len],
                "children": kids,
            })
        }
        node(self, self.root(), depth.min(self.k_max))
    }
}

/// Three binary systems shifted by ⌊N/3⌋, ⌊2N/3⌋ and 0 nodes (ids 1, 2, 3).
pub fn build_adjacent_systems(grid: GridCircle, k_max: usize) -> Result<Vec<DyadicSystem>> {
    let m = grid.n().trailing_zeros() as usize;
    if k_max > m {
        return Err(Error::Construction(format!(
            "generation {} would split single nodes (N = 2^{m})",
            m + 1
        )));
    }
    let n = grid.n();
    Ok([(1, n / 3), (2, 2 * n / 3), (3, 0)]
        .into_iter()
        .map(|(id, shift)| DyadicSystem { id, shift, k_max, grid })
        .collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> PropertyCheck {
    PropertyCheck { name: name.to_string(), pass, detail }
}

/// Exhaustive grid-level verification of the six structural properties, the
/// child-size constant ε = 1/2, and the covering constant of (vi).
pub fn verify_systems(systems: &[DyadicSystem]) -> Vec<PropertyCheck> {
    let grid = systems[0].grid;
    let n = grid.n();
    let mut out = Vec::new();

    // (i) partition
    let mut ok = true;
    for s in systems {
        for k in 0..=s.k_max {
            let mut hits = vec![0u32; n];
            for q in s.generation(k) {
                q.nodes().for_each(|j| hits[j] += 1);
            }
            ok &= hits.iter().all(|&h| h == 1);
        }
    }
    out.push(check("partition", ok, "every generation covers each node exactly once".into()));

    // (ii) nesting
    let mut ok = true;
    for s in systems {
        for l in 1..=s.k_max {
            for q in s.generation(l) {
                for k in 0..l {
                    let first = s.cube_of(k, q.start);
                    ok &= q.nodes().all(|j| first.contains(j));
                }
            }
        }
    }
    out.push(check("nesting", ok, "finer cubes never straddle coarser ones".into()));

    // (iii) ball sandwich
    let mut ok = true;
    let mut worst = String::new();
    for s in systems {
        for k in 0..=s.k_max {
            for q in s.generation(k) {
                let z = grid.node(q.center);
                let inner = grid.ball_nodes(z, SMALL_C1 * q.side());
                let outer = grid.ball_nodes(z, BIG_C1 * q.side());
                let good = inner.nodes().all(|j| q.contains(j)) && q.nodes().all(|j| outer.contains(j));
                if !good && worst.is_empty() {
                    worst = format!("system {} gen {k} index {}", s.id, q.index);
                }
                ok &= good;
            }
        }
    }
    out.push(check(
        "ball sandwich",
        ok,
        if ok { format!("c1 = {SMALL_C1}, C1 = {BIG_C1}") } else { worst },
    ));

    // (iv) B(child) ⊆ B(parent)
    let mut ok = true;
    for s in systems {
        for k in 0..s.k_max {
            for q in s.generation(k) {
                let bq = q.dilated_ball(&grid, 1.0);
                for c in s.children(&q) {
                    ok &= c.dilated_ball(&grid, 1.0).nodes().all(|j| bq.contains(j));
                }
            }
        }
    }
    out.push(check("ball nesting", ok, "along every parent/child pair".into()));

    // (v) node 0 is a center at every generation of system 1
    let s1 = systems.iter().find(|s| s.id == 1).expect("system 1");
    let ok = (0..=s1.k_max).all(|k| s1.cube_of(k, 0).center == 0);
    out.push(check("fixed center", ok, "x0 = node 0 in system 1".into()));

    // (vi) covering by some generation-k cube
    let (ok, c) = verify_covering(systems);
    out.push(check("covering", ok, format!("diam Q / r ≤ {c:.3}")));

    // ε of the child-size bound
    let ok = systems.iter().all(|s| {
        (0..s.k_max).all(|k| s.generation(k).all(|q| s.children(&q).iter().any(|c| 2 * c.len >= q.len)))
    });
    out.push(check("child size ε = 1/2", ok, "every cube has a child of half its size".into()));
    out
}

/// Diameter of a node arc in the quasi-metric.
fn arc_diameter(grid: &GridCircle, arc: &NodeArc) -> f64 {
    if arc.len <= 1 {
        return 0.0;
    }
    let span = (arc.len - 1) as f64 * 2.0 * std::f64::consts::PI / grid.n() as f64;
    if span >= std::f64::consts::PI {
        2.0
    } else {
        2.0 * (0.5 * span).sin()
    }
}

/// Property (vi) over all balls centred at nodes and half-nodes whose radius
/// is a node distance or a dyadic threshold. Returns (holds, max diam/r).
pub fn verify_covering(systems: &[DyadicSystem]) -> (bool, f64) {
    let grid = systems[0].grid;
    let n = grid.n();
    let k_max = systems[0].k_max;
    let mut ok = true;
    let mut worst = 0.0f64;
    for half in 0..2 * n {
        let center = num_complex::Complex64::from_polar(1.0, std::f64::consts::PI * half as f64 / n as f64);
        let mut radii: Vec<f64> = (0..n)
            .map(|j| crate::geometry::rho(center, grid.node(j)).unwrap_or(0.0))
            .filter(|&d| d > 0.0)
            .collect();
        for k in 0..=k_max {
            radii.push(0.5f64.powi(k as i32 + 2));
            radii.push(0.5f64.powi(k as i32 + 3) * (1.0 + 1e-12));
        }
        for r in radii {
            // δ^{k+3} < r ≤ δ^{k+2}
            let kf = -r.log2() - 2.0;
            let k = kf.ceil().max(0.0) as usize;
            if k > k_max || !(0.5f64.powi(k as i32 + 3) < r && r <= 0.5f64.powi(k as i32 + 2)) {
                continue;
            }
            let ball = grid.ball_nodes(center, r);
            if ball.len == 0 {
                continue;
            }
            let mut found = false;
            for s in systems {
                let q = s.cube_of(k, ball.start);
                if ball.nodes().all(|j| q.contains(j)) {
                    found = true;
                    worst = worst.max(arc_diameter(&grid, &q.arc()) / r);
                    break;
                }
            }
            ok &= found;
        }
    }
    (ok, worst)
}

/// Maximal cubes of one system with R·B(Q) ⊆ Ω, plus single-node leaves
/// where Ω meets the grid resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhitneyCover {
    pub r: f64,
    pub cubes: Vec<DyadicCube>,
    pub boundary_leaves: Vec<DyadicCube>,
}

impl WhitneyCover {
    pub fn all_cubes(&self) -> impl Iterator<Item = &DyadicCube> {
        self.cubes.iter().chain(&self.boundary_leaves)
    }
}

pub fn whitney_cover(omega: &[bool], system: &DyadicSystem, r: f64) -> Result<WhitneyCover> {
    let grid = system.grid;
    if omega.len() != grid.n() {
        return Err(Error::GridMismatch("Ω mask length differs from the grid".into()));
    }
    if omega.iter().all(|&b| b) {
        return Err(Error::Domain("Ω is the whole circle".into()));
    }
    let mut cover = WhitneyCover { r, cubes: Vec::new(), boundary_leaves: Vec::new() };
    let mut stack = vec![system.root()];
    while let Some(q) = stack.pop() {
        if !q.nodes().any(|j| omega[j]) {
            continue;
        }
        let ball = q.dilated_ball(&grid, r);
        if !ball.is_full() && ball.nodes().all(|j| omega[j]) {
            cover.cubes.push(q);
        } else if q.is_leaf() || q.generation >= system.k_max {
            cover.boundary_leaves.extend(q.nodes().filter(|&j| omega[j]).map(|j| DyadicCube {
                start: j,
                len: 1,
                center: j,
                generation: system.grid.n().trailing_zeros() as usize,
                index: j,
                ..q
            }));
        } else {
            stack.extend(system.children(&q));
        }
    }
    Ok(cover)
}

impl WhitneyCover {
    /// max over nodes of Σ_Q 1_{R·B(Q)} over proper cubes.
    pub fn overlap(&self, grid: &GridCircle) -> usize {
        let mut cnt = vec![0usize; grid.n()];
        for q in &self.cubes {
            q.dilated_ball(grid, self.r).nodes().for_each(|j| cnt[j] += 1);
        }
        cnt.into_iter().max().unwrap_or(0)
    }

    /// Smallest K with K·R·B(Q) meeting Ω^c, maximized over proper cubes.
    pub fn escape_constant(&self, grid: &GridCircle, omega: &[bool]) -> f64 {
        self.cubes
            .iter()
            .map(|q| {
                let mut k = 1.0;
                while k < 1e6 {
                    if q.dilated_ball(grid, k * self.r).nodes().any(|j| !omega[j]) {
                        return k;
                    }
                    k *= 1.0625;
                }
                f64::INFINITY
            })
            .fold(0.0, f64::max)
    }
}

/// ψ*(t) = inf{α : |{|ψ| > α}| ≤ t} for node values with node measure 1/n.
pub fn rearrangement(values: &[f64], n: usize, t: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let m = (t * n as f64 * (1.0 + 1e-12)).floor();
    if m < 0.0 {
        return v.first().copied().unwrap_or(0.0);
    }
    v.get(m as usize).copied().unwrap_or(0.0)
}

fn sorted_values(psi: &[f64], q: &DyadicCube) -> Vec<f64> {
    let mut v: Vec<f64> = q.nodes().map(|j| psi[j]).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Lower middle order statistic of ψ over Q.
pub fn median(psi: &[f64], q: &DyadicCube) -> f64 {
    let v = sorted_values(psi, q);
    v[(v.len() - 1) / 2]
}

/// ω_λ(ψ; Q) = inf_c ((ψ − c)𝒳_Q)*(λ|Q|): the smallest half-width of a window
/// holding all but ⌊λ·#Q⌋ node values.
pub fn local_osc(psi: &[f64], q: &DyadicCube, lambda: f64) -> f64 {
    let v = sorted_values(psi, q);
    let drop = (lambda * q.len as f64 * (1.0 + 1e-12)).floor() as usize;
    if drop >= v.len() {
        return 0.0;
    }
    let keep = v.len() - drop;
    (0..=drop).map(|i| 0.5 * (v[i + keep - 1] - v[i])).fold(f64::INFINITY, f64::min)
}

/// m^#_{λ;Q₀}ψ(ζ_j): the largest local oscillation over the dyadic chain of j inside Q₀.
pub fn sharp_maximal(psi: &[f64], system: &DyadicSystem, q0: &DyadicCube, lambda: f64, j: usize) -> Result<f64> {
    if !q0.contains(j) {
        return Err(Error::Domain(format!("node {j} is not in the root cube")));
    }
    Ok(system.chain(q0, j).iter().map(|q| local_osc(psi, q, lambda)).fold(0.0, f64::max))
}

/// Sparse family with per-cube majority sets E_Q.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseFamily {
    pub system: usize,
    pub lambda: f64,
    pub layers: Vec<Vec<DyadicCube>>,
    /// exceptional sets, parallel to `layers`
    pub exceptional: Vec<Vec<Vec<usize>>>,
}

impl SparseFamily {
    pub fn root(&self) -> &DyadicCube {
        &self.layers[0][0]
    }

    pub fn cubes(&self) -> impl Iterator<Item = &DyadicCube> {
        self.layers.iter().flatten()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "system": self.system,
            "layers": self.layers.iter().map(|l| l.iter().map(|q| serde_json::json!({
                "system": q.system, "generation": q.generation, "index": q.index, "nodes": [q.start, q.len]
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Children occupy at most half of each parent and the exceptional sets
    /// are exactly the uncovered nodes, checked as set arithmetic.
    pub fn verify_sparsity(&self) -> std::result::Result<(), String> {
        if self.layers[0].len() != 1 {
            return Err("first layer must be the root alone".into());
        }
        for (m, layer) in self.layers.iter().enumerate() {
            for (a, qa) in layer.iter().enumerate() {
                for qb in &layer[a + 1..] {
                    if qa.nodes().any(|j| qb.contains(j)) {
                        return Err(format!("layer {m} cubes overlap"));
                    }
                }
                if m > 0 && !self.layers[m - 1].iter().any(|p| qa.is_inside(p)) {
                    return Err(format!("layer {m} cube {} has no parent", qa.index));
                }
                let next = self.layers.get(m + 1).map(|l| l.as_slice()).unwrap_or(&[]);
                let covered = qa.nodes().filter(|&j| next.iter().any(|c| c.contains(j))).count();
                if 2 * covered > qa.len {
                    return Err(format!("layer {m} cube {}: children cover {covered}/{}", qa.index, qa.len));
                }
                let e = &self.exceptional[m][a];
                if e.len() != qa.len - covered || 2 * e.len() < qa.len {
                    return Err(format!("layer {m} cube {}: |E_Q| = {}", qa.index, e.len()));
                }
            }
        }
        Ok(())
    }
}

/// Lerner-style selection: the children of P are the maximal dyadic R ⊊ P with
/// |m_R − m_P| > 2·ω_λ(ψ; P), λ = ε/4.
pub fn build_sparse_family(psi: &[f64], system: &DyadicSystem, q0: &DyadicCube, eps: f64) -> SparseFamily {
    let lambda = eps / 4.0;
    let mut layers = vec![vec![*q0]];
    loop {
        let mut next = Vec::new();
        for p in layers.last().unwrap() {
            let mp = median(psi, p);
            let thr = 2.0 * local_osc(psi, p, lambda);
            let mut stack = system.children(p);
            while let Some(r) = stack.pop() {
                if (median(psi, &r) - mp).abs() > thr {
                    next.push(r);
                } else {
                    stack.extend(system.children(&r));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by_key(|q| (q.generation, q.index));
        layers.push(next);
    }
    let exceptional = layers
        .iter()
        .enumerate()
        .map(|(m, layer)| {
            let next = layers.get(m + 1).map(|l| l.as_slice()).unwrap_or(&[]);
            layer
                .iter()
                .map(|q| q.nodes().filter(|&j| !next.iter().any(|c| c.contains(j))).collect())
                .collect()
        })
        .collect();
    SparseFamily { system: system.id, lambda, layers, exceptional }
}

/// Per-node check of |ψ − m_{Q₀}| ≤ m^#_{λ;Q₀}ψ + Σ_{Q∈𝒮} ω_λ(ψ;Q)𝒳_Q with
/// absolute slack. Returns the fraction of nodes of Q₀ where it holds and the
/// first violating node.
pub fn lerner_bound_fraction(
    psi: &[f64],
    system: &DyadicSystem,
    family: &SparseFamily,
    slack: f64,
) -> (f64, Option<usize>) {
    let q0 = *family.root();
    let m0 = median(psi, &q0);
    let lambda = family.lambda;
    let n = system.grid.n();
    let mut sparse_sum = vec![0.0; n];
    for q in family.cubes() {
        let w = local_osc(psi, q, lambda);
        q.nodes().for_each(|j| sparse_sum[j] += w);
    }
    // local oscillation of every cube of the system under Q₀, once
    let mut osc_max = vec![0.0f64; n];
    for k in q0.generation..=system.k_max {
        for q in system.generation(k).filter(|q| q.is_inside(&q0)) {
            let w = local_osc(psi, &q, lambda);
            q.nodes().for_each(|j| osc_max[j] = osc_max[j].max(w));
        }
    }
    let mut good = 0usize;
    let mut first_bad = None;
    for j in q0.nodes() {
        if (psi[j] - m0).abs() <= osc_max[j] + sparse_sum[j] + slack {
            good += 1;
        } else if first_bad.is_none() {
            first_bad = Some(j);
        }
    }
    (good as f64 / q0.len as f64, first_bad)
}

/// Calderón–Zygmund split ψ = g + Σ b_k over the Whitney cubes of {Mψ > λ}.
#[derive(Debug, Clone)]
pub struct CzSplit {
    pub good: Vec<num_complex::Complex64>,
    pub bad: Vec<(DyadicCube, Vec<num_complex::Complex64>)>,
    pub omega: Vec<bool>,
}

pub fn cz_split(psi: &BoundaryFunction, lambda: f64, system: &DyadicSystem, r: f64) -> Result<CzSplit> {
    let m = hl_maximal(psi);
    let omega: Vec<bool> = m.iter().map(|&v| v > lambda).collect();
    if omega.iter().all(|&b| b) {
        return Err(Error::Domain(format!("{{Mψ > {lambda}}} is the whole circle; choose a larger λ")));
    }
    let cover = whitney_cover(&omega, system, r)?;
    let s = psi.samples();
    let mut good = s.to_vec();
    let mut bad = Vec::new();
    for q in cover.all_cubes() {
        let avg = q.nodes().map(|j| s[j]).sum::<num_complex::Complex64>() / q.len as f64;
        let mut b = vec![num_complex::Complex64::new(0.0, 0.0); s.len()];
        for j in q.nodes() {
            good[j] = avg;
            b[j] = s[j] - avg;
        }
        bad.push((*q, b));
    }
    Ok(CzSplit { good, bad, omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn systems(n: usize, k: usize) -> Vec<DyadicSystem> {
        build_adjacent_systems(GridCircle::new(n).unwrap(), k).unwrap()
    }

    #[test]
    fn generation_zero_is_circle() {
        let s = systems(64, 6);
        let r = s[0].root();
        assert_eq!((r.len, r.center), (64, 0));
        assert!(build_adjacent_systems(GridCircle::new(64).unwrap(), 7).is_err());
    }

    #[test]
    fn properties_hold_at_256() {
        for k in [5, 8] {
            for c in verify_systems(&systems(256, k)) {
                assert!(c.pass, "k_max={k}: {} — {}", c.name, c.detail);
            }
        }
    }

    #[test]
    fn median_examples() {
        let s = systems(64, 6);
        let q = s[2].cube(3, 0); // 8 nodes starting at 0
        let psi: Vec<f64> = (0..64).map(|j| j as f64).collect();
        assert_eq!(median(&psi, &q), 3.0);
        let cst = vec![2.5; 64];
        assert_eq!(median(&cst, &q), 2.5);
    }

    #[test]
    fn median_defining_inequalities_and_rearrangement_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = systems(64, 6);
        for _ in 0..100 {
            let psi: Vec<f64> = (0..64).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let q = s[rng.gen_range(0..3)].cube(rng.gen_range(0..4), 0);
            let m = median(&psi, &q);
            let above = q.nodes().filter(|&j| psi[j] > m).count();
            let below = q.nodes().filter(|&j| psi[j] < m).count();
            assert!(2 * above <= q.len && 2 * below <= q.len);
            let restricted: Vec<f64> = q.nodes().map(|j| psi[j]).collect();
            // node atoms: the bound holds at the left limit t → |Q|/2⁻
            let t = (q.len as f64 - 1.0) / 2.0 / 64.0;
            assert!(m.abs() <= rearrangement(&restricted, 64, t));
        }
    }

    #[test]
    fn rearrangement_of_indicator_and_level_sets() {
        let vals: Vec<f64> = (0..32).map(|j| if j < 5 { 1.0 } else { 0.0 }).collect();
        assert_eq!(rearrangement(&vals, 32, 4.0 / 32.0), 1.0);
        assert_eq!(rearrangement(&vals, 32, 5.0 / 32.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..32).map(|_| rng.gen_range(0..6) as f64).collect();
        for lam in [0.5, 1.5, 2.5, 4.5] {
            let lhs = v.iter().filter(|&&x| x > lam).count() as f64 / 32.0;
            // |{t : ψ*(t) > λ}| via a fine t-grid on node boundaries
            let rhs = (0..32).filter(|&i| rearrangement(&v, 32, i as f64 / 32.0) > lam).count() as f64 / 32.0;
            assert_eq!(lhs, rhs);
            let mut prev = f64::INFINITY;
            for i in 0..40 {
                let x = rearrangement(&v, 32, i as f64 / 32.0);
                assert!(x <= prev);
                prev = x;
            }
        }
    }

    #[test]
    fn local_osc_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = systems(64, 6);
        for _ in 0..50 {
            let psi: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = s[rng.gen_range(0..3)].cube(rng.gen_range(1..4), rng.gen_range(0..2));
            let lambda = rng.gen_range(0.05..0.6);
            let ours = local_osc(&psi, &q, lambda);
            // candidates: node values and midpoints
            let vals: Vec<f64> = q.nodes().map(|j| psi[j]).collect();
            let mut cands = vals.clone();
            for a in &vals {
                for b in &vals {
                    cands.push(0.5 * (a + b));
                }
            }
            let brute = cands
                .iter()
                .map(|c| {
                    let dev: Vec<f64> = vals.iter().map(|v| v - c).collect();
                    rearrangement(&dev, 64, lambda * q.measure())
                })
                .fold(f64::INFINITY, f64::min);
            assert!((ours - brute).abs() < 1e-14, "{ours} vs {brute}");
        }
    }

    #[test]
    fn local_osc_examples() {
        let s = systems(64, 6);
        let q = s[2].cube(2, 1);
        assert_eq!(local_osc(&vec![4.0; 64], &q, 0.3), 0.0);
        // indicator on at most λ|Q| nodes is absorbed
        let mut psi = vec![0.0; 64];
        psi[q.start] = 1.0;
        psi[q.start + 1] = 1.0;
        assert_eq!(local_osc(&psi, &q, 0.125), 0.0);
    }

    #[test]
    fn sharp_maximal_spike_chain() {
        let s = systems(64, 6);
        let mut psi = vec![0.0; 64];
        psi[10] = 5.0;
        let q0 = s[2].root();
        for j in 0..64 {
            let v = sharp_maximal(&psi, &s[2], &q0, 0.125, j).unwrap();
            let brute = s[2].chain(&q0, j).iter().map(|q| local_osc(&psi, q, 0.125)).fold(0.0, f64::max);
            assert_eq!(v, brute);
        }
        assert_eq!(sharp_maximal(&vec![1.0; 64], &s[2], &q0, 0.125, 3).unwrap(), 0.0);
        let sub = s[2].cube(2, 0);
        assert!(sharp_maximal(&psi, &s[2], &sub, 0.125, 40).is_err());
    }

    #[test]
    fn sparse_family_constant_and_jump() {
        let s = systems(256, 8);
        let q0 = s[2].root();
        let fam = build_sparse_family(&vec![1.0; 256], &s[2], &q0, 0.5);
        assert_eq!(fam.layers.len(), 1);
        assert!(fam.verify_sparsity().is_ok());
        let jump: Vec<f64> = (0..256).map(|j| if j < 77 { 0.0 } else { 3.0 }).collect();
        let fam = build_sparse_family(&jump, &s[2], &q0, 0.5);
        fam.verify_sparsity().unwrap();
        let (frac, bad) = lerner_bound_fraction(&jump, &s[2], &fam, 1e-9);
        assert_eq!(frac, 1.0, "first violation at {bad:?}");
    }

    #[test]
    fn whitney_examples() {
        let g = GridCircle::new(1024).unwrap();
        let s = build_adjacent_systems(g, 10).unwrap();
        // a single far-from-complement arc
        let omega: Vec<bool> = (0..1024).map(|j| (100..612).contains(&j)).collect();
        let cover = whitney_cover(&omega, &s[2], 8.0).unwrap();
        let mut hits = vec![0; 1024];
        for q in cover.all_cubes() {
            q.nodes().for_each(|j| hits[j] += 1);
        }
        assert!(hits.iter().zip(&omega).all(|(&h, &o)| h == usize::from(o)));
        for q in &cover.cubes {
            assert!(q.dilated_ball(&g, 8.0).nodes().all(|j| omega[j]));
            let parent = s[2].cube_of(q.generation - 1, q.start);
            assert!(!parent.dilated_ball(&g, 8.0).nodes().all(|j| omega[j]) || parent.dilated_ball(&g, 8.0).is_full());
        }
        assert!(cover.overlap(&g) <= 40);
        // complement of one node
        let omega: Vec<bool> = (0..1024).map(|j| j != 500).collect();
        let cover = whitney_cover(&omega, &s[0], 8.0).unwrap();
        let total: usize = cover.all_cubes().map(|q| q.len).sum();
        assert_eq!(total, 1023);
        assert!(whitney_cover(&vec![false; 1024], &s[0], 8.0).unwrap().cubes.is_empty());
    }

    #[test]
    fn cz_reconstruction() {
        let g = GridCircle::new(256).unwrap();
        let s = build_adjacent_systems(g, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vals: Vec<f64> = (0..256).map(|_| rng_val(&mut rng)).collect();
        let psi = BoundaryFunction::from_real(g, &vals).unwrap();
        let avg: f64 = psi.abs().iter().sum::<f64>() / 256.0;
        let split = cz_split(&psi, 3.0 * avg, &s[1], 2.0).unwrap();
        for j in 0..256 {
            let total = split.good[j] + split.bad.iter().map(|(_, b)| b[j]).sum::<num_complex::Complex64>();
            assert!((total - psi.samples()[j]).norm() < 1e-12);
        }
        for (q, b) in &split.bad {
            let mean: num_complex::Complex64 = b.iter().sum();
            assert!(mean.norm() < 1e-12);
            let l1: f64 = b.iter().map(|z| z.norm()).sum();
            let local: f64 = q.nodes().map(|j| psi.samples()[j].norm()).sum();
            assert!(l1 <= 2.0 * local + 1e-12);
        }
        let cst = BoundaryFunction::from_fn(g, |_| num_complex::Complex64::new(1.0, 0.0));
        let split = cz_split(&cst, 2.0, &s[1], 2.0).unwrap();
        assert!(split.bad.is_empty());
    }

    #[test]
    fn sparse_bound_on_piecewise_smooth() {
        let s = systems(1024, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for trial in 0..6 {
            let breaks: Vec<usize> = (0..5).map(|_| rng.gen_range(0..1024)).collect();
            let coef: Vec<(f64, f64)> = (0..6).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0))).collect();
            let psi: Vec<f64> = (0..1024)
                .map(|j| {
                    let piece = breaks.iter().filter(|&&b| j >= b).count();
                    let (a, b) = coef[piece];
                    a + b * (j as f64 / 1024.0 * 6.0).sin()
                })
                .collect();
            let sys = &s[trial % 3];
            let fam = build_sparse_family(&psi, sys, &sys.root(), 0.5);
            fam.verify_sparsity().unwrap();
            let (frac, _) = lerner_bound_fraction(&psi, sys, &fam, 1e-9);
            assert!(frac >= 0.99, "trial {trial}: {frac}");
        }
    }

    fn rng_val(rng: &mut ChaCha8Rng) -> f64 {
        let x: f64 = rng.gen();
        if x < 0.05 {
            50.0 * x
        } else {
            x * 0.1
        }
    }
}
