//! Strongly connected components, Perron spectral radii of multiplicity
//! graphs, the pure point verdict, and the boundary dimension.

use crate::model::MeyerStatus;
use nalgebra::DMatrix;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100_000;
/// Components up to this size fall back to a dense eigenvalue solve when
/// power iteration stalls.
const DENSE_FALLBACK: usize = 600;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("power iteration did not converge; radius in [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },
    #[error("residual radius {rho_res} is not below beta {beta}")]
    DomainError { rho_res: f64, beta: f64 },
}

/// Directed multigraph with integer edge multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedDigraph {
    adj: Vec<Vec<(usize, u64)>>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph { adj: vec![Vec::new(); n] }
    }

    /// Builds from `(from, to, multiplicity)` triples; parallel entries add up.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
        for (a, b, w) in edges {
            if w > 0 {
                *acc[a].entry(b).or_insert(0) += w;
            }
        }
        WeightedDigraph {
            adj: acc.into_iter().map(|m| m.into_iter().collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn successors(&self, v: usize) -> &[(usize, u64)] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&(b, w)| (a, b, w)))
    }

    /// Subgraph induced on `keep`, with vertices renumbered in increasing
    /// original order. Returns the subgraph and the kept original indices.
    pub fn induced(&self, keep: &[bool]) -> (WeightedDigraph, Vec<usize>) {
        let old: Vec<usize> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &v) in old.iter().enumerate() {
            new_index[v] = i;
        }
        let adj = old
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|(b, _)| keep[*b])
                    .map(|&(b, w)| (new_index[b], w))
                    .collect()
            })
            .collect();
        (WeightedDigraph { adj }, old)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (a, b, w) in self.edges() {
            m[(a, b)] += w as f64;
        }
        m
    }
}

/// Strongly connected components (iterative Tarjan), each sorted, in
/// reverse topological order: a component appears before every component
/// that can reach it.
pub fn scc(g: &WeightedDigraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&(w, _)) = g.adj[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Cyclic period of a strongly connected subgraph given as a sorted
/// vertex list (0 for a singleton without loop).
fn period(g: &WeightedDigraph, comp: &[usize], member: &[bool]) -> u64 {
    let mut level: BTreeMap<usize, i64> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    level.insert(comp[0], 0);
    queue.push_back(comp[0]);
    let mut h: i64 = 0;
    while let Some(v) = queue.pop_front() {
        let lv = level[&v];
        for &(w, _) in &g.adj[v] {
            if !member[w] {
                continue;
            }
            match level.get(&w) {
                None => {
                    level.insert(w, lv + 1);
                    queue.push_back(w);
                }
                Some(&lw) => h = h.gcd(&(lv + 1 - lw).abs()),
            }
        }
    }
    h as u64
}

/// Perron value of the component `comp` (vertices sorted, strongly
/// connected). Iterates `A^h` with `h` the cyclic period so the iteration
/// matrix is a direct sum of primitive blocks, and brackets `ρ^h` by the
/// Collatz–Wielandt quotients.
pub fn component_radius(g: &WeightedDigraph, comp: &[usize], tol: f64) -> Result<f64, SpectralError> {
    if comp.len() == 1 {
        let v = comp[0];
        let w = g.adj[v].iter().filter(|(b, _)| *b == v).map(|(_, w)| *w).sum::<u64>();
        return Ok(w as f64);
    }
    let mut member = vec![false; g.len()];
    comp.iter().for_each(|&v| member[v] = true);
    let local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<(usize, f64)>> = comp
        .iter()
        .map(|&v| {
            g.adj[v]
                .iter()
                .filter(|(b, _)| member[*b])
                .map(|&(b, w)| (local[&b], w as f64))
                .collect()
        })
        .collect();
    let h = period(g, comp, &member).max(1);
    let n = comp.len();
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..MAX_ITERATIONS {
        let mut cur = x.clone();
        for _ in 0..h {
            for (i, row) in adj.iter().enumerate() {
                y[i] = row.iter().map(|&(j, w)| w * cur[j]).sum();
            }
            std::mem::swap(&mut cur, &mut y);
        }
        let (mut l, mut u) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = cur[i] / x[i];
            l = l.min(r);
            u = u.max(r);
        }
        lo = lo.max(l);
        hi = hi.min(u);
        let m = cur.iter().cloned().fold(0.0f64, f64::max);
        if !(m > 0.0 && m.is_finite()) {
            break;
        }
        x = cur.iter().map(|v| v / m).collect();
        if x.contains(&0.0) {
            break;
        }
        if hi - lo <= tol * lo {
            return Ok(((lo + hi) / 2.0).powf(1.0 / h as f64));
        }
    }
    if n <= DENSE_FALLBACK {
        let (sub, _) = g.induced(&member);
        let r = sub
            .to_dense()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        return Ok(r);
    }
    let e = 1.0 / h as f64;
    Err(SpectralError::NoConvergence {
        lo: lo.powf(e),
        hi: hi.powf(e),
    })
}

/// Maximum Perron value over the strongly connected components; 0 for an
/// empty or acyclic graph.
pub fn spectral_radius(g: &WeightedDigraph, tol: f64) -> Result<f64, SpectralError> {
    Ok(scc_summary(g, tol)?.iter().map(|c| c.rho).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub size: usize,
    pub rho: f64,
}

/// Size and Perron value of every component with at least one internal
/// edge, largest radius first (ties by size, then discovery order).
pub fn scc_summary(g: &WeightedDigraph, tol: f64) -> Result<Vec<ComponentSummary>, SpectralError> {
    let comps = scc(g);
    let radii: Result<Vec<f64>, SpectralError> = comps.par_iter().map(|c| component_radius(g, c, tol)).collect();
    let mut out: Vec<ComponentSummary> = comps
        .iter()
        .zip(radii?)
        .filter(|(c, r)| c.len() > 1 || *r > 0.0)
        .map(|(c, rho)| ComponentSummary { size: c.len(), rho })
        .collect();
    out.sort_by(|a, b| b.rho.total_cmp(&a.rho).then(b.size.cmp(&a.size)));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PurePoint,
    NotPurePoint,
    Unreliable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::PurePoint => "pure_point",
            Verdict::NotPurePoint => "not_pure_point",
            Verdict::Unreliable => "unreliable",
        }
    }
}

/// Default verdict tolerance, proportional to `β` so integer radii compare
/// exactly.
pub fn default_tol_verdict(beta: f64) -> f64 {
    1e-6 * beta
}

/// Raw comparison `ρ_coin > ρ_res + tol`.
pub fn raw_verdict(rho_coin: f64, rho_res: f64, tol_verdict: f64) -> bool {
    rho_coin > rho_res + tol_verdict
}

pub fn verdict(rho_coin: f64, rho_res: f64, beta: f64, meyer: MeyerStatus, caps_hit: bool, tol_verdict: Option<f64>) -> Verdict {
    if meyer != MeyerStatus::Yes || caps_hit {
        return Verdict::Unreliable;
    }
    let tol = tol_verdict.unwrap_or_else(|| default_tol_verdict(beta));
    if raw_verdict(rho_coin, rho_res, tol) {
        Verdict::PurePoint
    } else {
        Verdict::NotPurePoint
    }
}

/// `d·log ρ_res / log β`. `None` when `ρ_res < 1` (no infinite residual
/// growth to measure).
pub fn boundary_dimension(d: usize, rho_res: f64, beta: f64) -> Result<Option<f64>, SpectralError> {
    if rho_res >= beta || beta <= 1.0 {
        return Err(SpectralError::DomainError { rho_res, beta });
    }
    if rho_res < 1.0 {
        return Ok(None);
    }
    Ok(Some(d as f64 * rho_res.ln() / beta.ln()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub rho_coin: f64,
    pub rho_res: f64,
    pub beta: f64,
    pub verdict: Verdict,
    pub boundary_dim: Option<f64>,
    pub scc_summary: Vec<ComponentSummary>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_matrix() {
        let g = WeightedDigraph::from_edges(2, [(0, 0, 1), (0, 1, 1), (1, 0, 1)]);
        let r = spectral_radius(&g, DEFAULT_TOL).unwrap();
        assert!((r - 1.618_033_988_7).abs() < 1e-9);
    }

    #[test]
    fn self_loop_multiplicity() {
        let g = WeightedDigraph::from_edges(1, [(0, 0, 8)]);
        assert_eq!(spectral_radius(&g, DEFAULT_TOL).unwrap(), 8.0);
        assert_eq!(scc(&g), vec![vec![0]]);
    }

    #[test]
    fn chain_components() {
        let g = WeightedDigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]);
        assert_eq!(scc(&g), vec![vec![2], vec![1], vec![0]]);
        assert_eq!(spectral_radius(&g, DEFAULT_TOL).unwrap(), 0.0);
        assert!(spectral_radius(&WeightedDigraph::new(0), DEFAULT_TOL).unwrap() == 0.0);
    }

    #[test]
    fn long_cycle_is_periodic() {
        let n = 500;
        let g = WeightedDigraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 2)));
        let r = spectral_radius(&g, DEFAULT_TOL).unwrap();
        assert!((r - 2.0).abs() < 1e-9);
    }

    #[test]
    fn verdict_rules() {
        let y = MeyerStatus::Yes;
        assert_eq!(verdict(1.618, 1.0, 1.618, y, false, None), Verdict::PurePoint);
        assert_eq!(verdict(4.0, 4.0, 4.0, y, false, None), Verdict::NotPurePoint);
        assert_eq!(verdict(8.0, 4.0, 8.0, y, false, None), Verdict::PurePoint);
        assert_eq!(verdict(8.0, 4.0, 8.0, MeyerStatus::Unknown, false, None), Verdict::Unreliable);
        assert_eq!(verdict(8.0, 4.0, 8.0, y, true, None), Verdict::Unreliable);
    }

    #[test]
    fn dimensions() {
        let d = boundary_dimension(2, 1.3247, 1.4656).unwrap().unwrap();
        assert!((d - 1.4713).abs() < 1e-3);
        let d = boundary_dimension(2, 1.2207, 1.4013).unwrap().unwrap();
        assert!((d - 1.1824).abs() < 1e-3);
        let d = boundary_dimension(2, 1.8393, 2.6180).unwrap().unwrap();
        assert!((d - 1.2663).abs() < 1e-3);
        assert!(matches!(boundary_dimension(2, 4.0, 4.0), Err(SpectralError::DomainError { .. })));
        assert_eq!(boundary_dimension(1, 0.0, 2.0).unwrap(), None);
    }
}
