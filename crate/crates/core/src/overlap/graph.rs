//! The overlap multigraph, its coincidence split and sink pruning.

use super::{OverlapError, PREFILTER_SLACK};
use crate::model::Validated;
use crate::numeric::{norm, FVec, QVec};
use crate::spectral::WeightedDigraph;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

/// Overlap class in flattened coordinates: a tile of colour `i` at `y`
/// against a tile of colour `j` at `x`, with `z = y − x` after removing the
/// return vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OverlapKey {
    pub i: usize,
    pub j: usize,
    pub z: QVec,
}

impl OverlapKey {
    pub fn is_coincidence(&self) -> bool {
        self.i == self.j && self.z.is_zero()
    }
}

/// Overlap class `(i, z, j)` with exact offset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OverlapClass {
    pub i: usize,
    pub z: FVec,
    pub j: usize,
}

impl OverlapClass {
    pub fn key(&self) -> Result<OverlapKey, OverlapError> {
        Ok(OverlapKey {
            i: self.i,
            j: self.j,
            z: QVec::from_rationals(&self.z.flat_coeffs()).ok_or(OverlapError::Overflow)?,
        })
    }

    pub fn from_key(v: &Validated, k: &OverlapKey) -> Self {
        OverlapClass {
            i: k.i,
            z: FVec::from_flat(&v.model.field, &k.z.to_rationals()),
            j: k.j,
        }
    }

    pub fn is_coincidence(&self) -> bool {
        self.i == self.j && self.z.is_zero()
    }
}

struct Entry {
    k: usize,
    l: usize,
    diff: QVec,
    real: Vec<f64>,
    count: u64,
}

/// For each `(i, j)`: the aggregated differences `d − d′`, `d ∈ D_ki`,
/// `d′ ∈ D_lj`, with their multiplicities.
pub struct EdgeTable {
    cells: Vec<Vec<Vec<Entry>>>,
}

impl EdgeTable {
    pub fn new(v: &Validated) -> Result<Self, OverlapError> {
        let flat = &v.flat;
        let m = flat.m;
        let mut cells = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                let mut agg: BTreeMap<(usize, usize, QVec), u64> = BTreeMap::new();
                for k in 0..m {
                    for l in 0..m {
                        for d in &flat.digits[k][i] {
                            for e in &flat.digits[l][j] {
                                let diff = d.checked_sub(e).ok_or(OverlapError::Overflow)?;
                                *agg.entry((k, l, diff)).or_insert(0) += 1;
                            }
                        }
                    }
                }
                row.push(
                    agg.into_iter()
                        .map(|((k, l, diff), count)| Entry {
                            k,
                            l,
                            real: v.realizer.realize_qvec(&diff),
                            diff,
                            count,
                        })
                        .collect(),
                );
            }
            cells.push(row);
        }
        Ok(EdgeTable { cells })
    }

    /// Successors of `key` admitted by `admit`, with multiplicities, in
    /// table order.
    pub fn expand(&self, v: &Validated, key: &OverlapKey, admit: f64) -> Result<Vec<(OverlapKey, u64)>, OverlapError> {
        let qz = v.flat.q.checked_mul_vec(&key.z).ok_or(OverlapError::Overflow)?;
        let rq = v.realizer.realize_qvec(&qz);
        let slack = admit * (1.0 + PREFILTER_SLACK) + PREFILTER_SLACK;
        let mut out = Vec::new();
        for e in &self.cells[key.i][key.j] {
            let approx = norm(&rq.iter().zip(&e.real).map(|(a, b)| a + b).collect::<Vec<_>>());
            if approx > slack {
                continue;
            }
            let z = qz.checked_add(&e.diff).ok_or(OverlapError::Overflow)?;
            if v.realizer.norm_qvec(&z) <= admit {
                out.push((OverlapKey { i: e.k, j: e.l, z }, e.count));
            }
        }
        Ok(out)
    }
}

/// Successors `(k, Q·z + d − d′, l)` of one class within `admit`.
pub fn edge_expand(v: &Validated, class: &OverlapClass, admit: f64) -> Result<Vec<(OverlapClass, u64)>, OverlapError> {
    let table = EdgeTable::new(v)?;
    Ok(table
        .expand(v, &class.key()?, admit)?
        .into_iter()
        .map(|(k, w)| (OverlapClass::from_key(v, &k), w))
        .collect())
}

/// The closed overlap multigraph, vertices in canonical key order.
#[derive(Clone, Debug)]
pub struct OverlapGraph {
    pub keys: Vec<OverlapKey>,
    pub graph: WeightedDigraph,
    pub seeds: Vec<bool>,
    pub admit: f64,
}

impl OverlapGraph {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn index_of(&self, key: &OverlapKey) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }

    pub fn class(&self, v: &Validated, idx: usize) -> OverlapClass {
        OverlapClass::from_key(v, &self.keys[idx])
    }

    pub fn coincidences(&self) -> Vec<bool> {
        self.keys.iter().map(OverlapKey::is_coincidence).collect()
    }
}

/// Breadth-first closure of the seeds under [`EdgeTable::expand`].
pub fn build_graph(v: &Validated, seeds: &BTreeSet<OverlapKey>, admit: f64, max_vertices: usize) -> Result<OverlapGraph, OverlapError> {
    let table = EdgeTable::new(v)?;
    let mut index: HashMap<Arc<OverlapKey>, usize> = HashMap::new();
    let mut keys: Vec<Arc<OverlapKey>> = Vec::new();
    for s in seeds {
        let s = Arc::new(s.clone());
        index.insert(s.clone(), keys.len());
        keys.push(s);
    }
    if keys.len() > max_vertices {
        return Err(OverlapError::CapExceeded {
            what: "overlap vertices",
            limit: max_vertices,
        });
    }
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    let mut frontier: Vec<usize> = (0..keys.len()).collect();
    while !frontier.is_empty() {
        let expanded: Vec<Vec<(OverlapKey, u64)>> = frontier
            .par_iter()
            .map(|&a| table.expand(v, &keys[a], admit))
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for (&a, succ) in frontier.iter().zip(expanded) {
            for (key, w) in succ {
                let b = match index.get(&key) {
                    Some(&b) => b,
                    None => {
                        let b = keys.len();
                        if b >= max_vertices {
                            return Err(OverlapError::CapExceeded {
                                what: "overlap vertices",
                                limit: max_vertices,
                            });
                        }
                        let key = Arc::new(key);
                        index.insert(key.clone(), b);
                        keys.push(key);
                        next.push(b);
                        b
                    }
                };
                edges.push((a, b, w));
            }
        }
        frontier = next;
    }
    drop(index);
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut rank = vec![0; keys.len()];
    for (r, &old) in order.iter().enumerate() {
        rank[old] = r;
    }
    let graph = WeightedDigraph::from_edges(keys.len(), edges.into_iter().map(|(a, b, w)| (rank[a], rank[b], w)));
    let sorted: Vec<OverlapKey> = order.iter().map(|&o| (*keys[o]).clone()).collect();
    let seed_mask = sorted.iter().map(|k| seeds.contains(k)).collect();
    Ok(OverlapGraph {
        keys: sorted,
        graph,
        seeds: seed_mask,
        admit,
    })
}

/// Vertices of the overlap graph separated by whether they reach a
/// coincidence.
#[derive(Clone, Debug)]
pub struct Split {
    /// `true` for vertices of `G_coin`.
    pub coin: Vec<bool>,
    pub g_coin: WeightedDigraph,
    pub coin_index: Vec<usize>,
    pub g_res: WeightedDigraph,
    pub res_index: Vec<usize>,
}

/// `G_coin` is the set of vertices with a path to some `(i, 0, i)`; `G_res`
/// is the rest.
pub fn split_graph(g: &OverlapGraph) -> Split {
    let n = g.len();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b, _) in g.graph.edges() {
        rev[b].push(a);
    }
    let mut coin = g.coincidences();
    let mut stack: Vec<usize> = (0..n).filter(|&v| coin[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !coin[u] {
                coin[u] = true;
                stack.push(u);
            }
        }
    }
    let (g_coin, coin_index) = g.graph.induced(&coin);
    let res: Vec<bool> = coin.iter().map(|c| !c).collect();
    let (g_res, res_index) = g.graph.induced(&res);
    Split {
        coin,
        g_coin,
        coin_index,
        g_res,
        res_index,
    }
}

/// Repeatedly drops vertices without successors among the kept ones;
/// `protected` vertices are never dropped. Returns the kept mask.
pub fn prune_sinks(g: &WeightedDigraph, protected: &[bool]) -> Vec<bool> {
    let n = g.len();
    let mut keep = vec![true; n];
    let mut out_deg: Vec<usize> = (0..n).map(|v| g.successors(v).len()).collect();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b, _) in g.edges() {
        rev[b].push(a);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| out_deg[v] == 0 && !protected[v]).collect();
    while let Some(v) = stack.pop() {
        if !keep[v] {
            continue;
        }
        keep[v] = false;
        for &u in &rev[v] {
            out_deg[u] -= 1;
            if out_deg[u] == 0 && keep[u] && !protected[u] {
                stack.push(u);
            }
        }
    }
    keep
}
