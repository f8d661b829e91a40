//! The full decision procedure and its report.

use crate::model::{
    fixed_seed, meyer_check, recenter, validate, MeyerStatus, SubstitutionModel, Validated, DEFAULT_MAX_POINTS,
    DEFAULT_RECENTER_DEPTH, DEFAULT_SEED_POWER_CAP,
};
use crate::overlap::{
    build_graph, overlap_radius, pair_closure, prune_sinks, seed_overlaps, split_graph, translation_basis, OverlapError,
    OverlapGraph, OverlapOptions, Split, DEFAULT_BASIS_CAP, DEFAULT_CLOSURE_CAP, DEFAULT_MAX_VERTICES,
};
use crate::spectral::{self, boundary_dimension, scc_summary, spectral_radius, ComponentSummary, Verdict};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Parse,
    Validate,
    Recenter,
    Seed,
    Radius,
    Basis,
    Closure,
    Seeds,
    Graph,
    Spectral,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Parse => "parse",
            Stage::Validate => "validate",
            Stage::Recenter => "recenter",
            Stage::Seed => "seed",
            Stage::Radius => "radius",
            Stage::Basis => "basis",
            Stage::Closure => "closure",
            Stage::Seeds => "seeds",
            Stage::Graph => "graph",
            Stage::Spectral => "spectral",
        }
    }

    /// Failures here are problems with the input itself.
    pub fn is_input(&self) -> bool {
        matches!(self, Stage::Parse | Stage::Validate)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, e: impl fmt::Display) -> Self {
        PipelineError {
            stage,
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub tol_verdict: Option<f64>,
    pub spectral_tol: f64,
    pub recenter: bool,
    pub recenter_depth: usize,
    pub seed_power_cap: usize,
    pub overlap: OverlapOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol_verdict: None,
            spectral_tol: spectral::DEFAULT_TOL,
            recenter: true,
            recenter_depth: DEFAULT_RECENTER_DEPTH,
            seed_power_cap: DEFAULT_SEED_POWER_CAP,
            overlap: OverlapOptions {
                max_vertices: DEFAULT_MAX_VERTICES,
                max_points: DEFAULT_MAX_POINTS,
                basis_cap: DEFAULT_BASIS_CAP,
                closure_cap: DEFAULT_CLOSURE_CAP,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub vertices: usize,
    pub edges: usize,
    pub g_coin_size: usize,
    pub g_res_size: usize,
    /// `G_res` after repeatedly removing sinks.
    pub g_res_pruned_size: usize,
    pub seeds: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchInfo {
    pub seed_period: usize,
    /// 1-based colour of the fixed seed.
    pub seed_colour: usize,
    pub seed_position: Vec<f64>,
    pub k: u32,
    pub inv_norm: f64,
    pub e_k: f64,
    pub radius: f64,
    pub delta: f64,
    pub closure_n: usize,
    pub witness_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub verdict: Verdict,
    pub rho_coin: Option<f64>,
    pub rho_res: Option<f64>,
    pub beta: f64,
    pub boundary_dim: Option<f64>,
    pub meyer: MeyerStatus,
    pub meyer_reason: String,
    pub counts: Counts,
    /// Realized translation vectors used for the seeds.
    pub basis: Vec<Vec<f64>>,
    pub search: SearchInfo,
    /// Strongly connected components of `G_res` with an internal edge.
    pub res_components: Vec<ComponentSummary>,
    pub caps_hit: Vec<String>,
    /// Wall-clock milliseconds per stage.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    /// JSON without timings, for reproducibility comparisons.
    pub fn to_json_stable(&self) -> String {
        let mut r = self.clone();
        r.timings.clear();
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering, one line per report field.
    pub fn to_text(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{k:<16} {v}\n"));
        line("name", self.name.clone());
        line("verdict", self.verdict.as_str().to_string());
        line("rho_coin", opt(self.rho_coin));
        line("rho_res", opt(self.rho_res));
        line("beta", format!("{:.6}", self.beta));
        line("boundary_dim", opt(self.boundary_dim));
        line("meyer", format!("{} ({})", self.meyer.as_str(), self.meyer_reason));
        let c = &self.counts;
        line(
            "counts",
            format!(
                "vertices {} edges {} g_coin {} g_res {} g_res_pruned {} seeds {}",
                c.vertices, c.edges, c.g_coin_size, c.g_res_size, c.g_res_pruned_size, c.seeds
            ),
        );
        let basis: Vec<String> = self
            .basis
            .iter()
            .map(|v| format!("({})", v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")))
            .collect();
        line("basis", basis.join(" "));
        let t = &self.search;
        line(
            "search",
            format!(
                "seed colour {} period {} k {} R {:.6} e_k {:.6} closure N {} witness {}",
                t.seed_colour, t.seed_period, t.k, t.radius, t.e_k, t.closure_n, t.witness_points
            ),
        );
        let comps: Vec<String> = self
            .res_components
            .iter()
            .map(|c| format!("{}:{:.6}", c.size, c.rho))
            .collect();
        line("res_components", comps.join(" "));
        line("caps_hit", self.caps_hit.join("; "));
        let times: Vec<String> = self.timings.iter().map(|(k, v)| format!("{k} {v:.1}ms")).collect();
        line("timings", times.join(", "));
        s
    }
}

/// Everything produced by a run, for export and inspection.
pub struct Outcome {
    pub report: Report,
    pub validated: Validated,
    pub graph: Option<OverlapGraph>,
    pub split: Option<Split>,
}

struct Clock {
    timings: BTreeMap<String, f64>,
    last: Instant,
}

impl Clock {
    fn new() -> Self {
        Clock {
            timings: BTreeMap::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: Stage) {
        let now = Instant::now();
        self.timings
            .insert(stage.as_str().to_string(), (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }
}

/// Turns a cap into a report entry; other errors abort the run.
fn capped<T>(stage: Stage, r: Result<T, OverlapError>, caps: &mut Vec<String>) -> Result<Option<T>, PipelineError> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(e) if e.is_cap() || matches!(e, OverlapError::NoClosure(_) | OverlapError::NoBasis { .. }) => {
            caps.push(format!("{stage}: {e}"));
            Ok(None)
        }
        Err(e) => Err(PipelineError::new(stage, e)),
    }
}

/// validate → recenter → fixed seed → radius → basis → pair closure →
/// seeds → graph → split → radii → verdict.
pub fn check(model: &SubstitutionModel, opts: &CheckOptions) -> Result<Outcome, PipelineError> {
    let mut clock = Clock::new();
    let v0 = validate(model).map_err(|e| PipelineError::new(Stage::Validate, e))?;
    let meyer = meyer_check(&v0);
    clock.lap(Stage::Validate);
    let v = if opts.recenter {
        let r = recenter(&v0, opts.recenter_depth, opts.overlap.max_points).map_err(|e| PipelineError::new(Stage::Recenter, e))?;
        validate(&r).map_err(|e| PipelineError::new(Stage::Recenter, e))?
    } else {
        v0
    };
    clock.lap(Stage::Recenter);
    let mut report = Report {
        name: model.name.clone(),
        verdict: Verdict::Unreliable,
        rho_coin: None,
        rho_res: None,
        beta: v.beta,
        boundary_dim: None,
        meyer: meyer.status,
        meyer_reason: meyer.reason.clone(),
        counts: Counts::default(),
        basis: Vec::new(),
        search: SearchInfo::default(),
        res_components: Vec::new(),
        caps_hit: Vec::new(),
        timings: BTreeMap::new(),
    };
    let mut caps = Vec::new();
    let (p, xi) = match fixed_seed(&v, opts.seed_power_cap, opts.overlap.max_points) {
        Ok(s) => s,
        Err(e) => {
            capped::<()>(Stage::Seed, Err(e.into()), &mut caps)?;
            return Ok(finish(report, caps, clock, opts.tol_verdict, v, None, None));
        }
    };
    report.search.seed_period = p;
    report.search.seed_colour = xi.colour + 1;
    report.search.seed_position = v.realizer.realize(&xi.pos);
    let xi = v
        .model
        .to_flat_point(&xi)
        .map_err(|e| PipelineError::new(Stage::Seed, e))?;
    clock.lap(Stage::Seed);

    let Some(radius) = capped(Stage::Radius, overlap_radius(&v, p, opts.overlap.max_points), &mut caps)? else {
        return Ok(finish(report, caps, clock, opts.tol_verdict, v, None, None));
    };
    report.search.k = radius.k;
    report.search.inv_norm = radius.inv_norm;
    report.search.e_k = radius.e_k;
    report.search.radius = radius.r;
    report.search.delta = radius.delta;
    clock.lap(Stage::Radius);

    let Some(basis) = capped(Stage::Basis, translation_basis(&v, p, &xi, &opts.overlap), &mut caps)? else {
        return Ok(finish(report, caps, clock, opts.tol_verdict, v, None, None));
    };
    report.basis = basis.vectors.iter().map(|a| v.realizer.realize_qvec(a)).collect();
    clock.lap(Stage::Basis);

    let bound = radius.r + radius.inv_norm * basis.max_norm(&v) + radius.delta;
    let Some(closure) = capped(
        Stage::Closure,
        pair_closure(&v, p, radius.k as usize, &xi, bound, &opts.overlap),
        &mut caps,
    )?
    else {
        return Ok(finish(report, caps, clock, opts.tol_verdict, v, None, None));
    };
    report.search.closure_n = closure.n;
    report.search.witness_points = closure.witness.len();
    clock.lap(Stage::Closure);

    let seeds = seed_overlaps(&v, &closure.witness, &basis.vectors, radius.admit())
        .map_err(|e| PipelineError::new(Stage::Seeds, e))?;
    report.counts.seeds = seeds.len();
    drop(closure);
    clock.lap(Stage::Seeds);

    let Some(graph) = capped(
        Stage::Graph,
        build_graph(&v, &seeds, radius.admit(), opts.overlap.max_vertices),
        &mut caps,
    )?
    else {
        return Ok(finish(report, caps, clock, opts.tol_verdict, v, None, None));
    };
    let split = split_graph(&graph);
    let pruned = prune_sinks(&split.g_res, &vec![false; split.g_res.len()]);
    let (g_res_pruned, _) = split.g_res.induced(&pruned);
    report.counts.vertices = graph.len();
    report.counts.edges = graph.graph.edge_count();
    report.counts.g_coin_size = split.g_coin.len();
    report.counts.g_res_size = split.g_res.len();
    report.counts.g_res_pruned_size = g_res_pruned.len();
    clock.lap(Stage::Graph);

    let tol = opts.spectral_tol;
    let radii = spectral_radius(&split.g_coin, tol)
        .and_then(|c| Ok((c, spectral_radius(&g_res_pruned, tol)?)))
        .and_then(|r| Ok((r, scc_summary(&g_res_pruned, tol)?)));
    match radii {
        Ok(((rho_coin, rho_res), comps)) => {
            report.rho_coin = Some(rho_coin);
            report.rho_res = Some(rho_res);
            report.res_components = comps;
        }
        Err(e) => caps.push(format!("{}: {e}", Stage::Spectral)),
    }
    clock.lap(Stage::Spectral);
    Ok(finish(report, caps, clock, opts.tol_verdict, v, Some(graph), Some(split)))
}

fn finish(
    mut report: Report,
    caps: Vec<String>,
    clock: Clock,
    tol_verdict: Option<f64>,
    v: Validated,
    graph: Option<OverlapGraph>,
    split: Option<Split>,
) -> Outcome {
    report.caps_hit = caps;
    report.timings = clock.timings;
    if let (Some(c), Some(r)) = (report.rho_coin, report.rho_res) {
        report.verdict = spectral::verdict(c, r, report.beta, report.meyer, !report.caps_hit.is_empty(), tol_verdict);
        if report.verdict == Verdict::PurePoint {
            report.boundary_dim = boundary_dimension(v.model.d(), r, report.beta).ok().flatten();
        }
    }
    Outcome {
        report,
        validated: v,
        graph,
        split,
    }
}
