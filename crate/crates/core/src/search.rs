//! Loss-optimal chain search.
//!
//! A chain is scored by adapting the full-capability vector of its source
//! interface through every adapter and summing the weights of the non-bottom
//! values that survive at the target. Prepending an adapter can never raise
//! that score, so a best-first search that grows chains backward from the
//! target returns an optimal chain the first time it pops one that starts at
//! an acceptable source.
//!
//! [`oracle_optimal`] is an exhaustive cross-check built on
//! [`enumerate_chains`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{AdapterGraph, Interface, BOTTOM};
use crate::semantics::{AdaptationPipeline, AvailabilityVector};

/// Default cap on the number of chains the oracle will evaluate.
pub const DEFAULT_ORACLE_LIMIT: usize = 1_000_000;

/// Per-value weights keyed by `(interface, method, value)`.
///
/// Unlisted values weigh 1.0; `bot` always weighs 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightMap {
    weights: BTreeMap<(String, String, String), f64>,
}

impl WeightMap {
    pub fn unit() -> Self {
        WeightMap::default()
    }

    pub fn is_unit(&self) -> bool {
        self.weights.values().all(|w| *w == 1.0)
    }

    pub fn set(&mut self, interface: &str, method: &str, value: &str, weight: f64) -> Result<()> {
        let key = format!("{interface}.{method}.{value}");
        if value == BOTTOM {
            return Err(Error::InvalidWeight {
                key,
                reason: "the weight of bot is fixed at 0".into(),
            });
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight {
                key,
                reason: format!("{weight} is not a finite nonnegative number"),
            });
        }
        self.weights.insert(
            (interface.to_string(), method.to_string(), value.to_string()),
            weight,
        );
        Ok(())
    }

    pub fn weight(&self, interface: &str, method: &str, value: &str) -> f64 {
        if value == BOTTOM {
            return 0.0;
        }
        self.weights
            .get(&(interface.to_string(), method.to_string(), value.to_string()))
            .copied()
            .unwrap_or(1.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &str, f64)> {
        self.weights
            .iter()
            .map(|((i, m, v), w)| (i.as_str(), m.as_str(), v.as_str(), *w))
    }

    /// Parses `interface.method.value = weight` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = WeightMap::default();
        for (n, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let syntax = |message: String| Error::Syntax {
                line: n + 1,
                column: 1,
                message,
            };
            let (key, weight) = trimmed
                .split_once('=')
                .ok_or_else(|| syntax("expected `interface.method.value = weight`".into()))?;
            let parts: Vec<&str> = key.trim().split('.').collect();
            let [interface, method, value] = parts[..] else {
                return Err(syntax(format!("malformed key `{}`", key.trim())));
            };
            let weight: f64 = weight
                .trim()
                .parse()
                .map_err(|_| syntax(format!("malformed weight `{}`", weight.trim())))?;
            map.set(interface, method, value, weight)?;
        }
        Ok(map)
    }

    /// Rejects entries naming values that do not exist in `graph`.
    pub fn check(&self, graph: &AdapterGraph) -> Result<()> {
        for (interface, method, value, _) in self.iter() {
            let iface = graph.interface(interface)?;
            let spec = iface
                .method_index(method)
                .map(|i| &iface.methods()[i])
                .ok_or_else(|| Error::UnknownValue {
                    owner: interface.to_string(),
                    method: method.to_string(),
                    value: value.to_string(),
                })?;
            spec.value_index(interface, value)?;
        }
        Ok(())
    }

    /// Weighted count of the non-bottom values in `vector`.
    pub fn score(&self, interface: &Interface, vector: &AvailabilityVector) -> f64 {
        if self.weights.is_empty() {
            return vector.non_bottom_count() as f64;
        }
        let mut total = 0.0;
        for (method, set) in interface.methods().iter().zip(vector.components()) {
            for index in set.iter().filter(|&i| i != 0) {
                total += self.weight(interface.id(), method.name(), method.domain().name(index));
            }
        }
        total
    }
}

/// Weighted number of non-bottom values accepted at the end of `pipeline`
/// when its source offers full capability.
pub fn count_abstract(pipeline: &AdaptationPipeline, weights: &WeightMap) -> f64 {
    let (_, score) = evaluate(pipeline, weights);
    score
}

fn evaluate(pipeline: &AdaptationPipeline, weights: &WeightMap) -> (AvailabilityVector, f64) {
    let vector = pipeline
        .apply(&pipeline.from().full_vector())
        .expect("pipeline invariants guarantee matching interfaces");
    let score = weights.score(pipeline.to(), &vector);
    (vector, score)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub chain: Vec<String>,
    pub source: String,
    pub target: String,
    /// Image of the source's full-capability vector.
    pub final_vector: AvailabilityVector,
    pub score: f64,
}

impl ChainResult {
    fn from_pipeline(pipeline: &AdaptationPipeline, final_vector: AvailabilityVector, score: f64) -> Self {
        ChainResult {
            chain: pipeline.chain_ids(),
            source: pipeline.from().id().to_string(),
            target: pipeline.to().id().to_string(),
            final_vector,
            score,
        }
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    score: f64,
    ids: Vec<String>,
    pipeline: AdaptationPipeline,
    vector: AvailabilityVector,
}

impl Candidate {
    fn new(pipeline: AdaptationPipeline, weights: &WeightMap) -> Self {
        let (vector, score) = evaluate(&pipeline, weights);
        Candidate {
            score,
            ids: pipeline.chain_ids(),
            pipeline,
            vector,
        }
    }
}

// Max-heap order: higher score, then shorter chain, then smaller ids.
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.ids.len().cmp(&self.ids.len()))
            .then_with(|| other.ids.cmp(&self.ids))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

/// Open and discarded partial chains of a best-first search.
#[derive(Debug, Default)]
pub struct SearchFrontier {
    open: BinaryHeap<Candidate>,
    discarded: HashSet<Vec<String>>,
    seen: HashSet<Vec<String>>,
}

impl SearchFrontier {
    fn push(&mut self, candidate: Candidate) -> bool {
        if !self.seen.insert(candidate.ids.clone()) {
            return false;
        }
        self.open.push(candidate);
        true
    }

    fn pop_best(&mut self) -> Option<Candidate> {
        self.open.pop()
    }

    fn discard(&mut self, ids: Vec<String>) {
        self.discarded.insert(ids);
    }

    pub fn open_len(&self) -> usize {
        self.open.len()
    }

    pub fn discarded_len(&self) -> usize {
        self.discarded.len()
    }
}

fn resolve_sources<'g>(
    graph: &'g AdapterGraph,
    sources: &BTreeSet<String>,
    target: &str,
) -> Result<&'g Arc<Interface>> {
    if sources.is_empty() {
        return Err(Error::NoChain {
            sources: Vec::new(),
            target: target.to_string(),
        });
    }
    for source in sources {
        graph.interface(source)?;
    }
    graph.interface(target)
}

/// Greedy best-first chain construction from any of `sources` to `target`.
///
/// Returns a chain maximizing [`count_abstract`] over all acyclic chains.
/// When `target` is itself a source the empty chain is returned.
pub fn greedy_chain(
    graph: &AdapterGraph,
    sources: &BTreeSet<String>,
    target: &str,
    weights: &WeightMap,
) -> Result<ChainResult> {
    let target_iface = resolve_sources(graph, sources, target)?;
    let identity = AdaptationPipeline::identity(target_iface.clone());
    if sources.contains(target) {
        let start = Candidate::new(identity, weights);
        return Ok(ChainResult::from_pipeline(&start.pipeline, start.vector, start.score));
    }

    let mut frontier = SearchFrontier::default();
    frontier.push(Candidate::new(identity, weights));
    while let Some(best) = frontier.pop_best() {
        let head = best.pipeline.from().id();
        if !best.pipeline.is_empty() && sources.contains(head) {
            return Ok(ChainResult::from_pipeline(&best.pipeline, best.vector, best.score));
        }
        for edge in graph.adapters_into(head) {
            // self-loops and revisits surface as CycleDetected
            let Ok(extended) = best.pipeline.prepend(edge.clone()) else {
                continue;
            };
            frontier.push(Candidate::new(extended, weights));
        }
        frontier.discard(best.ids);
    }
    Err(Error::NoChain {
        sources: sources.iter().cloned().collect(),
        target: target.to_string(),
    })
}

/// Every acyclic chain from `source` to `target`, ordered by length and then
/// by adapter ids. `source == target` yields only the empty chain.
pub fn enumerate_chains(graph: &AdapterGraph, source: &str, target: &str) -> Result<Vec<Vec<String>>> {
    enumerate_chains_bounded(graph, source, target, usize::MAX)
}

/// Like [`enumerate_chains`], failing with `TooLarge` past `limit` chains.
pub fn enumerate_chains_bounded(
    graph: &AdapterGraph,
    source: &str,
    target: &str,
    limit: usize,
) -> Result<Vec<Vec<String>>> {
    graph.interface(source)?;
    graph.interface(target)?;
    let mut found = Vec::new();
    let mut suffix: Vec<String> = Vec::new();
    let mut on_path: Vec<String> = vec![target.to_string()];
    walk_backward(graph, source, target, &mut suffix, &mut on_path, &mut found, limit)?;
    for chain in &mut found {
        chain.reverse();
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(found)
}

fn walk_backward(
    graph: &AdapterGraph,
    source: &str,
    head: &str,
    suffix: &mut Vec<String>,
    on_path: &mut Vec<String>,
    found: &mut Vec<Vec<String>>,
    limit: usize,
) -> Result<()> {
    if head == source {
        if found.len() >= limit {
            return Err(Error::TooLarge { limit });
        }
        found.push(suffix.clone());
        return Ok(());
    }
    for edge in graph.adapters_into(head) {
        let prev = edge.source().id();
        if on_path.iter().any(|v| v == prev) {
            continue;
        }
        suffix.push(edge.id().to_string());
        on_path.push(prev.to_string());
        walk_backward(graph, source, prev, suffix, on_path, found, limit)?;
        on_path.pop();
        suffix.pop();
    }
    Ok(())
}

/// Builds the pipeline for a chain of adapter ids ending at `target`.
pub fn pipeline_for(graph: &AdapterGraph, target: &str, chain: &[String]) -> Result<AdaptationPipeline> {
    let mut pipeline = AdaptationPipeline::identity(graph.interface(target)?.clone());
    for id in chain.iter().rev() {
        pipeline = pipeline.prepend(graph.adapter(id)?.clone())?;
    }
    Ok(pipeline)
}

/// Exhaustive optimum: scores every acyclic chain from every source.
///
/// Ties go to the first chain in enumeration order (length, then ids).
pub fn oracle_optimal(
    graph: &AdapterGraph,
    sources: &BTreeSet<String>,
    target: &str,
    weights: &WeightMap,
    limit: usize,
) -> Result<ChainResult> {
    resolve_sources(graph, sources, target)?;
    let mut chains: Vec<(String, Vec<String>)> = Vec::new();
    for source in sources {
        let remaining = limit.saturating_sub(chains.len());
        let found = enumerate_chains_bounded(graph, source, target, remaining)
            .map_err(|e| match e {
                Error::TooLarge { .. } => Error::TooLarge { limit },
                other => other,
            })?;
        chains.extend(found.into_iter().map(|c| (source.clone(), c)));
    }
    chains.sort_by(|(_, a), (_, b)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut best: Option<ChainResult> = None;
    for (_, chain) in &chains {
        let pipeline = pipeline_for(graph, target, chain)?;
        let (vector, score) = evaluate(&pipeline, weights);
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(ChainResult::from_pipeline(&pipeline, vector, score));
        }
    }
    best.ok_or_else(|| Error::NoChain {
        sources: sources.iter().cloned().collect(),
        target: target.to_string(),
    })
}
