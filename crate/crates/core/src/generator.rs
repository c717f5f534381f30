//! Seeded random adapter graphs for property tests and experiments.
//!
//! Randomness comes from SplitMix64 (Steele, Lea and Flood, 2014):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! with wrapping 64-bit arithmetic. A draw below `n` is `(z * n) >> 64`
//! computed in 128 bits, and a unit float is `(z >> 11) * 2^-53`. The draw
//! sequence is fixed by [`random_instance`]'s documented order, so the same
//! parameters produce the same graph on every platform.

use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Adapter, AdapterGraph, DependencyEntry, Interface, MAX_DOMAIN_SIZE};
use crate::search::WeightMap;

/// Upper bound on dependency-table rows per generated adapter.
pub const MAX_GENERATED_ROWS: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn in_range(&mut self, range: &RangeInclusive<usize>) -> usize {
        let span = (range.end() - range.start()) as u64 + 1;
        range.start() + self.below(span) as usize
    }

    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub interface_count: usize,
    pub methods_per_interface: RangeInclusive<usize>,
    /// Non-bottom values per method.
    pub values_per_method: RangeInclusive<usize>,
    pub adapter_count: usize,
    /// Probability that an input tuple gets an explicit (random) entry.
    pub entry_density: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.interface_count == 0 {
            return bad("interface_count must be at least 1");
        }
        if self.methods_per_interface.is_empty() || *self.methods_per_interface.start() == 0 {
            return bad("methods_per_interface must be a nonempty range starting at 1 or more");
        }
        if self.values_per_method.is_empty() || *self.values_per_method.start() == 0 {
            return bad("values_per_method must be a nonempty range starting at 1 or more");
        }
        if *self.values_per_method.end() + 1 > MAX_DOMAIN_SIZE {
            return bad("values_per_method exceeds the supported domain size");
        }
        if !(0.0..=1.0).contains(&self.entry_density) {
            return bad("entry_density must lie in [0, 1]");
        }
        let lifted = (*self.values_per_method.end() + 1) as u64;
        let rows = u32::try_from(*self.methods_per_interface.end())
            .ok()
            .and_then(|m| lifted.checked_pow(m));
        if rows.is_none_or(|r| r > MAX_GENERATED_ROWS) {
            return bad("dependency tables would exceed 2^20 rows");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub graph: AdapterGraph,
    /// Suggested query endpoints; distinct when there are two or more interfaces.
    pub source: String,
    pub target: String,
}

fn padded(prefix: char, index: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len();
    format!("{prefix}{index:0width$}")
}

/// Generates an instance. Draw order:
///
/// 1. per interface `I…`: method count, then per method `m…` its value count
///    (values are named `v0`, `v1`, …);
/// 2. per adapter `A…`: source index, target index, then for each source
///    input tuple in canonical order a density draw and, when it hits, one
///    nonempty random subset of each target method's lifted domain;
/// 3. suggested target, then suggested source (distinct from the target).
pub fn random_instance(params: &GenParams) -> Result<GeneratedInstance> {
    params.validate()?;
    let mut rng = SplitMix64::new(params.seed);

    let mut interfaces = Vec::with_capacity(params.interface_count);
    for i in 0..params.interface_count {
        let method_count = rng.in_range(&params.methods_per_interface);
        let methods: Vec<(String, Vec<String>)> = (0..method_count)
            .map(|j| {
                let values = rng.in_range(&params.values_per_method);
                (format!("m{j}"), (0..values).map(|k| format!("v{k}")).collect())
            })
            .collect();
        interfaces.push(Arc::new(Interface::new(
            padded('I', i, params.interface_count),
            methods,
        )?));
    }

    let n = interfaces.len() as u64;
    let mut adapters = Vec::with_capacity(params.adapter_count);
    for a in 0..params.adapter_count {
        let source = interfaces[rng.below(n) as usize].clone();
        let target = interfaces[rng.below(n) as usize].clone();
        let id = padded('A', a, params.adapter_count);
        adapters.push(random_adapter(&mut rng, id, source, target, params.entry_density)?);
    }

    let target = rng.below(n) as usize;
    let source = if n >= 2 {
        (target + 1 + rng.below(n - 1) as usize) % n as usize
    } else {
        target
    };
    let source = interfaces[source].id().to_string();
    let target = interfaces[target].id().to_string();
    let graph = AdapterGraph::new(interfaces, adapters)?;
    Ok(GeneratedInstance {
        graph,
        source,
        target,
    })
}

/// Random adapter between two interfaces; see [`random_instance`] for the draws.
pub fn random_adapter(
    rng: &mut SplitMix64,
    id: String,
    source: Arc<Interface>,
    target: Arc<Interface>,
    density: f64,
) -> Result<Adapter> {
    let sizes: Vec<usize> = source.domain_sizes().collect();
    let mut tuple = vec![0usize; sizes.len()];
    let mut entries = Vec::new();
    'tuples: loop {
        if rng.chance(density) {
            let input = source
                .methods()
                .iter()
                .zip(&tuple)
                .map(|(m, &i)| m.domain().name(i as u8).to_string())
                .collect();
            let output = target
                .methods()
                .iter()
                .map(|m| {
                    let d = m.domain().len();
                    let full = if d >= 64 { u64::MAX } else { (1u64 << d) - 1 };
                    let bits = rng.below(full) + 1;
                    let set = crate::model::ValueSet::from_bits(bits);
                    m.domain().names(set).into_iter().map(str::to_string).collect()
                })
                .collect();
            entries.push(DependencyEntry { input, output });
        }
        for k in (0..tuple.len()).rev() {
            tuple[k] += 1;
            if tuple[k] < sizes[k] {
                continue 'tuples;
            }
            tuple[k] = 0;
        }
        break;
    }
    let no_default: Option<&[Vec<String>]> = None;
    Adapter::new(id, source, target, entries, no_default)
}

/// Random weights drawn from {0, 0.5, 1, 1.5, 2, 3} for every non-bottom
/// value of every interface, in id/method/canonical order.
pub fn random_weights(graph: &AdapterGraph, seed: u64) -> WeightMap {
    const CHOICES: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];
    let mut rng = SplitMix64::new(seed);
    let mut weights = WeightMap::unit();
    for interface in graph.interfaces() {
        for method in interface.methods() {
            for value in method.domain().values().iter().skip(1) {
                let w = CHOICES[rng.below(CHOICES.len() as u64) as usize];
                weights
                    .set(interface.id(), method.name(), value.name(), w)
                    .expect("generated weights are valid");
            }
        }
    }
    weights
}
