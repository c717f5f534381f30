//! Availability vectors, adaptation, pipeline composition and tabulation.
//!
//! An adapter's dependency function maps each tuple of single abstract values
//! over the source interface to a tuple of value sets over the target. Its
//! adaptation function lifts that to availability vectors:
//!
//! ```text
//! q = ⋃ { h(x) : x ∈ p₁ × p₂ × … × pₙ }      (componentwise union)
//! ```
//!
//! Pipelines are kept as adapter lists and evaluated on demand; explicit
//! tables are only built through [`tabulate_pipeline`], guarded by a cap,
//! because a table over `n` methods with lifted domain sizes `dᵢ` has
//! `∏ 2^dᵢ` rows.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::{Adapter, Interface, ValueSet};

/// Default row cap for [`tabulate_adaptation`].
pub const DEFAULT_TABULATE_CAP: u64 = 1 << 20;

/// One value set per method of an interface, each containing `bot`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AvailabilityVector {
    interface: String,
    components: Vec<ValueSet>,
}

impl AvailabilityVector {
    pub(crate) fn from_parts(interface: String, components: Vec<ValueSet>) -> Self {
        AvailabilityVector {
            interface,
            components,
        }
    }

    /// Builds a vector from raw sets, injecting `bot` and checking membership.
    pub fn new(interface: &Interface, components: Vec<ValueSet>) -> Result<Self> {
        if components.len() != interface.method_count() {
            return Err(Error::ArityMismatch {
                context: format!("vector over `{}`", interface.id()),
                expected: interface.method_count(),
                found: components.len(),
            });
        }
        let components = interface
            .methods()
            .iter()
            .zip(components)
            .map(|(method, set)| {
                let full = method.domain().full_set();
                if set.is_subset(full) {
                    Ok(set.with_bottom())
                } else {
                    let stray = ValueSet::from_bits(set.bits() & !full.bits());
                    Err(Error::UnknownValue {
                        owner: interface.id().to_string(),
                        method: method.name().to_string(),
                        value: format!("#{}", stray.iter().next().unwrap_or_default()),
                    })
                }
            })
            .collect::<Result<_>>()?;
        Ok(AvailabilityVector {
            interface: interface.id().to_string(),
            components,
        })
    }

    pub fn interface(&self) -> &str {
        &self.interface
    }

    pub fn components(&self) -> &[ValueSet] {
        &self.components
    }

    fn same_interface(&self, other: &AvailabilityVector) -> Result<()> {
        if self.interface == other.interface && self.components.len() == other.components.len() {
            Ok(())
        } else {
            Err(Error::InterfaceMismatch {
                expected: self.interface.clone(),
                found: other.interface.clone(),
            })
        }
    }

    /// Componentwise union.
    pub fn union(&self, other: &AvailabilityVector) -> Result<AvailabilityVector> {
        self.same_interface(other)?;
        Ok(AvailabilityVector {
            interface: self.interface.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.union(*b))
                .collect(),
        })
    }

    /// True iff every component is a subset of the matching one in `other`.
    pub fn is_subset(&self, other: &AvailabilityVector) -> Result<bool> {
        self.same_interface(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .all(|(a, b)| a.is_subset(*b)))
    }

    /// Number of non-bottom values across all components.
    pub fn non_bottom_count(&self) -> usize {
        self.components.iter().map(|c| c.len() - 1).sum()
    }

    /// Text form, e.g. `play:{bot,MP4} stop:{bot}`.
    pub fn render(&self, interface: &Interface) -> String {
        let mut out = String::new();
        for (i, (method, set)) in interface.methods().iter().zip(&self.components).enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(
                out,
                "{}:{{{}}}",
                method.name(),
                method.domain().names(*set).join(",")
            );
        }
        out
    }

    /// Value names per component, canonical order, `bot` included.
    pub fn names<'a>(&self, interface: &'a Interface) -> Vec<Vec<&'a str>> {
        interface
            .methods()
            .iter()
            .zip(&self.components)
            .map(|(method, set)| method.domain().names(*set))
            .collect()
    }
}

/// Applies an adapter's adaptation function to a vector over its source.
///
/// Performs one dependency lookup per tuple of the Cartesian product of `p`'s
/// components, stopping early once the result is saturated.
pub fn apply_adaptation(adapter: &Adapter, p: &AvailabilityVector) -> Result<AvailabilityVector> {
    let source = adapter.source();
    if p.interface != source.id() || p.components.len() != source.method_count() {
        return Err(Error::InterfaceMismatch {
            expected: source.id().to_string(),
            found: p.interface.clone(),
        });
    }
    let target = adapter.target();
    let full: Vec<ValueSet> = target.methods().iter().map(|m| m.domain().full_set()).collect();
    let axes: Vec<Vec<u8>> = p.components.iter().map(|c| c.with_bottom().iter().collect()).collect();

    let mut q = vec![ValueSet::BOTTOM; target.method_count()];
    let mut cursor = vec![0usize; axes.len()];
    let mut tuple: Vec<u8> = axes.iter().map(|axis| axis[0]).collect();
    loop {
        for (acc, set) in q.iter_mut().zip(adapter.lookup(&tuple)) {
            *acc = acc.union(*set);
        }
        if q == full {
            break;
        }
        // odometer step, last component fastest
        let mut k = axes.len();
        loop {
            if k == 0 {
                return Ok(AvailabilityVector::from_parts(target.id().to_string(), q));
            }
            k -= 1;
            cursor[k] += 1;
            if cursor[k] < axes[k].len() {
                tuple[k] = axes[k][cursor[k]];
                break;
            }
            cursor[k] = 0;
            tuple[k] = axes[k][0];
        }
    }
    Ok(AvailabilityVector::from_parts(target.id().to_string(), q))
}

/// A chain of adapters composed end to end, evaluated lazily.
///
/// The chain is ordered from `from` to `to`; an empty chain is the identity
/// at a single interface. No interface is visited twice.
#[derive(Debug, Clone)]
pub struct AdaptationPipeline {
    from: Arc<Interface>,
    to: Arc<Interface>,
    chain: Vec<Arc<Adapter>>,
}

impl AdaptationPipeline {
    pub fn identity(interface: Arc<Interface>) -> Self {
        AdaptationPipeline {
            from: interface.clone(),
            to: interface,
            chain: Vec::new(),
        }
    }

    pub fn single(adapter: Arc<Adapter>) -> Result<Self> {
        Self::identity(adapter.target().clone()).prepend(adapter)
    }

    pub fn from(&self) -> &Arc<Interface> {
        &self.from
    }

    pub fn to(&self) -> &Arc<Interface> {
        &self.to
    }

    pub fn adapters(&self) -> &[Arc<Adapter>] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn chain_ids(&self) -> Vec<String> {
        self.chain.iter().map(|a| a.id().to_string()).collect()
    }

    /// Interfaces along the chain, `from` first.
    pub fn interfaces(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.from.id()).chain(self.chain.iter().map(|a| a.target().id()))
    }

    pub fn visits(&self, interface: &str) -> bool {
        self.interfaces().any(|id| id == interface)
    }

    /// The pipeline computing `self ∘ f_adapter`.
    pub fn prepend(&self, adapter: Arc<Adapter>) -> Result<Self> {
        if adapter.target().id() != self.from.id() {
            return Err(Error::EndpointMismatch {
                adapter: adapter.id().to_string(),
                expected: self.from.id().to_string(),
                found: adapter.target().id().to_string(),
            });
        }
        if self.visits(adapter.source().id()) {
            return Err(Error::CycleDetected {
                adapter: adapter.id().to_string(),
                interface: adapter.source().id().to_string(),
            });
        }
        let mut chain = Vec::with_capacity(self.chain.len() + 1);
        chain.push(adapter.clone());
        chain.extend(self.chain.iter().cloned());
        Ok(AdaptationPipeline {
            from: adapter.source().clone(),
            to: self.to.clone(),
            chain,
        })
    }

    /// The pipeline computing `next ∘ self`.
    pub fn then(&self, next: &AdaptationPipeline) -> Result<Self> {
        let mut composed = next.clone();
        for adapter in self.chain.iter().rev() {
            composed = composed.prepend(adapter.clone())?;
        }
        if self.chain.is_empty() && self.from.id() != next.from.id() {
            return Err(Error::EndpointMismatch {
                adapter: "<identity>".to_string(),
                expected: next.from.id().to_string(),
                found: self.from.id().to_string(),
            });
        }
        Ok(composed)
    }

    /// Folds the adaptation functions along the chain.
    pub fn apply(&self, p: &AvailabilityVector) -> Result<AvailabilityVector> {
        if p.interface != self.from.id() {
            return Err(Error::InterfaceMismatch {
                expected: self.from.id().to_string(),
                found: p.interface.clone(),
            });
        }
        self.chain
            .iter()
            .try_fold(p.clone(), |v, adapter| apply_adaptation(adapter, &v))
    }
}

/// Exact sizes of an adapter's dependency and adaptation functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSizes {
    /// `∏ dᵢ` over the source's lifted domain sizes.
    pub dependency: BigUint,
    /// `∏ 2^dᵢ`.
    pub adaptation: BigUint,
}

impl FunctionSizes {
    pub fn of(source: &Interface) -> Self {
        let mut dependency = BigUint::from(1u32);
        let mut exponent = 0u64;
        for d in source.domain_sizes() {
            dependency *= d as u64;
            exponent += d as u64;
        }
        FunctionSizes {
            dependency,
            adaptation: BigUint::from(1u32) << exponent,
        }
    }
}

pub fn function_sizes(adapter: &Adapter) -> FunctionSizes {
    FunctionSizes::of(adapter.source())
}

/// An adaptation function materialized as an explicit table.
///
/// Keys are the bot-normalized vectors over `from`, stored implicitly in
/// mixed-radix order (last method fastest). Raw keys that differ only in the
/// presence of `bot` collapse onto one row, so [`row_count`] reports the raw
/// `∏ 2^dᵢ` while [`distinct_rows`] reports `∏ 2^(dᵢ-1)`.
///
/// [`row_count`]: TabulatedAdaptation::row_count
/// [`distinct_rows`]: TabulatedAdaptation::distinct_rows
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedAdaptation {
    chain: Vec<String>,
    from: Arc<Interface>,
    to: Arc<Interface>,
    rows: Vec<AvailabilityVector>,
}

pub fn tabulate_adaptation(adapter: &Arc<Adapter>, cap: u64) -> Result<TabulatedAdaptation> {
    tabulate_with(
        vec![adapter.id().to_string()],
        adapter.source(),
        adapter.target(),
        cap,
        |key| apply_adaptation(adapter, key),
    )
}

pub fn tabulate_pipeline(pipeline: &AdaptationPipeline, cap: u64) -> Result<TabulatedAdaptation> {
    tabulate_with(pipeline.chain_ids(), pipeline.from(), pipeline.to(), cap, |key| {
        pipeline.apply(key)
    })
}

fn tabulate_with(
    chain: Vec<String>,
    from: &Arc<Interface>,
    to: &Arc<Interface>,
    cap: u64,
    eval: impl Fn(&AvailabilityVector) -> Result<AvailabilityVector>,
) -> Result<TabulatedAdaptation> {
    let sizes = FunctionSizes::of(from);
    if sizes.adaptation > BigUint::from(cap) {
        let subject = if chain.is_empty() {
            format!("identity at {}", from.id())
        } else {
            chain.join(",")
        };
        return Err(Error::CapExceeded {
            subject,
            size: sizes.adaptation,
            cap,
        });
    }
    let rows = NormalizedKeys::new(from)
        .map(|key| eval(&key))
        .collect::<Result<Vec<_>>>()?;
    Ok(TabulatedAdaptation {
        chain,
        from: from.clone(),
        to: to.clone(),
        rows,
    })
}

impl TabulatedAdaptation {
    pub fn chain(&self) -> &[String] {
        &self.chain
    }

    pub fn from(&self) -> &Arc<Interface> {
        &self.from
    }

    pub fn to(&self) -> &Arc<Interface> {
        &self.to
    }

    /// Raw row count `∏ 2^dᵢ`, matching [`FunctionSizes::adaptation`].
    pub fn row_count(&self) -> BigUint {
        BigUint::from(self.rows.len()) << self.from.method_count()
    }

    /// Number of bot-normalized keys actually stored.
    pub fn distinct_rows(&self) -> usize {
        self.rows.len()
    }

    /// Stored rows as `(key, value)` pairs in key order.
    pub fn rows(&self) -> impl Iterator<Item = (AvailabilityVector, &AvailabilityVector)> {
        NormalizedKeys::new(&self.from).zip(self.rows.iter())
    }

    /// Looks up a vector; `bot` is normalized in first.
    pub fn get(&self, p: &AvailabilityVector) -> Result<&AvailabilityVector> {
        if p.interface != self.from.id() || p.components.len() != self.from.method_count() {
            return Err(Error::InterfaceMismatch {
                expected: self.from.id().to_string(),
                found: p.interface.clone(),
            });
        }
        let mut index = 0usize;
        for (method, set) in self.from.methods().iter().zip(&p.components) {
            let width = method.domain().len() - 1;
            index = (index << width) | (set.bits() >> 1) as usize;
        }
        Ok(&self.rows[index])
    }

    /// The table of `next ∘ self`.
    pub fn then(&self, next: &TabulatedAdaptation) -> Result<TabulatedAdaptation> {
        if self.to.id() != next.from.id() {
            return Err(Error::InterfaceMismatch {
                expected: next.from.id().to_string(),
                found: self.to.id().to_string(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|v| next.get(v).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(TabulatedAdaptation {
            chain: self.chain.iter().chain(&next.chain).cloned().collect(),
            from: self.from.clone(),
            to: next.to.clone(),
            rows,
        })
    }
}

/// All bot-normalized vectors over an interface, in mixed-radix order.
struct NormalizedKeys {
    interface: String,
    widths: Vec<usize>,
    next: Option<Vec<u64>>,
}

impl NormalizedKeys {
    fn new(interface: &Interface) -> Self {
        let widths: Vec<usize> = interface.domain_sizes().map(|d| d - 1).collect();
        NormalizedKeys {
            interface: interface.id().to_string(),
            next: Some(vec![0; widths.len()]),
            widths,
        }
    }
}

impl Iterator for NormalizedKeys {
    type Item = AvailabilityVector;

    fn next(&mut self) -> Option<AvailabilityVector> {
        let current = self.next.take()?;
        let key = AvailabilityVector::from_parts(
            self.interface.clone(),
            current.iter().map(|bits| ValueSet::from_bits(bits << 1 | 1)).collect(),
        );
        let mut advanced = current;
        for k in (0..advanced.len()).rev() {
            advanced[k] += 1;
            if advanced[k] < 1u64 << self.widths[k] {
                self.next = Some(advanced);
                break;
            }
            advanced[k] = 0;
        }
        Some(key)
    }
}
