//! Interfaces, lifted abstract argument domains, adapters and the adapter graph.
//!
//! Every method takes a single argument whose concrete values are split into
//! disjoint classes, each named by an abstract value. Each method domain is
//! lifted with the bottom value `bot`, which stands for "cannot handle any
//! argument". Bottom is always injected automatically and always sorts first;
//! the remaining values follow in lexicographic order. Abstract values are
//! identified by their index in that canonical order, and sets of them are
//! stored as bitmasks ([`ValueSet`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::semantics::AvailabilityVector;

/// Reserved name of the bottom value.
pub const BOTTOM: &str = "bot";

/// Largest supported lifted domain (bottom included).
pub const MAX_DOMAIN_SIZE: usize = 64;

/// A named abstract value. Bottom is the value named [`BOTTOM`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractValue {
    name: String,
}

impl AbstractValue {
    pub fn bottom() -> Self {
        AbstractValue {
            name: BOTTOM.to_string(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_bottom(&self) -> bool {
        self.name == BOTTOM
    }
}

impl fmt::Display for AbstractValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A set of abstract values of one domain, as a bitmask over canonical indices.
///
/// Bit 0 is bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ValueSet(u64);

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet(0);
    pub const BOTTOM: ValueSet = ValueSet(1);

    pub fn from_bits(bits: u64) -> Self {
        ValueSet(bits)
    }

    /// Every value of a domain of `size` values.
    pub fn full(size: usize) -> Self {
        debug_assert!(size <= MAX_DOMAIN_SIZE);
        if size >= 64 {
            ValueSet(u64::MAX)
        } else {
            ValueSet((1u64 << size) - 1)
        }
    }

    pub fn singleton(index: u8) -> Self {
        ValueSet(1u64 << index)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, index: u8) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn insert(&mut self, index: u8) {
        self.0 |= 1u64 << index;
    }

    pub fn with_bottom(self) -> Self {
        ValueSet(self.0 | 1)
    }

    pub fn union(self, other: ValueSet) -> Self {
        ValueSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: ValueSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member indices in ascending (canonical) order.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let index = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            Some(index)
        })
    }
}

/// A lifted abstract argument domain: `bot` followed by the other values in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbstractDomain {
    values: Vec<AbstractValue>,
}

impl AbstractDomain {
    pub fn values(&self) -> &[AbstractValue] {
        &self.values
    }

    /// Lifted size, bottom included (always at least 2).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.values
            .iter()
            .position(|v| v.name == name)
            .map(|i| i as u8)
    }

    pub fn name(&self, index: u8) -> &str {
        &self.values[index as usize].name
    }

    pub fn full_set(&self) -> ValueSet {
        ValueSet::full(self.values.len())
    }

    /// Names in a set, in canonical order.
    pub fn names(&self, set: ValueSet) -> Vec<&str> {
        set.iter().map(|i| self.name(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    name: String,
    domain: AbstractDomain,
}

impl MethodSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &AbstractDomain {
        &self.domain
    }

    /// Resolves value names to a set; bottom is injected.
    pub fn parse_set<S: AsRef<str>>(&self, owner: &str, names: &[S]) -> Result<ValueSet> {
        let mut set = ValueSet::BOTTOM;
        for name in names {
            let name = name.as_ref();
            let index = self
                .domain
                .index_of(name)
                .ok_or_else(|| Error::UnknownValue {
                    owner: owner.to_string(),
                    method: self.name.clone(),
                    value: name.to_string(),
                })?;
            set.insert(index);
        }
        Ok(set)
    }

    pub fn value_index(&self, owner: &str, name: &str) -> Result<u8> {
        self.domain.index_of(name).ok_or_else(|| Error::UnknownValue {
            owner: owner.to_string(),
            method: self.name.clone(),
            value: name.to_string(),
        })
    }
}

/// An interface: an ordered list of single-argument methods.
///
/// Method order is fixed at construction and determines component order in
/// every tuple over this interface.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interface {
    id: String,
    methods: Vec<MethodSpec>,
}

impl Interface {
    /// Declares an interface from `(method, value names)` pairs.
    ///
    /// `bot` may be listed or left out; it is always part of the lifted domain.
    pub fn new<I, N, V, S>(id: impl Into<String>, methods: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, V)>,
        N: Into<String>,
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyId { kind: "interface" });
        }
        let mut seen_methods = BTreeSet::new();
        let mut specs = Vec::new();
        for (name, values) in methods {
            let name = name.into();
            if name.is_empty() {
                return Err(Error::EmptyId { kind: "method" });
            }
            if !seen_methods.insert(name.clone()) {
                return Err(Error::DuplicateMethodName {
                    interface: id,
                    method: name,
                });
            }
            let mut names = BTreeSet::new();
            let mut saw_bottom = false;
            for value in values {
                let value = value.as_ref();
                if value.is_empty() {
                    return Err(Error::EmptyId {
                        kind: "abstract value",
                    });
                }
                let fresh = if value == BOTTOM {
                    !std::mem::replace(&mut saw_bottom, true)
                } else {
                    names.insert(value.to_string())
                };
                if !fresh {
                    return Err(Error::DuplicateAbstractValue {
                        interface: id,
                        method: name,
                        value: value.to_string(),
                    });
                }
            }
            if names.is_empty() {
                return Err(Error::EmptyDomain {
                    interface: id,
                    method: name,
                });
            }
            if names.len() + 1 > MAX_DOMAIN_SIZE {
                return Err(Error::DomainTooLarge {
                    interface: id,
                    method: name,
                    size: names.len() + 1,
                    max: MAX_DOMAIN_SIZE,
                });
            }
            let values = std::iter::once(AbstractValue::bottom())
                .chain(names.into_iter().map(|name| AbstractValue { name }))
                .collect();
            specs.push(MethodSpec {
                name,
                domain: AbstractDomain { values },
            });
        }
        if specs.is_empty() {
            return Err(Error::NoMethods { interface: id });
        }
        Ok(Interface { id, methods: specs })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn methods(&self) -> &[MethodSpec] {
        &self.methods
    }

    pub fn method_count(&self) -> usize {
        self.methods.len()
    }

    pub fn method_index(&self, name: &str) -> Option<usize> {
        self.methods.iter().position(|m| m.name == name)
    }

    /// Lifted domain sizes, in method order.
    pub fn domain_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.methods.iter().map(|m| m.domain.len())
    }

    /// The full-capability vector: every method accepts its whole lifted domain.
    pub fn full_vector(&self) -> AvailabilityVector {
        AvailabilityVector::from_parts(
            self.id.clone(),
            self.methods.iter().map(|m| m.domain.full_set()).collect(),
        )
    }

    /// The minimum vector `[{bot}, …, {bot}]`.
    pub fn bottom_vector(&self) -> AvailabilityVector {
        AvailabilityVector::from_parts(self.id.clone(), vec![ValueSet::BOTTOM; self.methods.len()])
    }

    /// Builds a vector from one set of value names per method, injecting `bot`.
    pub fn normalize_vector<V, S>(&self, sets: &[V]) -> Result<AvailabilityVector>
    where
        V: AsRef<[S]>,
        S: AsRef<str>,
    {
        if sets.len() != self.methods.len() {
            return Err(Error::ArityMismatch {
                context: format!("vector over `{}`", self.id),
                expected: self.methods.len(),
                found: sets.len(),
            });
        }
        let components = self
            .methods
            .iter()
            .zip(sets)
            .map(|(method, names)| method.parse_set(&self.id, names.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(AvailabilityVector::from_parts(self.id.clone(), components))
    }
}

/// A declared row of a dependency function, by value names.
///
/// `input` holds one value per source method, `output` one set per target
/// method. `bot` is implied in every output set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyEntry {
    pub input: Vec<String>,
    pub output: Vec<Vec<String>>,
}

impl DependencyEntry {
    pub fn new<S: AsRef<str>, O: AsRef<[S]>>(input: &[S], output: &[O]) -> Self {
        DependencyEntry {
            input: input.iter().map(|s| s.as_ref().to_string()).collect(),
            output: output
                .iter()
                .map(|set| set.as_ref().iter().map(|s| s.as_ref().to_string()).collect())
                .collect(),
        }
    }
}

/// An interface adapter and its abstract dependency function.
///
/// The adapter makes the `target` interface available on top of a component
/// implementing `source`. The dependency function is total: input tuples
/// without an explicit entry map to `default_output`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adapter {
    id: String,
    source: Arc<Interface>,
    target: Arc<Interface>,
    entries: BTreeMap<Vec<u8>, Vec<ValueSet>>,
    default_output: Vec<ValueSet>,
}

impl Adapter {
    /// Builds an adapter, validating every entry against the two interfaces.
    ///
    /// Without `default_output`, unlisted inputs map to all-`{bot}`.
    pub fn new<E, D, S>(
        id: impl Into<String>,
        source: Arc<Interface>,
        target: Arc<Interface>,
        entries: E,
        default_output: Option<&[D]>,
    ) -> Result<Self>
    where
        E: IntoIterator<Item = DependencyEntry>,
        D: AsRef<[S]>,
        S: AsRef<str>,
    {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyId { kind: "adapter" });
        }
        let default_output = match default_output {
            Some(sets) => parse_output(&id, &target, sets)?,
            None => vec![ValueSet::BOTTOM; target.method_count()],
        };
        let mut table = BTreeMap::new();
        for entry in entries {
            if entry.input.len() != source.method_count() {
                return Err(Error::ArityMismatch {
                    context: format!("input of adapter `{id}`"),
                    expected: source.method_count(),
                    found: entry.input.len(),
                });
            }
            let input = source
                .methods()
                .iter()
                .zip(&entry.input)
                .map(|(method, name)| method.value_index(&id, name))
                .collect::<Result<Vec<u8>>>()?;
            let output = parse_output(&id, &target, &entry.output)?;
            if table.insert(input, output).is_some() {
                return Err(Error::DuplicateInput {
                    adapter: id,
                    input: entry.input.join(", "),
                });
            }
        }
        Ok(Adapter {
            id,
            source,
            target,
            entries: table,
            default_output,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn source(&self) -> &Arc<Interface> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Interface> {
        &self.target
    }

    pub fn is_self_loop(&self) -> bool {
        self.source.id() == self.target.id()
    }

    /// Explicit entries, keyed by canonical value indices, in ascending order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u8], &[ValueSet])> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v.as_slice()))
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn default_output(&self) -> &[ValueSet] {
        &self.default_output
    }

    /// Evaluates the dependency function on one input tuple of value indices.
    pub fn lookup(&self, input: &[u8]) -> &[ValueSet] {
        self.entries
            .get(input)
            .map(Vec::as_slice)
            .unwrap_or(&self.default_output)
    }
}

fn parse_output<D, S>(adapter: &str, target: &Interface, sets: &[D]) -> Result<Vec<ValueSet>>
where
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    if sets.len() != target.method_count() {
        return Err(Error::ArityMismatch {
            context: format!("output of adapter `{adapter}`"),
            expected: target.method_count(),
            found: sets.len(),
        });
    }
    target
        .methods()
        .iter()
        .zip(sets)
        .map(|(method, names)| method.parse_set(adapter, names.as_ref()))
        .collect()
}

/// Directed multigraph with interfaces as nodes and adapters as edges.
#[derive(Debug, Clone, PartialEq)]
pub struct AdapterGraph {
    interfaces: BTreeMap<String, Arc<Interface>>,
    adapters: BTreeMap<String, Arc<Adapter>>,
    incoming: BTreeMap<String, Vec<Arc<Adapter>>>,
}

impl AdapterGraph {
    pub fn new<I, A>(interfaces: I, adapters: A) -> Result<Self>
    where
        I: IntoIterator<Item = Arc<Interface>>,
        A: IntoIterator<Item = Adapter>,
    {
        let mut by_id = BTreeMap::new();
        for interface in interfaces {
            let id = interface.id().to_string();
            if by_id.insert(id.clone(), interface).is_some() {
                return Err(Error::DuplicateId {
                    kind: "interface",
                    id,
                });
            }
        }
        let mut adapter_map = BTreeMap::new();
        let mut incoming: BTreeMap<String, Vec<Arc<Adapter>>> = BTreeMap::new();
        for adapter in adapters {
            for end in [adapter.source(), adapter.target()] {
                match by_id.get(end.id()) {
                    None => {
                        return Err(Error::UnknownInterface {
                            id: end.id().to_string(),
                            referenced_by: Some(adapter.id().to_string()),
                        })
                    }
                    Some(declared) if **declared != **end => {
                        return Err(Error::DomainMismatch {
                            adapter: adapter.id().to_string(),
                            interface: end.id().to_string(),
                        })
                    }
                    Some(_) => {}
                }
            }
            let id = adapter.id().to_string();
            if adapter_map.contains_key(&id) {
                return Err(Error::DuplicateId { kind: "adapter", id });
            }
            let adapter = Arc::new(adapter);
            incoming
                .entry(adapter.target().id().to_string())
                .or_default()
                .push(adapter.clone());
            adapter_map.insert(id, adapter);
        }
        for edges in incoming.values_mut() {
            edges.sort_by(|a, b| a.id().cmp(b.id()));
        }
        Ok(AdapterGraph {
            interfaces: by_id,
            adapters: adapter_map,
            incoming,
        })
    }

    pub fn interface(&self, id: &str) -> Result<&Arc<Interface>> {
        self.interfaces.get(id).ok_or_else(|| Error::UnknownInterface {
            id: id.to_string(),
            referenced_by: None,
        })
    }

    pub fn adapter(&self, id: &str) -> Result<&Arc<Adapter>> {
        self.adapters
            .get(id)
            .ok_or_else(|| Error::UnknownAdapter { id: id.to_string() })
    }

    /// Interfaces in id order.
    pub fn interfaces(&self) -> impl Iterator<Item = &Arc<Interface>> {
        self.interfaces.values()
    }

    /// Adapters in id order.
    pub fn adapters(&self) -> impl Iterator<Item = &Arc<Adapter>> {
        self.adapters.values()
    }

    pub fn interface_count(&self) -> usize {
        self.interfaces.len()
    }

    pub fn adapter_count(&self) -> usize {
        self.adapters.len()
    }

    /// Adapters whose target is `interface`, in id order (self-loops included).
    pub fn adapters_into(&self, interface: &str) -> &[Arc<Adapter>] {
        self.incoming.get(interface).map(Vec::as_slice).unwrap_or(&[])
    }
}
