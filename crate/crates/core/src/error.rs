use num_bigint::BigUint;
use thiserror::Error;

/// Errors raised while building, analyzing or searching adapter graphs.
///
/// Every variant names the entity at fault so callers can report it
/// without extra bookkeeping.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty identifier for {kind}")]
    EmptyId { kind: &'static str },

    #[error("interface `{interface}` declares no methods")]
    NoMethods { interface: String },

    #[error("method `{method}` is declared twice in interface `{interface}`")]
    DuplicateMethodName { interface: String, method: String },

    #[error("abstract value `{value}` is listed twice for method `{method}` in interface `{interface}`")]
    DuplicateAbstractValue {
        interface: String,
        method: String,
        value: String,
    },

    #[error("method `{method}` in interface `{interface}` has no non-bottom abstract values")]
    EmptyDomain { interface: String, method: String },

    #[error("value name `bot` is reserved for bottom (method `{method}` in interface `{interface}`)")]
    ReservedName { interface: String, method: String },

    #[error("method `{method}` in interface `{interface}` has {size} abstract values; at most {max} are supported")]
    DomainTooLarge {
        interface: String,
        method: String,
        size: usize,
        max: usize,
    },

    #[error("unknown abstract value `{value}` for method `{method}` in `{owner}`")]
    UnknownValue {
        owner: String,
        method: String,
        value: String,
    },

    #[error("adapter `{adapter}` lists input ({input}) more than once")]
    DuplicateInput { adapter: String, input: String },

    #[error("{context}: expected {expected} components, found {found}")]
    ArityMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown interface `{id}`{}", referenced_by.as_ref().map(|r| format!(" (referenced by `{r}`)")).unwrap_or_default())]
    UnknownInterface {
        id: String,
        referenced_by: Option<String>,
    },

    #[error("unknown adapter `{id}`")]
    UnknownAdapter { id: String },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("adapter `{adapter}` was built against a different declaration of interface `{interface}`")]
    DomainMismatch { adapter: String, interface: String },

    #[error("vector over interface `{found}` used where interface `{expected}` is required")]
    InterfaceMismatch { expected: String, found: String },

    #[error("adapter `{adapter}` targets `{found}` but the chain starts at `{expected}`")]
    EndpointMismatch {
        adapter: String,
        expected: String,
        found: String,
    },

    #[error("prepending adapter `{adapter}` revisits interface `{interface}`")]
    CycleDetected { adapter: String, interface: String },

    #[error("tabulating `{subject}` needs {size} rows, over the cap of {cap}")]
    CapExceeded {
        subject: String,
        size: BigUint,
        cap: u64,
    },

    #[error("no acyclic chain from {{{}}} to `{target}`", sources.join(","))]
    NoChain {
        sources: Vec<String>,
        target: String,
    },

    #[error("more than {limit} candidate chains; refusing exhaustive enumeration")]
    TooLarge { limit: usize },

    #[error("invalid weight for {key}: {reason}")]
    InvalidWeight { key: String, reason: String },

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
