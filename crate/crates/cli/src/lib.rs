//! The `adaptchain` command line.
//!
//! Exit status is 0 on success, 1 on domain errors (invalid graphs, missing
//! chains, unknown values) and 2 on usage errors.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;

use adaptchain_core::fixtures;
use adaptchain_core::search::{oracle_optimal, pipeline_for};
use adaptchain_core::{
    enumerate_chains, function_sizes, greedy_chain, parse_document, random_instance,
    render_document, tabulate_adaptation, AdapterGraph, AvailabilityVector, ChainResult, Error,
    GenParams, Interface, WeightMap, DEFAULT_ORACLE_LIMIT, DEFAULT_TABULATE_CAP,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

pub const CAP_ENV: &str = "ADAPTCHAIN_TABULATE_CAP";

#[derive(Debug, Parser)]
#[command(name = "adaptchain", version, about = "Analyze loss in interface adapter chains")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Graph document path, or the name of a bundled graph (`video-example`).
    #[arg(long)]
    graph: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a graph document.
    Validate(GraphArg),
    /// Apply a chain of adapters to an availability vector.
    Eval {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated adapter ids, in order.
        #[arg(long, value_delimiter = ',', required = true)]
        chain: Vec<String>,
        /// Input vector, e.g. `playVideo:MOV,MKV;playAudio:MP3`. Unlisted
        /// methods get `{bot}`. Defaults to full capability.
        #[arg(long)]
        vector: Option<String>,
    },
    /// Find the chain that keeps the most abstract values.
    Chain {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, conflicts_with = "sources", required_unless_present = "sources")]
        source: Option<String>,
        /// Comma-separated candidate sources.
        #[arg(long, value_delimiter = ',')]
        sources: Vec<String>,
        #[arg(long)]
        target: String,
        /// Use exhaustive enumeration instead of best-first search.
        #[arg(long)]
        oracle: bool,
        /// Chain-count limit for `--oracle`.
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        limit: usize,
        /// Weight file with `interface.method.value = weight` lines.
        #[arg(long)]
        weights: Option<String>,
    },
    /// List every acyclic chain between two interfaces.
    Enumerate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Report dependency and adaptation function sizes per adapter.
    Stats {
        #[command(flatten)]
        graph: GraphArg,
        /// Also materialize each adaptation table (subject to the cap).
        #[arg(long)]
        tabulate: bool,
    },
    /// Generate a random graph document.
    Gen {
        #[arg(long, default_value_t = 4)]
        interfaces: usize,
        /// Methods per interface, `N` or `LO..HI`.
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        methods: RangeInclusive<usize>,
        /// Non-bottom values per method, `N` or `LO..HI`.
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        values: RangeInclusive<usize>,
        #[arg(long, default_value_t = 6)]
        adapters: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the document here instead of standard output.
        #[arg(long)]
        output: Option<String>,
    },
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let bound = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    match text.split_once("..") {
        Some((lo, hi)) => Ok(bound(lo)?..=bound(hi.trim_start_matches('='))?),
        None => {
            let n = bound(text)?;
            Ok(n..=n)
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    /// The reader went away; not worth reporting.
    ClosedOutput,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) | Failure::Domain(msg) => f.write_str(msg),
            Failure::ClosedOutput => f.write_str("output closed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::ClosedOutput;
        }
        Failure::Domain(format!("output error: {e}"))
    }
}

/// Runs the command line with `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) | Err(Failure::ClosedOutput) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn load_graph(arg: &GraphArg) -> Result<AdapterGraph, Failure> {
    let text = match fixtures::bundled(&arg.graph) {
        Some(text) => text.to_string(),
        None => std::fs::read_to_string(&arg.graph)
            .map_err(|e| Failure::Domain(format!("cannot read graph `{}`: {e}", arg.graph)))?,
    };
    parse_document(&text).map_err(|e| Failure::Domain(format!("{}: {e}", arg.graph)))
}

fn tabulate_cap() -> Result<u64, Failure> {
    match std::env::var(CAP_ENV) {
        Err(_) => Ok(DEFAULT_TABULATE_CAP),
        Ok(raw) => match raw.trim().parse::<u64>() {
            Ok(cap) if cap > 0 => Ok(cap),
            _ => Err(Failure::Usage(format!(
                "{CAP_ENV} must be a positive integer, got `{raw}`"
            ))),
        },
    }
}

/// Parses `method:v1,v2;method2:v3` into one name list per method.
fn parse_vector(interface: &Interface, text: &str) -> Result<AvailabilityVector, Failure> {
    let mut sets: Vec<Vec<String>> = vec![Vec::new(); interface.method_count()];
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (method, values) = part
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("malformed vector component `{part}`")))?;
        let index = interface.method_index(method.trim()).ok_or_else(|| {
            Failure::Domain(format!(
                "unknown method `{}` in interface `{}`",
                method.trim(),
                interface.id()
            ))
        })?;
        sets[index].extend(
            values
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(str::to_string),
        );
    }
    Ok(interface.normalize_vector(&sets)?)
}

#[derive(Serialize)]
struct MethodValues<'a> {
    method: &'a str,
    values: Vec<&'a str>,
}

fn vector_json<'a>(v: &AvailabilityVector, interface: &'a Interface) -> Vec<MethodValues<'a>> {
    interface
        .methods()
        .iter()
        .zip(v.names(interface))
        .map(|(m, values)| MethodValues {
            method: m.name(),
            values,
        })
        .collect()
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Validate(arg) => {
            let graph = load_graph(arg)?;
            if json {
                emit_json(
                    out,
                    &json!({
                        "status": "ok",
                        "interfaces": graph.interface_count(),
                        "adapters": graph.adapter_count(),
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "ok: {} interfaces, {} adapters",
                    graph.interface_count(),
                    graph.adapter_count()
                )?;
            }
        }
        Command::Eval {
            graph,
            chain,
            vector,
        } => {
            let graph = load_graph(graph)?;
            let last = chain
                .last()
                .ok_or_else(|| Failure::Usage("--chain needs at least one adapter".into()))?;
            let target = graph.adapter(last)?.target().id().to_string();
            let pipeline = pipeline_for(&graph, &target, chain)?;
            let from = pipeline.from().clone();
            let input = match vector {
                Some(text) => parse_vector(&from, text)?,
                None => from.full_vector(),
            };
            let result = pipeline.apply(&input)?;
            if json {
                emit_json(
                    out,
                    &json!({
                        "chain": chain,
                        "from": from.id(),
                        "to": pipeline.to().id(),
                        "input": vector_json(&input, &from),
                        "result": vector_json(&result, pipeline.to()),
                    }),
                )?;
            } else {
                writeln!(out, "{}", result.render(pipeline.to()))?;
            }
        }
        Command::Chain {
            graph,
            source,
            sources,
            target,
            oracle,
            limit,
            weights,
        } => {
            let graph = load_graph(graph)?;
            let weights = match weights {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Domain(format!("cannot read weights `{path}`: {e}")))?;
                    let map = WeightMap::parse(&text).map_err(|e| Failure::Domain(format!("{path}: {e}")))?;
                    map.check(&graph)?;
                    map
                }
                None => WeightMap::unit(),
            };
            let sources: BTreeSet<String> = source.iter().chain(sources).cloned().collect();
            let result = if *oracle {
                oracle_optimal(&graph, &sources, target, &weights, *limit)?
            } else {
                greedy_chain(&graph, &sources, target, &weights)?
            };
            report_chain(out, json, &graph, &result, if *oracle { "oracle" } else { "greedy" })?;
        }
        Command::Enumerate {
            graph,
            source,
            target,
        } => {
            let graph = load_graph(graph)?;
            let chains = enumerate_chains(&graph, source, target)?;
            if json {
                emit_json(
                    out,
                    &json!({ "source": source, "target": target, "chains": chains }),
                )?;
            } else {
                for chain in &chains {
                    if chain.is_empty() {
                        writeln!(out, "(empty)")?;
                    } else {
                        writeln!(out, "{}", chain.join(" -> "))?;
                    }
                }
                writeln!(out, "{} chain(s)", chains.len())?;
            }
        }
        Command::Stats { graph, tabulate } => {
            let graph = load_graph(graph)?;
            let cap = if *tabulate { tabulate_cap()? } else { DEFAULT_TABULATE_CAP };
            let mut rows = Vec::new();
            for adapter in graph.adapters() {
                let sizes = function_sizes(adapter);
                let mut row = json!({
                    "adapter": adapter.id(),
                    "source": adapter.source().id(),
                    "target": adapter.target().id(),
                    "dependency_size": to_json_number(&sizes.dependency),
                    "adaptation_size": to_json_number(&sizes.adaptation),
                });
                if *tabulate {
                    row["tabulated"] = match tabulate_adaptation(adapter, cap) {
                        Ok(table) => json!({
                            "rows": to_json_number(&table.row_count()),
                            "distinct_keys": table.distinct_rows(),
                        }),
                        Err(Error::CapExceeded { .. }) => json!("cap exceeded"),
                        Err(e) => return Err(e.into()),
                    };
                }
                rows.push(row);
            }
            if json {
                emit_json(out, &json!({ "adapters": rows }))?;
            } else {
                write_stats_table(out, &rows, *tabulate)?;
            }
        }
        Command::Gen {
            interfaces,
            methods,
            values,
            adapters,
            density,
            seed,
            output,
        } => {
            let params = GenParams {
                interface_count: *interfaces,
                methods_per_interface: methods.clone(),
                values_per_method: values.clone(),
                adapter_count: *adapters,
                entry_density: *density,
                seed: *seed,
            };
            let instance = random_instance(&params).map_err(|e| Failure::Usage(e.to_string()))?;
            let text = render_document(&instance.graph);
            match output {
                Some(path) => {
                    std::fs::write(path, &text)
                        .map_err(|e| Failure::Domain(format!("cannot write `{path}`: {e}")))?;
                    if json {
                        emit_json(
                            out,
                            &json!({
                                "output": path,
                                "source": instance.source,
                                "target": instance.target,
                            }),
                        )?;
                    } else {
                        writeln!(
                            out,
                            "wrote {path}; suggested query: --source {} --target {}",
                            instance.source, instance.target
                        )?;
                    }
                }
                None => {
                    out.write_all(text.as_bytes())?;
                    writeln!(
                        err,
                        "suggested query: --source {} --target {}",
                        instance.source, instance.target
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn report_chain(
    out: &mut dyn Write,
    json: bool,
    graph: &AdapterGraph,
    result: &ChainResult,
    method: &str,
) -> Result<(), Failure> {
    let target = graph.interface(&result.target)?;
    if json {
        emit_json(
            out,
            &json!({
                "method": method,
                "source": result.source,
                "target": result.target,
                "chain": result.chain,
                "vector": vector_json(&result.final_vector, target),
                "score": result.score,
            }),
        )
    } else {
        let chain = if result.chain.is_empty() {
            "(empty)".to_string()
        } else {
            result.chain.join(" -> ")
        };
        writeln!(out, "chain:  {chain}")?;
        writeln!(out, "source: {}", result.source)?;
        writeln!(out, "target: {}", result.target)?;
        writeln!(out, "vector: {}", result.final_vector.render(target))?;
        writeln!(out, "score:  {}", result.score)?;
        Ok(())
    }
}

fn write_stats_table(out: &mut dyn Write, rows: &[Value], tabulate: bool) -> Result<(), Failure> {
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let mut lines: Vec<Vec<String>> = vec![["adapter", "source", "target", "dependency", "adaptation"]
        .iter()
        .map(|s| s.to_string())
        .collect()];
    if tabulate {
        lines[0].push("tabulated".into());
    }
    for row in rows {
        let mut line: Vec<String> = ["adapter", "source", "target", "dependency_size", "adaptation_size"]
            .iter()
            .map(|k| cell(&row[*k]))
            .collect();
        if tabulate {
            line.push(match &row["tabulated"] {
                Value::Object(t) => format!("{} rows ({} keys)", cell(&t["rows"]), cell(&t["distinct_keys"])),
                other => cell(other),
            });
        }
        lines.push(line);
    }
    let widths: Vec<usize> = (0..lines[0].len())
        .map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0))
        .collect();
    for line in lines {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        writeln!(out, "{}", padded.join("  ").trim_end())?;
    }
    Ok(())
}

/// Exact sizes as JSON numbers when they fit in u64, strings otherwise.
fn to_json_number(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(small) => Value::from(small),
        Err(_) => Value::String(n.to_string()),
    }
}
