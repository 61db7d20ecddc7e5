//! DOT reader/writer for Mealy machines.
//!
//! Accepted dialect: `src -> dst [label="in/out"]` edges plus one start marker
//! `__start0 -> init`. Node names may be bare identifiers or double-quoted.
//! Node and graph attribute statements are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::OnceLock;

use regex::Regex;

use super::{MealyBuilder, MealyMachine};
use crate::error::{Error, Result};

/// Output emitted by transitions added through sink completion.
pub const SINK_OUTPUT: &str = "⊥";

const START: &str = "__start0";

#[derive(Clone, Copy, Debug, Default)]
pub struct DotOptions {
    /// Complete partial machines with a fresh sink instead of failing.
    pub complete_sink: bool,
}

fn edge_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"^\s*("(?:[^"\\]|\\.)*"|[^\s\[;"-][^\s\[;"]*)\s*->\s*("(?:[^"\\]|\\.)*"|[^\s\[;"]+)\s*(?:\[(.*)\])?\s*;?\s*$"#)
            .unwrap()
    })
}

fn node_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"^\s*("(?:[^"\\]|\\.)*"|[^\s\[;"{}=]+)\s*(?:\[.*\])?\s*;?\s*$"#).unwrap()
    })
}

fn label_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"label\s*=\s*"((?:[^"\\]|\\.)*)""#).unwrap())
}

fn unquote(s: &str) -> String {
    match s.strip_prefix('"').and_then(|x| x.strip_suffix('"')) {
        Some(inner) => inner.replace("\\\"", "\"").replace("\\\\", "\\"),
        None => s.to_string(),
    }
}

fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

pub fn parse_dot(text: &str) -> Result<MealyMachine> {
    parse_dot_with(text, &DotOptions::default())
}

pub fn parse_dot_with(text: &str, opts: &DotOptions) -> Result<MealyMachine> {
    struct Edge {
        line: usize,
        src: String,
        dst: String,
        input: String,
        output: String,
    }
    let mut start: Option<String> = None;
    let mut edges = Vec::new();
    let mut declared = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with("//") || trimmed.starts_with('#') {
            continue;
        }
        let Some(c) = edge_re().captures(raw) else {
            if let Some(c) = node_re().captures(raw) {
                let name = unquote(&c[1]);
                if !matches!(name.as_str(), START | "node" | "edge" | "graph") {
                    declared.push(name);
                }
            }
            continue;
        };
        let src = unquote(&c[1]);
        let dst = unquote(&c[2]);
        if src == START {
            if start.replace(dst).is_some() {
                return Err(Error::Dot {
                    line,
                    msg: "second start marker".into(),
                });
            }
            continue;
        }
        let attrs = c.get(3).map_or("", |m| m.as_str());
        let label = label_re()
            .captures(attrs)
            .map(|l| unquote(&format!("\"{}\"", &l[1])))
            .ok_or_else(|| Error::Dot {
                line,
                msg: format!("edge {src} -> {dst} has no label"),
            })?;
        let (input, output) = label.split_once('/').ok_or_else(|| Error::Dot {
            line,
            msg: format!("label `{label}` is not of the form input/output"),
        })?;
        edges.push(Edge {
            line,
            src,
            dst,
            input: input.trim().to_string(),
            output: output.trim().to_string(),
        });
    }
    let start = start.ok_or(Error::MissingStart)?;
    let inputs: BTreeSet<&str> = edges.iter().map(|e| e.input.as_str()).collect();
    let inputs: Vec<&str> = inputs.into_iter().collect();
    if inputs.is_empty() {
        return Err(Error::Malformed("no labelled transitions".into()));
    }
    let mut b = MealyBuilder::new(&inputs);
    for name in &declared {
        b.state(name);
    }
    b.initial(&start);
    for e in &edges {
        b.transition(&e.src, &e.input, &e.output, &e.dst)
            .map_err(|err| match err {
                Error::Nondeterministic { .. } => Error::Dot {
                    line: e.line,
                    msg: format!(
                        "nondeterministic transition: state `{}` has two edges for input `{}`",
                        e.src, e.input
                    ),
                },
                other => other,
            })?;
    }
    b.build(opts.complete_sink)
}

/// Writes the machine with states in index order and edges in
/// (state, input) order.
pub fn serialize_dot(m: &MealyMachine) -> String {
    let mut out = String::from("digraph g {\n");
    let _ = writeln!(out, "\t{START} [label=\"\" shape=\"none\"];");
    for s in 0..m.num_states() {
        let name = quote(m.state_name(s));
        let _ = writeln!(out, "\t{name} [shape=\"circle\" label={}];", quote_always(m.state_name(s)));
    }
    let _ = writeln!(out, "\t{START} -> {};", quote(m.state_name(m.initial())));
    for (s, i, o, t) in m.transitions() {
        let label = format!("{}/{}", m.inputs()[i], m.outputs()[o]);
        let _ = writeln!(
            out,
            "\t{} -> {} [label={}];",
            quote(m.state_name(s)),
            quote(m.state_name(t)),
            quote_always(&label)
        );
    }
    out.push_str("}\n");
    out
}

fn quote_always(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
