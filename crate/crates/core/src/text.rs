//! Line-oriented text formats for systems, configurations, graphs and
//! certificates.
//!
//! ```text
//! dim 2
//! action -1 1
//! action 1 -1
//! ```
//!
//! Graph files add `state <slots>` lines and `trans <src> <action> <dst>`
//! lines whose indices are 1-based positions in the state and action lists.
//! Certificates list a `FORWARD` and a `BACKWARD` run as alternating
//! configuration lines and `> <action>` lines. Blank lines and text after `#`
//! are ignored everywhere.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::decide::ReversibilityCertificate;
use crate::graph::SubreachabilityGraph;
use crate::vector::{Action, Configuration, IndexSet, Run, Slot, Vas};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub type ParseResult<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn int(&self) -> ParseResult<i64> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected an integer, found `{}`", self.text)))
    }

    fn natural(&self) -> ParseResult<u64> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected a natural number, found `{}`", self.text)))
    }

    fn slot(&self) -> ParseResult<Slot> {
        if self.text == "*" {
            return Ok(Slot::Star);
        }
        let v = self.natural()?;
        i64::try_from(v)
            .map(Slot::Int)
            .map_err(|_| self.error("value is too large"))
    }
}

struct Line<'a> {
    number: usize,
    /// Column just past the last token, for arity errors.
    end: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column: self.end,
            message: message.into(),
        }
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in content.char_indices().chain([(content.len(), ' ')]) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &content[s..i],
                        line: k + 1,
                        column: s + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: k + 1,
                end: content.trim_end().len() + 1,
                tokens,
            });
        }
    }
    out
}

fn end_error(text: &str, message: &str) -> ParseError {
    ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: message.into(),
    }
}

fn arity(line: &Line, values: &[Token], d: usize) -> ParseResult<()> {
    if values.len() != d {
        let at = values.get(d).map_or_else(|| line.error(""), |t| t.error(""));
        return Err(ParseError {
            message: format!("expected {d} values, found {}", values.len()),
            ..at
        });
    }
    Ok(())
}

fn parse_action(line: &Line, values: &[Token], d: usize) -> ParseResult<Action> {
    arity(line, values, d)?;
    Ok(Action::new(values.iter().map(Token::int).collect::<ParseResult<_>>()?))
}

fn parse_slots(line: &Line, values: &[Token], d: usize) -> ParseResult<Configuration> {
    arity(line, values, d)?;
    let slots = values.iter().map(Token::slot).collect::<ParseResult<Vec<_>>>()?;
    Configuration::from_slots(slots).map_err(|e| values[0].error(e.to_string()))
}

fn parse_header(line: &Line) -> ParseResult<usize> {
    let head = line.tokens[0];
    if head.text != "dim" {
        return Err(head.error(format!("expected `dim`, found `{}`", head.text)));
    }
    if line.tokens.len() != 2 {
        return Err(line.error("`dim` takes exactly one value"));
    }
    let d = line.tokens[1].natural()?;
    if d == 0 {
        return Err(line.tokens[1].error("dimension must be at least 1"));
    }
    usize::try_from(d).map_err(|_| line.tokens[1].error("dimension is too large"))
}

/// Reads `dim` and `action` lines, rejecting duplicate actions.
pub fn parse_vas(text: &str) -> ParseResult<Vas> {
    let lines = lines(text);
    let first = lines.first().ok_or_else(|| end_error(text, "missing `dim` header"))?;
    let d = parse_header(first)?;
    let mut actions = Vec::new();
    let mut seen = HashSet::new();
    for line in &lines[1..] {
        let head = line.tokens[0];
        if head.text != "action" {
            return Err(head.error(format!("expected `action`, found `{}`", head.text)));
        }
        let a = parse_action(line, &line.tokens[1..], d)?;
        if !seen.insert(a.clone()) {
            return Err(head.error(format!("duplicate action {a}")));
        }
        actions.push(a);
    }
    Vas::new(d, actions).map_err(|e| first.error(e.to_string()))
}

fn push_values(out: &mut String, values: impl IntoIterator<Item = String>) {
    for v in values {
        out.push(' ');
        out.push_str(&v);
    }
}

fn action_tokens(a: &Action) -> impl Iterator<Item = String> + '_ {
    a.as_slice().iter().map(|v| v.to_string())
}

fn slot_tokens(c: &Configuration) -> impl Iterator<Item = String> + '_ {
    c.slots().iter().map(|s| match s {
        Slot::Star => "*".to_string(),
        Slot::Int(v) => v.to_string(),
    })
}

pub fn emit_vas(vas: &Vas) -> String {
    let mut out = format!("dim {}\n", vas.dim());
    for a in vas.actions() {
        out.push_str("action");
        push_values(&mut out, action_tokens(a));
        out.push('\n');
    }
    out
}

/// A configuration literal such as `3 * 0`.
pub fn parse_config(text: &str, dim: usize) -> ParseResult<Configuration> {
    let lines = lines(text);
    match lines.as_slice() {
        [line] => parse_slots(line, &line.tokens, dim),
        [] => Err(end_error(text, "empty configuration")),
        [_, extra, ..] => Err(extra.tokens[0].error("a configuration fits on one line")),
    }
}

pub fn emit_config(c: &Configuration) -> String {
    slot_tokens(c).collect::<Vec<_>>().join(" ")
}

/// An integer vector such as `-1 0 2`.
pub fn parse_vector(text: &str, dim: usize) -> ParseResult<Vec<i64>> {
    let lines = lines(text);
    match lines.as_slice() {
        [line] => {
            arity(line, &line.tokens, dim)?;
            line.tokens.iter().map(Token::int).collect()
        }
        [] => Err(end_error(text, "empty vector")),
        [_, extra, ..] => Err(extra.tokens[0].error("a vector fits on one line")),
    }
}

/// 1-based indices separated by commas or spaces, optionally in braces.
pub fn parse_index_set(text: &str, dim: usize) -> ParseResult<IndexSet> {
    let cleaned: String = text
        .chars()
        .map(|c| if matches!(c, '{' | '}' | ',') { ' ' } else { c })
        .collect();
    let mut set = IndexSet::new();
    for line in lines(&cleaned) {
        for t in &line.tokens {
            let i = t.natural()?;
            if i == 0 || i > dim as u64 {
                return Err(t.error(format!("index {i} is outside 1..={dim}")));
            }
            set.insert(i as usize - 1);
        }
    }
    Ok(set)
}

pub fn emit_index_set(set: &IndexSet) -> String {
    set.to_string()
}

/// Reads a graph file; states may contain `*`.
pub fn parse_graph(text: &str) -> ParseResult<SubreachabilityGraph> {
    let lines = lines(text);
    let first = lines.first().ok_or_else(|| end_error(text, "missing `dim` header"))?;
    let d = parse_header(first)?;
    let mut actions = Vec::new();
    let mut states = Vec::new();
    let mut seen = HashSet::new();
    let mut transitions = Vec::new();
    for line in &lines[1..] {
        let head = line.tokens[0];
        let rest = &line.tokens[1..];
        match head.text {
            "action" => actions.push(parse_action(line, rest, d)?),
            "state" => {
                let c = parse_slots(line, rest, d)?;
                if !seen.insert(c.clone()) {
                    return Err(head.error(format!("duplicate state {c}")));
                }
                states.push(c);
            }
            "trans" => {
                if rest.len() != 3 {
                    return Err(line.error("`trans` takes a source, an action and a target"));
                }
                let index = |t: &Token, len: usize, what: &str| -> ParseResult<usize> {
                    let i = t.natural()?;
                    if i == 0 || i > len as u64 {
                        return Err(t.error(format!("{what} index {i} is outside 1..={len}")));
                    }
                    Ok(i as usize - 1)
                };
                let s = index(&rest[0], states.len(), "state")?;
                let a = index(&rest[1], actions.len(), "action")?;
                let t = index(&rest[2], states.len(), "state")?;
                let (x, y) = (&states[s], &states[t]);
                if x.step(&actions[a]).ok().flatten().as_ref() != Some(y) {
                    return Err(head.error(format!("({x}, {}, {y}) is not a step", actions[a])));
                }
                transitions.push((s, actions[a].clone(), t));
            }
            other => return Err(head.error(format!("unknown directive `{other}`"))),
        }
    }
    SubreachabilityGraph::from_indexed(states, &transitions).map_err(|e| first.error(e.to_string()))
}

pub fn emit_graph(g: &SubreachabilityGraph) -> String {
    let actions: Vec<Action> = g.actions().into_iter().collect();
    let mut out = format!("dim {}\n", g.dim());
    for a in &actions {
        out.push_str("action");
        push_values(&mut out, action_tokens(a));
        out.push('\n');
    }
    for s in g.states() {
        out.push_str("state");
        push_values(&mut out, slot_tokens(s));
        out.push('\n');
    }
    for t in g.transitions() {
        let k = actions.binary_search(&t.action).expect("action list is complete");
        let _ = writeln!(out, "trans {} {} {}", t.source + 1, k + 1, t.target + 1);
    }
    out
}

fn parse_run(lines: &[Line], d: usize) -> ParseResult<Run> {
    let first = lines
        .first()
        .ok_or_else(|| ParseError { line: 0, column: 1, message: "empty run".into() })?;
    if first.tokens[0].text == ">" {
        return Err(first.tokens[0].error("a run starts with a configuration"));
    }
    let start = parse_slots(first, &first.tokens, d)?;
    let mut word = Vec::new();
    let mut configs = vec![start.clone()];
    let mut expect_action = true;
    for line in &lines[1..] {
        let is_action = line.tokens[0].text == ">";
        if is_action != expect_action {
            let what = if expect_action { "an action line" } else { "a configuration line" };
            return Err(line.tokens[0].error(format!("expected {what}")));
        }
        if is_action {
            word.push(parse_action(line, &line.tokens[1..], d)?);
        } else {
            configs.push(parse_slots(line, &line.tokens, d)?);
        }
        expect_action = !expect_action;
    }
    if !expect_action {
        let last = lines.last().expect("at least one line");
        return Err(last.error("a run ends with a configuration"));
    }
    let run = Run::execute(&start, &word)
        .map_err(|e| first.error(e.to_string()))?
        .ok_or_else(|| first.error("run leaves the natural numbers"))?;
    if let Some(k) = (0..configs.len()).find(|&k| run.configurations()[k] != configs[k]) {
        return Err(first.error(format!("configuration {} does not match the replay", k + 1)));
    }
    Ok(run)
}

/// Reads a certificate and replays both runs.
pub fn parse_certificate(text: &str) -> ParseResult<ReversibilityCertificate> {
    let lines = lines(text);
    let header = |k: usize, name: &str| -> ParseResult<()> {
        match lines.get(k) {
            Some(l) if l.tokens.len() == 1 && l.tokens[0].text == name => Ok(()),
            Some(l) => Err(l.tokens[0].error(format!("expected `{name}`"))),
            None => Err(end_error(text, &format!("missing `{name}` section"))),
        }
    };
    header(0, "FORWARD")?;
    let split = lines
        .iter()
        .position(|l| l.tokens[0].text == "BACKWARD")
        .ok_or_else(|| end_error(text, "missing `BACKWARD` section"))?;
    header(split, "BACKWARD")?;
    let d = lines
        .get(1)
        .filter(|l| l.tokens[0].text != "BACKWARD")
        .map(|l| l.tokens.len())
        .ok_or_else(|| end_error(text, "empty `FORWARD` section"))?;
    let section = |range: &[Line], at: usize| -> ParseResult<Run> {
        if range.is_empty() {
            return Err(ParseError {
                line: lines[at].number,
                column: 1,
                message: "empty section".into(),
            });
        }
        parse_run(range, d)
    };
    let forward = section(&lines[1..split], 0)?;
    let backward = section(&lines[split + 1..], split)?;
    ReversibilityCertificate::new(forward, backward).map_err(|e| lines[split].error(e.to_string()))
}

pub fn emit_run(out: &mut String, run: &Run) {
    let configs = run.configurations();
    out.push_str(&emit_config(&configs[0]));
    out.push('\n');
    for (a, c) in run.word().iter().zip(&configs[1..]) {
        out.push('>');
        push_values(out, action_tokens(a));
        out.push('\n');
        out.push_str(&emit_config(c));
        out.push('\n');
    }
}

pub fn emit_certificate(cert: &ReversibilityCertificate) -> String {
    let mut out = String::from("FORWARD\n");
    emit_run(&mut out, &cert.forward);
    out.push_str("BACKWARD\n");
    emit_run(&mut out, &cert.backward);
    out
}
