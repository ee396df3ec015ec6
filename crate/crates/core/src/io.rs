//! Plain-text instance format: intervals, sets or edges, and optional true
//! values, predictions, and value distributions in one file.
//!
//! ```text
//! MIN 3 1            # kind, element count, set count (vertices/edges for MST)
//! 0 OPEN 0 4
//! 1 OPEN 3/2 6
//! 2 TRIV 5/2
//! S 3 0 1 2
//! REAL
//! 0 11/4
//! 1 2
//! PRED
//! 0 1
//! 1 9/2
//! ```
//!
//! Scalars serialize canonically as integers or reduced fractions; the parser
//! additionally accepts finite decimals. `REAL`/`PRED` blocks list values for
//! all open elements (trivial ones may be omitted). MST files use `E u v`
//! lines, one per edge in element order, instead of `S` lines. `DIST` blocks
//! hold one `D i k v1 p1 .. vk pk` line per element.

use crate::interval::UncertaintyInterval;
use crate::learn::{validate_distributions, ValueDistribution};
use crate::model::{
    ElementId, MinimumInstance, ModelError, MstEdge, MstInstance, Prediction, ProblemInstance,
    ProblemKind, Realization, SortingInstance,
};
use crate::scalar::Scalar;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model {
        line: usize,
        #[source]
        source: ModelError,
    },
    #[error("missing header line")]
    MissingHeader,
    #[error("{0}")]
    Incomplete(String),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Parsed contents of one instance file.
pub struct InstanceFile {
    pub instance: ProblemInstance,
    pub realization: Option<Realization>,
    pub prediction: Option<Prediction>,
    pub distributions: Option<Vec<ValueDistribution>>,
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    peeked: Option<(usize, &'a str)>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { iter: text.lines().enumerate(), peeked: None }
    }

    // Returns the next non-blank, non-comment line as (1-based number, text).
    fn next(&mut self) -> Option<(usize, &'a str)> {
        if let Some(item) = self.peeked.take() {
            return Some(item);
        }
        for (idx, raw) in self.iter.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((idx + 1, line));
        }
        None
    }

    fn peek(&mut self) -> Option<(usize, &'a str)> {
        if self.peeked.is_none() {
            self.peeked = self.next();
        }
        self.peeked
    }
}

fn parse_scalar(line: usize, token: &str) -> Result<Scalar, ParseError> {
    token
        .parse::<Scalar>()
        .map_err(|e| syntax(line, format!("{e}")))
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("invalid {what} `{token}`")))
}

fn parse_value_block(
    lines: &mut Lines<'_>,
    instance: &ProblemInstance,
) -> Result<Vec<Scalar>, ParseError> {
    // Values default to the trivial point for trivial elements, so files only
    // need to list open ones; listing trivial values explicitly is allowed.
    let n = instance.n_elements();
    let mut values: Vec<Option<Scalar>> = instance
        .intervals()
        .iter()
        .map(|iv| match iv {
            UncertaintyInterval::Trivial(v) => Some(*v),
            UncertaintyInterval::Open { .. } => None,
        })
        .collect();
    while let Some((lno, line)) = lines.peek() {
        let first = line.split_whitespace().next().unwrap_or("");
        if first.chars().next().is_none_or(|c| !c.is_ascii_digit()) {
            break;
        }
        lines.next();
        let mut tokens = line.split_whitespace();
        let id = parse_usize(lno, tokens.next().unwrap(), "element id")?;
        let value_token = tokens
            .next()
            .ok_or_else(|| syntax(lno, "expected `<id> <value>`"))?;
        if tokens.next().is_some() {
            return Err(syntax(lno, "trailing tokens after value"));
        }
        if id >= n {
            return Err(syntax(lno, format!("element id {id} out of range")));
        }
        values[id] = Some(parse_scalar(lno, value_token)?);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| ParseError::Incomplete(format!("no value for element {i}"))))
        .collect()
}

/// Parses the text format described in the module docs.
pub fn parse_instance(text: &str) -> Result<InstanceFile, ParseError> {
    let mut lines = Lines::new(text);
    let (header_no, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let mut tokens = header.split_whitespace();
    let kind = match tokens.next() {
        Some("MIN") => ProblemKind::Minimum,
        Some("SORT") => ProblemKind::Sorting,
        Some("MST") => ProblemKind::Mst,
        other => {
            return Err(syntax(
                header_no,
                format!("expected MIN, SORT, or MST header, got `{}`", other.unwrap_or("")),
            ))
        }
    };
    let n = parse_usize(
        header_no,
        tokens.next().ok_or_else(|| syntax(header_no, "missing element count"))?,
        "count",
    )?;
    let m = parse_usize(
        header_no,
        tokens.next().ok_or_else(|| syntax(header_no, "missing set/edge count"))?,
        "count",
    )?;
    if tokens.next().is_some() {
        return Err(syntax(header_no, "trailing tokens after header"));
    }

    let n_elements = match kind {
        ProblemKind::Mst => m,
        _ => n,
    };
    let mut intervals = vec![None; n_elements];
    for _ in 0..n_elements {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| ParseError::Incomplete("missing interval lines".into()))?;
        let mut tokens = line.split_whitespace();
        let id = parse_usize(lno, tokens.next().unwrap(), "element id")?;
        if id >= n_elements {
            return Err(syntax(lno, format!("element id {id} out of range")));
        }
        if intervals[id].is_some() {
            return Err(syntax(lno, format!("duplicate interval for element {id}")));
        }
        let tag = tokens.next().ok_or_else(|| syntax(lno, "missing OPEN/TRIV tag"))?;
        let interval = match tag {
            "OPEN" => {
                let lower = parse_scalar(
                    lno,
                    tokens.next().ok_or_else(|| syntax(lno, "missing lower limit"))?,
                )?;
                let upper = parse_scalar(
                    lno,
                    tokens.next().ok_or_else(|| syntax(lno, "missing upper limit"))?,
                )?;
                UncertaintyInterval::open(lower, upper)
                    .map_err(|e| ParseError::Model { line: lno, source: e.into() })?
            }
            "TRIV" => {
                let value = parse_scalar(
                    lno,
                    tokens.next().ok_or_else(|| syntax(lno, "missing trivial value"))?,
                )?;
                UncertaintyInterval::trivial(value)
            }
            other => return Err(syntax(lno, format!("expected OPEN or TRIV, got `{other}`"))),
        };
        if tokens.next().is_some() {
            return Err(syntax(lno, "trailing tokens after interval"));
        }
        intervals[id] = Some(interval);
    }
    let intervals: Vec<_> = intervals.into_iter().map(Option::unwrap).collect();

    let instance = match kind {
        ProblemKind::Minimum | ProblemKind::Sorting => {
            let mut sets = Vec::with_capacity(m);
            let mut first_line = 0usize;
            for _ in 0..m {
                let (lno, line) = lines
                    .next()
                    .ok_or_else(|| ParseError::Incomplete("missing set lines".into()))?;
                first_line = lno;
                let mut tokens = line.split_whitespace();
                if tokens.next() != Some("S") {
                    return Err(syntax(lno, "expected `S k id..` line"));
                }
                let k = parse_usize(
                    lno,
                    tokens.next().ok_or_else(|| syntax(lno, "missing set size"))?,
                    "set size",
                )?;
                let mut members = Vec::with_capacity(k);
                for _ in 0..k {
                    let id = parse_usize(
                        lno,
                        tokens.next().ok_or_else(|| syntax(lno, "missing set member"))?,
                        "element id",
                    )?;
                    members.push(ElementId(id as u32));
                }
                if tokens.next().is_some() {
                    return Err(syntax(lno, "trailing tokens after set"));
                }
                sets.push(members);
            }
            let build = match kind {
                ProblemKind::Minimum => MinimumInstance::new(intervals, sets).map(ProblemInstance::Minimum),
                _ => SortingInstance::new(intervals, sets).map(ProblemInstance::Sorting),
            };
            build.map_err(|e| ParseError::Model { line: first_line, source: e })?
        }
        ProblemKind::Mst => {
            let mut edges = Vec::with_capacity(m);
            let mut first_line = 0usize;
            for _ in 0..m {
                let (lno, line) = lines
                    .next()
                    .ok_or_else(|| ParseError::Incomplete("missing edge lines".into()))?;
                first_line = lno;
                let mut tokens = line.split_whitespace();
                if tokens.next() != Some("E") {
                    return Err(syntax(lno, "expected `E u v` line"));
                }
                let u = parse_usize(
                    lno,
                    tokens.next().ok_or_else(|| syntax(lno, "missing endpoint"))?,
                    "vertex",
                )?;
                let v = parse_usize(
                    lno,
                    tokens.next().ok_or_else(|| syntax(lno, "missing endpoint"))?,
                    "vertex",
                )?;
                if tokens.next().is_some() {
                    return Err(syntax(lno, "trailing tokens after edge"));
                }
                edges.push(MstEdge { u, v });
            }
            MstInstance::new(n, intervals, edges)
                .map(ProblemInstance::Mst)
                .map_err(|e| ParseError::Model { line: first_line, source: e })?
        }
    };

    let mut realization = None;
    let mut prediction = None;
    let mut distributions = None;
    while let Some((lno, line)) = lines.next() {
        match line {
            "REAL" => {
                let values = parse_value_block(&mut lines, &instance)?;
                realization = Some(
                    Realization::new(&instance, values)
                        .map_err(|e| ParseError::Model { line: lno, source: e })?,
                );
            }
            "PRED" => {
                let values = parse_value_block(&mut lines, &instance)?;
                prediction = Some(
                    Prediction::new(&instance, values)
                        .map_err(|e| ParseError::Model { line: lno, source: e })?,
                );
            }
            "DIST" => {
                let mut dists: Vec<Option<ValueDistribution>> =
                    vec![None; instance.n_elements()];
                while let Some((dno, dline)) = lines.peek() {
                    if !dline.starts_with("D ") {
                        break;
                    }
                    lines.next();
                    let mut tokens = dline.split_whitespace();
                    tokens.next();
                    let id = parse_usize(
                        dno,
                        tokens.next().ok_or_else(|| syntax(dno, "missing element id"))?,
                        "element id",
                    )?;
                    if id >= instance.n_elements() {
                        return Err(syntax(dno, format!("element id {id} out of range")));
                    }
                    let k = parse_usize(
                        dno,
                        tokens.next().ok_or_else(|| syntax(dno, "missing support size"))?,
                        "support size",
                    )?;
                    let mut support = Vec::with_capacity(k);
                    for _ in 0..k {
                        let value = parse_scalar(
                            dno,
                            tokens.next().ok_or_else(|| syntax(dno, "missing support value"))?,
                        )?;
                        let prob = parse_scalar(
                            dno,
                            tokens.next().ok_or_else(|| syntax(dno, "missing probability"))?,
                        )?;
                        support.push((value, prob));
                    }
                    if tokens.next().is_some() {
                        return Err(syntax(dno, "trailing tokens after distribution"));
                    }
                    dists[id] = Some(
                        ValueDistribution::new(support)
                            .map_err(|e| syntax(dno, format!("{e}")))?,
                    );
                }
                let dists: Vec<ValueDistribution> = dists
                    .into_iter()
                    .enumerate()
                    .map(|(i, d)| {
                        d.ok_or_else(|| {
                            ParseError::Incomplete(format!("no distribution for element {i}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                validate_distributions(&instance, &dists)
                    .map_err(|e| syntax(lno, format!("{e}")))?;
                distributions = Some(dists);
            }
            other => return Err(syntax(lno, format!("unexpected line `{other}`"))),
        }
    }

    Ok(InstanceFile { instance, realization, prediction, distributions })
}

fn write_values(out: &mut String, header: &str, instance: &ProblemInstance, values: &[Scalar]) {
    out.push_str(header);
    out.push('\n');
    for (i, interval) in instance.intervals().iter().enumerate() {
        if interval.is_open() {
            let _ = writeln!(out, "{i} {}", values[i]);
        }
    }
}

/// Serializes an instance (plus optional value blocks) in canonical form:
/// parsing the output and serializing again reproduces it byte for byte.
pub fn serialize_instance(
    instance: &ProblemInstance,
    realization: Option<&Realization>,
    prediction: Option<&Prediction>,
    distributions: Option<&[ValueDistribution]>,
) -> String {
    let mut out = String::new();
    let n = instance.n_elements();
    match instance {
        ProblemInstance::Minimum(_) => {
            let _ = writeln!(out, "MIN {n} {}", instance.sets().len());
        }
        ProblemInstance::Sorting(_) => {
            let _ = writeln!(out, "SORT {n} {}", instance.sets().len());
        }
        ProblemInstance::Mst(mst) => {
            let _ = writeln!(out, "MST {} {}", mst.n_vertices(), mst.edges().len());
        }
    }
    for (i, interval) in instance.intervals().iter().enumerate() {
        match interval {
            UncertaintyInterval::Trivial(v) => {
                let _ = writeln!(out, "{i} TRIV {v}");
            }
            UncertaintyInterval::Open { lower, upper } => {
                let _ = writeln!(out, "{i} OPEN {lower} {upper}");
            }
        }
    }
    match instance {
        ProblemInstance::Mst(mst) => {
            for edge in mst.edges() {
                let _ = writeln!(out, "E {} {}", edge.u, edge.v);
            }
        }
        _ => {
            for set in instance.sets() {
                let _ = write!(out, "S {}", set.len());
                for id in set {
                    let _ = write!(out, " {id}");
                }
                out.push('\n');
            }
        }
    }
    if let Some(real) = realization {
        write_values(&mut out, "REAL", instance, real.values());
    }
    if let Some(pred) = prediction {
        write_values(&mut out, "PRED", instance, pred.values());
    }
    if let Some(dists) = distributions {
        out.push_str("DIST\n");
        for (i, dist) in dists.iter().enumerate() {
            let _ = write!(out, "D {i} {}", dist.support().len());
            for &(value, prob) in dist.support() {
                let _ = write!(out, " {value} {prob}");
            }
            out.push('\n');
        }
    }
    out
}
