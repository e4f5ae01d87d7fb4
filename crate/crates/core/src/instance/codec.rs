//! Line-oriented text formats for instances and solutions.
//!
//! Instance document:
//!
//! ```text
//! c optional comments, anywhere
//! p degedit <n> <m>
//! g <d> <k> <ops>
//! d <v> <delta>      (n lines)
//! e <u> <v>          (m lines)
//! ```
//!
//! Solution document: `s yes|no|unknown` followed by `u <v>`, `r <u> <v>`
//! (deleted edge) and `a <u> <v>` (added pair) lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{EditSet, EditingInstance, InstanceError, OperationSet};
use crate::graph::{EdgePair, Graph, GraphError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; for errors found at end of input, one past the last line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("duplicate {0} line")]
    DuplicateSection(&'static str),
    #[error("missing {0} line")]
    MissingSection(&'static str),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("unexpected {0} line before the header")]
    BeforeHeader(&'static str),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("duplicate target degree for vertex {0}")]
    DuplicateVertex(Vertex),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("target degree {delta} of vertex {vertex} is outside 0..={d}")]
    DeltaOutOfRange { vertex: Vertex, delta: u32, d: u32 },
    #[error("expected {expected} {what} lines, found {found}")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
    #[error(transparent)]
    Instance(InstanceError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Parsed `p`/`g` header values.
struct Header {
    n: usize,
    m: usize,
}

struct Settings {
    d: u32,
    k: u32,
    ops: OperationSet,
}

fn numbers<'a, T: std::str::FromStr>(
    fields: impl Iterator<Item = &'a str>,
    count: usize,
    line_no: usize,
    raw: &str,
) -> Result<Vec<T>, ParseError> {
    let values: Vec<T> = fields
        .map(|f| f.parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| err(line_no, ParseErrorKind::Malformed(raw.to_string())))?;
    if values.len() != count {
        return Err(err(line_no, ParseErrorKind::Malformed(raw.to_string())));
    }
    Ok(values)
}

/// Parses an instance document.
pub fn parse_instance(text: &str) -> Result<EditingInstance, ParseError> {
    let mut header: Option<(usize, Header)> = None;
    let mut settings: Option<(usize, Settings)> = None;
    let mut delta: BTreeMap<Vertex, (usize, u32)> = BTreeMap::new();
    let mut edges: BTreeMap<EdgePair, usize> = BTreeMap::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        let mut fields = line.split_whitespace();
        let Some(tag) = fields.next() else { continue };
        match tag {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(err(line_no, ParseErrorKind::DuplicateSection("p")));
                }
                if fields.next() != Some("degedit") {
                    return Err(err(line_no, ParseErrorKind::BadHeader(line.to_string())));
                }
                let v: Vec<usize> = numbers(fields, 2, line_no, line)
                    .map_err(|_| err(line_no, ParseErrorKind::BadHeader(line.to_string())))?;
                header = Some((line_no, Header { n: v[0], m: v[1] }));
            }
            "g" => {
                if header.is_none() {
                    return Err(err(line_no, ParseErrorKind::BeforeHeader("g")));
                }
                if settings.is_some() {
                    return Err(err(line_no, ParseErrorKind::DuplicateSection("g")));
                }
                let parts: Vec<&str> = fields.collect();
                let malformed = || err(line_no, ParseErrorKind::Malformed(line.to_string()));
                let [d, k, ops] = parts.as_slice() else { return Err(malformed()) };
                let d: u32 = d.parse().map_err(|_| malformed())?;
                let k: u32 = k.parse().map_err(|_| malformed())?;
                let ops = OperationSet::from_letters(ops)
                    .map_err(|e| err(line_no, ParseErrorKind::Instance(e)))?;
                if d == 0 {
                    return Err(err(line_no, ParseErrorKind::Instance(InstanceError::ZeroDegreeBound)));
                }
                settings = Some((line_no, Settings { d, k, ops }));
            }
            "d" => {
                if header.is_none() {
                    return Err(err(line_no, ParseErrorKind::BeforeHeader("d")));
                }
                let v: Vec<u32> = numbers(fields, 2, line_no, line)?;
                if delta.insert(v[0], (line_no, v[1])).is_some() {
                    return Err(err(line_no, ParseErrorKind::DuplicateVertex(v[0])));
                }
            }
            "e" => {
                if header.is_none() {
                    return Err(err(line_no, ParseErrorKind::BeforeHeader("e")));
                }
                let v: Vec<u32> = numbers(fields, 2, line_no, line)?;
                let pair = EdgePair::new(v[0], v[1])
                    .map_err(|_| err(line_no, ParseErrorKind::SelfLoop(v[0])))?;
                if edges.insert(pair, line_no).is_some() {
                    return Err(err(line_no, ParseErrorKind::DuplicateEdge(v[0], v[1])));
                }
            }
            _ => return Err(err(line_no, ParseErrorKind::Malformed(line.to_string()))),
        }
    }

    let eof = last_line + 1;
    let (_, header) = header.ok_or_else(|| err(eof, ParseErrorKind::MissingSection("p")))?;
    let (_, settings) = settings.ok_or_else(|| err(eof, ParseErrorKind::MissingSection("g")))?;
    if delta.len() != header.n {
        return Err(err(
            eof,
            ParseErrorKind::CountMismatch { what: "d", expected: header.n, found: delta.len() },
        ));
    }
    if edges.len() != header.m {
        return Err(err(
            eof,
            ParseErrorKind::CountMismatch { what: "e", expected: header.m, found: edges.len() },
        ));
    }
    for (&vertex, &(line_no, target)) in &delta {
        if target > settings.d {
            return Err(err(
                line_no,
                ParseErrorKind::DeltaOutOfRange { vertex, delta: target, d: settings.d },
            ));
        }
    }
    for (pair, &line_no) in &edges {
        if let Some(&x) = pair.endpoints().iter().find(|x| !delta.contains_key(x)) {
            return Err(err(line_no, ParseErrorKind::UnknownVertex(x)));
        }
    }

    let graph = Graph::new(delta.keys().copied(), edges.keys().map(|e| (e.u(), e.v())))
        .map_err(|e| err(eof, ParseErrorKind::Instance(InstanceError::Graph(e))))?;
    let targets = delta.into_iter().map(|(v, (_, t))| (v, t)).collect();
    EditingInstance::new(graph, targets, settings.d, settings.k, settings.ops)
        .map_err(|e| err(eof, ParseErrorKind::Instance(e)))
}

/// Serializes an instance in canonical order.
pub fn write_instance(inst: &EditingInstance) -> String {
    let g = inst.graph();
    let mut out = String::new();
    writeln!(out, "p degedit {} {}", g.vertex_count(), g.edge_count()).unwrap();
    writeln!(out, "g {} {} {}", inst.d(), inst.k(), inst.ops()).unwrap();
    for (v, t) in inst.delta() {
        writeln!(out, "d {v} {t}").unwrap();
    }
    for e in g.edges() {
        writeln!(out, "e {} {}", e.u(), e.v()).unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// No witness found, but none ruled out either.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// A verdict with its (possibly empty) witness and free-form comment lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionDocument {
    pub verdict: Verdict,
    pub edits: EditSet,
    pub comments: Vec<String>,
}

impl SolutionDocument {
    pub fn yes(edits: EditSet) -> Self {
        SolutionDocument { verdict: Verdict::Yes, edits, comments: Vec::new() }
    }

    pub fn without_witness(verdict: Verdict) -> Self {
        SolutionDocument { verdict, edits: EditSet::default(), comments: Vec::new() }
    }
}

/// Parses a solution document. Comment lines are kept in order.
pub fn parse_solution(text: &str) -> Result<SolutionDocument, ParseError> {
    let mut verdict = None;
    let mut edits = EditSet::default();
    let mut comments = Vec::new();
    let mut seen_vertices = BTreeSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        let mut fields = line.split_whitespace();
        let Some(tag) = fields.next() else { continue };
        let malformed = || err(line_no, ParseErrorKind::Malformed(line.to_string()));
        match tag {
            "c" => comments.push(line[1..].trim_start().to_string()),
            "s" => {
                if verdict.is_some() {
                    return Err(err(line_no, ParseErrorKind::DuplicateSection("s")));
                }
                let parts: Vec<&str> = fields.collect();
                verdict = Some(match parts.as_slice() {
                    ["yes"] => Verdict::Yes,
                    ["no"] => Verdict::No,
                    ["unknown"] => Verdict::Unknown,
                    _ => return Err(malformed()),
                });
            }
            "u" | "r" | "a" => {
                if verdict.is_none() {
                    return Err(err(line_no, ParseErrorKind::BeforeHeader("edit")));
                }
                if tag == "u" {
                    let v: Vec<u32> = numbers(fields, 1, line_no, line)?;
                    if !seen_vertices.insert(v[0]) {
                        return Err(err(line_no, ParseErrorKind::DuplicateVertex(v[0])));
                    }
                    edits.deleted_vertices.insert(v[0]);
                } else {
                    let v: Vec<u32> = numbers(fields, 2, line_no, line)?;
                    let pair = EdgePair::new(v[0], v[1]).map_err(|e| match e {
                        GraphError::SelfLoop(x) => err(line_no, ParseErrorKind::SelfLoop(x)),
                        _ => malformed(),
                    })?;
                    let target =
                        if tag == "r" { &mut edits.deleted_edges } else { &mut edits.added_edges };
                    if !target.insert(pair) {
                        return Err(err(line_no, ParseErrorKind::DuplicateEdge(v[0], v[1])));
                    }
                }
            }
            _ => return Err(malformed()),
        }
    }
    let verdict = verdict.ok_or_else(|| err(last_line + 1, ParseErrorKind::MissingSection("s")))?;
    Ok(SolutionDocument { verdict, edits, comments })
}

/// Serializes a solution document: verdict, edits in canonical order, then comments.
pub fn write_solution(doc: &SolutionDocument) -> String {
    let mut out = String::new();
    writeln!(out, "s {}", doc.verdict).unwrap();
    for v in &doc.edits.deleted_vertices {
        writeln!(out, "u {v}").unwrap();
    }
    for e in &doc.edits.deleted_edges {
        writeln!(out, "r {} {}", e.u(), e.v()).unwrap();
    }
    for e in &doc.edits.added_edges {
        writeln!(out, "a {} {}", e.u(), e.v()).unwrap();
    }
    for c in &doc.comments {
        writeln!(out, "c {c}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k2() -> EditingInstance {
        let delta = [(1, 1), (2, 1)].into_iter().collect();
        EditingInstance::new(Graph::path(2), delta, 1, 0, OperationSet::ALL).unwrap()
    }

    const K2_DOC: &str = "p degedit 2 1\ng 1 0 VDA\nd 1 1\nd 2 1\ne 1 2\n";

    #[test]
    fn k2_document_is_exact() {
        assert_eq!(write_instance(&k2()), K2_DOC);
        assert_eq!(parse_instance(K2_DOC).unwrap(), k2());
    }

    #[test]
    fn sections_may_come_in_any_order() {
        let doc = "c shuffled\np degedit 2 1\ne 2 1\nd 2 1\ng 1 0 VDA\nc mid\nd 1 1\n";
        assert_eq!(parse_instance(doc).unwrap(), k2());
    }

    #[test]
    fn self_loop_is_rejected_at_its_line() {
        let e = parse_instance("p degedit 2 1\ne 1 1\n").unwrap_err();
        assert_eq!(e, ParseError { line: 2, kind: ParseErrorKind::SelfLoop(1) });
    }

    #[test]
    fn parse_errors_carry_reasons() {
        type KindCheck = fn(&ParseErrorKind) -> bool;
        let cases: &[(&str, KindCheck)] = &[
            ("p graph 2 1\n", |k| matches!(k, ParseErrorKind::BadHeader(_))),
            ("p degedit 2 0\ng 1 0 VDA\nd 1 1\n", |k| {
                matches!(k, ParseErrorKind::CountMismatch { what: "d", .. })
            }),
            ("p degedit 2 0\nd 1 1\nd 2 1\n", |k| matches!(k, ParseErrorKind::MissingSection("g"))),
            ("g 1 0 VDA\n", |k| matches!(k, ParseErrorKind::BeforeHeader("g"))),
            ("p degedit 2 2\ng 1 0 VDA\nd 1 1\nd 2 1\ne 1 2\ne 2 1\n", |k| {
                matches!(k, ParseErrorKind::DuplicateEdge(2, 1))
            }),
            ("p degedit 2 0\ng 1 0 VDA\nd 1 1\nd 2 3\n", |k| {
                matches!(k, ParseErrorKind::DeltaOutOfRange { vertex: 2, delta: 3, d: 1 })
            }),
            ("p degedit 2 1\ng 1 0 VDA\nd 1 1\nd 2 1\ne 1 5\n", |k| {
                matches!(k, ParseErrorKind::UnknownVertex(5))
            }),
            ("p degedit 1 0\ng 1 0 XY\nd 1 1\n", |k| matches!(k, ParseErrorKind::Instance(_))),
            ("p degedit 1 0\ng 1 0 VDA\nd 1 x\n", |k| matches!(k, ParseErrorKind::Malformed(_))),
        ];
        for (doc, check) in cases {
            let e = parse_instance(doc).unwrap_err();
            assert!(check(&e.kind), "{doc:?} gave {e}");
        }
    }

    #[test]
    fn out_of_range_reports_the_d_line() {
        let e = parse_instance("p degedit 2 0\ng 1 0 VDA\nd 1 1\nd 2 3\n").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn solution_document_round_trip() {
        let edits = EditSet::new(
            [2],
            [EdgePair::new(4, 5).unwrap()],
            [EdgePair::new(1, 3).unwrap()],
        );
        let mut doc = SolutionDocument::yes(edits);
        doc.comments.push("cost 3".into());
        let text = write_solution(&doc);
        assert_eq!(text, "s yes\nu 2\nr 4 5\na 1 3\nc cost 3\n");
        assert_eq!(parse_solution(&text).unwrap(), doc);
        assert_eq!(parse_solution("s no\n").unwrap().verdict, Verdict::No);
        assert!(parse_solution("u 1\n").is_err());
        assert!(parse_solution("s maybe\n").is_err());
    }

    fn arb_instance() -> impl Strategy<Value = EditingInstance> {
        (1u32..8, 1u32..5, 0u32..6, 0usize..7).prop_flat_map(|(n, d, k, ops)| {
            let pairs: Vec<(u32, u32)> =
                (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
            let m = pairs.len();
            (
                proptest::collection::vec(any::<bool>(), m),
                proptest::collection::vec(0..=d, n as usize),
            )
                .prop_map(move |(mask, targets)| {
                    let edges = pairs.iter().zip(&mask).filter(|(_, &b)| b).map(|(&e, _)| e);
                    let g = Graph::new(1..=n, edges).unwrap();
                    let delta = (1..=n).zip(targets).collect();
                    let letters = ["V", "D", "A", "VD", "VA", "DA", "VDA"][ops];
                    let ops = OperationSet::from_letters(letters).unwrap();
                    EditingInstance::new(g, delta, d, k, ops).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn instance_round_trip(inst in arb_instance()) {
            let text = write_instance(&inst);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(write_instance(&back), text);
        }
    }
}
