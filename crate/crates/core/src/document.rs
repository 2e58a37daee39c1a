//! JSON documents for frames, valuations and algebras, and Graphviz export.
//!
//! A frame document looks like
//!
//! ```json
//! { "states": 3, "leq": [[1, 0], [2, 0]], "rels": { "i": [[0, 1], [1, 1]] }, "props": "full" }
//! ```
//!
//! where `[x, y]` in `leq` means `x ⊑ y`. Reflexive pairs may be left out,
//! but the pairs are not closed under transitivity. `props` is either the
//! marker `"full"` or a list of state lists, and `"extended": true` makes the
//! minimum state the impossible state. Reading a document validates the
//! frame it describes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bao::FiniteBAO;
use crate::bits::StateSet;
use crate::error::{Error, Result};
use crate::forcing::Valuation;
use crate::frame::{validate_frame, FinitePoset, Frame, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Marker {
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "powerset")]
    Powerset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetsOrMarker {
    Marker(Marker),
    Sets(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    pub states: usize,
    #[serde(default)]
    pub leq: Vec<[usize; 2]>,
    #[serde(default)]
    pub rels: BTreeMap<String, Vec<[usize; 2]>>,
    pub props: SetsOrMarker,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub extended: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaoDocument {
    pub atoms: usize,
    pub elements: SetsOrMarker,
    /// For each index, the element index of `■a` for each element `a`, in
    /// the order the elements are listed.
    #[serde(default)]
    pub ops: BTreeMap<String, Vec<usize>>,
}

fn located(e: serde_json::Error) -> Error {
    Error::Document {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn structural(message: impl Into<String>) -> Error {
    Error::Document {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(located)
}

fn to_set(states: &[usize], n: usize) -> Result<StateSet> {
    match states.iter().find(|&&s| s >= n) {
        Some(&s) => Err(Error::StateOutOfRange { state: s, n }),
        None => Ok(StateSet::from_states(states.iter().copied())),
    }
}

fn pairs(list: &[[usize; 2]]) -> Vec<(usize, usize)> {
    list.iter().map(|&[x, y]| (x, y)).collect()
}

impl FrameDocument {
    /// Builds and validates the frame.
    pub fn to_frame(&self) -> Result<Frame> {
        let frame = self.to_unchecked_frame()?;
        let report = validate_frame(&frame);
        if !report.verdict {
            return Err(Error::InvalidFrame(report.to_string().replace('\n', "; ")));
        }
        Ok(frame)
    }

    /// Builds the frame the document describes, checking only that the
    /// order is a partial order and that every state is in range.
    pub fn to_unchecked_frame(&self) -> Result<Frame> {
        let n = self.states;
        let poset = FinitePoset::new(n, &pairs(&self.leq))?;
        let rels = self
            .rels
            .iter()
            .map(|(i, ps)| Ok((i.clone(), Relation::from_pairs(n, &pairs(ps))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let frame = match (&self.props, self.extended) {
            (SetsOrMarker::Marker(Marker::Full), false) => Frame::full(poset, rels)?,
            (SetsOrMarker::Marker(Marker::Full), true) => Frame::extended_full(poset, rels)?,
            (SetsOrMarker::Sets(sets), ext) => {
                let props = sets.iter().map(|s| to_set(s, n)).collect::<Result<Vec<_>>>()?;
                if ext {
                    Frame::extended(poset, rels, props)?
                } else {
                    Frame::new(poset, rels, props)?
                }
            }
            (SetsOrMarker::Marker(Marker::Powerset), _) => {
                return Err(structural("frame props must be a list of sets or \"full\""));
            }
        };
        Ok(frame)
    }

    /// The document of a frame: strict order pairs, relation pairs and the
    /// admissible family, all sorted.
    pub fn from_frame(frame: &Frame) -> FrameDocument {
        let leq = frame
            .poset()
            .pairs()
            .into_iter()
            .filter(|(x, y)| x != y)
            .map(|(x, y)| [x, y])
            .collect();
        let rels = frame
            .rels()
            .iter()
            .map(|(i, r)| (i.clone(), r.pairs().into_iter().map(|(x, y)| [x, y]).collect()))
            .collect();
        let props = if frame.is_marked_full() {
            SetsOrMarker::Marker(Marker::Full)
        } else {
            SetsOrMarker::Sets(frame.props().iter().map(|s| s.to_vec()).collect())
        };
        FrameDocument {
            states: frame.n(),
            leq,
            rels,
            props,
            extended: frame.bot().is_some(),
        }
    }
}

impl BaoDocument {
    pub fn to_bao(&self) -> Result<FiniteBAO> {
        let m = self.atoms;
        if m > 16 {
            return Err(Error::CapExceeded(format!("algebra over {m} atoms")));
        }
        let elements: Vec<StateSet> = match &self.elements {
            SetsOrMarker::Marker(Marker::Powerset) => {
                let mut all: Vec<StateSet> = StateSet::full(m).subsets().collect();
                all.sort();
                all
            }
            SetsOrMarker::Sets(sets) => sets.iter().map(|s| to_set(s, m)).collect::<Result<_>>()?,
            SetsOrMarker::Marker(Marker::Full) => {
                return Err(structural("algebra elements must be a list of atom sets or \"powerset\""));
            }
        };
        let mut ops = BTreeMap::new();
        for (i, table) in &self.ops {
            if table.len() != elements.len() {
                return Err(structural(format!(
                    "operator `{i}` has {} entries for {} elements",
                    table.len(),
                    elements.len()
                )));
            }
            let images = table
                .iter()
                .map(|&k| {
                    elements.get(k).copied().ok_or(Error::StateOutOfRange {
                        state: k,
                        n: elements.len(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ops.insert(i.clone(), images);
        }
        FiniteBAO::new(m, elements, ops)
    }

    /// The document of an algebra, elements in canonical order; a full
    /// powerset is written with the `"powerset"` marker.
    pub fn from_bao(b: &FiniteBAO) -> BaoDocument {
        let m = b.universe();
        let elements = if m < 64 && b.len() == 1usize << m {
            SetsOrMarker::Marker(Marker::Powerset)
        } else {
            SetsOrMarker::Sets(b.elements().iter().map(|s| s.to_vec()).collect())
        };
        BaoDocument {
            atoms: m,
            elements,
            ops: b.ops().clone(),
        }
    }
}

/// Reads a frame document without building the frame.
pub fn parse_frame_document(text: &str) -> Result<FrameDocument> {
    parse_json(text)
}

pub fn parse_frame(text: &str) -> Result<Frame> {
    parse_frame_document(text)?.to_frame()
}

pub fn parse_bao(text: &str) -> Result<FiniteBAO> {
    parse_json::<BaoDocument>(text)?.to_bao()
}

/// A valuation document maps variables to state lists; values are checked
/// against the frame's admissible family when a model is built.
pub fn parse_valuation(text: &str, n: usize) -> Result<Valuation> {
    let raw: BTreeMap<String, Vec<usize>> = parse_json(text)?;
    raw.into_iter().map(|(v, s)| Ok((v, to_set(&s, n)?))).collect()
}

/// Pretty JSON with a trailing newline.
pub fn frame_to_json(frame: &Frame) -> String {
    let mut s = serde_json::to_string_pretty(&FrameDocument::from_frame(frame)).expect("serializable");
    s.push('\n');
    s
}

pub fn bao_to_json(b: &FiniteBAO) -> String {
    let mut s = serde_json::to_string_pretty(&BaoDocument::from_bao(b)).expect("serializable");
    s.push('\n');
    s
}

/// One-line JSON, for embedding in line-oriented output.
pub fn frame_to_compact_json(frame: &Frame) -> String {
    serde_json::to_string(&FrameDocument::from_frame(frame)).expect("serializable")
}

pub fn bao_to_compact_json(b: &FiniteBAO) -> String {
    serde_json::to_string(&BaoDocument::from_bao(b)).expect("serializable")
}

/// Graphviz source for a frame. A solid edge `s -> t` says `t ⊑ s` and is
/// drawn for covering pairs only; a dashed edge labelled `i` says `s Rᵢ t`.
pub fn frame_to_dot(frame: &Frame) -> String {
    let mut out = String::from("digraph frame {\n  rankdir=TB;\n  node [shape=circle];\n");
    for x in 0..frame.n() {
        if frame.bot() == Some(x) {
            let _ = writeln!(out, "  {x} [label=\"⊥\", shape=doublecircle];");
        } else {
            let _ = writeln!(out, "  {x};");
        }
    }
    for (x, y) in frame.poset().covers() {
        let _ = writeln!(out, "  {y} -> {x};");
    }
    for (i, r) in frame.rels() {
        for (x, y) in r.pairs() {
            let _ = writeln!(out, "  {x} -> {y} [style=dashed, label=\"{i}\"];");
        }
    }
    out.push_str("}\n");
    out
}
