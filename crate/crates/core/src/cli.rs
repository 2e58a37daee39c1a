//! The `possibility` command-line tool.
//!
//! Every subcommand except `export-dot` prints `key: value` lines and ends
//! with `verdict: true|false`. Exit status is 0 for a true verdict, 1 for a
//! false one, 2 for unusable input and 3 when a budget or size cap stops the
//! computation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bao::{
    check_bao_hom, eta_a, eta_f, filter_frame, full_frame, general_filter_frame, principal_frame,
    underlying_bao, zeta_a, zeta_f, BaoMap, FiniteBAO,
};
use crate::bits::StateSet;
use crate::correspondence::{
    ls_axiom, ls_condition, ls_condition_text, standard_translation, verify_correspondence,
    LsSchema, PathKind,
};
use crate::document::{
    bao_to_compact_json, frame_to_compact_json, frame_to_dot, parse_bao, parse_frame,
    parse_frame_document, parse_valuation,
};
use crate::enumerate::{enumerate_baos, enumerate_full_frames, enumerate_posets};
use crate::error::{Error, Result};
use crate::forcing::{truth_set, valid_on_frame_with_budget, Model, DEFAULT_BUDGET};
use crate::formula::parse;
use crate::frame::{classify, validate_frame, FinitePoset, Frame};
use crate::morphism::{check_morphism, find_morphism, Flag, Grade, MorphismSpec};
use crate::report::CheckReport;
use crate::transform::{
    atom_structure, box_tighten, disjoint_union, extend_bot, functionalize,
    powerset_possibilization, restrict_bot, separative_quotient, subframe, tighten,
};

#[derive(Parser, Debug)]
#[command(name = "possibility", version, about = "Check, transform and compare finite possibility frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the possibility-frame axioms.
    Validate { frame: PathBuf },
    /// Print every frame-class flag.
    Classify { frame: PathBuf },
    /// Forcing of a formula at one state under a valuation.
    Force {
        frame: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[arg(long)]
        at: usize,
        formula: String,
    },
    /// Validity of a formula on a frame.
    Valid {
        frame: PathBuf,
        formula: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Build a derived frame.
    Transform {
        name: TransformName,
        #[arg(required = true)]
        frames: Vec<PathBuf>,
        /// Comma-separated states, for `subframe`.
        #[arg(long)]
        subset: Option<String>,
    },
    /// Pass between frames and algebras.
    Dual { name: DualName, input: PathBuf },
    /// Check or search for morphisms between two frames.
    Morphism {
        #[command(subcommand)]
        action: MorphismAction,
    },
    /// List structures up to isomorphism.
    Enumerate {
        what: EnumKind,
        /// Number of states (posets, frames) or atoms (algebras).
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = "i", value_delimiter = ',')]
        indices: Vec<String>,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
    },
    /// Show the axiom and first-order condition of a Lemmon-Scott schema
    /// `alpha;beta;delta;gamma`, optionally checking both on a frame.
    Correspond {
        schema: String,
        #[arg(long)]
        kripke: bool,
        #[arg(long)]
        frame: Option<PathBuf>,
    },
    /// Compare axiom validity with the condition over every full standard
    /// frame (or every Kripke frame) up to a size.
    Sweep {
        schema: String,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        kripke: bool,
    },
    /// Graphviz source for a frame.
    ExportDot { frame: PathBuf },
}

#[derive(Subcommand, Debug)]
enum MorphismAction {
    Check {
        source: PathBuf,
        target: PathBuf,
        /// Image of each source state, comma-separated.
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "p")]
        grade: String,
        #[arg(long = "flag")]
        flags: Vec<String>,
    },
    Find {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, default_value = "p")]
        grade: String,
        #[arg(long = "flag")]
        flags: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformName {
    BoxTighten,
    SeparativeQuotient,
    Tighten,
    Functionalize,
    AtomStructure,
    Powerset,
    DisjointUnion,
    Subframe,
    ExtendBot,
    RestrictBot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DualName {
    Under,
    PrincipalFrame,
    FullFrame,
    FilterFrame,
    Gff,
    ZetaA,
    ZetaF,
    EtaA,
    EtaF,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnumKind {
    Posets,
    Frames,
    Baos,
}

/// Accumulated `key: value` lines and the final verdict.
struct Output {
    lines: Vec<String>,
    verdict: bool,
}

impl Output {
    fn new() -> Output {
        Output {
            lines: Vec::new(),
            verdict: true,
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    fn report(&mut self, r: &CheckReport) {
        self.kv("condition", &r.condition);
        if let Some(w) = &r.witness {
            self.kv("witness", w);
        }
        self.verdict = r.verdict;
    }
}

enum Rendered {
    Lines(Output),
    Raw(String),
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(Rendered::Raw(s)) => {
            let _ = out.write_all(s.as_bytes());
            0
        }
        Ok(Rendered::Lines(o)) => {
            for l in &o.lines {
                let _ = writeln!(out, "{l}");
            }
            let _ = writeln!(out, "verdict: {}", o.verdict);
            if o.verdict {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExceeded(_) | Error::CapExceeded(_) => 3,
                _ => 2,
            }
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load_frame(path: &Path) -> Result<Frame> {
    parse_frame(&read(path)?)
}

fn load_bao(path: &Path) -> Result<FiniteBAO> {
    parse_bao(&read(path)?)
}

fn state_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<usize>().map_err(|_| Error::Syntax {
                offset: 0,
                expected: vec![format!("a state number, found `{s}`")],
            })
        })
        .collect()
}

fn parse_flags(flags: &[String]) -> Result<Vec<Flag>> {
    flags.iter().map(|f| f.parse()).collect()
}

fn show_map(map: &[usize]) -> String {
    let items: Vec<String> = map.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(","))
}

fn poset_json(p: &FinitePoset) -> String {
    let pairs: Vec<String> = p
        .pairs()
        .into_iter()
        .filter(|(x, y)| x != y)
        .map(|(x, y)| format!("[{x},{y}]"))
        .collect();
    format!("{{\"states\":{},\"leq\":[{}]}}", p.n(), pairs.join(","))
}

fn execute(cmd: Command) -> Result<Rendered> {
    let mut o = Output::new();
    match cmd {
        Command::Validate { frame } => {
            let f = parse_frame_document(&read(&frame)?)?.to_unchecked_frame()?;
            o.kv("states", f.n());
            o.kv("admissible", f.props().len());
            o.report(&validate_frame(&f));
        }
        Command::Classify { frame } => {
            let f = load_frame(&frame)?;
            for (name, value) in classify(&f)?.flags() {
                o.kv(name, value);
            }
        }
        Command::Force {
            frame,
            val,
            at,
            formula,
        } => {
            let f = load_frame(&frame)?;
            let phi = parse(&formula)?;
            let valuation = parse_valuation(&read(&val)?, f.n())?;
            f.poset().states().contains(at).then_some(()).ok_or(Error::StateOutOfRange {
                state: at,
                n: f.n(),
            })?;
            let model = Model::new(f, valuation)?;
            let truth = truth_set(&model, &phi)?;
            o.kv("formula", &phi);
            o.kv("state", at);
            o.kv("truth_set", truth);
            o.verdict = truth.contains(at);
        }
        Command::Valid {
            frame,
            formula,
            budget,
        } => {
            let f = load_frame(&frame)?;
            let phi = parse(&formula)?;
            o.report(&valid_on_frame_with_budget(&f, &phi, budget)?);
        }
        Command::Transform {
            name,
            frames,
            subset,
        } => transform(&mut o, name, &frames, subset.as_deref())?,
        Command::Dual { name, input } => dual(&mut o, name, &input)?,
        Command::Morphism { action } => morphism(&mut o, action)?,
        Command::Enumerate {
            what,
            size,
            indices,
            count_only,
        } => {
            let idx: Vec<&str> = indices.iter().map(String::as_str).collect();
            let docs: Vec<String> = match what {
                EnumKind::Posets => enumerate_posets(size)?.iter().map(poset_json).collect(),
                EnumKind::Frames => enumerate_full_frames(size, &idx)?.iter().map(frame_to_compact_json).collect(),
                EnumKind::Baos => enumerate_baos(size, &idx)?.iter().map(bao_to_compact_json).collect(),
            };
            o.kv("count", docs.len());
            if !count_only {
                let key = match what {
                    EnumKind::Posets => "poset",
                    EnumKind::Frames => "frame",
                    EnumKind::Baos => "algebra",
                };
                for d in docs {
                    o.kv(key, d);
                }
            }
        }
        Command::Correspond {
            schema,
            kripke,
            frame,
        } => {
            let s = LsSchema::parse(&schema)?;
            let kind = if kripke { PathKind::Kripke } else { PathKind::Possibility };
            let axiom = ls_axiom(&s);
            o.kv("schema", &s);
            o.kv("axiom", &axiom);
            o.kv("condition", ls_condition_text(&s, kind));
            o.kv("translation", standard_translation(&axiom, "x"));
            if let Some(path) = frame {
                let f = load_frame(&path)?;
                let valid = crate::forcing::valid_on_frame(&f, &axiom)?.verdict;
                let cond = ls_condition(&f, &s, kind)?;
                o.kv("valid", valid);
                o.kv("condition_holds", cond.verdict);
                o.verdict = valid == cond.verdict;
            }
        }
        Command::Sweep {
            schema,
            max_size,
            kripke,
        } => {
            let s = LsSchema::parse(&schema)?;
            let mut idx: Vec<&str> = s.indices().map(String::as_str).collect();
            idx.sort_unstable();
            idx.dedup();
            let mut frames = Vec::new();
            for n in 1..=max_size {
                for f in enumerate_full_frames(n, &idx)? {
                    let keep = if kripke {
                        *f.poset() == FinitePoset::discrete(n)
                    } else {
                        classify(&f)?.standard
                    };
                    if keep {
                        frames.push(f);
                    }
                }
            }
            let kind = if kripke { PathKind::Kripke } else { PathKind::Possibility };
            let rep = verify_correspondence(&s, frames, kind)?;
            o.kv("schema", &s);
            o.kv("frame_class", if kripke { "kripke" } else { "full standard" });
            o.kv("frames", rep.checked);
            o.kv("divergences", rep.divergences.len());
            match rep.divergences.first() {
                None => o.kv("result", format!("no divergence, {} frames checked", rep.checked)),
                Some(d) => {
                    o.kv("first_divergence", frame_to_compact_json(&d.frame));
                    o.kv("valid", d.valid);
                    o.kv("condition_holds", d.condition);
                    o.verdict = false;
                }
            }
        }
        Command::ExportDot { frame } => return Ok(Rendered::Raw(frame_to_dot(&load_frame(&frame)?))),
    }
    Ok(Rendered::Lines(o))
}

fn transform(o: &mut Output, name: TransformName, paths: &[PathBuf], subset: Option<&str>) -> Result<()> {
    let frames = paths.iter().map(|p| load_frame(p)).collect::<Result<Vec<_>>>()?;
    if !matches!(name, TransformName::DisjointUnion) && frames.len() != 1 {
        return Err(Error::Precondition(format!("{name:?} takes exactly one frame")));
    }
    let f = &frames[0];
    let (result, map): (Frame, Option<Vec<usize>>) = match name {
        TransformName::BoxTighten => (box_tighten(f)?, None),
        TransformName::SeparativeQuotient => {
            let (g, m) = separative_quotient(f)?;
            (g, Some(m))
        }
        TransformName::Tighten => {
            let (g, m) = tighten(f)?;
            (g, Some(m))
        }
        TransformName::Functionalize => (functionalize(f)?, None),
        TransformName::AtomStructure => {
            let (g, keep) = atom_structure(f)?;
            o.kv("kept", show_map(&keep));
            (g, None)
        }
        TransformName::Powerset => (powerset_possibilization(f)?, None),
        TransformName::DisjointUnion => {
            let (g, injections) = disjoint_union(&frames)?;
            for inj in &injections {
                o.kv("injection", show_map(inj));
            }
            (g, None)
        }
        TransformName::Subframe => {
            let states = state_list(subset.ok_or_else(|| Error::Precondition("subframe needs --subset".into()))?)?;
            let (g, kind, keep) = subframe(f, StateSet::from_states(states))?;
            o.kv("kind", kind);
            o.kv("kept", show_map(&keep));
            (g, None)
        }
        TransformName::ExtendBot => (extend_bot(f)?, None),
        TransformName::RestrictBot => (restrict_bot(f)?, None),
    };
    if let Some(m) = map {
        o.kv("map", show_map(&m));
    }
    o.kv("states", result.n());
    o.kv("frame", frame_to_compact_json(&result));
    Ok(())
}

fn is_bao_iso(h: &BaoMap) -> Result<bool> {
    Ok(h.is_injective() && h.is_surjective() && check_bao_hom(h, false)?.verdict)
}

fn frame_map_is_iso(m: &MorphismSpec) -> Result<bool> {
    let mut spec = m.clone();
    spec.flags.insert(Flag::Isomorphism);
    Ok(check_morphism(&spec)?.verdict)
}

fn dual(o: &mut Output, name: DualName, input: &Path) -> Result<()> {
    match name {
        DualName::Under => {
            let b = underlying_bao(&load_frame(input)?)?;
            o.kv("elements", b.len());
            o.kv("algebra", bao_to_compact_json(&b));
        }
        DualName::PrincipalFrame | DualName::FullFrame | DualName::FilterFrame | DualName::Gff => {
            let b = load_bao(input)?;
            let f = match name {
                DualName::PrincipalFrame => principal_frame(&b)?,
                DualName::FullFrame => full_frame(&b)?,
                DualName::FilterFrame => filter_frame(&b)?,
                _ => general_filter_frame(&b)?,
            };
            o.kv("states", f.n());
            o.kv("frame", frame_to_compact_json(&f));
        }
        DualName::ZetaA | DualName::EtaA => {
            let b = load_bao(input)?;
            let h = if matches!(name, DualName::ZetaA) { zeta_a(&b)? } else { eta_a(&b)? };
            o.kv("map", show_map(&h.map));
            o.kv("target", bao_to_compact_json(&h.target));
            let iso = is_bao_iso(&h)?;
            o.kv("isomorphism", iso);
            o.verdict = iso;
        }
        DualName::ZetaF | DualName::EtaF => {
            let f = load_frame(input)?;
            let m = if matches!(name, DualName::ZetaF) { zeta_f(&f)? } else { eta_f(&f)? };
            o.kv("map", show_map(&m.map));
            o.kv("target", frame_to_compact_json(&m.target));
            let rep = check_morphism(&m)?;
            o.kv("morphism", rep.verdict);
            let iso = frame_map_is_iso(&m)?;
            o.kv("isomorphism", iso);
            o.verdict = iso;
        }
    }
    Ok(())
}

fn morphism(o: &mut Output, action: MorphismAction) -> Result<()> {
    match action {
        MorphismAction::Check {
            source,
            target,
            map,
            grade,
            flags,
        } => {
            let grade: Grade = grade.parse()?;
            let spec = MorphismSpec::new(
                load_frame(&source)?,
                load_frame(&target)?,
                state_list(&map)?,
                grade,
                parse_flags(&flags)?,
            )?;
            o.report(&check_morphism(&spec)?);
        }
        MorphismAction::Find {
            source,
            target,
            grade,
            flags,
        } => {
            let grade: Grade = grade.parse()?;
            let flags = parse_flags(&flags)?;
            match find_morphism(&load_frame(&source)?, &load_frame(&target)?, grade, &flags)? {
                Some(spec) => o.kv("map", show_map(&spec.map)),
                None => {
                    o.kv("map", "none");
                    o.verdict = false;
                }
            }
        }
    }
    Ok(())
}
