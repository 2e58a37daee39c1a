//! Acceptance run. Prints one line per criterion and exits nonzero when any
//! criterion fails. Criterion numbers given as arguments restrict the run.
//!
//! Where a check has an independent oracle (regular open sets, boxes, the
//! operators of an algebra) it is written out here rather than taken from
//! the library.

use std::collections::{BTreeMap, BTreeSet};
use std::error::Error as StdError;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use possibility::bao::*;
use possibility::battery::battery;
use possibility::bits::StateSet;
use possibility::cli::run;
use possibility::correspondence::*;
use possibility::document::{frame_to_json, parse_frame};
use possibility::enumerate::*;
use possibility::forcing::{kripke_valid, truth_set_difference, valid_on_frame, KripkeFrame, ValidityChecker};
use possibility::formula::Formula;
use possibility::frame::*;
use possibility::morphism::*;
use possibility::transform::*;

type Outcome = Result<String, Box<dyn StdError>>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+).into());
        }
    };
}

fn one(r: Relation) -> BTreeMap<String, Relation> {
    BTreeMap::from([("i".to_string(), r)])
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn corpus_frame(name: &str) -> Result<Frame, Box<dyn StdError>> {
    Ok(parse_frame(&fs::read_to_string(corpus().join(name))?)?)
}

// Oracles on the down-set topology, written from the definitions.

/// `{x | ↓x ∩ a = ∅}`.
fn oracle_neg(p: &FinitePoset, a: StateSet) -> StateSet {
    (0..p.n()).filter(|&x| !p.down(x).intersects(a)).collect()
}

/// `int(cl(a))`: every refinement of `x` is compatible with `a` from below.
fn oracle_ro_hull(p: &FinitePoset, a: StateSet) -> StateSet {
    (0..p.n())
        .filter(|&x| p.down(x).iter().all(|y| p.down(y).intersects(a)))
        .collect()
}

fn oracle_regular_opens(p: &FinitePoset) -> Vec<StateSet> {
    sorted(p.states().subsets().filter(|&x| oracle_ro_hull(p, x) == x).collect())
}

/// `{x | R(x) ⊆ a}`.
fn oracle_box(r: &Relation, a: StateSet) -> StateSet {
    (0..r.n()).filter(|&x| r.succ(x).is_subset(a)).collect()
}

fn sorted(mut v: Vec<StateSet>) -> Vec<StateSet> {
    v.sort();
    v.dedup();
    v
}

fn validities(f: &Frame, formulas: &[Formula]) -> Result<Vec<bool>, Box<dyn StdError>> {
    let checker = ValidityChecker::new(f)?;
    let mut out = Vec::with_capacity(formulas.len());
    for phi in formulas {
        out.push(checker.is_valid(phi)?);
    }
    Ok(out)
}

fn first_disagreement(a: &[bool], b: &[bool], formulas: &[Formula]) -> Option<String> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .map(|k| formulas[k].to_string())
}

fn random_relation(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Relation {
    let succ = (0..n)
        .map(|_| (0..n).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    Relation::from_succ(succ)
}

fn frame_params(seed: u64) -> RandomFrameParams {
    RandomFrameParams {
        states: 1 + (seed % 5) as usize,
        full: seed % 3 != 0,
        ..RandomFrameParams::default()
    }
}

// 1

fn is_boolean_algebra(p: &FinitePoset, family: &[StateSet]) -> Result<(), String> {
    let top = p.states();
    let member = |x: StateSet| family.contains(&x);
    if !member(StateSet::EMPTY) || !member(top) {
        return Err("missing a bound".into());
    }
    let join = |a: StateSet, b: StateSet| oracle_ro_hull(p, a | b);
    for &a in family {
        let na = oracle_neg(p, a);
        if !member(na) || a & na != StateSet::EMPTY || join(a, na) != top {
            return Err(format!("{a:?} has no complement"));
        }
        for &b in family {
            if !member(a & b) || !member(join(a, b)) {
                return Err(format!("not closed at {a:?}, {b:?}"));
            }
            for &c in family {
                if a & join(b, c) != join(a & b, a & c) {
                    return Err(format!("not distributive at {a:?}, {b:?}, {c:?}"));
                }
            }
        }
    }
    Ok(())
}

fn regular_open_goldens() -> Outcome {
    let fig11 = corpus_frame("fig11_fan.json")?;
    let ro = fig11.poset().regular_opens()?;
    ensure!(ro.len() == 8, "fig11 has {} regular open sets", ro.len());
    ensure!(sorted(ro.clone()) == oracle_regular_opens(fig11.poset()), "fig11 sets differ from the oracle");
    is_boolean_algebra(fig11.poset(), &ro).map_err(|e| format!("fig11: {e}"))?;

    let chain2 = corpus_frame("chain2.json")?;
    let ro = sorted(chain2.poset().regular_opens()?);
    ensure!(ro == vec![StateSet::EMPTY, chain2.states()], "chain2 gives {ro:?}");

    let p3 = corpus_frame("p3.json")?;
    let ro = sorted(p3.poset().regular_opens()?);
    ensure!(ro.len() == 4 && ro == sorted(p3.props().to_vec()), "p3 gives {ro:?}");
    Ok("fig11 8 sets, Boolean; chain2 {∅,S}; p3 = its 4 props".into())
}

// 2 and 3 share one pass over every relation on every poset up to 4 states.

#[derive(Default)]
struct FamilySweep {
    relations: u64,
    closure_divergences: Vec<String>,
    fact_divergences: Vec<String>,
}

fn family_sweep() -> &'static Result<FamilySweep, String> {
    static SWEEP: OnceLock<Result<FamilySweep, String>> = OnceLock::new();
    SWEEP.get_or_init(|| sweep_family().map_err(|e| e.to_string()))
}

fn sweep_family() -> Result<FamilySweep, Box<dyn StdError>> {
    use Condition::*;
    let mut out = FamilySweep::default();
    for n in 1..=4 {
        for p in enumerate_posets(n)? {
            // Bit `x.0` of `ro_mask` says the subset `x` is regular open.
            let ro = oracle_regular_opens(&p);
            let ro_mask: u64 = ro.iter().fold(0, |m, x| m | 1 << x.0);
            let is_ro = |x: StateSet| ro_mask >> x.0 & 1 == 1;
            let row = (1u64 << n) - 1;
            for code in 0u64..1 << (n * n) {
                let r = Relation::from_succ((0..n).map(|x| StateSet(code >> (x * n) & row)).collect());
                out.relations += 1;
                let holds = |c| condition_holds(&p, &r, c);
                let (rule, win) = (holds(RRule), holds(RWin));
                let closed = ro.iter().all(|&x| is_ro(oracle_box(&r, x)));
                if closed != (rule && win) {
                    out.closure_divergences.push(format!("{p:?} {r:?}"));
                }

                let (down, dense) = (holds(RDown), holds(RDense));
                let mut bad = Vec::new();
                let succ_ro = (0..n).all(|x| is_ro(r.succ(x)));
                if succ_ro != (down && dense) {
                    bad.push("R(x) regular open vs R-down and R-dense");
                }
                if rule && down && dense && !holds(UpR) {
                    bad.push("R-rule, R-down, R-dense without up-R");
                }
                if down {
                    let under = holds(RWinUnder);
                    let refin = holds(RRefinability);
                    if win != under || under != refin {
                        bad.push("R=>win, underlined form and R-refinability under R-down");
                    }
                }
                if holds(RIffWinUnder) != (rule && win && down && dense) {
                    bad.push("R<=>win-underline vs its four components");
                }
                for b in bad {
                    out.fact_divergences.push(format!("{b}: {p:?} {r:?}"));
                }
            }
        }
    }
    Ok(out)
}

fn ro_closure_characterization() -> Outcome {
    let s = family_sweep().as_ref().map_err(|e| e.clone())?;
    ensure!(
        s.closure_divergences.is_empty(),
        "{} divergences, first {}",
        s.closure_divergences.len(),
        s.closure_divergences[0]
    );
    Ok(format!("{} relations on all posets up to 4 states, zero divergences", s.relations))
}

fn interplay_equivalences() -> Outcome {
    let s = family_sweep().as_ref().map_err(|e| e.clone())?;
    ensure!(
        s.fact_divergences.is_empty(),
        "{} divergences, first {}",
        s.fact_divergences.len(),
        s.fact_divergences[0]
    );
    Ok(format!("four equivalences over {} relations, zero divergences", s.relations))
}

// 4

fn box_tightening() -> Outcome {
    let bat = battery();
    let (mut frames, mut battery_checked) = (0usize, 0usize);
    for n in 1..=4 {
        for (k, f) in enumerate_full_frames(n, &["i"])?.into_iter().enumerate() {
            frames += 1;
            let fb = box_tighten(&f)?;
            let (p, r, rb) = (f.poset(), f.rel("i")?, fb.rel("i")?);
            ensure!(condition_holds(p, rb, Condition::RIffWinUnder), "not strong: {f:?}");
            ensure!(is_full(&fb), "not full: {f:?}");
            ensure!(is_r_tight(&fb), "not R-tight: {f:?}");
            ensure!(
                f.props().iter().all(|&x| oracle_box(r, x) == oracle_box(rb, x)),
                "box operators differ: {f:?}"
            );
            // The equal operators settle truth sets outright; the battery
            // comparison runs on every frame up to 3 states and a fixed
            // sample of the 4-state ones.
            if n <= 3 || k % 64 == 0 {
                battery_checked += 1;
                if let Some((phi, v, x)) = truth_set_difference(&f, &fb, &bat)? {
                    return Err(format!("{phi} differs at {x} under {v:?} on {f:?}").into());
                }
            }
        }
    }
    Ok(format!(
        "{frames} full frames: strong, full, R-tight, same boxes; battery truth sets equal on {battery_checked}"
    ))
}

// 5

struct Tally {
    name: &'static str,
    frames: usize,
}

fn preserved(name: &'static str, f: &Frame, g: &Frame, bat: &[Formula]) -> Result<(), Box<dyn StdError>> {
    let (a, b) = (validities(f, bat)?, validities(g, bat)?);
    if let Some(phi) = first_disagreement(&a, &b, bat) {
        return Err(format!("{name}: {phi} differs on {f:?}").into());
    }
    Ok(())
}

fn semantic_equivalences() -> Outcome {
    const WANT: usize = 200;
    const SEED_LIMIT: u64 = 50_000;
    let bat = battery();
    let mut tallies = Vec::new();

    let mut t = Tally { name: "powerset", frames: 0 };
    for seed in 0..WANT as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = 1 + (seed % 3) as usize;
        let world = Frame::full(FinitePoset::discrete(w), one(random_relation(&mut rng, w, 0.4)))?;
        preserved(t.name, &world, &powerset_possibilization(&world)?, &bat)?;
        t.frames += 1;
    }
    tallies.push(t);

    let mut t = Tally { name: "separative quotient", frames: 0 };
    let mut u = Tally { name: "tightening", frames: 0 };
    for seed in 0..WANT as u64 {
        let f = random_frame(seed, &frame_params(seed))?;
        preserved(t.name, &f, &separative_quotient(&f)?.0, &bat)?;
        t.frames += 1;
        preserved(u.name, &f, &tighten(&f)?.0, &bat)?;
        u.frames += 1;
    }
    tallies.push(t);
    tallies.push(u);

    let mut t = Tally { name: "functionalization", frames: 0 };
    let mut seed = 0;
    while t.frames < WANT && seed < SEED_LIMIT {
        let f = random_frame(seed, &frame_params(seed))?;
        seed += 1;
        if !classify(&f)?.quasi_functional {
            continue;
        }
        preserved(t.name, &f, &functionalize(&f)?, &bat)?;
        t.frames += 1;
    }
    tallies.push(t);

    let mut t = Tally { name: "atom structure", frames: 0 };
    let mut seed = 0;
    while t.frames < WANT && seed < SEED_LIMIT {
        let f = random_frame(seed, &frame_params(seed))?;
        seed += 1;
        if !is_atomic(f.poset()) {
            continue;
        }
        preserved(t.name, &f, &atom_structure(&f)?.0, &bat)?;
        t.frames += 1;
    }
    tallies.push(t);

    // Summands sized so that the union has at most 5 states.
    let mut t = Tally { name: "disjoint union", frames: 0 };
    for seed in 0..WANT as u64 {
        let a = 1 + (seed % 3) as usize;
        let b = 1 + (seed / 3) as usize % (5 - a);
        let fa = random_frame(2 * seed, &RandomFrameParams { states: a, ..frame_params(2 * seed) })?;
        let fb = random_frame(2 * seed + 1, &RandomFrameParams { states: b, ..frame_params(2 * seed + 1) })?;
        let (u, _) = disjoint_union(&[fa.clone(), fb.clone()])?;
        let (va, vb, vu) = (validities(&fa, &bat)?, validities(&fb, &bat)?, validities(&u, &bat)?);
        for k in 0..bat.len() {
            ensure!(vu[k] == (va[k] && vb[k]), "disjoint union: {} on {u:?}", bat[k]);
        }
        t.frames += 1;
    }
    tallies.push(t);

    let mut t = Tally { name: "selective subframes", frames: 0 };
    let mut subframes = 0;
    let mut seed = 0;
    while t.frames < WANT && seed < SEED_LIMIT {
        let f = random_frame(seed, &frame_params(seed))?;
        seed += 1;
        let candidates: Vec<StateSet> = f
            .states()
            .subsets()
            .filter(|&s| !s.is_empty() && s != f.states())
            .filter(|&s| subframe_kind(&f, s) != SubframeKind::Neither)
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let vf = validities(&f, &bat)?;
        for s in candidates {
            let (sub, _, _) = subframe(&f, s)?;
            ensure!(validate_frame(&sub).verdict, "selective subframe {s:?} of {f:?} is not a frame");
            let vs = validities(&sub, &bat)?;
            for k in 0..bat.len() {
                ensure!(!vf[k] || vs[k], "selective subframe {s:?} loses {} on {f:?}", bat[k]);
            }
            subframes += 1;
        }
        t.frames += 1;
    }
    tallies.push(t);

    let short: Vec<String> = tallies
        .iter()
        .filter(|t| t.frames < WANT)
        .map(|t| format!("{} ({})", t.name, t.frames))
        .collect();
    ensure!(short.is_empty(), "too few frames for {}", short.join(", "));
    Ok(format!(
        "7 constructions x {WANT} frames x {} formulas, zero violations ({subframes} subframes)",
        bat.len()
    ))
}

// 6

fn is_bao_iso(h: &BaoMap) -> Result<bool, Box<dyn StdError>> {
    Ok(check_bao_hom(h, true)?.verdict && h.is_injective() && h.is_surjective())
}

fn map_is_iso(mut h: MorphismSpec) -> Result<bool, Box<dyn StdError>> {
    h.flags.insert(Flag::Isomorphism);
    Ok(check_morphism(&h)?.verdict)
}

fn all_baos(max_atoms: usize, indices: &[&str]) -> Result<Vec<FiniteBAO>, Box<dyn StdError>> {
    let mut out = Vec::new();
    for m in 1..=max_atoms {
        out.extend(enumerate_baos(m, indices)?);
    }
    Ok(out)
}

fn duality_round_trips() -> Outcome {
    let baos = all_baos(3, &["i"])?;
    let mut frames: Vec<Frame> = Vec::new();
    for b in &baos {
        ensure!(is_bao_iso(&zeta_a(b)?)?, "zeta_A is not an isomorphism on {b:?}");
        ensure!(is_bao_iso(&eta_a(b)?)?, "eta_A is not an isomorphism on {b:?}");
        let full = underlying_bao(&full_frame(b)?)?;
        ensure!(bao_isomorphism(b, &full)?.is_some(), "A and the algebra of its full frame differ: {b:?}");
        let ff = underlying_bao(&filter_frame(b)?)?;
        ensure!(bao_isomorphism(b, &ff)?.is_some(), "A and the algebra of its filter frame differ: {b:?}");
        frames.push(principal_frame(b)?);
        frames.push(general_filter_frame(b)?);
        frames.push(full_frame(b)?);
    }
    for n in 1..=4 {
        frames.extend(enumerate_full_frames(n, &["i"])?);
    }
    for seed in 0..200 {
        frames.push(random_frame(seed, &RandomFrameParams { full: false, ..frame_params(seed) })?);
    }

    let (mut eta_isos, mut zeta_isos) = (0, 0);
    for f in &frames {
        let c = classify(f)?;
        let eta = map_is_iso(eta_f(f)?)?;
        ensure!(eta == c.filter_descriptive, "eta_F iso = {eta} but filter-descriptive = {} on {f:?}", c.filter_descriptive);
        eta_isos += eta as usize;
        let zeta = match zeta_f(f) {
            Ok(z) => map_is_iso(z)?,
            Err(_) => false,
        };
        let tight_principal = c.tight && c.principal;
        ensure!(zeta == tight_principal, "zeta_F iso = {zeta} but tight and principal = {tight_principal} on {f:?}");
        zeta_isos += zeta as usize;
    }
    Ok(format!(
        "{} BAOs: zeta_A, eta_A, full and filter frames; {} frames: eta_F iso on {eta_isos}, zeta_F iso on {zeta_isos}, exactly as classified",
        baos.len(),
        frames.len()
    ))
}

// 7

/// Every p-morphism `k: src → tgt` with `k(embed(x)) = g(x)` for all `x`.
fn lifts(src: &Frame, tgt: &Frame, embed: &[usize], g: &[usize]) -> Result<Vec<Vec<usize>>, Box<dyn StdError>> {
    let mut fixed: Vec<Option<usize>> = vec![None; src.n()];
    for (x, &e) in embed.iter().enumerate() {
        if fixed[e].is_some_and(|v| v != g[x]) {
            return Ok(Vec::new());
        }
        fixed[e] = Some(g[x]);
    }
    let free: Vec<usize> = (0..src.n()).filter(|&s| fixed[s].is_none()).collect();
    let combos = (tgt.n() as u64).checked_pow(free.len() as u32).unwrap_or(u64::MAX);
    if combos > 200_000 {
        return Err(format!("{combos} candidate lifts").into());
    }
    let mut out = Vec::new();
    for code in 0..combos {
        let mut map: Vec<usize> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        let mut c = code;
        for &s in &free {
            map[s] = (c % tgt.n() as u64) as usize;
            c /= tgt.n() as u64;
        }
        let k = MorphismSpec::new(src.clone(), tgt.clone(), map.clone(), Grade::P, [])?;
        if check_morphism(&k)?.verdict {
            out.push(map);
        }
    }
    Ok(out)
}

fn naturality_and_reflection() -> Outcome {
    const WANT: usize = 50;
    let mut pool: Vec<Frame> = Vec::new();
    for n in 1..=3 {
        pool.extend(enumerate_full_frames(n, &["i"])?);
    }
    for b in all_baos(2, &["i"])? {
        pool.push(principal_frame(&b)?);
        pool.push(general_filter_frame(&b)?);
    }
    let classes = pool.iter().map(classify).collect::<Result<Vec<_>, _>>()?;
    let reflective: Vec<usize> = (0..pool.len())
        .filter(|&k| classes[k].rich || classes[k].filter_descriptive)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut morphisms, mut squares, mut factored, mut rich, mut filter) = (0, 0, 0, 0, 0);
    let mut attempts = 0;
    while factored < WANT || morphisms < WANT {
        attempts += 1;
        ensure!(attempts < 20_000, "only {factored} factorizations in {attempts} attempts");
        let f = &pool[rng.gen_range(0..pool.len())];
        let gk = if rng.gen_bool(0.7) {
            reflective[rng.gen_range(0..reflective.len())]
        } else {
            rng.gen_range(0..pool.len())
        };
        let target = &pool[gk];
        let flags: &[Flag] = if rng.gen_bool(0.5) { &[Flag::Surjective] } else { &[] };
        let Some(g) = find_morphism(f, target, Grade::P, flags)? else {
            continue;
        };
        morphisms += 1;
        let what = format!("g = {:?} from {f:?} to {target:?}", g.map);

        // Frame side: (g⋆)_gff ∘ η_F = η_G ∘ g.
        let h = dual_hom_under(&g)?;
        let lifted = dual_hom_gff(&h)?;
        let (ef, eg) = (eta_f(f)?, eta_f(target)?);
        ensure!(
            (0..f.n()).all(|x| lifted.map[ef.map[x]] == eg.map[g.map[x]]),
            "eta_F square fails for {what}"
        );

        // Algebra side for h = g⋆: G⋆ → F⋆.
        let (a, b) = (&h.source, &h.target);
        let flat_star = dual_hom_under(&dual_hom_rela(&h)?)?;
        let (za, zb) = (zeta_a(a)?, zeta_a(b)?);
        ensure!(
            (0..a.len()).all(|x| flat_star.map[za.map[x]] == zb.map[h.map[x]]),
            "zeta_A square fails for {what}"
        );
        let gff_star = dual_hom_under(&dual_hom_gff(&h)?)?;
        let (ea, eb) = (eta_a(a)?, eta_a(b)?);
        ensure!(
            (0..a.len()).all(|x| gff_star.map[ea.map[x]] == eb.map[h.map[x]]),
            "eta_A square fails for {what}"
        );
        squares += 3;

        let mut did_factor = false;
        if classes[gk].rich {
            if let Ok(z) = zeta_f(f) {
                let bar = rich_reflection(&g)?;
                ensure!(check_morphism(&bar)?.verdict, "rich reflection is not a p-morphism for {what}");
                ensure!((0..f.n()).all(|x| bar.map[z.map[x]] == g.map[x]), "rich reflection does not factor {what}");
                let all = lifts(&bar.source, target, &z.map, &g.map)?;
                ensure!(all == vec![bar.map.clone()], "{} lifts through zeta_F for {what}", all.len());
                rich += 1;
                did_factor = true;
            }
        }
        if classes[gk].filter_descriptive {
            let bar = filter_reflection(&g)?;
            ensure!(check_morphism(&bar)?.verdict, "filter reflection is not a p-morphism for {what}");
            ensure!((0..f.n()).all(|x| bar.map[ef.map[x]] == g.map[x]), "filter reflection does not factor {what}");
            let all = lifts(&bar.source, target, &ef.map, &g.map)?;
            ensure!(all == vec![bar.map.clone()], "{} lifts through eta_F for {what}", all.len());
            filter += 1;
            did_factor = true;
        }
        factored += did_factor as usize;
    }
    Ok(format!(
        "{morphisms} morphisms, {squares} squares commute; unique factorization {rich} through zeta_F, {filter} through eta_F"
    ))
}

// 8

fn standard_frames(n: usize, indices: &[&str]) -> Result<Vec<Frame>, Box<dyn StdError>> {
    Ok(enumerate_full_frames_where(n, indices, |p, r| condition_holds(p, r, Condition::RDown))?)
}

fn lemmon_scott_correspondence() -> Outcome {
    let mut frames = Vec::new();
    for n in 1..=4 {
        frames.extend(standard_frames(n, &["i"])?);
    }
    let mut parts = Vec::new();
    for name in ["D", "T", "4", "B", "5"] {
        let schema = LsSchema::named(name, "i")?;
        let rep = verify_correspondence(&schema, frames.iter().cloned(), PathKind::Possibility)?;
        ensure!(rep.holds(), "{name}: {}", rep.to_check_report());
        parts.push(format!("{name} {}", rep.checked));
    }

    let shift = Formula::parse("[i]([i]p1 -> p1)")?;
    for f in &frames {
        let cond = shift_reflexivity_condition(f, "i")?.verdict;
        let valid = valid_on_frame(f, &shift)?.verdict;
        ensure!(cond == valid, "shift reflexivity: condition {cond}, validity {valid} on {f:?}");
    }
    parts.push(format!("shift-reflexivity {}", frames.len()));

    // Inclusion: every two-index standard frame up to 3 states, then random
    // pairs of standard relations on each 4-state poset.
    let inclusion = LsSchema::inclusion("i", "j");
    let mut two = Vec::new();
    for n in 1..=3 {
        two.extend(standard_frames(n, &["i", "j"])?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in enumerate_posets(4)? {
        let rels: Vec<Relation> = full_frame_relations(&p)
            .into_iter()
            .filter(|r| condition_holds(&p, r, Condition::RDown))
            .collect();
        for _ in 0..150 {
            let ri = rels[rng.gen_range(0..rels.len())].clone();
            let rj = if rng.gen_bool(0.3) { ri.clone() } else { rels[rng.gen_range(0..rels.len())].clone() };
            let rels = BTreeMap::from([("i".to_string(), ri), ("j".to_string(), rj)]);
            two.push(Frame::full(p.clone(), rels)?);
        }
    }
    let rep = verify_correspondence(&inclusion, two, PathKind::Possibility)?;
    ensure!(rep.holds(), "inclusion: {}", rep.to_check_report());
    parts.push(format!("inclusion {}", rep.checked));
    Ok(format!("zero divergences ({})", parts.join(", ")))
}

// 9

fn split_property() -> Outcome {
    let phi = Formula::p(2);
    let to_p2 = BTreeMap::from([("p1".to_string(), Formula::p(2))]);
    let mut psis: Vec<Formula> = vec![Formula::top()];
    let mut seen = BTreeSet::from([Formula::top().to_string()]);
    for f in battery() {
        let g = f.substitute(&to_p2);
        if seen.insert(g.to_string()) {
            psis.push(g);
        }
    }
    let (mut frames, mut nonvacuous) = (0, 0);
    for n in 1..=3 {
        for code in 0u64..1 << (n * n) {
            let r = Relation::from_succ((0..n).map(|x| StateSet(code >> (x * n) & ((1 << n) - 1))).collect());
            let k = KripkeFrame::new(n, one(r))?;
            frames += 1;
            for psi in &psis {
                let rep = kripke_split_property(&k, &phi, psi, "i")?;
                ensure!(rep.verdict, "{rep} on {k:?} with psi = {psi}");
                if kripke_valid(&k, &split_axiom(&phi, psi, "i")?)?.verdict {
                    nonvacuous += 1;
                }
            }
        }
    }
    Ok(format!(
        "{frames} Kripke frames x {} formulas, zero violations ({nonvacuous} with Split valid)",
        psis.len()
    ))
}

// 10

fn appendix_conditions() -> Outcome {
    let baos = all_baos(3, &["i"])?;
    for b in &baos {
        for (name, f) in [("general filter frame", general_filter_frame(b)?), ("filter frame", filter_frame(b)?)] {
            ensure!(
                condition_holds(f.poset(), f.rel("i")?, Condition::RRefinabilityPlus),
                "{name} of {b:?} violates R-refinability+"
            );
        }
    }

    let world = Frame::full(FinitePoset::discrete(2), one(Relation::identity(2)))?;
    let pw = powerset_possibilization(&world)?;
    ensure!(
        !condition_holds(pw.poset(), pw.rel("i")?, Condition::RRefinabilityPlusPlus),
        "the possibilization of two reflexive points satisfies R-refinability++"
    );

    let dist = Formula::parse("[j]([i]p1 | [i]p2) -> ([j][i]p1 | [j][i]p2)")?;
    let dist_one = Formula::parse("[i]([i]p1 | [i]p2) -> ([i][i]p1 | [i][i]p2)")?;
    let mut checked = 0;
    for n in 1..=3 {
        for f in enumerate_full_frames_where(n, &["i", "j"], |p, r| condition_holds(p, r, Condition::RMax))? {
            if condition_holds(f.poset(), f.rel("i")?, Condition::RRefinabilityPlusPlus) {
                ensure!(valid_on_frame(&f, &dist)?.verdict, "distribution fails on {f:?}");
                checked += 1;
            }
        }
    }
    for n in 1..=4 {
        for f in enumerate_full_frames_where(n, &["i"], |p, r| {
            condition_holds(p, r, Condition::RMax) && condition_holds(p, r, Condition::RRefinabilityPlusPlus)
        })? {
            ensure!(valid_on_frame(&f, &dist_one)?.verdict, "distribution fails on {f:?}");
            checked += 1;
        }
    }
    Ok(format!(
        "{} BAOs satisfy R-refinability+ in both filter frames; two-point witness fails R-refinability++; distribution valid on {checked} frames",
        baos.len()
    ))
}

// 11

fn filter_canonicity() -> Outcome {
    let (mut checked, mut nonvacuous) = (0, 0);
    let one_index = all_baos(3, &["i"])?;
    for name in ["D", "T", "4", "B", "5"] {
        let schema = LsSchema::named(name, "i")?;
        for b in &one_index {
            let rep = lemmon_scott_filter_canonicity(b, &schema)?;
            ensure!(rep.verdict, "{name}: {rep} on {b:?}");
            checked += 1;
            nonvacuous += ls_inequality_holds(b, &schema)? as usize;
        }
    }
    let inclusion = LsSchema::inclusion("i", "j");
    for b in all_baos(3, &["i", "j"])? {
        let rep = lemmon_scott_filter_canonicity(&b, &inclusion)?;
        ensure!(rep.verdict, "inclusion: {rep} on {b:?}");
        checked += 1;
        nonvacuous += ls_inequality_holds(&b, &inclusion)? as usize;
    }
    Ok(format!("{checked} algebra-schema pairs, {nonvacuous} satisfying the inequality, zero violations"))
}

// 12

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("possibility").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

fn cli_contract() -> Outcome {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus())?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    ensure!(files.len() >= 10, "corpus has {} frames", files.len());
    for fig in ["fig10", "fig11", "fig12", "fig13"] {
        ensure!(
            files.iter().any(|p| p.file_name().unwrap().to_string_lossy().starts_with(fig)),
            "no {fig} reconstruction"
        );
    }
    for file in &files {
        let path = file.to_string_lossy();
        let frame = parse_frame(&fs::read_to_string(file)?)?;
        let written = frame_to_json(&frame);
        let again = parse_frame(&written)?;
        ensure!(again == frame && frame_to_json(&again) == written, "{path} does not round-trip");
        let (code, dot, _) = cli(&["export-dot", &path]);
        ensure!(code == 0, "export-dot exits {code} on {path}");
        ensure!(dot == fs::read_to_string(file.with_extension("dot"))?, "{path} DOT differs from golden");
        ensure!(cli(&["export-dot", &path]).1 == dot, "{path} DOT is not deterministic");
        let (code, flags, _) = cli(&["classify", &path]);
        ensure!(
            code == 0 && flags == fs::read_to_string(file.with_extension("classify.txt"))?,
            "{path} classification differs from golden"
        );
    }

    let dir = std::env::temp_dir().join(format!("possibility-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let malformed = dir.join("malformed.json");
    fs::write(&malformed, "{\"states\": 2,\n \"leq\": [[0, 1],\n")?;
    let corpus_path = |name: &str| corpus().join(name).to_string_lossy().into_owned();
    let fan = corpus_path("fig11_fan.json");
    let cases: [(&[&str], i32); 6] = [
        (&["valid", &fan, "[i](p1 -> p2) -> ([i]p1 -> [i]p2)"], 0),
        (&["valid", &corpus_path("kripke_dead_end.json"), "[i]p1 -> <i>p1"], 1),
        (&["validate", malformed.to_str().unwrap()], 2),
        (&["valid", &fan, "p1 ->"], 2),
        (&["valid", &corpus_path("fig13_tree.json"), "[i]p1 -> p1", "--budget", "5"], 3),
        (&["enumerate", "posets", "--size", "9"], 3),
    ];
    let mut result = Ok(());
    for (args, want) in cases {
        let (code, _, err) = cli(args);
        if code != want {
            result = Err(format!("{args:?} exits {code}, expected {want}: {err}"));
            break;
        }
    }
    fs::remove_dir_all(&dir)?;
    result?;
    Ok(format!("{} corpus frames round-trip and match DOT and class goldens; exit codes 0-3", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("regular open goldens", regular_open_goldens),
        ("RO closed under box iff R-rule and R=>win", ro_closure_characterization),
        ("interplay condition equivalences", interplay_equivalences),
        ("box tightening", box_tightening),
        ("semantic equivalence battery", semantic_equivalences),
        ("duality round trips", duality_round_trips),
        ("naturality and reflection", naturality_and_reflection),
        ("Lemmon-Scott correspondence", lemmon_scott_correspondence),
        ("split property on Kripke frames", split_property),
        ("refinability and distribution", appendix_conditions),
        ("filter canonicity", filter_canonicity),
        ("CLI contract", cli_contract),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let number = k + 1;
        if !only.is_empty() && !only.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}").into())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {number:>2} {name}: {detail} [{secs:.1}s]"),
            Err(e) => {
                failed += 1;
                println!("FAIL {number:>2} {name}: {e} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
