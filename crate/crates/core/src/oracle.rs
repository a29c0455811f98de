//! Independent verification harness.
//!
//! Random diagrams are built geometrically rather than by shuffling arrays:
//! a crossing-free curve system is drawn from non-crossing arc matchings in
//! the three strips cut out by the strands, then tangled by local moves
//! whose effect on the value is known. A slide of two arcs past each other
//! next to a strand creates two crossings and leaves the value unchanged; a
//! curl of sign `s` multiplies it by `-t^(3s)`. Crossing signs come from
//! explicit tangent vectors, not from the sorter's bookkeeping.
//!
//! Resolution is cross-checked against a state sum computed by walking the
//! smoothed diagram, with no use of the section operators.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diagram::{CrossingId, Component, Expression, Layer, PassEntry, Sign, SignTable, SkeinDiagram, Strand, Strictness, Term};
use crate::engine::{dedup, run_pipeline, Error, PipelineOptions};
use crate::laurent::{LaurentPoly, SkeinPolynomial};
use crate::resolver::resolve_all;

/// Largest crossing count for which every resolution order is tried.
pub const CONFLUENCE_LIMIT: usize = 5;

/// A generated diagram with the crossing-free diagram it is isotopic to,
/// up to the framing factor contributed by its curls.
#[derive(Clone, Debug)]
pub struct Generated {
    pub base: SkeinDiagram,
    pub diagram: SkeinDiagram,
    pub framing: LaurentPoly,
}

/// One entry of a diagram under construction: pass, height, direction
/// (`+1` left to right, `-1` right to left, `0` on self-crossing passes).
#[derive(Clone, Copy, Debug)]
struct Slot {
    entry: PassEntry,
    height: u32,
    dir: i32,
}

struct Builder {
    comps: Vec<Vec<Slot>>,
    signs: SignTable,
    next_id: u32,
    next_height: u32,
}

impl Builder {
    fn fresh(&mut self) -> (u32, u32) {
        let id = self.next_id;
        let h = self.next_height;
        self.next_id += 1;
        self.next_height += 1;
        (id, h)
    }

    fn to_diagram(&self) -> SkeinDiagram {
        let components = self
            .comps
            .iter()
            .map(|slots| {
                let codes = slots
                    .iter()
                    .map(|s| match (s.entry.strand_of(), s.dir > 0) {
                        (None, _) => 0,
                        (Some(Strand::One), true) => 3,
                        (Some(Strand::One), false) => 4,
                        (Some(Strand::Two), true) => 4,
                        (Some(Strand::Two), false) => 5,
                    })
                    .collect();
                Component::new(slots.iter().map(|s| s.entry).collect(), slots.iter().map(|s| s.height).collect(), codes)
                    .expect("parallel arrays")
            })
            .collect();
        SkeinDiagram::new(components, self.signs.clone())
    }
}

/// Random non-crossing perfect matching of `lo..hi` (in linear or circular
/// order, which give the same condition).
fn noncrossing_matching(rng: &mut ChaCha8Rng, lo: usize, hi: usize, out: &mut [usize]) {
    if lo >= hi {
        return;
    }
    let choices: Vec<usize> = (lo + 1..hi).step_by(2).collect();
    let j = *choices.choose(rng).expect("even range");
    out[lo] = j;
    out[j] = lo;
    noncrossing_matching(rng, lo + 1, j, out);
    noncrossing_matching(rng, j + 1, hi, out);
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Strip {
    Left,
    Middle,
    Right,
}

/// Crossing-free curve system: closed walks through strand points.
fn random_curves(rng: &mut ChaCha8Rng, max_components: usize) -> Builder {
    loop {
        let m1 = 2 * rng.gen_range(0..=2usize);
        let m2 = 2 * rng.gen_range(0..=2usize);
        let mut left = vec![0; m1];
        let mut right = vec![0; m2];
        let mut middle = vec![0; m1 + m2];
        noncrossing_matching(rng, 0, m1, &mut left);
        noncrossing_matching(rng, 0, m2, &mut right);
        noncrossing_matching(rng, 0, m1 + m2, &mut middle);

        // Middle strip boundary: strand 1 bottom to top, then strand 2 top to bottom.
        let circle_pos = |s: Strand, k: usize| match s {
            Strand::One => k,
            Strand::Two => m1 + m2 - 1 - k,
        };
        let circle_point = |p: usize| if p < m1 { (Strand::One, p) } else { (Strand::Two, m1 + m2 - 1 - p) };
        let across = |strip: Strip, s: Strand, k: usize| -> (Strand, usize) {
            match strip {
                Strip::Left => (Strand::One, left[k]),
                Strip::Right => (Strand::Two, right[k]),
                Strip::Middle => circle_point(middle[circle_pos(s, k)]),
            }
        };
        let sides = |s: Strand| match s {
            Strand::One => (Strip::Left, Strip::Middle),
            Strand::Two => (Strip::Middle, Strip::Right),
        };

        let mut seen: BTreeMap<(Strand, usize), bool> = BTreeMap::new();
        let mut walks: Vec<Vec<(Strand, usize, i32)>> = Vec::new();
        let points: Vec<(Strand, usize)> =
            (0..m1).map(|k| (Strand::One, k)).chain((0..m2).map(|k| (Strand::Two, k))).collect();
        for &start in &points {
            if seen.contains_key(&start) {
                continue;
            }
            let mut walk = Vec::new();
            let (mut at, mut dir) = (start, 1);
            loop {
                seen.insert(at, true);
                walk.push((at.0, at.1, dir));
                let (l, r) = sides(at.0);
                let strip = if dir > 0 { r } else { l };
                let next = across(strip, at.0, at.1);
                dir = if sides(next.0).0 == strip { 1 } else { -1 };
                at = next;
                if at == start {
                    break;
                }
            }
            walks.push(walk);
        }
        let empties = rng.gen_range(0..=1usize);
        let total = walks.len() + empties;
        if total == 0 || total > max_components {
            continue;
        }

        // Heights: random interleaving of the two strands, order kept along each.
        let mut pool: Vec<u32> = (1..=(m1 + m2) as u32).collect();
        pool.shuffle(rng);
        let mut h1: Vec<u32> = pool[..m1].to_vec();
        let mut h2: Vec<u32> = pool[m1..].to_vec();
        h1.sort_unstable();
        h2.sort_unstable();

        let mut comps: Vec<Vec<Slot>> = walks
            .into_iter()
            .map(|mut w| {
                if rng.gen_bool(0.5) {
                    w.reverse();
                    for p in &mut w {
                        p.2 = -p.2;
                    }
                }
                let r = rng.gen_range(0..w.len());
                w.rotate_left(r);
                w.into_iter()
                    .map(|(s, k, dir)| {
                        let layer = if rng.gen_bool(0.5) { Layer::Over } else { Layer::Under };
                        let height = if s == Strand::One { h1[k] } else { h2[k] };
                        Slot { entry: PassEntry::strand(s, layer), height, dir }
                    })
                    .collect()
            })
            .collect();
        for _ in 0..empties {
            let at = rng.gen_range(0..=comps.len());
            comps.insert(at, Vec::new());
        }
        return Builder { comps, signs: SignTable::new(), next_id: 1, next_height: (m1 + m2) as u32 + 1 };
    }
}

fn cross(o: (i32, i32), u: (i32, i32)) -> i32 {
    o.0 * u.1 - o.1 * u.0
}

/// Slides two height-adjacent arcs past each other beside strand `n`.
/// Returns false when the strand has fewer than two passes.
fn slide(b: &mut Builder, rng: &mut ChaCha8Rng, n: Strand) -> bool {
    let mut passes: Vec<(u32, usize, usize)> = Vec::new();
    for (l, c) in b.comps.iter().enumerate() {
        for (j, s) in c.iter().enumerate() {
            if s.entry.strand_of() == Some(n) {
                passes.push((s.height, l, j));
            }
        }
    }
    if passes.len() < 2 {
        return false;
    }
    passes.sort_unstable();
    let k = rng.gen_range(0..passes.len() - 1);
    let (_, lp, jp) = passes[k];
    let (_, lq, jq) = passes[k + 1];
    let (p, q) = (b.comps[lp][jp], b.comps[lq][jq]);
    let p_over = match (p.entry.layer(), q.entry.layer()) {
        (Layer::Over, Layer::Under) => true,
        (Layer::Under, Layer::Over) => false,
        _ => rng.gen_bool(0.5),
    };

    // Tangents at the crossing left (index 0) and right (index 1) of the
    // strand. The lower arc P climbs to the upper height, Q dips to the lower.
    let vp = [(p.dir, p.dir), (p.dir, -p.dir)];
    let vq = [(q.dir, -q.dir), (q.dir, q.dir)];
    let (left_id, left_h) = b.fresh();
    let (right_id, right_h) = b.fresh();
    let ids = [(left_id, left_h), (right_id, right_h)];
    for side in 0..2 {
        let (o, u) = if p_over { (vp[side], vq[side]) } else { (vq[side], vp[side]) };
        let sign = if cross(o, u) > 0 { Sign::Positive } else { Sign::Negative };
        b.signs.insert(CrossingId(ids[side].0), sign);
    }

    let mark = |over: bool, (id, h): (u32, u32)| Slot {
        entry: PassEntry::crossing(id, if over { Layer::Over } else { Layer::Under }),
        height: h,
        dir: 0,
    };
    let around = |dir: i32, over: bool| {
        if dir > 0 {
            (mark(over, ids[0]), mark(over, ids[1]))
        } else {
            (mark(over, ids[1]), mark(over, ids[0]))
        }
    };
    let wrap_p = around(p.dir, p_over);
    let wrap_q = around(q.dir, !p_over);

    b.comps[lp][jp].height = q.height;
    b.comps[lq][jq].height = p.height;
    let mut edits = [((lp, jp), wrap_p), ((lq, jq), wrap_q)];
    edits.sort_by_key(|e| std::cmp::Reverse(e.0));
    for ((l, j), (before, after)) in edits {
        b.comps[l].insert(j + 1, after);
        b.comps[l].insert(j, before);
    }
    true
}

/// Adds a curl somewhere; returns its framing factor `-t^(3s)`.
fn curl(b: &mut Builder, rng: &mut ChaCha8Rng) -> LaurentPoly {
    let l = rng.gen_range(0..b.comps.len());
    let j = rng.gen_range(0..=b.comps[l].len());
    let (id, h) = b.fresh();
    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
    let over_first = rng.gen_bool(0.5);
    let slot = |over: bool| Slot {
        entry: PassEntry::crossing(id, if over { Layer::Over } else { Layer::Under }),
        height: h,
        dir: 0,
    };
    b.comps[l].insert(j, slot(!over_first));
    b.comps[l].insert(j, slot(over_first));
    b.signs.insert(CrossingId(id), Sign::from_value(s).expect("unit"));
    -LaurentPoly::t_pow(3 * s)
}

/// Random diagram with at most `max_components` components and exactly
/// `crossings` crossings (fewer only when `max_components` is 0).
pub fn random_generated(seed: u64, max_components: usize, crossings: usize) -> Generated {
    if max_components == 0 {
        let d = SkeinDiagram::empty();
        return Generated { base: d.clone(), diagram: d, framing: LaurentPoly::one() };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = random_curves(&mut rng, max_components);
    let base = b.to_diagram();
    let mut framing = LaurentPoly::one();
    let mut left = crossings;
    while left > 0 {
        let try_slide = left >= 2 && rng.gen_bool(0.6);
        let strand = if rng.gen_bool(0.5) { Strand::One } else { Strand::Two };
        if try_slide && (slide(&mut b, &mut rng, strand) || slide(&mut b, &mut rng, other(strand))) {
            left -= 2;
        } else {
            framing = &framing * &curl(&mut b, &mut rng);
            left -= 1;
        }
    }
    let diagram = b.to_diagram();
    debug_assert!(diagram.is_valid(Strictness::Input), "{}", diagram.to_json_string());
    Generated { base, diagram, framing }
}

fn other(n: Strand) -> Strand {
    match n {
        Strand::One => Strand::Two,
        Strand::Two => Strand::One,
    }
}

/// Random valid diagram with at most `max_components` components and at most
/// `max_self_crossings` crossings. Deterministic per seed.
pub fn random_diagram(seed: u64, max_components: usize, max_self_crossings: usize) -> SkeinDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let r = rng.gen_range(0..=max_self_crossings);
    random_generated(seed, max_components, r).diagram
}

/// Random valid diagram with exactly `crossings` crossings.
pub fn random_diagram_exact(seed: u64, max_components: usize, crossings: usize) -> SkeinDiagram {
    random_generated(seed, max_components.max(1), crossings).diagram
}

// ---------------------------------------------------------------------------
// State sum
// ---------------------------------------------------------------------------

/// All fully smoothed states of `d` with their coefficients, computed by
/// walking each smoothing. A state's orientation-respecting smoothings at a
/// crossing of sign `s` contribute `t^s`, the others `t^-s`.
pub fn state_sum(d: &SkeinDiagram) -> Expression {
    let ids: Vec<CrossingId> = d.signs.keys().copied().collect();
    let mut partner: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for id in &ids {
        let at = d.locate(*id);
        partner.insert(at[0], at[1]);
        partner.insert(at[1], at[0]);
    }
    let mut terms = Vec::with_capacity(1 << ids.len());
    for mask in 0u32..(1 << ids.len()) {
        let oriented: BTreeMap<CrossingId, bool> =
            ids.iter().enumerate().map(|(k, id)| (*id, mask & (1 << k) == 0)).collect();
        let exp: i32 = ids
            .iter()
            .map(|id| if oriented[id] { d.signs[id].value() } else { -d.signs[id].value() })
            .sum();
        terms.push(Term::new(LaurentPoly::t_pow(exp), smooth(d, &oriented, &partner)));
    }
    Expression { terms }
}

fn smooth(
    d: &SkeinDiagram,
    oriented: &BTreeMap<CrossingId, bool>,
    partner: &BTreeMap<(usize, usize), (usize, usize)>,
) -> SkeinDiagram {
    // Arc (l, j) runs from position j to position j+1 of component l.
    let mut used: Vec<Vec<bool>> = d.components.iter().map(|c| vec![false; c.len()]).collect();
    let mut loops = Vec::new();
    for c in &d.components {
        if c.is_empty() {
            loops.push(Component::empty());
        }
    }
    for l0 in 0..d.components.len() {
        for j0 in 0..d.components[l0].len() {
            if used[l0][j0] {
                continue;
            }
            let (mut l, mut j, mut dir) = (l0, j0, 1i64);
            let (mut e, mut h, mut q) = (Vec::new(), Vec::new(), Vec::new());
            loop {
                let n = d.components[l].len() as i64;
                let next = (j as i64 + dir).rem_euclid(n) as usize;
                let arc = if dir > 0 { j } else { next };
                if used[l][arc] {
                    break;
                }
                used[l][arc] = true;
                let c = &d.components[l];
                let entry = c.entries()[next];
                match entry.crossing_id() {
                    None => {
                        let mut code = c.codes()[next];
                        if dir < 0 {
                            code = match (entry.strand_of(), code) {
                                (Some(Strand::One), 3) => 4,
                                (Some(Strand::One), _) => 3,
                                (_, 4) => 5,
                                _ => 4,
                            };
                        }
                        e.push(entry);
                        h.push(c.heights()[next]);
                        q.push(code);
                        j = next;
                    }
                    Some(id) => {
                        let (pl, pj) = partner[&(l, next)];
                        l = pl;
                        j = pj;
                        if !oriented[&id] {
                            dir = -dir;
                        }
                    }
                }
            }
            loops.push(Component::new(e, h, q).expect("parallel arrays"));
        }
    }
    SkeinDiagram::new(loops, SignTable::new())
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// A failed check, with everything needed to reproduce it.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub property: String,
    pub seed: u64,
    pub diagram: SkeinDiagram,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed for seed {}: {}", self.property, self.seed, self.detail)
    }
}

impl Counterexample {
    fn new(property: &str, seed: u64, diagram: &SkeinDiagram, detail: impl Into<String>) -> Self {
        Self { property: property.to_string(), seed, diagram: diagram.clone(), detail: detail.into() }
    }

    /// Diagram file with a one-line header naming the property and seed.
    pub fn reproduction(&self) -> String {
        format!("# failed property: {}, seed: {}\n{}", self.property, self.seed, self.diagram.to_json_string())
    }

    pub fn write_reproduction(&self, dir: &Path) -> io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}-{}.json", self.property, self.seed));
        std::fs::write(&path, self.reproduction())?;
        Ok(path)
    }
}

/// Drops `#` header lines from a diagram file.
pub fn strip_header(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn value(d: &SkeinDiagram, opts: &PipelineOptions) -> Result<SkeinPolynomial, Error> {
    Ok(run_pipeline(d, opts)?.polynomial)
}

fn compare(
    property: &str,
    seed: u64,
    d: &SkeinDiagram,
    label: &str,
    expected: &SkeinPolynomial,
    got: Result<SkeinPolynomial, Error>,
) -> Result<(), Counterexample> {
    match got {
        Ok(p) if p == *expected => Ok(()),
        Ok(p) => Err(Counterexample::new(property, seed, d, format!("{label}: expected {expected}, got {p}"))),
        Err(e) => Err(Counterexample::new(property, seed, d, format!("{label}: {e}"))),
    }
}

fn baseline(property: &str, seed: u64, d: &SkeinDiagram, opts: &PipelineOptions) -> Result<SkeinPolynomial, Counterexample> {
    value(d, opts).map_err(|e| Counterexample::new(property, seed, d, format!("pipeline failed: {e}")))
}

fn permutations(items: &[CrossingId]) -> Vec<Vec<CrossingId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Every resolution order of the crossings gives the same polynomial.
/// Diagrams with more than [`CONFLUENCE_LIMIT`] crossings try only the
/// ascending and descending orders.
pub fn check_confluence(d: &SkeinDiagram, seed: u64) -> Result<(), Counterexample> {
    let single = PipelineOptions { threads: Some(1), ..Default::default() };
    let reference = baseline("confluence", seed, d, &single)?;
    let ids: Vec<CrossingId> = d.signs.keys().copied().collect();
    let orders = if ids.len() <= CONFLUENCE_LIMIT {
        permutations(&ids)
    } else {
        vec![ids.clone(), ids.iter().rev().copied().collect()]
    };
    for order in orders {
        let opts = PipelineOptions { order: order.clone(), ..single.clone() };
        let label = format!("order {order:?}");
        compare("confluence", seed, d, &label, &reference, value(d, &opts))?;
    }
    Ok(())
}

/// Rotating, reversing and permuting components and relabeling heights
/// monotonically leave the polynomial unchanged.
pub fn check_encoding_invariance(d: &SkeinDiagram, seed: u64) -> Result<(), Counterexample> {
    let opts = PipelineOptions { threads: Some(1), ..Default::default() };
    let reference = baseline("invariance", seed, d, &opts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(7));

    let mut rotated = d.clone();
    for c in &mut rotated.components {
        if !c.is_empty() {
            *c = c.rotated(rng.gen_range(0..c.len()));
        }
    }
    compare("invariance", seed, d, "rotation", &reference, value(&rotated, &opts))?;

    let doubled = d.relabel_heights(|h| 2 * h).expect("increasing");
    compare("invariance", seed, d, "heights doubled", &reference, value(&doubled, &opts))?;

    let used: Vec<u32> = {
        let mut v: Vec<u32> = d.components.iter().flat_map(|c| c.heights().iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut image = BTreeMap::new();
    let mut next = 0u32;
    for h in used {
        next += rng.gen_range(1..=5);
        image.insert(h, next);
    }
    let relabeled = d.relabel_heights(|h| image[&h]).expect("increasing");
    compare("invariance", seed, d, "random relabeling", &reference, value(&relabeled, &opts))?;

    let mut permuted = d.clone();
    permuted.components.shuffle(&mut rng);
    compare("invariance", seed, d, "component permutation", &reference, value(&permuted, &opts))?;

    if !d.components.is_empty() {
        let l = rng.gen_range(0..d.components.len());
        let mut reversed = d.clone();
        reversed.components[l] = reversed.components[l].reversed();
        for (id, s) in reversed.signs.iter_mut() {
            let inside = d.components[l].entries().iter().filter(|e| e.crossing_id() == Some(*id)).count();
            if inside == 1 {
                *s = s.negated();
            }
        }
        compare("invariance", seed, d, "component reversal", &reference, value(&reversed, &opts))?;
    }
    Ok(())
}

/// The tangled diagram evaluates to its crossing-free base times the curl factors.
pub fn check_isotopy(g: &Generated, seed: u64) -> Result<(), Counterexample> {
    let opts = PipelineOptions { threads: Some(1), ..Default::default() };
    let base = baseline("isotopy", seed, &g.base, &opts)?.scale(&g.framing);
    compare("isotopy", seed, &g.diagram, "tangled vs base", &base, value(&g.diagram, &opts))
}

/// Resolution agrees with the independently computed state sum.
pub fn check_state_sum(d: &SkeinDiagram, seed: u64) -> Result<(), Counterexample> {
    let resolved = resolve_all(&Expression::single(d.clone()))
        .map_err(|e| Counterexample::new("state-sum", seed, d, format!("resolution failed: {e}")))?;
    let expected = dedup(&state_sum(d));
    let got = dedup(&resolved);
    if expected == got {
        Ok(())
    } else {
        Err(Counterexample::new("state-sum", seed, d, format!("{} merged states vs {} merged resolved terms", expected.len(), got.len())))
    }
}

/// Mirroring conjugates the polynomial (`t` to `t^-1`).
pub fn check_mirror(d: &SkeinDiagram, seed: u64) -> Result<(), Counterexample> {
    let opts = PipelineOptions { threads: Some(1), ..Default::default() };
    let expected = baseline("mirror", seed, d, &opts)?.bar();
    compare("mirror", seed, d, "mirror image", &expected, value(&d.mirrored(), &opts))
}

/// Sorting with curls and sorting with slides only agree.
pub fn check_curl_vs_slide(d: &SkeinDiagram, seed: u64) -> Result<(), Counterexample> {
    let opts = PipelineOptions { threads: Some(1), ..Default::default() };
    let reference = baseline("curl-vs-slide", seed, d, &opts)?;
    let slides = PipelineOptions { prefer_curl: false, ..opts };
    compare("curl-vs-slide", seed, d, "slides only", &reference, value(d, &slides))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Confluence,
    Invariance,
    All,
}

impl std::str::FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "confluence" => Ok(CheckKind::Confluence),
            "invariance" => Ok(CheckKind::Invariance),
            "all" => Ok(CheckKind::All),
            other => Err(format!("unknown check {other:?}")),
        }
    }
}

#[derive(Debug, Default)]
pub struct FuzzReport {
    pub diagrams: usize,
    pub failures: Vec<Counterexample>,
}

/// Runs the selected checks on `count` diagrams with seeds `seed..seed+count`,
/// each with at most two components and `max_crossings` crossings.
pub fn fuzz(seed: u64, count: usize, max_crossings: usize, kind: CheckKind) -> FuzzReport {
    let failures: Vec<Counterexample> = (0..count as u64)
        .into_par_iter()
        .flat_map_iter(|k| {
            let s = seed.wrapping_add(k);
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x51ed);
            let r = rng.gen_range(0..=max_crossings);
            let g = random_generated(s, 2, r);
            let d = &g.diagram;
            let mut out = Vec::new();
            let mut run = |res: Result<(), Counterexample>| {
                if let Err(c) = res {
                    out.push(c);
                }
            };
            if matches!(kind, CheckKind::Confluence | CheckKind::All) {
                run(check_confluence(d, s));
            }
            if matches!(kind, CheckKind::Invariance | CheckKind::All) {
                run(check_encoding_invariance(d, s));
            }
            if kind == CheckKind::All {
                run(check_isotopy(&g, s));
                run(check_state_sum(d, s));
                run(check_mirror(d, s));
                run(check_curl_vs_slide(d, s));
            }
            out
        })
        .collect();
    FuzzReport { diagrams: count, failures }
}
