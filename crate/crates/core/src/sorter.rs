//! Strand sorting: remove height inversions on the base strands by inducing
//! Reidemeister crossings at an inverted pair and resolving them at once.
//!
//! A strand is sorted when every pass in front of it lies below every pass
//! behind it. Each sorting step swaps one adjacent (under, over) height pair,
//! so it lowers that strand's inversion count by exactly one.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{CrossingId, Expression, Layer, PassEntry, Sign, SignTable, SkeinDiagram, Strand, Term};
use crate::laurent::LaurentPoly;
use crate::resolver::{resolve_crossing_traced, ResolveError};
use crate::trace::{NoTrace, TraceEvent, TraceSink};

/// Heights on one strand split by layer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrandPartition {
    /// Heights of passes in front of the strand.
    pub over: BTreeSet<u32>,
    /// Heights of passes behind the strand.
    pub under: BTreeSet<u32>,
    /// All heights on the strand.
    pub all: BTreeSet<u32>,
}

impl StrandPartition {
    /// Number of (over, under) pairs with the over pass higher.
    pub fn inversions(&self) -> usize {
        self.over.iter().map(|p| self.under.range(..*p).count()).sum()
    }
}

pub fn partition(d: &SkeinDiagram, n: Strand) -> StrandPartition {
    let mut p = StrandPartition::default();
    for c in &d.components {
        for (e, h) in c.entries().iter().zip(c.heights()) {
            if let PassEntry::Strand { strand, layer } = *e {
                if strand == n {
                    match layer {
                        Layer::Over => p.over.insert(*h),
                        Layer::Under => p.under.insert(*h),
                    };
                    p.all.insert(*h);
                }
            }
        }
    }
    p
}

pub fn is_sorted(d: &SkeinDiagram, n: Strand) -> bool {
    let p = partition(d, n);
    match (p.over.last(), p.under.first()) {
        (Some(top), Some(bottom)) => top < bottom,
        _ => true,
    }
}

pub fn is_fully_sorted(d: &SkeinDiagram) -> bool {
    Strand::BOTH.iter().all(|n| is_sorted(d, *n))
}

/// Total inversion count over both strands.
pub fn inversion_count(d: &SkeinDiagram) -> usize {
    Strand::BOTH.iter().map(|n| partition(d, *n).inversions()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InductionChoice {
    /// Swap the heights of the under pass at `under` and the over pass at `over`.
    Swap { under: u32, over: u32 },
    AlreadySorted,
}

/// Picks the lowest inverted pair. Over passes matching the lowest heights are
/// skipped; the chosen over pass is the next one, and the chosen under pass is
/// the highest under pass below it.
pub fn induction_decision(p: &StrandPartition) -> InductionChoice {
    let mut over = p.over.clone();
    let mut all = p.all.clone();
    let c = loop {
        let (Some(&b), Some(&c)) = (all.first(), over.first()) else {
            return InductionChoice::AlreadySorted;
        };
        if b != c {
            break c;
        }
        all.pop_first();
        over.pop_first();
    };
    match p.under.range(..c).next_back() {
        Some(&a) => InductionChoice::Swap { under: a, over: c },
        None => InductionChoice::AlreadySorted,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("sorting step limit of {limit} exceeded")]
    StepLimit { limit: usize },
    #[error("sorting made no progress: inversion count {parent} became {child}")]
    NoProgress { parent: usize, child: usize },
    #[error("no {layer:?} pass at height {height} on strand {strand}")]
    PassNotFound { strand: u8, layer: Layer, height: u32 },
    #[error("term still has unresolved crossings")]
    UnresolvedCrossings,
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

fn find_pass(d: &SkeinDiagram, n: Strand, layer: Layer, height: u32) -> Result<(usize, usize), SortError> {
    let target = PassEntry::strand(n, layer);
    for (l, c) in d.components.iter().enumerate() {
        for (j, (e, h)) in c.entries().iter().zip(c.heights()).enumerate() {
            if *e == target && *h == height {
                return Ok((l, j));
            }
        }
    }
    Err(SortError::PassNotFound { strand: n.number(), layer, height })
}

/// Adds `before` and `after` around position `j` (placeholder height, code 0).
fn wrap(d: &mut SkeinDiagram, (l, j): (usize, usize), before: PassEntry, after: PassEntry) {
    let c = &mut d.components[l];
    c.insert(j + 1, after, 0, 0);
    c.insert(j, before, 0, 0);
}

fn swap_heights(d: &mut SkeinDiagram, a: (usize, usize), c: (usize, usize)) {
    let ha = d.components[a.0].heights()[a.1];
    let hc = d.components[c.0].heights()[c.1];
    d.components[a.0].heights_mut()[a.1] = hc;
    d.components[c.0].heights_mut()[c.1] = ha;
}

/// Induces crossings that let the under pass at height `a` and the over pass
/// at height `c` on strand `n` trade heights, and performs the trade.
///
/// Consecutive passes along one component get a single curl (crossing 1) and
/// the coefficient absorbs its framing factor; otherwise the under arc is
/// slid beneath the over arc, creating crossings 1 and 2 of opposite sign.
/// `prefer_curl = false` always uses the slide.
pub fn induce_crossings(t: &Term, n: Strand, a: u32, c: u32, prefer_curl: bool) -> Result<Term, SortError> {
    if !t.diagram.signs.is_empty() {
        return Err(SortError::UnresolvedCrossings);
    }
    let pa = find_pass(&t.diagram, n, Layer::Under, a)?;
    let pc = find_pass(&t.diagram, n, Layer::Over, c)?;
    let dir = |(l, j): (usize, usize)| t.diagram.components[l].direction_at(j).expect("strand pass");
    let mut d = t.diagram.clone();
    let mut coeff = t.coeff.clone();
    let x = PassEntry::crossing;

    if prefer_curl && pa.0 == pc.0 && pa.1.abs_diff(pc.1) == 1 {
        let first = pa.min(pc);
        let eps = -dir(first);
        let (before, after) = if first == pa {
            (x(1, Layer::Under), x(1, Layer::Over))
        } else {
            (x(1, Layer::Over), x(1, Layer::Under))
        };
        // [before, first, second, after]: both passes shift right by one.
        let comp = &mut d.components[first.0];
        comp.insert(first.1 + 2, after, 0, 0);
        comp.insert(first.1, before, 0, 0);
        d.signs = [(CrossingId(1), Sign::from_value(eps).expect("unit"))].into();
        swap_heights(&mut d, (pa.0, pa.1 + 1), (pc.0, pc.1 + 1));
        coeff = &coeff * &(-LaurentPoly::t_pow(-3 * eps));
    } else {
        let (da, dc) = (dir(pa), dir(pc));
        let a_wrap = if da > 0 { (x(1, Layer::Under), x(2, Layer::Under)) } else { (x(2, Layer::Under), x(1, Layer::Under)) };
        let c_wrap = if dc > 0 { (x(1, Layer::Over), x(2, Layer::Over)) } else { (x(2, Layer::Over), x(1, Layer::Over)) };
        // Wrap the later position first so the earlier index stays valid.
        let (pa2, pc2) = if pa > pc {
            wrap(&mut d, pa, a_wrap.0, a_wrap.1);
            wrap(&mut d, pc, c_wrap.0, c_wrap.1);
            let shift = if pa.0 == pc.0 { 2 } else { 0 };
            ((pa.0, pa.1 + 1 + shift), (pc.0, pc.1 + 1))
        } else {
            wrap(&mut d, pc, c_wrap.0, c_wrap.1);
            wrap(&mut d, pa, a_wrap.0, a_wrap.1);
            let shift = if pa.0 == pc.0 { 2 } else { 0 };
            ((pa.0, pa.1 + 1), (pc.0, pc.1 + 1 + shift))
        };
        let s = dc * da;
        let signs: SignTable = [
            (CrossingId(1), Sign::from_value(s).expect("unit")),
            (CrossingId(2), Sign::from_value(-s).expect("unit")),
        ]
        .into();
        d.signs = signs;
        swap_heights(&mut d, pa2, pc2);
    }
    Ok(Term::new(coeff, d))
}

/// One sorting step on the first unsorted strand: induce, then resolve the
/// induced crossings. Returns `None` when the term is already sorted.
pub fn sort_step(t: &Term, prefer_curl: bool, sink: &dyn TraceSink) -> Result<Option<Vec<Term>>, SortError> {
    for n in Strand::BOTH {
        let p = partition(&t.diagram, n);
        let InductionChoice::Swap { under, over } = induction_decision(&p) else {
            continue;
        };
        let induced = induce_crossings(t, n, under, over, prefer_curl)?;
        sink.emit(TraceEvent::Induce {
            strand: n.number(),
            under,
            over,
            kind: if induced.diagram.signs.len() == 1 { "R1" } else { "R2" },
            crossings: induced.diagram.signs.len(),
        });
        let mut pending = vec![induced];
        let mut done = Vec::new();
        while let Some(term) = pending.pop() {
            match term.diagram.signs.keys().next().copied() {
                None => done.push(term),
                Some(id) => {
                    let (x, y) = resolve_crossing_traced(&term, id, sink)?;
                    pending.push(y);
                    pending.push(x);
                }
            }
        }
        let parent = inversion_count(&t.diagram);
        for child in &done {
            let inv = inversion_count(&child.diagram);
            if inv >= parent && child.diagram.strand_pass_count() >= t.diagram.strand_pass_count() {
                return Err(SortError::NoProgress { parent, child: inv });
            }
        }
        return Ok(Some(done));
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct SortOptions {
    /// Maximum sorting rounds; defaults to `4 * s^2` for `s` strand passes.
    pub max_steps: Option<usize>,
    /// Use a single curl for consecutive passes instead of a slide.
    pub prefer_curl: bool,
    /// Merge equal terms after every round.
    pub dedup: bool,
    /// Process terms in parallel (ignored while tracing).
    pub parallel: bool,
}

impl Default for SortOptions {
    fn default() -> Self {
        Self { max_steps: None, prefer_curl: true, dedup: true, parallel: true }
    }
}

pub fn default_step_budget(e: &Expression) -> usize {
    let s = e.terms.iter().map(|t| t.diagram.strand_pass_count()).max().unwrap_or(0);
    4 * s * s
}

/// Sorts every term on both strands. Each round advances every unsorted term
/// by one step, so the round count bounds the steps along any term's history.
pub fn sort_expression(e: &Expression, opts: &SortOptions, sink: &dyn TraceSink) -> Result<Expression, SortError> {
    let limit = opts.max_steps.unwrap_or_else(|| default_step_budget(e));
    let mut current = e.clone();
    let mut round = 0;
    loop {
        let unsorted = current.terms.iter().filter(|t| !is_fully_sorted(&t.diagram)).count();
        sink.emit(TraceEvent::SortRound { round, terms: current.len(), unsorted });
        if unsorted == 0 {
            return Ok(current);
        }
        if round >= limit {
            return Err(SortError::StepLimit { limit });
        }
        let step = |t: &Term| -> Result<Vec<Term>, SortError> {
            Ok(sort_step(t, opts.prefer_curl, sink)?.unwrap_or_else(|| vec![t.clone()]))
        };
        let parts: Vec<Vec<Term>> = if opts.parallel {
            current.terms.par_iter().map(step).collect::<Result<_, _>>()?
        } else {
            current.terms.iter().map(step).collect::<Result<_, _>>()?
        };
        current = Expression { terms: parts.into_iter().flatten().collect() };
        if opts.dedup {
            let before = current.len();
            current = crate::engine::dedup_with(&current, opts.parallel);
            sink.emit(TraceEvent::Dedup { before, after: current.len() });
        }
        round += 1;
    }
}

/// [`sort_expression`] with default options and no tracing.
pub fn sort_all(e: &Expression) -> Result<Expression, SortError> {
    sort_expression(e, &SortOptions::default(), &NoTrace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Component, Strictness};

    fn diagram(parts: &[(&str, &[u32], &[u8])]) -> SkeinDiagram {
        SkeinDiagram::new(
            parts.iter().map(|(e, i, q)| Component::parse(e, i, q).unwrap()).collect(),
            SignTable::new(),
        )
    }

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    fn part(p: &[u32], n: &[u32]) -> StrandPartition {
        StrandPartition { over: set(p), under: set(n), all: set(p).union(&set(n)).copied().collect() }
    }

    #[test]
    fn partition_examples() {
        let d = diagram(&[("O1 U1", &[1, 2], &[3, 4])]);
        assert_eq!(partition(&d, Strand::One), part(&[1], &[2]));
        let d = diagram(&[("O1 U1 O1 U1", &[1, 2, 3, 4], &[3, 4, 3, 4])]);
        assert_eq!(partition(&d, Strand::One), part(&[1, 3], &[2, 4]));
        let d = diagram(&[("O1 U1", &[1, 4], &[3, 4]), ("O1 U1", &[3, 2], &[3, 4])]);
        assert_eq!(partition(&d, Strand::One), part(&[1, 3], &[2, 4]));
        assert_eq!(partition(&d, Strand::Two), StrandPartition::default());
    }

    #[test]
    fn sortedness_examples() {
        let sorted = diagram(&[("O1 U1 O1 U1", &[1, 3, 2, 4], &[3, 4, 3, 4])]);
        assert!(is_sorted(&sorted, Strand::One));
        let inverted = diagram(&[("O1 U1 O1 U1", &[1, 2, 3, 4], &[3, 4, 3, 4])]);
        assert!(!is_sorted(&inverted, Strand::One));
        assert!(is_sorted(&inverted, Strand::Two));
    }

    #[test]
    fn decision_examples() {
        assert_eq!(induction_decision(&part(&[1, 4], &[2, 3])), InductionChoice::Swap { under: 3, over: 4 });
        assert_eq!(induction_decision(&part(&[1, 3], &[2, 4])), InductionChoice::Swap { under: 2, over: 3 });
        assert_eq!(induction_decision(&part(&[1, 2], &[3, 4])), InductionChoice::AlreadySorted);
        assert_eq!(induction_decision(&part(&[], &[3, 4])), InductionChoice::AlreadySorted);
    }

    #[test]
    fn curl_for_consecutive_passes() {
        let d = diagram(&[("O1 U1", &[2, 1], &[3, 4])]);
        let t = induce_crossings(&Term::unit(d), Strand::One, 1, 2, true).unwrap();
        let c = &t.diagram.components[0];
        assert_eq!(c.len(), 4);
        assert_eq!(c.heights(), &[0, 1, 2, 0]);
        assert_eq!(t.diagram.signs.len(), 1);
        assert!(t.diagram.is_valid(Strictness::Internal));
    }

    #[test]
    fn slide_across_components() {
        let d = diagram(&[("O1 U1", &[3, 4], &[3, 4]), ("O1 U1", &[1, 2], &[3, 4])]);
        let t = induce_crossings(&Term::unit(d), Strand::One, 2, 3, true).unwrap();
        let new_passes = t
            .diagram
            .components
            .iter()
            .flat_map(|c| c.entries())
            .filter(|e| e.crossing_id().is_some())
            .count();
        assert_eq!(new_passes, 4);
        let signs: Vec<i32> = t.diagram.signs.values().map(|s| s.value()).collect();
        assert_eq!(signs.iter().sum::<i32>(), 0);
        assert!(t.diagram.is_valid(Strictness::Internal));
        assert!(is_sorted(&t.diagram, Strand::One));
    }

    #[test]
    fn one_step_sorts_single_inversion() {
        let d = diagram(&[("O1 U1 O1 U1", &[1, 2, 3, 4], &[3, 4, 3, 4])]);
        let out = sort_all(&Expression::single(d)).unwrap();
        assert!(!out.is_empty());
        assert!(out.terms.iter().all(|t| is_fully_sorted(&t.diagram)));
    }

    #[test]
    fn sorted_input_is_unchanged() {
        let d = diagram(&[("O1 U1", &[1, 2], &[3, 4])]);
        let e = Expression::single(d);
        assert_eq!(sort_all(&e).unwrap(), e);
    }

    #[test]
    fn step_limit_is_enforced() {
        let d = diagram(&[("O1 U1 O1 U1", &[1, 2, 3, 4], &[3, 4, 3, 4])]);
        let opts = SortOptions { max_steps: Some(0), ..SortOptions::default() };
        assert_eq!(
            sort_expression(&Expression::single(d), &opts, &NoTrace),
            Err(SortError::StepLimit { limit: 0 })
        );
    }
}
