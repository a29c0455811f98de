//! The full evaluation pipeline: validate, resolve, deduplicate, sort,
//! classify, and accumulate into a skein polynomial.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::classifier::{self, AuxPolynomial, ClassifyError, DeltaMode};
use crate::diagram::{canonical_form, CrossingId, Expression, ParseError, SkeinDiagram, Strictness, Term, Violation};
use crate::laurent::{LaurentPoly, SkeinPolynomial};
use crate::resolver::{self, ResolveError};
use crate::sorter::{self, SortError, SortOptions};
use crate::trace::{NoTrace, TraceEvent, TraceSink};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid diagram: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("internal invariant violated: {0}")]
    Resolve(#[from] ResolveError),
    #[error("{0}")]
    Sort(#[from] SortError),
    #[error("internal invariant violated: {0}")]
    Classify(#[from] ClassifyError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Process exit code: 1 for bad input, 2 for internal invariant
    /// violations, 3 when the sorting step limit is hit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Invalid(_) => 1,
            Error::Sort(SortError::StepLimit { .. }) => 3,
            Error::Resolve(_) | Error::Sort(_) | Error::Classify(_) | Error::ThreadPool(_) => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub delta: DeltaMode,
    /// Recognize auxiliary curves and substitute their known expansions.
    pub aux_substitute: bool,
    /// Crossings to resolve first, in this order.
    pub order: Vec<CrossingId>,
    pub max_steps: Option<usize>,
    /// Worker threads; `Some(1)` runs the single-threaded reference path.
    pub threads: Option<usize>,
    /// Sort consecutive passes with a single curl instead of a slide.
    pub prefer_curl: bool,
    /// Merge equal terms between stages.
    pub dedup: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            delta: DeltaMode::Standard,
            aux_substitute: false,
            order: Vec::new(),
            max_steps: None,
            threads: None,
            prefer_curl: true,
            dedup: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineStats {
    /// Terms after resolving the input crossings, before merging.
    pub resolved_terms: usize,
    /// Terms after the first merge.
    pub deduplicated_terms: usize,
    /// Terms recognized as auxiliary curves.
    pub aux_terms: usize,
    /// Terms after sorting.
    pub sorted_terms: usize,
    pub elapsed: Duration,
}

impl PipelineStats {
    /// Fraction of resolved terms removed by the first merge.
    pub fn dedup_ratio(&self) -> f64 {
        if self.resolved_terms == 0 {
            0.0
        } else {
            1.0 - self.deduplicated_terms as f64 / self.resolved_terms as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub polynomial: SkeinPolynomial,
    pub stats: PipelineStats,
}

/// Merges terms whose diagrams have the same canonical form (signs included)
/// and drops zero coefficients. Output order is deterministic.
pub fn dedup(e: &Expression) -> Expression {
    dedup_with(e, true)
}

/// [`dedup`] with canonical forms computed in parallel or sequentially.
pub fn dedup_with(e: &Expression, parallel: bool) -> Expression {
    let keys: Vec<SkeinDiagram> = if parallel {
        e.terms.par_iter().map(|t| canonical_form(&t.diagram)).collect()
    } else {
        e.terms.iter().map(|t| canonical_form(&t.diagram)).collect()
    };
    let mut merged: BTreeMap<SkeinDiagram, LaurentPoly> = BTreeMap::new();
    for (key, t) in keys.into_iter().zip(&e.terms) {
        let slot = merged.entry(key).or_insert_with(LaurentPoly::zero);
        *slot = &*slot + &t.coeff;
    }
    merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(d, c)| Term::new(c, d))
        .collect()
}

pub fn run_pipeline(d: &SkeinDiagram, opts: &PipelineOptions) -> Result<PipelineOutput, Error> {
    run_pipeline_traced(d, opts, None)
}

/// Runs the pipeline; with a trace sink every stage runs single-threaded so
/// the records come out in a reproducible order.
pub fn run_pipeline_traced(
    d: &SkeinDiagram,
    opts: &PipelineOptions,
    sink: Option<&dyn TraceSink>,
) -> Result<PipelineOutput, Error> {
    let violations = d.validate(Strictness::Input);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let threads = if sink.is_some() { Some(1) } else { opts.threads };
    match threads {
        Some(1) => pipeline(d, opts, sink, false),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| pipeline(d, opts, sink, true))
        }
        None => pipeline(d, opts, sink, true),
    }
}

fn pipeline(
    d: &SkeinDiagram,
    opts: &PipelineOptions,
    sink: Option<&dyn TraceSink>,
    parallel: bool,
) -> Result<PipelineOutput, Error> {
    let start = Instant::now();
    let trace: &dyn TraceSink = sink.unwrap_or(&NoTrace);
    let mut stats = PipelineStats::default();

    let input = Expression::single(d.clone());
    let resolved = if parallel && opts.order.is_empty() {
        resolver::resolve_all(&input)?
    } else {
        resolver::resolve_all_in_order(&input, &opts.order, trace)?
    };
    stats.resolved_terms = resolved.len();
    let mut current = if opts.dedup {
        let merged = dedup_with(&resolved, parallel);
        trace.emit(TraceEvent::Dedup { before: resolved.len(), after: merged.len() });
        merged
    } else {
        resolved
    };
    stats.deduplicated_terms = current.len();

    let mut aux = AuxPolynomial::default();
    if opts.aux_substitute {
        let mut rest = Vec::new();
        for t in current.terms {
            match classifier::recognize_aux(&t) {
                Some((m, c)) => {
                    aux.accumulate(m, &c);
                    stats.aux_terms += 1;
                }
                None => rest.push(t),
            }
        }
        current = Expression { terms: rest };
    }

    let sort_opts = SortOptions { max_steps: opts.max_steps, prefer_curl: opts.prefer_curl, dedup: opts.dedup, parallel };
    let sorted = sorter::sort_expression(&current, &sort_opts, trace)?;
    stats.sorted_terms = sorted.len();

    let symbolic = classifier::evaluate(&sorted, DeltaMode::Symbolic)?;
    let total = symbolic.add(&classifier::substitute_aux(&aux));
    stats.elapsed = start.elapsed();
    Ok(PipelineOutput { polynomial: opts.delta.apply(&total), stats })
}

/// Convenience: default options, result polynomial only.
pub fn evaluate_diagram(d: &SkeinDiagram) -> Result<SkeinPolynomial, Error> {
    Ok(run_pipeline(d, &PipelineOptions::default())?.polynomial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Component, Sign, SignTable};
    use crate::laurent::BasisMonomial;

    fn x_loop(h: [u32; 2]) -> SkeinDiagram {
        SkeinDiagram::new(vec![Component::parse("O1 U1", &h, &[3, 4]).unwrap()], SignTable::new())
    }

    #[test]
    fn dedup_cancels_opposite_coefficients() {
        let e = Expression {
            terms: vec![Term::new(LaurentPoly::t_pow(1), x_loop([1, 2])), Term::new(-LaurentPoly::t_pow(1), x_loop([1, 2]))],
        };
        assert!(dedup(&e).is_empty());
    }

    #[test]
    fn dedup_merges_rotations() {
        let a = x_loop([1, 2]);
        let mut b = a.clone();
        b.components[0] = b.components[0].rotated(1);
        let e = Expression { terms: vec![Term::unit(a), Term::new(LaurentPoly::t_pow(2), b)] };
        let out = dedup(&e);
        assert_eq!(out.len(), 1);
        assert_eq!(out.terms[0].coeff, LaurentPoly::from_terms([(0, 1), (2, 1)]));
    }

    #[test]
    fn dedup_keeps_distinct_terms() {
        let z = SkeinDiagram::new(vec![Component::parse("O2 U2", &[1, 2], &[4, 5]).unwrap()], SignTable::new());
        let e = Expression { terms: vec![Term::unit(x_loop([1, 2])), Term::unit(z)] };
        assert_eq!(dedup(&e).len(), 2);
    }

    #[test]
    fn plain_unknot_by_mode() {
        let d = SkeinDiagram::new(vec![Component::empty()], SignTable::new());
        let std = run_pipeline(&d, &PipelineOptions::default()).unwrap().polynomial;
        assert_eq!(std.get(&BasisMonomial::ONE), Some(&LaurentPoly::standard_delta()));
        let opts = PipelineOptions { delta: DeltaMode::Symbolic, ..Default::default() };
        let sym = run_pipeline(&d, &opts).unwrap().polynomial;
        assert_eq!(sym.get(&BasisMonomial::new(0, 0, 0, 1)), Some(&LaurentPoly::one()));
    }

    #[test]
    fn exit_codes() {
        let bad = SkeinDiagram::new(vec![Component::parse("O1 U1", &[1, 1], &[3, 4]).unwrap()], SignTable::new());
        assert_eq!(run_pipeline(&bad, &PipelineOptions::default()).unwrap_err().exit_code(), 1);

        let inverted = SkeinDiagram::new(
            vec![Component::parse("O1 U1 O1 U1", &[1, 2, 3, 4], &[3, 4, 3, 4]).unwrap()],
            SignTable::new(),
        );
        let opts = PipelineOptions { max_steps: Some(0), ..Default::default() };
        assert_eq!(run_pipeline(&inverted, &opts).unwrap_err().exit_code(), 3);
        assert_eq!(Error::Classify(ClassifyError::SelfPass).exit_code(), 2);
    }

    #[test]
    fn kink_framing() {
        for (sign, exp) in [(Sign::Positive, 3), (Sign::Negative, -3)] {
            let d = SkeinDiagram::new(
                vec![Component::parse("X+1 X-1", &[1, 1], &[0, 0]).unwrap()],
                [(CrossingId(1), sign)].into(),
            );
            let p = evaluate_diagram(&d).unwrap();
            let expected = &(-LaurentPoly::t_pow(exp)) * &LaurentPoly::standard_delta();
            assert_eq!(p.get(&BasisMonomial::ONE), Some(&expected));
        }
    }
}
