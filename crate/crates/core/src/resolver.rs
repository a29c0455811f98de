//! Smoothing self-crossings with the framed skein relation.
//!
//! A crossing is replaced by its two smoothings. The orientation-respecting
//! smoothing (a split within one component, or a forward merge of two) gets
//! coefficient `t` at a positive crossing and `t^-1` at a negative one; the
//! other smoothing (a section reversal, or a backward merge) gets the inverse.

use rayon::prelude::*;
use thiserror::Error;

use crate::arrayops::{self, OpError};
use crate::diagram::{CrossingId, Expression, SignTable, SkeinDiagram, Term};
use crate::trace::{NoTrace, TraceEvent, TraceSink};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("no such crossing {0}")]
    NoSuchCrossing(CrossingId),
    #[error("crossing {id} has {found} passes in the diagram, expected 2")]
    Corrupt { id: CrossingId, found: usize },
    #[error(transparent)]
    Op(#[from] OpError),
}

/// Smooths crossing `id` of `t`. Returns `(oriented child, other child)`.
pub fn resolve_crossing(t: &Term, id: CrossingId) -> Result<(Term, Term), ResolveError> {
    resolve_crossing_traced(t, id, &NoTrace)
}

pub fn resolve_crossing_traced(t: &Term, id: CrossingId, sink: &dyn TraceSink) -> Result<(Term, Term), ResolveError> {
    let d = &t.diagram;
    let sign = *d.signs.get(&id).ok_or(ResolveError::NoSuchCrossing(id))?;
    let found = d.locate(id);
    let [(l1, j1), (l2, j2)] = found[..] else {
        return Err(ResolveError::Corrupt { id, found: found.len() });
    };
    let mut signs: SignTable = d.signs.clone();
    signs.remove(&id);
    let shift = sign.value();

    let (oriented, other, ops, components, positions) = if l1 == l2 {
        let (inner, outer) = arrayops::split_component(&d.components[l1], j1, j2)?;
        let mut split = d.components.clone();
        split[l1] = inner;
        split.insert(l1 + 1, outer);

        let (rev, section) = arrayops::reverse_component(&d.components[l1], j1, j2)?;
        let mut reversed = d.components.clone();
        reversed[l1] = rev;
        let rsigns = arrayops::update_signs_on_reversal(&signs, &section);
        (
            SkeinDiagram::new(split, signs),
            SkeinDiagram::new(reversed, rsigns),
            ['C', 'R'],
            vec![l1],
            [j1, j2],
        )
    } else {
        // `locate` scans components in order, so l1 < l2.
        let (x, y) = (&d.components[l1], &d.components[l2]);
        let fwd = arrayops::forward_merge(x, y, j1, j2)?;
        let (bwd, section) = arrayops::backward_merge(x, y, j1, j2)?;
        let merged = |c| {
            let mut v = d.components.clone();
            v[l1] = c;
            v.remove(l2);
            v
        };
        let bsigns = arrayops::update_signs_on_reversal(&signs, &section);
        (
            SkeinDiagram::new(merged(fwd), signs),
            SkeinDiagram::new(merged(bwd), bsigns),
            ['F', 'B'],
            vec![l1, l2],
            [j1, j2],
        )
    };

    sink.emit(TraceEvent::Resolve { crossing: id.0, ops, components, positions, shifts: [shift, -shift] });
    Ok((
        Term::new(t.coeff.shift(shift), oriented),
        Term::new(t.coeff.shift(-shift), other),
    ))
}

/// Fully resolves one term, taking crossings in `order` first and any others
/// by ascending id.
fn resolve_term(t: Term, order: &[CrossingId], sink: &dyn TraceSink) -> Result<Vec<Term>, ResolveError> {
    let next = order
        .iter()
        .find(|id| t.diagram.signs.contains_key(id))
        .or_else(|| t.diagram.signs.keys().next())
        .copied();
    match next {
        None => Ok(vec![t]),
        Some(id) => {
            let (a, b) = resolve_crossing_traced(&t, id, sink)?;
            let mut out = resolve_term(a, order, sink)?;
            out.extend(resolve_term(b, order, sink)?);
            Ok(out)
        }
    }
}

/// Resolves every crossing of every term, lowest id first. Each term with
/// `r` crossings contributes exactly `2^r` terms, in a deterministic order.
pub fn resolve_all(e: &Expression) -> Result<Expression, ResolveError> {
    let parts: Vec<Vec<Term>> = e
        .terms
        .par_iter()
        .map(|t| resolve_term(t.clone(), &[], &NoTrace))
        .collect::<Result<_, _>>()?;
    Ok(Expression { terms: parts.into_iter().flatten().collect() })
}

/// Single-threaded resolution in a caller-chosen crossing order, with tracing.
pub fn resolve_all_in_order(e: &Expression, order: &[CrossingId], sink: &dyn TraceSink) -> Result<Expression, ResolveError> {
    let mut terms = Vec::new();
    for t in &e.terms {
        terms.extend(resolve_term(t.clone(), order, sink)?);
    }
    Ok(Expression { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Component, Sign, Strictness};
    use crate::laurent::LaurentPoly;
    use crate::trace::Recorder;

    fn worked() -> SkeinDiagram {
        SkeinDiagram::parse(
            r#"{"components": [{"E": ["O1","X-1","O2","U2","X-2","O2","U2","X+2","X+1","U1"], "I": [1,8,6,5,7,3,4,7,8,2], "Q": [3,0,4,5,0,4,5,0,0,4]}], "U": {"1": -1, "2": 1}}"#,
        )
        .unwrap()
    }

    fn comp(tokens: &str, i: &[u32], q: &[u8]) -> Component {
        Component::parse(tokens, i, q).unwrap()
    }

    #[test]
    fn worked_example_first_crossing() {
        let (c, r) = resolve_crossing(&Term::unit(worked()), CrossingId(1)).unwrap();
        assert_eq!(c.coeff, LaurentPoly::t_pow(-1));
        assert_eq!(r.coeff, LaurentPoly::t_pow(1));
        assert_eq!(
            c.diagram.components,
            vec![
                comp("O2 U2 X-2 O2 U2 X+2", &[6, 5, 7, 3, 4, 7], &[4, 5, 0, 4, 5, 0]),
                comp("O1 U1", &[1, 2], &[3, 4]),
            ]
        );
        assert_eq!(
            r.diagram.components,
            vec![comp("O1 X+2 U2 O2 X-2 U2 O2 U1", &[1, 7, 4, 3, 7, 5, 6, 2], &[3, 0, 4, 5, 0, 4, 5, 4])]
        );
        for child in [&c, &r] {
            assert_eq!(child.diagram.signs, [(CrossingId(2), Sign::Positive)].into());
            assert!(child.diagram.is_valid(Strictness::Internal));
        }
    }

    #[test]
    fn two_component_crossing_merges() {
        let d = SkeinDiagram::new(
            vec![comp("O1 X+1 U1", &[1, 5, 2], &[3, 0, 4]), comp("O2 U2 X-1", &[3, 4, 5], &[4, 5, 0])],
            [(CrossingId(1), Sign::Positive)].into(),
        );
        let (f, b) = resolve_crossing(&Term::unit(d), CrossingId(1)).unwrap();
        assert_eq!(f.coeff, LaurentPoly::t_pow(1));
        assert_eq!(b.coeff, LaurentPoly::t_pow(-1));
        assert_eq!(f.diagram.components.len(), 1);
        assert_eq!(b.diagram.components.len(), 1);
        assert!(f.diagram.is_valid(Strictness::Input));
        assert!(b.diagram.is_valid(Strictness::Input));
    }

    #[test]
    fn missing_crossing_is_an_error() {
        let d = SkeinDiagram::new(vec![comp("O1 U1", &[1, 2], &[3, 4])], SignTable::new());
        assert_eq!(
            resolve_crossing(&Term::unit(d), CrossingId(1)).unwrap_err().to_string(),
            "no such crossing 1"
        );
    }

    #[test]
    fn resolve_all_doubles_per_crossing() {
        let out = resolve_all(&Expression::single(worked())).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.terms.iter().all(|t| t.diagram.signs.is_empty()));

        let plain = SkeinDiagram::new(vec![comp("O1 U1", &[1, 2], &[3, 4])], SignTable::new());
        let e = Expression::single(plain);
        assert_eq!(resolve_all(&e).unwrap(), e);
    }

    #[test]
    fn kink_children() {
        let kink = SkeinDiagram::new(vec![comp("X+1 X-1", &[0, 0], &[0, 0])], [(CrossingId(1), Sign::Positive)].into());
        let out = resolve_all(&Expression::single(kink)).unwrap();
        assert_eq!(out.terms[0].diagram.components, vec![Component::empty(), Component::empty()]);
        assert_eq!(out.terms[0].coeff, LaurentPoly::t_pow(1));
        assert_eq!(out.terms[1].diagram.components, vec![Component::empty()]);
        assert_eq!(out.terms[1].coeff, LaurentPoly::t_pow(-1));
    }

    #[test]
    fn order_and_trace() {
        let rec = Recorder::default();
        let e = Expression::single(worked());
        let out = resolve_all_in_order(&e, &[CrossingId(2), CrossingId(1)], &rec).unwrap();
        assert_eq!(out.len(), 4);
        let events = rec.events();
        assert_eq!(events.len(), 3);
        assert!(matches!(events[0], TraceEvent::Resolve { crossing: 2, .. }));
    }
}
