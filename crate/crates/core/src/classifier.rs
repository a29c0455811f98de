//! Classification of sorted, crossing-free terms into basis monomials.
//!
//! Once both strands are sorted, every component is a simple closed curve in
//! the twice-punctured disk, and its class is read off from its winding about
//! each puncture: the signed count of its passes in front of that strand.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::diagram::{Component, Expression, Layer, PassEntry, Strand, Term};
use crate::laurent::{BasisMonomial, LaurentPoly, SkeinPolynomial};
use crate::sorter::is_sorted;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindingProfile {
    pub w1: i32,
    pub w2: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisCurve {
    X,
    Y,
    Z,
    Unknot,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("component still has a self-crossing pass")]
    SelfPass,
    #[error("orientation code {code} does not fit {entry}")]
    BadCode { entry: PassEntry, code: u8 },
    #[error("non-classifiable sorted curve with winding ({w1}, {w2})")]
    NotClassifiable { w1: i32, w2: i32 },
    #[error("term has unresolved crossings")]
    Unresolved,
    #[error("term is not sorted on strand {0}")]
    NotSorted(u8),
}

pub fn winding(c: &Component) -> Result<WindingProfile, ClassifyError> {
    let mut w = WindingProfile { w1: 0, w2: 0 };
    for (j, e) in c.entries().iter().enumerate() {
        let PassEntry::Strand { strand, layer } = *e else {
            return Err(ClassifyError::SelfPass);
        };
        let dir = c.direction_at(j).ok_or(ClassifyError::BadCode { entry: *e, code: c.codes()[j] })?;
        if layer == Layer::Over {
            match strand {
                Strand::One => w.w1 += dir,
                Strand::Two => w.w2 += dir,
            }
        }
    }
    Ok(w)
}

pub fn classify_component(c: &Component) -> Result<BasisCurve, ClassifyError> {
    let WindingProfile { w1, w2 } = winding(c)?;
    match (w1, w2) {
        (0, 0) => Ok(BasisCurve::Unknot),
        (1 | -1, 0) => Ok(BasisCurve::X),
        (0, 1 | -1) => Ok(BasisCurve::Z),
        (1, 1) | (-1, -1) => Ok(BasisCurve::Y),
        _ => Err(ClassifyError::NotClassifiable { w1, w2 }),
    }
}

fn check_ready(t: &Term) -> Result<(), ClassifyError> {
    if !t.diagram.signs.is_empty() {
        return Err(ClassifyError::Unresolved);
    }
    for n in Strand::BOTH {
        if !is_sorted(&t.diagram, n) {
            return Err(ClassifyError::NotSorted(n.number()));
        }
    }
    Ok(())
}

/// Monomial of a resolved, sorted term, with its coefficient.
pub fn term_to_monomial(t: &Term) -> Result<(BasisMonomial, LaurentPoly), ClassifyError> {
    check_ready(t)?;
    let mut m = BasisMonomial::ONE;
    for c in &t.diagram.components {
        match classify_component(c)? {
            BasisCurve::X => m.x += 1,
            BasisCurve::Y => m.y += 1,
            BasisCurve::Z => m.z += 1,
            BasisCurve::Unknot => m.unknot += 1,
        }
    }
    Ok((m, t.coeff.clone()))
}

/// Value assigned to a trivial loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeltaMode {
    /// `-t^2 - t^-2`, the framed Kauffman loop value.
    #[default]
    Standard,
    /// `t^2 + t^-2`.
    Paper,
    /// Keep the `unknot` exponent.
    Symbolic,
}

impl DeltaMode {
    pub fn delta(self) -> Option<LaurentPoly> {
        match self {
            DeltaMode::Standard => Some(LaurentPoly::standard_delta()),
            DeltaMode::Paper => Some(LaurentPoly::paper_delta()),
            DeltaMode::Symbolic => None,
        }
    }

    pub fn apply(self, p: &SkeinPolynomial) -> SkeinPolynomial {
        match self.delta() {
            Some(d) => p.substitute_unknot(&d),
            None => p.clone(),
        }
    }
}

impl std::str::FromStr for DeltaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(DeltaMode::Standard),
            "paper" => Ok(DeltaMode::Paper),
            "symbolic" => Ok(DeltaMode::Symbolic),
            other => Err(format!("unknown delta mode {other:?}")),
        }
    }
}

pub fn evaluate(e: &Expression, mode: DeltaMode) -> Result<SkeinPolynomial, ClassifyError> {
    let mut p = SkeinPolynomial::zero();
    for t in &e.terms {
        let (m, c) = term_to_monomial(t)?;
        p.accumulate(m, &c);
    }
    Ok(mode.apply(&p))
}

// ---------------------------------------------------------------------------
// Auxiliary curves
// ---------------------------------------------------------------------------

/// The two frequent non-basis curves through both holes: `YPrime` passes
/// strand 1 in front above its back pass, `YDoublePrime` does so on strand 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuxCurve {
    YPrime,
    YDoublePrime,
}

impl AuxCurve {
    /// Expansion in the basis.
    pub fn value(self) -> SkeinPolynomial {
        let xz = BasisMonomial::new(1, 0, 1, 0);
        let y = BasisMonomial::new(0, 1, 0, 0);
        match self {
            AuxCurve::YPrime => SkeinPolynomial::zero()
                .accumulated(xz, &-LaurentPoly::t_pow(-2))
                .accumulated(y, &-LaurentPoly::t_pow(-4)),
            AuxCurve::YDoublePrime => SkeinPolynomial::zero()
                .accumulated(y, &-LaurentPoly::t_pow(4))
                .accumulated(xz, &-LaurentPoly::t_pow(2)),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AuxMonomial {
    pub base: BasisMonomial,
    pub y_prime: u32,
    pub y_double_prime: u32,
}

impl fmt::Display for AuxMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.base != BasisMonomial::ONE || (self.y_prime == 0 && self.y_double_prime == 0) {
            parts.push(self.base.to_string());
        }
        for (name, pow) in [("y'", self.y_prime), ("y''", self.y_double_prime)] {
            match pow {
                0 => {}
                1 => parts.push(name.to_string()),
                k => parts.push(format!("{name}^{k}")),
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial whose monomials may contain auxiliary-curve factors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxPolynomial {
    terms: BTreeMap<AuxMonomial, LaurentPoly>,
}

impl AuxPolynomial {
    pub fn accumulate(&mut self, m: AuxMonomial, c: &LaurentPoly) {
        let entry = self.terms.entry(m).or_insert_with(LaurentPoly::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AuxMonomial, &LaurentPoly)> + '_ {
        self.terms.iter()
    }
}

impl From<&SkeinPolynomial> for AuxPolynomial {
    fn from(p: &SkeinPolynomial) -> Self {
        let mut out = AuxPolynomial::default();
        for (m, c) in p.iter() {
            out.accumulate(AuxMonomial { base: *m, ..Default::default() }, c);
        }
        out
    }
}

/// Expands every auxiliary factor into the basis. Unknot exponents are kept.
pub fn substitute_aux(p: &AuxPolynomial) -> SkeinPolynomial {
    let yp = AuxCurve::YPrime.value();
    let ypp = AuxCurve::YDoublePrime.value();
    let mut out = SkeinPolynomial::zero();
    for (m, c) in p.iter() {
        let mut acc = SkeinPolynomial::zero().accumulated(m.base, c);
        for _ in 0..m.y_prime {
            acc = multiply(&acc, &yp);
        }
        for _ in 0..m.y_double_prime {
            acc = multiply(&acc, &ypp);
        }
        out = out.add(&acc);
    }
    out
}

fn multiply(a: &SkeinPolynomial, b: &SkeinPolynomial) -> SkeinPolynomial {
    let mut out = SkeinPolynomial::zero();
    for (ma, ca) in a.iter() {
        for (mb, cb) in b.iter() {
            out.accumulate(ma.times(*mb), &(ca * cb));
        }
    }
    out
}

/// Recognizes a resolved term made of one auxiliary curve plus trivial empty
/// loops. The curve must cross each strand once in front and once behind,
/// join the two strands by non-crossing arcs between them, and be inverted
/// on exactly one strand.
pub fn recognize_aux(t: &Term) -> Option<(AuxMonomial, LaurentPoly)> {
    if !t.diagram.signs.is_empty() {
        return None;
    }
    let mut curve = None;
    let mut loops = 0;
    for c in &t.diagram.components {
        if c.is_empty() {
            loops += 1;
        } else if curve.replace(c).is_some() {
            return None;
        }
    }
    let c = curve?;
    if c.len() != 4 {
        return None;
    }
    // Height of the front and back pass on each strand.
    let mut h: BTreeMap<(Strand, Layer), u32> = BTreeMap::new();
    for (e, ht) in c.entries().iter().zip(c.heights()) {
        let PassEntry::Strand { strand, layer } = *e else { return None };
        if h.insert((strand, layer), *ht).is_some() {
            return None;
        }
    }
    let inverted = |n| h[&(n, Layer::Over)] > h[&(n, Layer::Under)];

    // Arcs between the strands join consecutive passes on different strands.
    let n = c.len();
    let mut middle_arcs = Vec::new();
    for j in 0..n {
        let k = (j + 1) % n;
        let (a, b) = (c.entries()[j], c.entries()[k]);
        let (sa, sb) = (a.strand_of()?, b.strand_of()?);
        if sa == sb {
            continue;
        }
        let (one, two) = if sa == Strand::One { (j, k) } else { (k, j) };
        middle_arcs.push((c.heights()[one], c.heights()[two]));
    }
    let [(a1, a2), (b1, b2)] = middle_arcs[..] else { return None };
    if (a1 < b1) != (a2 < b2) {
        return None;
    }

    let which = match (inverted(Strand::One), inverted(Strand::Two)) {
        (true, false) => AuxCurve::YPrime,
        (false, true) => AuxCurve::YDoublePrime,
        _ => return None,
    };
    let mut m = AuxMonomial { base: BasisMonomial::new(0, 0, 0, loops), ..Default::default() };
    match which {
        AuxCurve::YPrime => m.y_prime = 1,
        AuxCurve::YDoublePrime => m.y_double_prime = 1,
    }
    Some((m, t.coeff.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{SignTable, SkeinDiagram};

    fn comp(tokens: &str, q: &[u8]) -> Component {
        let i: Vec<u32> = (1..=q.len() as u32).collect();
        Component::parse(tokens, &i, q).unwrap()
    }

    fn term(cs: Vec<Component>, coeff: LaurentPoly) -> Term {
        Term::new(coeff, SkeinDiagram::new(cs, SignTable::new()))
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding(&comp("O1 U1", &[3, 4])).unwrap(), WindingProfile { w1: 1, w2: 0 });
        assert_eq!(winding(&Component::empty()).unwrap(), WindingProfile { w1: 0, w2: 0 });
        assert_eq!(winding(&comp("O1 O2 U2 U1", &[3, 4, 5, 4])).unwrap(), WindingProfile { w1: 1, w2: 1 });
        assert_eq!(winding(&comp("X+1 X-1", &[0, 0])), Err(ClassifyError::SelfPass));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_component(&comp("O1 U1", &[3, 4])).unwrap(), BasisCurve::X);
        assert_eq!(classify_component(&comp("O2 U2", &[4, 5])).unwrap(), BasisCurve::Z);
        assert_eq!(classify_component(&comp("O1 O1", &[3, 4])).unwrap(), BasisCurve::Unknot);
        assert_eq!(classify_component(&comp("U1 O1", &[4, 3])).unwrap(), BasisCurve::X);
        assert_eq!(
            classify_component(&comp("O1 O2 U2 U1", &[3, 5, 4, 4])),
            Err(ClassifyError::NotClassifiable { w1: 1, w2: -1 })
        );
    }

    #[test]
    fn monomial_examples() {
        let two_x = term(
            vec![
                Component::parse("O1 U1", &[1, 3], &[3, 4]).unwrap(),
                Component::parse("O1 U1", &[2, 4], &[3, 4]).unwrap(),
            ],
            LaurentPoly::one(),
        );
        assert_eq!(term_to_monomial(&two_x).unwrap(), (BasisMonomial::new(2, 0, 0, 0), LaurentPoly::one()));
        let loop_ = term(vec![Component::empty()], LaurentPoly::t_pow(1));
        assert_eq!(term_to_monomial(&loop_).unwrap(), (BasisMonomial::new(0, 0, 0, 1), LaurentPoly::t_pow(1)));
        let c = -LaurentPoly::t_pow(-2);
        let xz = term(vec![comp("O1 U1", &[3, 4]), Component::parse("O2 U2", &[5, 6], &[4, 5]).unwrap()], c.clone());
        assert_eq!(term_to_monomial(&xz).unwrap(), (BasisMonomial::new(1, 0, 1, 0), c));
        let unsorted = term(vec![Component::parse("O1 U1", &[2, 1], &[3, 4]).unwrap()], LaurentPoly::one());
        assert_eq!(term_to_monomial(&unsorted), Err(ClassifyError::NotSorted(1)));
    }

    #[test]
    fn evaluate_modes() {
        assert!(evaluate(&Expression::default(), DeltaMode::Standard).unwrap().is_zero());
        let e = Expression { terms: vec![term(vec![Component::empty()], LaurentPoly::one())] };
        let std = evaluate(&e, DeltaMode::Standard).unwrap();
        assert_eq!(std.get(&BasisMonomial::ONE), Some(&LaurentPoly::standard_delta()));
        let paper = evaluate(&e, DeltaMode::Paper).unwrap();
        assert_eq!(paper.get(&BasisMonomial::ONE), Some(&LaurentPoly::paper_delta()));
        let sym = evaluate(&e, DeltaMode::Symbolic).unwrap();
        assert_eq!(sym.get(&BasisMonomial::new(0, 0, 0, 1)), Some(&LaurentPoly::one()));
    }

    #[test]
    fn aux_values() {
        let mut p = AuxPolynomial::default();
        p.accumulate(AuxMonomial { y_prime: 1, ..Default::default() }, &LaurentPoly::one());
        assert_eq!(substitute_aux(&p).to_string(), "(-1*t^-2)*x*z + (-1*t^-4)*y");
        let mut p = AuxPolynomial::default();
        p.accumulate(AuxMonomial { y_double_prime: 1, ..Default::default() }, &LaurentPoly::one());
        assert_eq!(substitute_aux(&p), AuxCurve::YPrime.value().bar());
        let plain = SkeinPolynomial::zero().accumulated(BasisMonomial::new(1, 0, 0, 0), &LaurentPoly::t_pow(3));
        assert_eq!(substitute_aux(&AuxPolynomial::from(&plain)), plain);
    }

    #[test]
    fn aux_recognition() {
        let yp = Component::parse("U1 O2 U2 O1", &[1, 3, 4, 2], &[3, 4, 5, 4]).unwrap();
        let (m, _) = recognize_aux(&term(vec![yp.clone(), Component::empty()], LaurentPoly::one())).unwrap();
        assert_eq!((m.y_prime, m.y_double_prime, m.base.unknot), (1, 0, 1));
        let ypp = Component::parse("O1 U2 O2 U1", &[1, 3, 4, 2], &[3, 4, 5, 4]).unwrap();
        let (m, _) = recognize_aux(&term(vec![ypp], LaurentPoly::one())).unwrap();
        assert_eq!(m.y_double_prime, 1);
        let y = Component::parse("O1 O2 U2 U1", &[1, 3, 4, 2], &[3, 4, 5, 4]).unwrap();
        assert!(recognize_aux(&term(vec![y], LaurentPoly::one())).is_none());
        assert!(recognize_aux(&term(vec![yp.clone(), yp], LaurentPoly::one())).is_none());
    }
}
