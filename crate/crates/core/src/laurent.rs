//! Exact sparse Laurent polynomials in `t` and polynomials over the skein basis.
//!
//! Rendering grammar (used by the CLI and golden tests):
//!
//! ```text
//! poly      := "0" | term (" + " term)*
//! term      := "(" laurent ")" ("*" factor)*
//! factor    := ("x" | "y" | "z" | "unknot") ("^" power)?
//! laurent   := mono (" + " mono)*          ; ascending exponents
//! mono      := int | int "*t^" exp         ; exponent 0 prints the bare integer
//! ```
//!
//! Skein terms print in descending lexicographic order of `(x, y, z, unknot)`
//! exponents. A term over the empty monomial prints as just `(laurent)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A Laurent polynomial in one variable `t` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `coeff * t^exp`.
    pub fn monomial(coeff: impl Into<BigInt>, exp: i32) -> Self {
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    /// `t^exp`.
    pub fn t_pow(exp: i32) -> Self {
        Self::monomial(1, exp)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I, C>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i32, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, c.into());
        }
        p
    }

    /// The standard Kauffman loop value `-t^2 - t^-2`.
    pub fn standard_delta() -> Self {
        Self::from_terms([(-2, -1), (2, -1)])
    }

    /// The loop value `t^2 + t^-2` as printed alongside the unknot.
    pub fn paper_delta() -> Self {
        Self::from_terms([(-2, 1), (2, 1)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    /// Iterates `(exponent, coefficient)` in ascending exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    fn add_term(&mut self, exp: i32, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Substitutes `t -> t^-1` (the effect of mirroring a diagram).
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;

    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *e == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*t^{e}")?;
            }
        }
        Ok(())
    }
}

/// `x^a y^b z^c unknot^d`; derived ordering is lexicographic on `(x, y, z, unknot)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisMonomial {
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub unknot: u32,
}

impl BasisMonomial {
    pub const ONE: BasisMonomial = BasisMonomial { x: 0, y: 0, z: 0, unknot: 0 };

    pub fn new(x: u32, y: u32, z: u32, unknot: u32) -> Self {
        Self { x, y, z, unknot }
    }

    pub fn times(self, other: BasisMonomial) -> BasisMonomial {
        BasisMonomial {
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z,
            unknot: self.unknot + other.unknot,
        }
    }

    pub fn without_unknots(self) -> BasisMonomial {
        BasisMonomial { unknot: 0, ..self }
    }
}

impl fmt::Display for BasisMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors = [("x", self.x), ("y", self.y), ("z", self.z), ("unknot", self.unknot)];
        let mut first = true;
        for (name, pow) in factors {
            if pow == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if pow == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{pow}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A finite linear combination of basis monomials with Laurent coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SkeinPolynomial {
    entries: BTreeMap<BasisMonomial, LaurentPoly>,
}

impl SkeinPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: &BasisMonomial) -> Option<&LaurentPoly> {
        self.entries.get(m)
    }

    /// Iterates in ascending monomial order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&BasisMonomial, &LaurentPoly)> + '_ {
        self.entries.iter()
    }

    /// Adds `coeff` to the entry for `m` in place, dropping it if it cancels.
    pub fn accumulate(&mut self, m: BasisMonomial, coeff: &LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.entries.entry(m).or_default();
        *slot = &*slot + coeff;
        if slot.is_zero() {
            self.entries.remove(&m);
        }
    }

    /// Functional form of [`accumulate`](Self::accumulate).
    pub fn accumulated(mut self, m: BasisMonomial, coeff: &LaurentPoly) -> Self {
        self.accumulate(m, coeff);
        self
    }

    pub fn add(&self, other: &SkeinPolynomial) -> SkeinPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.entries {
            out.accumulate(*m, c);
        }
        out
    }

    pub fn scale(&self, factor: &LaurentPoly) -> SkeinPolynomial {
        let mut out = SkeinPolynomial::zero();
        for (m, c) in &self.entries {
            out.accumulate(*m, &(c * factor));
        }
        out
    }

    pub fn bar(&self) -> SkeinPolynomial {
        SkeinPolynomial {
            entries: self.entries.iter().map(|(m, c)| (*m, c.bar())).collect(),
        }
    }

    /// Replaces every `unknot^d` by `delta^d`.
    pub fn substitute_unknot(&self, delta: &LaurentPoly) -> SkeinPolynomial {
        let mut out = SkeinPolynomial::zero();
        for (m, c) in &self.entries {
            out.accumulate(m.without_unknots(), &(c * &delta.pow(m.unknot)));
        }
        out
    }

    /// JSON value in the `{"polynomial": [...]}` output schema.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Number, Value};
        let entries: Vec<Value> = self
            .entries
            .iter()
            .rev()
            .map(|(m, c)| {
                let coeff: Vec<Value> = c
                    .iter()
                    .map(|(e, k)| {
                        let n: Number = k.to_string().parse().expect("integer literal");
                        json!([e, Value::Number(n)])
                    })
                    .collect();
                json!({
                    "monomial": {"x": m.x, "y": m.y, "z": m.z, "unknot": m.unknot},
                    "coeff": coeff,
                })
            })
            .collect();
        json!({ "polynomial": entries })
    }
}

impl FromIterator<(BasisMonomial, LaurentPoly)> for SkeinPolynomial {
    fn from_iter<I: IntoIterator<Item = (BasisMonomial, LaurentPoly)>>(iter: I) -> Self {
        let mut out = SkeinPolynomial::zero();
        for (m, c) in iter {
            out.accumulate(m, &c);
        }
        out
    }
}

impl fmt::Display for SkeinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.entries.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *m == BasisMonomial::ONE {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

/// Convenience for small integers in tests and fixtures.
pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::monomial(c, 0)
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        LaurentPoly::one()
    }
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(pairs: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(pairs.iter().copied())
    }

    #[test]
    fn add_examples() {
        assert_eq!(&lp(&[(1, 1), (-1, 1)]) + &lp(&[(1, -1)]), lp(&[(-1, 1)]));
        let p = lp(&[(3, 2), (-5, 7)]);
        assert_eq!(&LaurentPoly::zero() + &p, p);
        let q = lp(&[(2, 1), (-2, 1)]);
        assert_eq!(&q + &q, lp(&[(2, 2), (-2, 2)]));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&LaurentPoly::t_pow(1) * &LaurentPoly::t_pow(-1), LaurentPoly::one());
        assert_eq!(&LaurentPoly::t_pow(-1) * &lp(&[(-3, -1)]), lp(&[(-4, -1)]));
        assert_eq!(&lp(&[(1, 1), (-1, 1)]) * &lp(&[(1, 1), (-1, -1)]), lp(&[(2, 1), (-2, -1)]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(LaurentPoly::one().shift(1), LaurentPoly::t_pow(1));
        assert_eq!(LaurentPoly::t_pow(-1).shift(-1), LaurentPoly::t_pow(-2));
        assert_eq!(LaurentPoly::standard_delta().shift(3), lp(&[(5, -1), (1, -1)]));
    }

    #[test]
    fn accumulate_examples() {
        let xz = BasisMonomial::new(1, 0, 1, 0);
        let y = BasisMonomial::new(0, 1, 0, 0);
        let p = SkeinPolynomial::zero().accumulated(xz, &lp(&[(-2, -1)]));
        assert_eq!(p.get(&xz), Some(&lp(&[(-2, -1)])));
        assert_eq!(p.len(), 1);

        let cancelled = SkeinPolynomial::zero()
            .accumulated(xz, &LaurentPoly::t_pow(1))
            .accumulated(xz, &lp(&[(1, -1)]));
        assert!(cancelled.is_zero());

        let both = SkeinPolynomial::zero()
            .accumulated(y, &lp(&[(-4, -1)]))
            .accumulated(xz, &lp(&[(-2, -1)]));
        assert_eq!(both.len(), 2);
        assert_eq!(both.to_string(), "(-1*t^-2)*x*z + (-1*t^-4)*y");
    }

    #[test]
    fn rendering() {
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(LaurentPoly::standard_delta().to_string(), "-1*t^-2 + -1*t^2");
        assert_eq!(lp(&[(0, 3), (1, -2)]).to_string(), "3 + -2*t^1");
        let p = SkeinPolynomial::zero()
            .accumulated(BasisMonomial::ONE, &LaurentPoly::standard_delta())
            .accumulated(BasisMonomial::new(2, 0, 0, 1), &LaurentPoly::one());
        assert_eq!(p.to_string(), "(1)*x^2*unknot + (-1*t^-2 + -1*t^2)");
        assert_eq!(SkeinPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn json_schema() {
        let p = SkeinPolynomial::zero().accumulated(BasisMonomial::new(1, 0, 1, 0), &lp(&[(-2, -1)]));
        assert_eq!(
            p.to_json().to_string(),
            r#"{"polynomial":[{"coeff":[[-2,-1]],"monomial":{"unknot":0,"x":1,"y":0,"z":1}}]}"#
        );
    }

    #[test]
    fn big_coefficients_do_not_overflow() {
        let p = lp(&[(0, 1), (1, 1)]).pow(80);
        assert_eq!(p.coeff(40).to_string(), "107507208733336176461620");
    }

    #[test]
    fn unknot_substitution() {
        let p = SkeinPolynomial::zero().accumulated(BasisMonomial::new(1, 0, 0, 2), &LaurentPoly::one());
        let q = p.substitute_unknot(&LaurentPoly::standard_delta());
        assert_eq!(q.get(&BasisMonomial::new(1, 0, 0, 0)), Some(&lp(&[(-4, 1), (0, 2), (4, 1)])));
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i32..=6, -5i64..=5), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn ring_laws(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!(p.iter().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn shift_is_multiplication(p in arb_poly(), k in -8i32..=8) {
            prop_assert_eq!(p.shift(k), &p * &LaurentPoly::t_pow(k));
        }

        #[test]
        fn accumulate_order_independent(
            (pairs, shuffled) in proptest::collection::vec(((0u32..2, 0u32..2, 0u32..2, 0u32..2), arb_poly()), 0..8)
                .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        ) {
            let mono = |((a, b, c, d), p): ((u32, u32, u32, u32), LaurentPoly)| (BasisMonomial::new(a, b, c, d), p);
            let forward: SkeinPolynomial = pairs.into_iter().map(mono).collect();
            let backward: SkeinPolynomial = shuffled.into_iter().map(mono).collect();
            prop_assert_eq!(forward, backward);
        }
    }
}
