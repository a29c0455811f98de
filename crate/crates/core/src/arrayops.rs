//! The four section operators used to smooth a crossing, applied in lockstep
//! to the `E`, `I` and `Q` arrays of a component.
//!
//! All operators discard the two entries at `j'` and `j''` (the passes of the
//! crossing being smoothed) and keep every other entry.

use thiserror::Error;

use crate::diagram::{Component, PassEntry, SignTable, Strand};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("section bounds out of order: j' = {0} is not below j'' = {1}")]
    BoundsOrder(usize, usize),
    #[error("code section has length {codes} but entry section has length {entries}")]
    LengthMismatch { codes: usize, entries: usize },
    #[error("orientation code {code} does not fit {entry}")]
    BadCode { code: u8, entry: PassEntry },
}

fn check_index(index: usize, len: usize) -> Result<(), OpError> {
    if index < len {
        Ok(())
    } else {
        Err(OpError::OutOfRange { index, len })
    }
}

fn check_bounds(len: usize, j1: usize, j2: usize) -> Result<(), OpError> {
    check_index(j1, len)?;
    check_index(j2, len)?;
    if j1 >= j2 {
        return Err(OpError::BoundsOrder(j1, j2));
    }
    Ok(())
}

/// Splits `x` into the inner section `x[j'+1..j'']` and the outer remainder
/// `x[..j'] ++ x[j''+1..]`.
pub fn split_section<T: Clone>(x: &[T], j1: usize, j2: usize) -> Result<(Vec<T>, Vec<T>), OpError> {
    check_bounds(x.len(), j1, j2)?;
    let inner = x[j1 + 1..j2].to_vec();
    let outer = x[..j1].iter().chain(&x[j2 + 1..]).cloned().collect();
    Ok((inner, outer))
}

/// `x[..j'] ++ reverse(x[j'+1..j'']) ++ x[j''+1..]`.
pub fn reverse_section<T: Clone>(x: &[T], j1: usize, j2: usize) -> Result<Vec<T>, OpError> {
    check_bounds(x.len(), j1, j2)?;
    Ok(x[..j1]
        .iter()
        .chain(x[j1 + 1..j2].iter().rev())
        .chain(&x[j2 + 1..])
        .cloned()
        .collect())
}

/// `x[..j'] ++ y[j''+1..] ++ y[..j''] ++ x[j'+1..]`: `y` spliced in at `j'`,
/// traversed forwards starting just after `j''`.
pub fn forward_insert<T: Clone>(x: &[T], y: &[T], j1: usize, j2: usize) -> Result<Vec<T>, OpError> {
    check_index(j1, x.len())?;
    check_index(j2, y.len())?;
    Ok(x[..j1]
        .iter()
        .chain(&y[j2 + 1..])
        .chain(&y[..j2])
        .chain(&x[j1 + 1..])
        .cloned()
        .collect())
}

/// `x[..j'] ++ reverse(y[..j'']) ++ reverse(y[j''+1..]) ++ x[j'+1..]`: `y`
/// spliced in at `j'`, traversed backwards starting just before `j''`.
pub fn backward_insert<T: Clone>(x: &[T], y: &[T], j1: usize, j2: usize) -> Result<Vec<T>, OpError> {
    check_index(j1, x.len())?;
    check_index(j2, y.len())?;
    Ok(x[..j1]
        .iter()
        .chain(y[..j2].iter().rev())
        .chain(y[j2 + 1..].iter().rev())
        .chain(&x[j1 + 1..])
        .cloned()
        .collect())
}

/// Reverses the direction encoded by each code: 3 and 4 swap on strand-1
/// passes, 4 and 5 swap on strand-2 passes, 0 stays 0.
pub fn flip_q_codes(codes: &[u8], entries: &[PassEntry]) -> Result<Vec<u8>, OpError> {
    if codes.len() != entries.len() {
        return Err(OpError::LengthMismatch { codes: codes.len(), entries: entries.len() });
    }
    codes
        .iter()
        .zip(entries)
        .map(|(&code, &entry)| match (entry.strand_of(), code) {
            (None, 0) => Ok(0),
            (Some(Strand::One), 3) => Ok(4),
            (Some(Strand::One), 4) => Ok(3),
            (Some(Strand::Two), 4) => Ok(5),
            (Some(Strand::Two), 5) => Ok(4),
            _ => Err(OpError::BadCode { code, entry }),
        })
        .collect()
}

/// Negates the sign of every crossing with exactly one pass in `reversed`.
pub fn update_signs_on_reversal(signs: &SignTable, reversed: &[PassEntry]) -> SignTable {
    signs
        .iter()
        .map(|(&id, &s)| {
            let inside = reversed.iter().filter(|e| e.crossing_id() == Some(id)).count();
            (id, if inside % 2 == 1 { s.negated() } else { s })
        })
        .collect()
}

/// Split smoothing of a crossing within one component: `(inner, outer)`.
pub fn split_component(c: &Component, j1: usize, j2: usize) -> Result<(Component, Component), OpError> {
    let (e_in, e_out) = split_section(c.entries(), j1, j2)?;
    let (i_in, i_out) = split_section(c.heights(), j1, j2)?;
    let (q_in, q_out) = split_section(c.codes(), j1, j2)?;
    Ok((
        Component::from_parts_unchecked(e_in, i_in, q_in),
        Component::from_parts_unchecked(e_out, i_out, q_out),
    ))
}

/// Reversing smoothing within one component. Returns the new component and
/// the entries of the reversed section.
pub fn reverse_component(c: &Component, j1: usize, j2: usize) -> Result<(Component, Vec<PassEntry>), OpError> {
    check_bounds(c.len(), j1, j2)?;
    let section = &c.entries()[j1 + 1..j2];
    let flipped = flip_q_codes(&c.codes()[j1 + 1..j2], section)?;
    let mut codes = c.codes().to_vec();
    codes[j1 + 1..j2].copy_from_slice(&flipped);
    let e = reverse_section(c.entries(), j1, j2)?;
    let i = reverse_section(c.heights(), j1, j2)?;
    let q = reverse_section(&codes, j1, j2)?;
    Ok((Component::from_parts_unchecked(e, i, q), section.to_vec()))
}

/// Orientation-preserving merge of two components at a crossing between them.
pub fn forward_merge(x: &Component, y: &Component, j1: usize, j2: usize) -> Result<Component, OpError> {
    Ok(Component::from_parts_unchecked(
        forward_insert(x.entries(), y.entries(), j1, j2)?,
        forward_insert(x.heights(), y.heights(), j1, j2)?,
        forward_insert(x.codes(), y.codes(), j1, j2)?,
    ))
}

/// Merge that traverses `y` backwards. Returns the new component and the
/// entries of `y` that now run in reverse.
pub fn backward_merge(
    x: &Component,
    y: &Component,
    j1: usize,
    j2: usize,
) -> Result<(Component, Vec<PassEntry>), OpError> {
    let flipped = flip_q_codes(y.codes(), y.entries())?;
    let merged = Component::from_parts_unchecked(
        backward_insert(x.entries(), y.entries(), j1, j2)?,
        backward_insert(x.heights(), y.heights(), j1, j2)?,
        backward_insert(x.codes(), &flipped, j1, j2)?,
    );
    let reversed = y
        .entries()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != j2)
        .map(|(_, e)| *e)
        .collect();
    Ok((merged, reversed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{CrossingId, Sign};
    use proptest::prelude::*;

    fn tok(s: &str) -> Vec<PassEntry> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    const E: &str = "O1 X-1 O2 U2 X-2 O2 U2 X+2 X+1 U1";

    #[test]
    fn split_examples() {
        assert_eq!(split_section(&['a', 'b', 'c', 'd', 'e'], 1, 3).unwrap(), (vec!['c'], vec!['a', 'e']));
        assert_eq!(split_section(&['a', 'b', 'c', 'd'], 0, 3).unwrap(), (vec!['b', 'c'], vec![]));
        let (y, z) = split_section(&tok(E), 1, 8).unwrap();
        assert_eq!(y, tok("O2 U2 X-2 O2 U2 X+2"));
        assert_eq!(z, tok("O1 U1"));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(reverse_section(&['a', 'b', 'c', 'd', 'e', 'f'], 1, 4).unwrap(), vec!['a', 'd', 'c', 'f']);
        assert_eq!(reverse_section(&['a', 'b', 'c'], 0, 2).unwrap(), vec!['b']);
        assert_eq!(reverse_section(&tok(E), 1, 8).unwrap(), tok("O1 X+2 U2 O2 X-2 U2 O2 U1"));
    }

    #[test]
    fn insert_examples() {
        assert_eq!(forward_insert(&['a', 'b', 'c'], &['p', 'q', 'r'], 1, 1).unwrap(), vec!['a', 'r', 'p', 'c']);
        assert_eq!(forward_insert(&['a'], &['p'], 0, 0).unwrap(), Vec::<char>::new());
        assert_eq!(forward_insert(&['a', 'b'], &['p', 'q', 'r'], 0, 2).unwrap(), vec!['p', 'q', 'b']);
        assert_eq!(backward_insert(&['a', 'b', 'c'], &['p', 'q', 'r'], 1, 1).unwrap(), vec!['a', 'p', 'r', 'c']);
        assert_eq!(backward_insert(&['a'], &['p', 'q'], 0, 0).unwrap(), vec!['q']);
        assert_eq!(backward_insert(&['a', 'b'], &['p', 'q', 'r'], 1, 0).unwrap(), vec!['a', 'r', 'q']);
    }

    #[test]
    fn operator_errors() {
        assert_eq!(split_section(&[1, 2, 3], 2, 1), Err(OpError::BoundsOrder(2, 1)));
        assert_eq!(reverse_section(&[1, 2, 3], 1, 1), Err(OpError::BoundsOrder(1, 1)));
        assert_eq!(split_section(&[1, 2, 3], 0, 3), Err(OpError::OutOfRange { index: 3, len: 3 }));
        assert!(forward_insert(&[1], &[2], 1, 0).is_err());
        assert!(backward_insert(&[1], &[2], 0, 1).is_err());
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip_q_codes(&[3, 0, 4], &tok("O1 X+1 U1")).unwrap(), vec![4, 0, 3]);
        assert_eq!(flip_q_codes(&[4, 5], &tok("O2 U2")).unwrap(), vec![5, 4]);
        let e = tok("O1 X+1 U1 O2");
        let once = flip_q_codes(&[3, 0, 4, 5], &e).unwrap();
        assert_eq!(flip_q_codes(&once, &e).unwrap(), vec![3, 0, 4, 5]);
        assert!(matches!(flip_q_codes(&[3], &e), Err(OpError::LengthMismatch { .. })));
        assert!(matches!(flip_q_codes(&[5], &tok("O1")), Err(OpError::BadCode { .. })));
    }

    #[test]
    fn sign_update_examples() {
        let signs: SignTable = [(CrossingId(2), Sign::Positive), (CrossingId(3), Sign::Positive)].into();
        let inner = tok("O2 U2 X-2 O2 U2 X+2");
        assert_eq!(update_signs_on_reversal(&signs, &inner), signs);
        let only3 = update_signs_on_reversal(&signs, &tok("X+3"));
        assert_eq!(only3[&CrossingId(3)], Sign::Negative);
        assert_eq!(only3[&CrossingId(2)], Sign::Positive);
        assert_eq!(update_signs_on_reversal(&signs, &[]), signs);
    }

    #[test]
    fn reverse_component_flips_codes() {
        let c = Component::parse(E, &[1, 8, 6, 5, 7, 3, 4, 7, 8, 2], &[3, 0, 4, 5, 0, 4, 5, 0, 0, 4]).unwrap();
        let (r, section) = reverse_component(&c, 1, 8).unwrap();
        assert_eq!(r.entries(), tok("O1 X+2 U2 O2 X-2 U2 O2 U1").as_slice());
        assert_eq!(r.heights(), &[1, 7, 4, 3, 7, 5, 6, 2]);
        assert_eq!(r.codes(), &[3, 0, 4, 5, 0, 4, 5, 4]);
        assert_eq!(section.len(), 6);
    }

    #[test]
    fn backward_merge_flips_inserted_codes() {
        let x = Component::parse("O1 X+1 U1", &[1, 5, 2], &[3, 0, 4]).unwrap();
        let y = Component::parse("O2 U2 X-1", &[3, 4, 5], &[4, 5, 0]).unwrap();
        let (m, rev) = backward_merge(&x, &y, 1, 2).unwrap();
        assert_eq!(m.entries(), tok("O1 U2 O2 U1").as_slice());
        assert_eq!(m.heights(), &[1, 4, 3, 2]);
        assert_eq!(m.codes(), &[3, 4, 5, 4]);
        assert_eq!(rev, tok("O2 U2"));
        let f = forward_merge(&x, &y, 1, 2).unwrap();
        assert_eq!(f.entries(), tok("O1 O2 U2 U1").as_slice());
        assert_eq!(f.codes(), &[3, 4, 5, 4]);
    }

    fn sorted_multiset(mut v: Vec<u16>) -> Vec<u16> {
        v.sort_unstable();
        v
    }

    fn without(x: &[u16], drop: &[usize]) -> Vec<u16> {
        x.iter().enumerate().filter(|(k, _)| !drop.contains(k)).map(|(_, v)| *v).collect()
    }

    fn section_case() -> impl Strategy<Value = (Vec<u16>, usize, usize)> {
        prop::collection::vec(any::<u16>(), 2..24).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), 0..n - 1).prop_flat_map(move |(x, j1)| (Just(x), Just(j1), j1 + 1..n))
        })
    }

    proptest! {
        #[test]
        fn single_array_operators_conserve_entries((x, j1, j2) in section_case()) {
            let rest = sorted_multiset(without(&x, &[j1, j2]));
            let (y, z) = split_section(&x, j1, j2).unwrap();
            prop_assert_eq!(sorted_multiset([y, z].concat()), rest.clone());
            let r = reverse_section(&x, j1, j2).unwrap();
            prop_assert_eq!(sorted_multiset(r), rest);
        }

        #[test]
        fn insert_operators_conserve_entries(
            x in prop::collection::vec(any::<u16>(), 1..12),
            y in prop::collection::vec(any::<u16>(), 1..12),
            a in any::<prop::sample::Index>(),
            b in any::<prop::sample::Index>(),
        ) {
            let (j1, j2) = (a.index(x.len()), b.index(y.len()));
            let rest = sorted_multiset([without(&x, &[j1]), without(&y, &[j2])].concat());
            prop_assert_eq!(sorted_multiset(forward_insert(&x, &y, j1, j2).unwrap()), rest.clone());
            prop_assert_eq!(sorted_multiset(backward_insert(&x, &y, j1, j2).unwrap()), rest);
        }

        #[test]
        fn adjacent_reverse_just_deletes((x, j1, _) in section_case()) {
            let r = reverse_section(&x, j1, j1 + 1).unwrap();
            prop_assert_eq!(r, without(&x, &[j1, j1 + 1]));
        }

        #[test]
        fn sign_update_is_involution(ids in prop::collection::vec(1u32..6, 0..8), flips in prop::collection::vec(any::<bool>(), 5)) {
            let signs: SignTable = (1..6u32)
                .map(|k| (CrossingId(k), if flips[k as usize - 1] { Sign::Positive } else { Sign::Negative }))
                .collect();
            let section: Vec<PassEntry> = ids.iter().map(|k| PassEntry::crossing(*k, crate::diagram::Layer::Over)).collect();
            let twice = update_signs_on_reversal(&update_signs_on_reversal(&signs, &section), &section);
            prop_assert_eq!(twice, signs);
        }
    }
}
