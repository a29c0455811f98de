//! Array encoding of a framed skein diagram around the two base strands.
//!
//! Each link component is three parallel arrays: the pass entries `E`
//! (crossing over/under a base strand, or one half of a self-crossing), the
//! heights `I` along the strands, and the orientation codes `Q`. The sign
//! table `U` holds the sign of every unresolved self-crossing.
//!
//! File format (UTF-8 JSON, one line):
//!
//! ```text
//! {"components": [{"E": ["O1","X-1",...], "I": [1,8,...], "Q": [3,0,...]}], "U": {"1": -1, "2": 1}}
//! ```
//!
//! Tokens: `O1`, `U1`, `O2`, `U2` for passes in front of (`O`) or behind (`U`)
//! strand 1 or 2; `X+k` / `X-k` for the over/under halves of self-crossing `k`.
//! Crossing `k` corresponds to the decimal label `k * 10^-m` of a hand-drawn
//! diagram with fewer than `10^m` crossings. Orientation codes: strand 1 uses
//! 3 (left to right) and 4 (right to left), strand 2 uses 4 (left to right)
//! and 5 (right to left), self-crossing passes use 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::laurent::LaurentPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strand {
    One,
    Two,
}

impl Strand {
    pub const BOTH: [Strand; 2] = [Strand::One, Strand::Two];

    pub fn number(self) -> u8 {
        match self {
            Strand::One => 1,
            Strand::Two => 2,
        }
    }
}

/// Front (`Over`) or behind (`Under`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Over,
    Under,
}

impl Layer {
    pub fn flipped(self) -> Layer {
        match self {
            Layer::Over => Layer::Under,
            Layer::Under => Layer::Over,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrossingId(pub u32);

impl fmt::Display for CrossingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn negated(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

pub type SignTable = BTreeMap<CrossingId, Sign>;

/// One point of interest along a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PassEntry {
    Strand { strand: Strand, layer: Layer },
    SelfPass { id: CrossingId, layer: Layer },
}

impl PassEntry {
    pub fn strand(strand: Strand, layer: Layer) -> Self {
        PassEntry::Strand { strand, layer }
    }

    pub fn crossing(id: u32, layer: Layer) -> Self {
        PassEntry::SelfPass { id: CrossingId(id), layer }
    }

    pub fn crossing_id(self) -> Option<CrossingId> {
        match self {
            PassEntry::SelfPass { id, .. } => Some(id),
            PassEntry::Strand { .. } => None,
        }
    }

    pub fn strand_of(self) -> Option<Strand> {
        match self {
            PassEntry::Strand { strand, .. } => Some(strand),
            PassEntry::SelfPass { .. } => None,
        }
    }

    pub fn layer(self) -> Layer {
        match self {
            PassEntry::Strand { layer, .. } | PassEntry::SelfPass { layer, .. } => layer,
        }
    }

    /// Same entry seen from the other side of the projection plane.
    pub fn mirrored(self) -> Self {
        match self {
            PassEntry::Strand { strand, layer } => PassEntry::Strand { strand, layer: layer.flipped() },
            PassEntry::SelfPass { id, layer } => PassEntry::SelfPass { id, layer: layer.flipped() },
        }
    }
}

impl fmt::Display for PassEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PassEntry::Strand { strand, layer } => {
                let l = if *layer == Layer::Over { 'O' } else { 'U' };
                write!(f, "{l}{}", strand.number())
            }
            PassEntry::SelfPass { id, layer } => {
                let s = if *layer == Layer::Over { '+' } else { '-' };
                write!(f, "X{s}{id}")
            }
        }
    }
}

impl FromStr for PassEntry {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::Token(s.to_string());
        match s {
            "O1" => Ok(PassEntry::strand(Strand::One, Layer::Over)),
            "U1" => Ok(PassEntry::strand(Strand::One, Layer::Under)),
            "O2" => Ok(PassEntry::strand(Strand::Two, Layer::Over)),
            "U2" => Ok(PassEntry::strand(Strand::Two, Layer::Under)),
            _ => {
                let rest = s.strip_prefix('X').ok_or_else(bad)?;
                let (layer, digits) = if let Some(d) = rest.strip_prefix('+') {
                    (Layer::Over, d)
                } else if let Some(d) = rest.strip_prefix('-') {
                    (Layer::Under, d)
                } else {
                    return Err(bad());
                };
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let id: u32 = digits.parse().map_err(|_| bad())?;
                if id == 0 {
                    return Err(bad());
                }
                Ok(PassEntry::crossing(id, layer))
            }
        }
    }
}

/// Orientation code on a self-crossing pass.
pub const CODE_SELF: u8 = 0;

/// Traversal direction at a strand pass: `+1` left to right, `-1` right to left.
/// `None` when the code does not belong to the entry.
pub fn direction(entry: PassEntry, code: u8) -> Option<i32> {
    match (entry.strand_of(), code) {
        (Some(Strand::One), 3) => Some(1),
        (Some(Strand::One), 4) => Some(-1),
        (Some(Strand::Two), 4) => Some(1),
        (Some(Strand::Two), 5) => Some(-1),
        _ => None,
    }
}

/// Orientation code for a strand pass traversed in direction `dir`.
pub fn code_for(strand: Strand, dir: i32) -> u8 {
    match (strand, dir > 0) {
        (Strand::One, true) => 3,
        (Strand::One, false) => 4,
        (Strand::Two, true) => 4,
        (Strand::Two, false) => 5,
    }
}

/// One closed component: parallel `E`, `I`, `Q` arrays of equal length.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    entries: Vec<PassEntry>,
    heights: Vec<u32>,
    codes: Vec<u8>,
}

impl Component {
    pub fn new(entries: Vec<PassEntry>, heights: Vec<u32>, codes: Vec<u8>) -> Result<Self, Violation> {
        if entries.len() != heights.len() || entries.len() != codes.len() {
            return Err(Violation::LengthMismatch {
                e: entries.len(),
                i: heights.len(),
                q: codes.len(),
            });
        }
        Ok(Self { entries, heights, codes })
    }

    pub(crate) fn from_parts_unchecked(entries: Vec<PassEntry>, heights: Vec<u32>, codes: Vec<u8>) -> Self {
        debug_assert!(entries.len() == heights.len() && entries.len() == codes.len());
        Self { entries, heights, codes }
    }

    /// Parses whitespace-separated tokens, e.g. `Component::parse("O1 U1", &[1, 2], &[3, 4])`.
    pub fn parse(tokens: &str, heights: &[u32], codes: &[u8]) -> Result<Self, ParseError> {
        let entries = tokens
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<PassEntry>, _>>()?;
        Component::new(entries, heights.to_vec(), codes.to_vec()).map_err(|v| ParseError::Invalid(vec![v]))
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PassEntry] {
        &self.entries
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn into_parts(self) -> (Vec<PassEntry>, Vec<u32>, Vec<u8>) {
        (self.entries, self.heights, self.codes)
    }

    pub(crate) fn heights_mut(&mut self) -> &mut [u32] {
        &mut self.heights
    }

    pub(crate) fn insert(&mut self, at: usize, entry: PassEntry, height: u32, code: u8) {
        self.entries.insert(at, entry);
        self.heights.insert(at, height);
        self.codes.insert(at, code);
    }

    /// Traversal direction at position `j` (`None` on self-crossing passes).
    pub fn direction_at(&self, j: usize) -> Option<i32> {
        direction(self.entries[j], self.codes[j])
    }

    pub fn strand_pass_count(&self) -> usize {
        self.entries.iter().filter(|e| e.strand_of().is_some()).count()
    }

    /// Cyclic rotation so that the entry at `offset` comes first.
    pub fn rotated(&self, offset: usize) -> Component {
        assert!(offset == 0 || offset < self.len(), "rotation offset {offset} out of range");
        let mut c = self.clone();
        if !c.is_empty() {
            c.entries.rotate_left(offset);
            c.heights.rotate_left(offset);
            c.codes.rotate_left(offset);
        }
        c
    }

    /// The same closed curve traversed backwards; orientation codes flip.
    pub fn reversed(&self) -> Component {
        let mut entries = self.entries.clone();
        let mut heights = self.heights.clone();
        entries.reverse();
        heights.reverse();
        let codes = crate::arrayops::flip_q_codes(
            &self.codes.iter().rev().copied().collect::<Vec<_>>(),
            &entries,
        )
        .expect("lengths agree");
        Component { entries, heights, codes }
    }

    fn mirrored(&self) -> Component {
        Component {
            entries: self.entries.iter().map(|e| e.mirrored()).collect(),
            heights: self.heights.clone(),
            codes: self.codes.clone(),
        }
    }
}

/// Cyclic rotation of `c` by `offset`; identical shift on `E`, `I` and `Q`.
pub fn rotate_component(c: &Component, offset: usize) -> Component {
    c.rotated(offset)
}

/// A multi-component skein diagram together with its unresolved crossing signs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkeinDiagram {
    pub components: Vec<Component>,
    pub signs: SignTable,
}

/// Which height placeholders are acceptable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    /// User input: every height must be positive.
    Input,
    /// Mid-pipeline: self-crossing passes may carry the placeholder height 0.
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("array length mismatch (|E|={e}, |I|={i}, |Q|={q})")]
    LengthMismatch { e: usize, i: usize, q: usize },
    #[error("component {component} position {position}: orientation code {code} does not fit {entry}")]
    CodeMismatch { component: usize, position: usize, entry: PassEntry, code: u8 },
    #[error("unpaired self-crossing {id}")]
    UnpairedSelfCrossing { id: CrossingId },
    #[error("self-crossing {id} has different heights on its two passes")]
    PairHeightMismatch { id: CrossingId },
    #[error("strand height collision: height {height} used twice on strand {}", strand.number())]
    StrandHeightCollision { strand: Strand, height: u32 },
    #[error("height collision: height {height} used by unrelated passes")]
    HeightCollision { height: u32 },
    #[error("component {component} position {position}: placeholder height 0 not allowed here")]
    PlaceholderHeight { component: usize, position: usize },
    #[error("sign table entry for crossing {id} does not match the diagram")]
    SignTableMismatch { id: CrossingId },
    #[error("component {component}: orientation codes do not describe a closed walk around the strands")]
    InconsistentOrientation { component: usize },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unrecognised pass token {0:?}")]
    Token(String),
    #[error("sign for crossing {0:?} must be 1 or -1")]
    SignValue(String),
    #[error("invalid diagram: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Region of the projection plane: left of strand 1, between, right of strand 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    Left,
    Middle,
    Right,
}

/// `(region before, region after)` for a strand pass in direction `dir`.
fn region_step(strand: Strand, dir: i32) -> (Region, Region) {
    match (strand, dir > 0) {
        (Strand::One, true) => (Region::Left, Region::Middle),
        (Strand::One, false) => (Region::Middle, Region::Left),
        (Strand::Two, true) => (Region::Middle, Region::Right),
        (Strand::Two, false) => (Region::Right, Region::Middle),
    }
}

impl SkeinDiagram {
    pub fn new(components: Vec<Component>, signs: SignTable) -> Self {
        Self { components, signs }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn crossing_count(&self) -> usize {
        self.signs.len()
    }

    pub fn strand_pass_count(&self) -> usize {
        self.components.iter().map(Component::strand_pass_count).sum()
    }

    /// `(component, position)` of every pass of crossing `id`.
    pub fn locate(&self, id: CrossingId) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (l, c) in self.components.iter().enumerate() {
            for (j, e) in c.entries.iter().enumerate() {
                if e.crossing_id() == Some(id) {
                    out.push((l, j));
                }
            }
        }
        out
    }

    /// Every violated well-formedness rule; empty when the diagram is valid.
    pub fn validate(&self, strictness: Strictness) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut passes: BTreeMap<CrossingId, Vec<(Layer, u32)>> = BTreeMap::new();
        let mut strand_heights: BTreeSet<(Strand, u32)> = BTreeSet::new();
        let mut height_users: BTreeMap<u32, BTreeSet<Option<CrossingId>>> = BTreeMap::new();
        let mut reported_heights = BTreeSet::new();

        for (l, c) in self.components.iter().enumerate() {
            if c.entries.len() != c.heights.len() || c.entries.len() != c.codes.len() {
                out.push(Violation::LengthMismatch {
                    e: c.entries.len(),
                    i: c.heights.len(),
                    q: c.codes.len(),
                });
                continue;
            }
            let mut codes_ok = true;
            for (j, (&entry, (&h, &q))) in c.entries.iter().zip(c.heights.iter().zip(&c.codes)).enumerate() {
                let fits = match entry {
                    PassEntry::SelfPass { .. } => q == CODE_SELF,
                    PassEntry::Strand { .. } => direction(entry, q).is_some(),
                };
                if !fits {
                    codes_ok = false;
                    out.push(Violation::CodeMismatch { component: l, position: j, entry, code: q });
                }
                if h == 0 && (strictness == Strictness::Input || entry.strand_of().is_some()) {
                    out.push(Violation::PlaceholderHeight { component: l, position: j });
                }
                match entry {
                    PassEntry::SelfPass { id, layer } => passes.entry(id).or_default().push((layer, h)),
                    PassEntry::Strand { strand, .. } => {
                        if !strand_heights.insert((strand, h)) && h != 0 {
                            out.push(Violation::StrandHeightCollision { strand, height: h });
                            reported_heights.insert(h);
                        }
                    }
                }
                if h != 0 {
                    height_users.entry(h).or_default().insert(entry.crossing_id());
                }
            }
            if codes_ok && !walk_is_closed(c) {
                out.push(Violation::InconsistentOrientation { component: l });
            }
        }

        for (id, ps) in &passes {
            let paired = ps.len() == 2 && ps[0].0 != ps[1].0;
            if !paired {
                out.push(Violation::UnpairedSelfCrossing { id: *id });
            } else if ps[0].1 != ps[1].1 {
                out.push(Violation::PairHeightMismatch { id: *id });
            }
        }

        for (h, users) in &height_users {
            // A height may be shared only by the two passes of one crossing.
            let strand_users = strand_heights.iter().filter(|(_, hh)| hh == h).count();
            let clash = users.len() > 1 || strand_users > 1;
            if clash && !reported_heights.contains(h) {
                out.push(Violation::HeightCollision { height: *h });
            }
        }

        let present: BTreeSet<CrossingId> = passes.keys().copied().collect();
        let table: BTreeSet<CrossingId> = self.signs.keys().copied().collect();
        for id in present.symmetric_difference(&table) {
            out.push(Violation::SignTableMismatch { id: *id });
        }
        out
    }

    pub fn is_valid(&self, strictness: Strictness) -> bool {
        self.validate(strictness).is_empty()
    }

    /// Applies a height map to every nonzero height. `f` must be strictly
    /// increasing on the heights in use; otherwise an error names the clash.
    pub fn relabel_heights(&self, f: impl Fn(u32) -> u32) -> Result<SkeinDiagram, RelabelError> {
        let used: BTreeSet<u32> = self
            .components
            .iter()
            .flat_map(|c| c.heights.iter().copied())
            .filter(|h| *h != 0)
            .collect();
        let mut prev: Option<(u32, u32)> = None;
        for &h in &used {
            let img = f(h);
            if img == 0 {
                return Err(RelabelError::ZeroImage { height: h });
            }
            if let Some((ph, pimg)) = prev {
                if img <= pimg {
                    return Err(RelabelError::NotIncreasing { first: ph, second: h });
                }
            }
            prev = Some((h, img));
        }
        let mut out = self.clone();
        for c in &mut out.components {
            for h in &mut c.heights {
                if *h != 0 {
                    *h = f(*h);
                }
            }
        }
        Ok(out)
    }

    /// Mirror image through the projection plane: every over/under swaps and
    /// every crossing sign flips.
    pub fn mirrored(&self) -> SkeinDiagram {
        SkeinDiagram {
            components: self.components.iter().map(Component::mirrored).collect(),
            signs: self.signs.iter().map(|(k, s)| (*k, s.negated())).collect(),
        }
    }

    /// Parses the JSON file format and validates it as user input.
    pub fn parse(text: &str) -> Result<SkeinDiagram, ParseError> {
        let d = Self::parse_unvalidated(text)?;
        let violations = d.validate(Strictness::Input);
        if violations.is_empty() {
            Ok(d)
        } else {
            Err(ParseError::Invalid(violations))
        }
    }

    /// Parses without validation; lengths must still agree.
    pub fn parse_unvalidated(text: &str) -> Result<SkeinDiagram, ParseError> {
        let raw: RawDiagram = serde_json::from_str(text)?;
        let mut components = Vec::with_capacity(raw.components.len());
        for rc in raw.components {
            let entries = rc.e.iter().map(|s| s.parse()).collect::<Result<Vec<PassEntry>, _>>()?;
            let c = Component::new(entries, rc.i, rc.q).map_err(|v| ParseError::Invalid(vec![v]))?;
            components.push(c);
        }
        let mut signs = SignTable::new();
        for (k, v) in raw.u {
            let id: u32 = match k.parse() {
                Ok(id) if id > 0 && !k.starts_with('+') => id,
                _ => return Err(ParseError::Token(k)),
            };
            let sign = i32::try_from(v).ok().and_then(Sign::from_value).ok_or(ParseError::SignValue(k))?;
            signs.insert(CrossingId(id), sign);
        }
        Ok(SkeinDiagram { components, signs })
    }

    /// Canonical single-line serialization (with trailing newline).
    pub fn to_json_string(&self) -> String {
        fn list<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
            items.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        let comps: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                format!(
                    "{{\"E\": [{}], \"I\": [{}], \"Q\": [{}]}}",
                    list(c.entries.iter().map(|e| format!("\"{e}\""))),
                    list(c.heights.iter()),
                    list(c.codes.iter()),
                )
            })
            .collect();
        let signs: Vec<String> = self.signs.iter().map(|(k, s)| format!("\"{k}\": {}", s.value())).collect();
        format!("{{\"components\": [{}], \"U\": {{{}}}}}\n", comps.join(", "), signs.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelabelError {
    #[error("height map is not strictly increasing on {first} < {second}")]
    NotIncreasing { first: u32, second: u32 },
    #[error("height map sends {height} to the placeholder 0")]
    ZeroImage { height: u32 },
}

/// Free-function form of [`SkeinDiagram::relabel_heights`].
pub fn relabel_heights(d: &SkeinDiagram, f: impl Fn(u32) -> u32) -> Result<SkeinDiagram, RelabelError> {
    d.relabel_heights(f)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    components: Vec<RawComponent>,
    #[serde(rename = "U")]
    u: BTreeMap<String, i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    #[serde(rename = "E")]
    e: Vec<String>,
    #[serde(rename = "I")]
    i: Vec<u32>,
    #[serde(rename = "Q")]
    q: Vec<u8>,
}

/// Does the sequence of strand passes describe a consistent walk through the
/// three regions and return to its start?
fn walk_is_closed(c: &Component) -> bool {
    let steps: Vec<(Region, Region)> = c
        .entries
        .iter()
        .zip(&c.codes)
        .filter_map(|(e, q)| Some(region_step(e.strand_of()?, direction(*e, *q)?)))
        .collect();
    let Some(&(start, _)) = steps.first() else {
        return true;
    };
    let mut here = start;
    for (from, to) in steps {
        if from != here {
            return false;
        }
        here = to;
    }
    here == start
}

/// A scalar Laurent coefficient times a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: LaurentPoly,
    pub diagram: SkeinDiagram,
}

impl Term {
    pub fn new(coeff: LaurentPoly, diagram: SkeinDiagram) -> Self {
        Self { coeff, diagram }
    }

    pub fn unit(diagram: SkeinDiagram) -> Self {
        Self::new(LaurentPoly::one(), diagram)
    }
}

/// Ordered linear combination of terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expression {
    pub terms: Vec<Term>,
}

impl Expression {
    pub fn single(d: SkeinDiagram) -> Self {
        Self { terms: vec![Term::unit(d)] }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl FromIterator<Term> for Expression {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Expression {
            terms: iter.into_iter().filter(|t| !t.coeff.is_zero()).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

/// Id-free sort key of one entry: crossings sort before strand passes.
type EntryKey = (u8, Layer, u8, u32, u8);

fn entry_key(e: PassEntry, h: u32, q: u8) -> EntryKey {
    match e {
        PassEntry::SelfPass { layer, .. } => (0, layer, 0, h, q),
        PassEntry::Strand { strand, layer } => (1, layer, strand.number(), h, q),
    }
}

fn component_key(c: &Component) -> Vec<EntryKey> {
    (0..c.len()).map(|j| entry_key(c.entries[j], c.heights[j], c.codes[j])).collect()
}

/// Upper bound on tie-breaking combinations explored by [`canonical_form`].
const TIE_BREAK_LIMIT: usize = 720;

/// A component's minimal key and every (reversed, encoding) choice attaining it.
type ComponentOptions = (Vec<EntryKey>, Vec<(bool, Component)>);

/// Deterministic representative of `d` under component rotation, component
/// traversal reversal, component permutation, order-preserving height
/// relabeling and crossing renumbering.
///
/// Nonzero heights are compressed to `1..=m`; each component is rotated (and
/// possibly reversed) to its least id-free key sequence; components are then
/// sorted and crossings renumbered by first appearance. Remaining ties (only
/// possible for components made of placeholder-height crossings) are broken
/// by trying the tied choices and keeping the least full encoding.
pub fn canonical_form(d: &SkeinDiagram) -> SkeinDiagram {
    let compressed = compress_heights(d);

    // Per component: least key and every distinct (reversed, rotation) reaching it.
    let mut options: Vec<ComponentOptions> = Vec::new();
    for c in &compressed.components {
        let mut best: Option<Vec<EntryKey>> = None;
        let mut choices: Vec<(bool, Component)> = Vec::new();
        for reversed in [false, true] {
            let base = if reversed { c.reversed() } else { c.clone() };
            for r in 0..c.len().max(1) {
                let cand = base.rotated(r);
                let key = component_key(&cand);
                match &best {
                    Some(b) if key > *b => {}
                    Some(b) if key == *b => {
                        if !choices.iter().any(|x| x.0 == reversed && x.1 == cand) {
                            choices.push((reversed, cand));
                        }
                    }
                    _ => {
                        best = Some(key);
                        choices = vec![(reversed, cand)];
                    }
                }
            }
        }
        options.push((best.unwrap_or_default(), choices));
    }

    let mut order: Vec<usize> = (0..options.len()).collect();
    order.sort_by(|a, b| options[*a].0.cmp(&options[*b].0));

    // Groups of components with equal keys may be permuted among themselves.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if options[g[0]].0 == options[i].0 => g.push(i),
            _ => groups.push(vec![i]),
        }
    }

    let mut combos: usize = 1;
    for g in &groups {
        let distinct = g.iter().map(|i| options[*i].1.len()).product::<usize>();
        let perms = if g.iter().all(|i| options[*i].1.len() == 1)
            && g.windows(2).all(|w| options[w[0]].1 == options[w[1]].1)
        {
            1
        } else {
            (1..=g.len()).product::<usize>()
        };
        combos = combos.saturating_mul(distinct.saturating_mul(perms));
    }

    let build = |picked: Vec<&(bool, Component)>| -> SkeinDiagram {
        let comps: Vec<Component> = picked.iter().map(|(_, c)| c.clone()).collect();
        // Sign flips for crossings with exactly one pass on a reversed component.
        let mut flips: BTreeMap<CrossingId, u32> = BTreeMap::new();
        for ((rev, _), c) in picked.iter().zip(&comps) {
            if *rev {
                for e in &c.entries {
                    if let Some(id) = e.crossing_id() {
                        *flips.entry(id).or_default() += 1;
                    }
                }
            }
        }
        let signs: SignTable = compressed
            .signs
            .iter()
            .map(|(id, s)| {
                let odd = flips.get(id).copied().unwrap_or(0) % 2 == 1;
                (*id, if odd { s.negated() } else { *s })
            })
            .collect();
        renumber(SkeinDiagram { components: comps, signs })
    };

    if combos <= 1 || combos > TIE_BREAK_LIMIT {
        let picked = order.iter().map(|i| &options[*i].1[0]).collect();
        return build(picked);
    }

    // Enumerate tied choices and keep the least encoding.
    let mut best: Option<SkeinDiagram> = None;
    let mut partial: Vec<Vec<&(bool, Component)>> = vec![Vec::new()];
    for g in &groups {
        let mut next = Vec::new();
        for perm in permutations(g) {
            let mut seqs: Vec<Vec<&(bool, Component)>> = vec![Vec::new()];
            for i in &perm {
                let mut grown = Vec::new();
                for s in &seqs {
                    for c in &options[*i].1 {
                        let mut s2 = s.clone();
                        s2.push(c);
                        grown.push(s2);
                    }
                }
                seqs = grown;
            }
            for p in &partial {
                for s in &seqs {
                    let mut full = p.clone();
                    full.extend(s.iter().copied());
                    next.push(full);
                }
            }
        }
        partial = next;
    }
    for picked in partial {
        let cand = build(picked);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.expect("at least one combination")
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
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

fn compress_heights(d: &SkeinDiagram) -> SkeinDiagram {
    let used: BTreeSet<u32> = d
        .components
        .iter()
        .flat_map(|c| c.heights.iter().copied())
        .filter(|h| *h != 0)
        .collect();
    let rank: BTreeMap<u32, u32> = used.iter().enumerate().map(|(k, h)| (*h, k as u32 + 1)).collect();
    let mut out = d.clone();
    for c in &mut out.components {
        for h in &mut c.heights {
            if *h != 0 {
                *h = rank[h];
            }
        }
    }
    out
}

/// Renumbers crossings 1, 2, ... by first appearance.
fn renumber(d: SkeinDiagram) -> SkeinDiagram {
    let mut map: BTreeMap<CrossingId, CrossingId> = BTreeMap::new();
    for c in &d.components {
        for e in &c.entries {
            if let Some(id) = e.crossing_id() {
                let next = CrossingId(map.len() as u32 + 1);
                map.entry(id).or_insert(next);
            }
        }
    }
    let components = d
        .components
        .into_iter()
        .map(|c| Component {
            entries: c
                .entries
                .into_iter()
                .map(|e| match e {
                    PassEntry::SelfPass { id, layer } => PassEntry::SelfPass { id: map[&id], layer },
                    other => other,
                })
                .collect(),
            ..c
        })
        .collect();
    let signs = d
        .signs
        .into_iter()
        .map(|(id, s)| (map.get(&id).copied().unwrap_or(id), s))
        .collect();
    SkeinDiagram { components, signs }
}
