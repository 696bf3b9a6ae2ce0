//! Abstract cell layouts: ordered field lists, with a bounded set of
//! alternatives when paths disagree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::frontend::Span;

/// Upper bound on the number of distinct alternatives before a layout
/// becomes [`Layout::Top`].
pub const MAX_ALTERNATIVES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Uint,
    Int,
    Coins,
    MsgAddr,
    Ref,
    Dict,
    /// Raw slice data of unknown shape.
    Slice,
    Bits,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Uint => "Uint",
            FieldKind::Int => "Int",
            FieldKind::Coins => "Coins",
            FieldKind::MsgAddr => "MsgAddr",
            FieldKind::Ref => "Ref",
            FieldKind::Dict => "Dict",
            FieldKind::Slice => "Slice",
            FieldKind::Bits => "Bits",
        }
    }

    fn is_sized(self) -> bool {
        matches!(self, FieldKind::Uint | FieldKind::Int | FieldKind::Bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Width {
    Exact(u32),
    /// Self-delimiting encodings such as coins or addresses.
    Variable,
    /// A width that is not a compile-time constant.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Field {
    pub kind: FieldKind,
    pub width: Width,
    /// Stored value, when it is a constant.
    pub value: Option<i128>,
    /// Layout of a referenced cell built in the same function.
    pub nested: Option<Box<Layout>>,
    /// The store or load that produced this field.
    pub span: Span,
}

impl Field {
    pub fn new(kind: FieldKind, width: Width, span: Span) -> Self {
        Field { kind, width, value: None, nested: None, span }
    }

    pub fn uint(width: u32, span: Span) -> Self {
        Field::new(FieldKind::Uint, Width::Exact(width), span)
    }

    pub fn with_value(mut self, v: Option<i128>) -> Self {
        self.value = v;
        self
    }
}

/// Fields compare by shape; spans are ignored.
impl PartialEq for Field {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind && self.width == o.width && self.value == o.value && self.nested == o.nested
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        match self.width {
            Width::Exact(n) if self.kind.is_sized() => write!(f, ":{n}"),
            Width::Unknown => f.write_str(":?"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    Equal(Vec<Field>),
    /// Different paths produce different layouts; at most
    /// [`MAX_ALTERNATIVES`], all distinct.
    Alternatives(Vec<Vec<Field>>),
    Top,
}

impl Default for Layout {
    fn default() -> Self {
        Layout::Equal(Vec::new())
    }
}

fn normalize(mut alts: Vec<Vec<Field>>) -> Layout {
    let mut uniq: Vec<Vec<Field>> = Vec::new();
    for a in alts.drain(..) {
        if !uniq.contains(&a) {
            uniq.push(a);
        }
    }
    match uniq.len() {
        0 => Layout::Top,
        1 => Layout::Equal(uniq.pop().unwrap()),
        n if n > MAX_ALTERNATIVES => Layout::Top,
        _ => Layout::Alternatives(uniq),
    }
}

impl Layout {
    pub fn empty() -> Self {
        Layout::Equal(Vec::new())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Layout::Top)
    }

    /// The possible field lists, or `None` for ⊤.
    pub fn alternatives(&self) -> Option<Vec<&[Field]>> {
        match self {
            Layout::Equal(f) => Some(vec![f.as_slice()]),
            Layout::Alternatives(a) => Some(a.iter().map(Vec::as_slice).collect()),
            Layout::Top => None,
        }
    }

    pub fn push(&mut self, field: Field) {
        match self {
            Layout::Equal(f) => f.push(field),
            Layout::Alternatives(a) => {
                for alt in a.iter_mut() {
                    alt.push(field.clone());
                }
            }
            Layout::Top => {}
        }
    }

    pub fn pushed(&self, field: Field) -> Layout {
        let mut l = self.clone();
        l.push(field);
        l
    }

    /// `self` followed by `other`, for every pair of alternatives.
    pub fn concat(&self, other: &Layout) -> Layout {
        let (Some(a), Some(b)) = (self.alternatives(), other.alternatives()) else { return Layout::Top };
        let mut out = Vec::new();
        for x in &a {
            for y in &b {
                let mut v = x.to_vec();
                v.extend_from_slice(y);
                out.push(v);
            }
        }
        normalize(out)
    }

    pub fn join(&self, other: &Layout) -> Layout {
        let (Some(a), Some(b)) = (self.alternatives(), other.alternatives()) else { return Layout::Top };
        normalize(a.into_iter().chain(b).map(<[Field]>::to_vec).collect())
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |fields: &[Field]| fields.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            Layout::Equal(fields) => write!(f, "[{}]", list(fields)),
            Layout::Alternatives(alts) => {
                let parts: Vec<String> = alts.iter().map(|a| format!("[{}]", list(a))).collect();
                write!(f, "{}", parts.join(" | "))
            }
            Layout::Top => f.write_str("⊤"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchResult {
    Compatible,
    MismatchAt { index: usize, stored: Field, loaded: Field },
    /// More fields were loaded than stored.
    LoadOverrun { index: usize, loaded: Field },
}

fn widths_agree(a: Width, b: Width) -> bool {
    match (a, b) {
        (Width::Unknown, _) | (_, Width::Unknown) => true,
        (x, y) => x == y,
    }
}

fn fields_agree(stored: &Field, loaded: &Field) -> bool {
    if stored.kind == loaded.kind {
        return widths_agree(stored.width, loaded.width);
    }
    // Raw bits may be read back as integers of the same width and the other
    // way round.
    let bits_like = |k: FieldKind| k.is_sized();
    (stored.kind == FieldKind::Bits || loaded.kind == FieldKind::Bits)
        && bits_like(stored.kind)
        && bits_like(loaded.kind)
        && matches!((stored.width, loaded.width), (Width::Exact(x), Width::Exact(y)) if x == y)
}

fn exact_sized(f: &Field) -> Option<u32> {
    match f.width {
        Width::Exact(n) if f.kind.is_sized() => Some(n),
        _ => None,
    }
}

/// Compare a stored layout with the fields a reader loads, in order. A
/// loaded prefix of the stored layout is compatible. A stored raw slice
/// ends the comparison, since its contents are unknown. A raw bit read may
/// cover several fixed-width stored fields if it ends on a field boundary.
pub fn layout_match(stored: &[Field], loaded: &[Field]) -> MatchResult {
    let mut at = 0;
    for (index, l) in loaded.iter().enumerate() {
        let Some(s) = stored.get(at) else {
            return MatchResult::LoadOverrun { index, loaded: l.clone() };
        };
        if s.kind == FieldKind::Slice {
            return MatchResult::Compatible;
        }
        if fields_agree(s, l) {
            at += 1;
            continue;
        }
        if let (FieldKind::Bits, Some(want)) = (l.kind, exact_sized(l)) {
            let mut covered = 0;
            let mut end = at;
            while covered < want {
                match stored.get(end).and_then(exact_sized) {
                    Some(n) => covered += n,
                    None => break,
                }
                end += 1;
            }
            if covered == want {
                at = end;
                continue;
            }
        }
        return MatchResult::MismatchAt { index, stored: s.clone(), loaded: l.clone() };
    }
    MatchResult::Compatible
}
