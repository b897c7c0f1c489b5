//! Three-sub-block interleaved codes: parameters, message partition, write blocks,
//! erasure patterns and the closed-form distance predictions.
//!
//! Two constructions are provided. [`Construction::C3`] reaches the optimal
//! single-sub-block distance `n-k+2t+1`; [`Construction::K3`] trades some of it for a
//! larger two-sub-block distance and a higher overall minimum distance for large `t`.

mod decode;
mod layout;

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};

pub use decode::{
    cascade_decode, detect_scenario, generic_erasure_solve, global_decode, global_decode_c3,
    global_decode_k3, local_read, reverse_map, DecodePath, GlobalDecoded, Scenario,
};
pub use layout::{Cell, Constituent, Layout};

/// Number of sub-blocks.
pub const M: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Construction {
    /// Shared-GE construction with optimal `d1`.
    C3,
    /// Improved construction with GE/GF cross terms and a `G4+G3` row group.
    K3,
}

impl Construction {
    /// On-disk identifier.
    pub fn id(self) -> u8 {
        match self {
            Construction::C3 => 1,
            Construction::K3 => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Construction::C3),
            2 => Some(Construction::K3),
            _ => None,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::C3 => "C3",
            Construction::K3 => "K3",
        })
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c3" | "1" => Ok(Construction::C3),
            "k3" | "2" => Ok(Construction::K3),
            _ => Err(Error::InvalidParams(format!("unknown construction {s:?}"))),
        }
    }
}

/// Named slice of a sub-unit `v_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    /// `v_{j,I}`, the rows hosting `GI`.
    Info,
    P1,
    P2,
    /// K3 only.
    P3,
    /// K3 only.
    P4,
}

/// Validated code parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbicParams {
    field: Arc<Field>,
    n: usize,
    k: usize,
    t: usize,
    construction: Construction,
}

impl MbicParams {
    pub fn new(
        field: Arc<Field>,
        n: usize,
        k: usize,
        t: usize,
        construction: Construction,
    ) -> Result<Self> {
        check_shape(n, k, t, construction)?;
        let group = field.order() as usize - 1;
        if !group.is_multiple_of(n) {
            return Err(Error::InvalidParams(format!(
                "n = {n} must divide q-1 = {group}"
            )));
        }
        Ok(MbicParams {
            field,
            n,
            k,
            t,
            construction,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `t/2`; only meaningful for K3.
    pub fn s(&self) -> usize {
        self.t / 2
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Write block length `N = 3n`.
    pub fn block_len(&self) -> usize {
        M * self.n
    }

    /// Write unit length `K = 3k`.
    pub fn message_len(&self) -> usize {
        M * self.k
    }

    /// Erasures correctable inside one sub-block by a local read, `n-k-t`.
    pub fn local_capability(&self) -> usize {
        self.n - self.k - self.t
    }

    pub fn parts(&self) -> &'static [Part] {
        match self.construction {
            Construction::C3 => &[Part::Info, Part::P1, Part::P2],
            Construction::K3 => &[Part::Info, Part::P1, Part::P2, Part::P3, Part::P4],
        }
    }

    /// Offsets of a part inside a length-`k` sub-unit.
    pub fn part_range(&self, part: Part) -> Range<usize> {
        let (k, t, s) = (self.k, self.t, self.s());
        match (self.construction, part) {
            (Construction::C3, Part::Info) => 0..k - 2 * t,
            (Construction::C3, Part::P1) => k - 2 * t..k - t,
            (Construction::C3, Part::P2) => k - t..k,
            (Construction::K3, Part::Info) => 0..k - 4 * s,
            (Construction::K3, Part::P1) => k - 4 * s..k - 3 * s,
            (Construction::K3, Part::P2) => k - 3 * s..k - 2 * s,
            (Construction::K3, Part::P3) => k - 2 * s..k - s,
            (Construction::K3, Part::P4) => k - s..k,
            (Construction::C3, _) => panic!("C3 has no part {part:?}"),
        }
    }

    /// Range of `v_{j,part}` inside the full message.
    pub fn message_range(&self, j: usize, part: Part) -> Range<usize> {
        let r = self.part_range(part);
        j * self.k + r.start..j * self.k + r.end
    }

    pub fn predicted_distances(&self) -> DistanceReport {
        predicted_distances(self.construction, self.n, self.k, self.t)
    }
}

fn check_shape(n: usize, k: usize, t: usize, construction: Construction) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParams(msg));
    if t < 1 {
        return bad("t must be at least 1".into());
    }
    if construction == Construction::K3 && !t.is_multiple_of(2) {
        return bad(format!("t must be even for K3 (t = {t})"));
    }
    if 2 * t >= k {
        return bad(format!("t < k/2 violated (t = {t}, k = {k})"));
    }
    if k + t > n {
        return bad(format!("k + t <= n violated (k + t = {}, n = {n})", k + t));
    }
    if construction == Construction::K3 {
        let s = t / 2;
        if k < 4 * s {
            return bad(format!("k >= 4s violated (k = {k}, s = {s})"));
        }
        if k + 2 * s > n {
            return bad(format!("k + 2s <= n violated (k = {k}, s = {s}, n = {n})"));
        }
    }
    Ok(())
}

/// A write unit `v = (v_1, v_2, v_3)` of `3k` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    k: usize,
    symbols: Vec<Elem>,
}

impl Message {
    pub fn zeros(k: usize) -> Self {
        Message {
            k,
            symbols: vec![0; M * k],
        }
    }

    pub fn from_symbols(k: usize, symbols: Vec<Elem>) -> Result<Self> {
        if symbols.len() != M * k {
            return Err(Error::LengthMismatch {
                expected: M * k,
                actual: symbols.len(),
            });
        }
        Ok(Message { k, symbols })
    }

    pub fn from_sub_units(units: [&[Elem]; M]) -> Result<Self> {
        let k = units[0].len();
        let symbols: Vec<Elem> = units.concat();
        Self::from_symbols(k, symbols)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn symbols(&self) -> &[Elem] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Elem> {
        self.symbols
    }

    /// Sub-unit `v_j`, `j` in `0..3`.
    pub fn sub_unit(&self, j: usize) -> &[Elem] {
        &self.symbols[j * self.k..(j + 1) * self.k]
    }

    pub fn sub_unit_mut(&mut self, j: usize) -> &mut [Elem] {
        &mut self.symbols[j * self.k..(j + 1) * self.k]
    }

    pub fn part(&self, params: &MbicParams, j: usize, part: Part) -> &[Elem] {
        &self.symbols[params.message_range(j, part)]
    }

    pub fn part_mut(&mut self, params: &MbicParams, j: usize, part: Part) -> &mut [Elem] {
        &mut self.symbols[params.message_range(j, part)]
    }
}

/// The `3n` encoded symbols, sub-blocks stored in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriteBlock {
    n: usize,
    symbols: Vec<Elem>,
}

impl WriteBlock {
    pub fn from_symbols(n: usize, symbols: Vec<Elem>) -> Result<Self> {
        if symbols.len() != M * n {
            return Err(Error::LengthMismatch {
                expected: M * n,
                actual: symbols.len(),
            });
        }
        Ok(WriteBlock { n, symbols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbols(&self) -> &[Elem] {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> &mut [Elem] {
        &mut self.symbols
    }

    pub fn sub_block(&self, j: usize) -> &[Elem] {
        &self.symbols[j * self.n..(j + 1) * self.n]
    }

    /// Number of nonzero symbols in each sub-block.
    pub fn block_weights(&self) -> [usize; M] {
        std::array::from_fn(|j| self.sub_block(j).iter().filter(|&&x| x != 0).count())
    }
}

/// Known-location losses within a write block; indices are 0-based in `0..3n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErasurePattern {
    n: usize,
    erased: Vec<bool>,
}

impl ErasurePattern {
    pub fn none(n: usize) -> Self {
        ErasurePattern {
            n,
            erased: vec![false; M * n],
        }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut p = Self::none(n);
        for &i in indices {
            if i >= M * n {
                return Err(Error::InvalidParams(format!(
                    "erasure index {i} outside 0..{}",
                    M * n
                )));
            }
            if p.erased[i] {
                return Err(Error::InvalidParams(format!("duplicate erasure index {i}")));
            }
            p.erased[i] = true;
        }
        Ok(p)
    }

    pub fn from_mask(n: usize, erased: Vec<bool>) -> Result<Self> {
        if erased.len() != M * n {
            return Err(Error::LengthMismatch {
                expected: M * n,
                actual: erased.len(),
            });
        }
        Ok(ErasurePattern { n, erased })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> &[bool] {
        &self.erased
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.erased[i]
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.erased.len()).filter(|&i| self.erased[i]).collect()
    }

    pub fn total(&self) -> usize {
        self.erased.iter().filter(|&&e| e).count()
    }

    /// Erasure mask of sub-block `j`.
    pub fn sub_block(&self, j: usize) -> &[bool] {
        &self.erased[j * self.n..(j + 1) * self.n]
    }

    /// Per-sub-block erasure counts `(e_1, e_2, e_3)`.
    pub fn counts(&self) -> [usize; M] {
        std::array::from_fn(|j| self.sub_block(j).iter().filter(|&&e| e).count())
    }
}

/// How a distance figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Predicted,
    OracleVerified,
    LowerBounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Quantity {
    pub value: usize,
    pub status: Status,
}

impl Quantity {
    fn predicted(value: usize) -> Self {
        Quantity {
            value,
            status: Status::Predicted,
        }
    }

    fn lower(value: usize) -> Self {
        Quantity {
            value,
            status: Status::LowerBounded,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            Status::LowerBounded => write!(f, ">={}", self.value),
            _ => write!(f, "{}", self.value),
        }
    }
}

/// Sub-block distance, `D_i`-distances and the full-block distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub construction: Construction,
    pub delta: Quantity,
    pub d1: Quantity,
    pub d2: Quantity,
    pub d3: Quantity,
    pub d: Quantity,
    /// Upper bound `n-k+2t+1`, when its hypothesis `t <= (k-1)/2` holds.
    pub bound: Option<usize>,
    /// Whether `t` lies in the range where the closed form for `d` is proven.
    pub in_theorem_range: bool,
}

impl DistanceReport {
    /// Whether `d` is limited by the one-sub-block distance.
    pub fn d1_limited(&self) -> bool {
        self.d1.value <= self.d2.value
    }

    pub fn optimal(&self) -> bool {
        self.bound == Some(self.d.value) && self.d.status != Status::LowerBounded
    }
}

/// Closed-form distances of the two constructions; `d3` is only bounded below by `3 delta`.
pub fn predicted_distances(
    construction: Construction,
    n: usize,
    k: usize,
    t: usize,
) -> DistanceReport {
    let delta = n - k - t + 1;
    let (d1, d2, in_range) = match construction {
        Construction::C3 => (n - k + 2 * t + 1, 2 * (n - k - t + 1), true),
        Construction::K3 => {
            let s = t / 2;
            (n - k + 3 * s + 1, 2 * (n - k - s + 1), 2 * t <= n - k + 1)
        }
    };
    let d3 = 3 * delta;
    let d_value = d1.min(d2).min(d3);
    DistanceReport {
        construction,
        delta: Quantity::predicted(delta),
        d1: Quantity::predicted(d1),
        d2: Quantity::predicted(d2),
        d3: Quantity::lower(d3),
        d: if in_range {
            Quantity::predicted(d_value)
        } else {
            Quantity::lower(d_value)
        },
        bound: distance_bound(M, n, k, t).ok(),
        in_theorem_range: in_range,
    }
}

/// Upper bound `n - k + (m-1)t + 1` on the minimum distance of an `<mn, mk, m>` code
/// with sub-block distance `n-k-t+1`; requires `t <= (k-1)/(m-1)`.
pub fn distance_bound(m: usize, n: usize, k: usize, t: usize) -> Result<usize> {
    if m == 0 || k == 0 || k > n {
        return Err(Error::BoundNotApplicable(format!(
            "degenerate shape m = {m}, n = {n}, k = {k}"
        )));
    }
    if m > 1 && t * (m - 1) > k - 1 {
        return Err(Error::BoundNotApplicable(format!(
            "t = {t} exceeds (k-1)/(m-1) = {}/{}",
            k - 1,
            m - 1
        )));
    }
    Ok(n - k + (m - 1) * t + 1)
}
