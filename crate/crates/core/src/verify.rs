//! Oracles that measure sub-block and `D_i` distances of a built layout.
//!
//! Nothing here reuses the decoders or the reverse map. Measurements come from:
//! - kernels of the generator restricted to sub-blocks that must vanish,
//! - exhaustive enumeration of a subcode (projectively, one representative per line),
//! - common spectral roots of a subcode projected onto one sub-block (BCH bound),
//! - rank of the generator after deleting column subsets,
//! - a constructive search for two-sub-block codewords of a given weight.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::linalg::{axpy, Matrix};
use crate::mbic::{distance_bound, predicted_distances, Construction, Layout, MbicParams, M};
use crate::presets::Preset;
use crate::rscodes::CyclicInterval;

/// For each sub-block, whether codewords must vanish there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportConstraint {
    zero: [bool; M],
}

impl SupportConstraint {
    pub fn new(zero: [bool; M]) -> Result<Self> {
        if zero.iter().all(|&z| z) {
            return Err(Error::InvalidParams(
                "at least one sub-block must be unconstrained".into(),
            ));
        }
        Ok(SupportConstraint { zero })
    }

    pub fn unconstrained() -> Self {
        SupportConstraint { zero: [false; M] }
    }

    /// Only sub-block `j` may be nonzero.
    pub fn only(j: usize) -> Self {
        SupportConstraint {
            zero: std::array::from_fn(|i| i != j),
        }
    }

    /// Sub-block `j` must vanish.
    pub fn without(j: usize) -> Self {
        SupportConstraint {
            zero: std::array::from_fn(|i| i == j),
        }
    }

    pub fn is_zero(&self, j: usize) -> bool {
        self.zero[j]
    }

    /// Bit mask of the unconstrained sub-blocks.
    pub fn free_mask(&self) -> usize {
        (0..M).filter(|&j| !self.zero[j]).map(|j| 1 << j).sum()
    }
}

/// Message subspace whose codewords vanish on the constrained sub-blocks.
#[derive(Debug, Clone)]
pub struct Subcode {
    pub constraint: SupportConstraint,
    /// Basis of the message subspace.
    pub basis: Vec<Vec<Elem>>,
    /// Codewords of the basis vectors.
    pub codewords: Vec<Vec<Elem>>,
}

impl Subcode {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Kernel of `message -> codeword restricted to the constrained columns`.
pub fn subcode_basis(layout: &Layout, constraint: SupportConstraint) -> Subcode {
    let params = layout.params();
    let f = params.field();
    let n = params.n();
    let g = layout.generator();
    let cols: Vec<usize> = (0..M)
        .filter(|&j| constraint.is_zero(j))
        .flat_map(|j| j * n..(j + 1) * n)
        .collect();
    let basis = if cols.is_empty() {
        (0..g.rows())
            .map(|i| {
                let mut e = vec![0; g.rows()];
                e[i] = 1;
                e
            })
            .collect()
    } else {
        g.select_columns(&cols).left_nullspace(f)
    };
    let codewords = basis.iter().map(|v| g.left_mul(f, v)).collect();
    Subcode {
        constraint,
        basis,
        codewords,
    }
}

/// Minimum weights observed while enumerating a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WeightProfile {
    /// Indexed by the mask of nonzero sub-blocks (bit `j` set = sub-block `j` nonzero).
    pub min_by_support: [Option<usize>; 8],
    /// Smallest nonzero sub-block weight of any codeword.
    pub min_block_weight: Option<usize>,
    pub enumerated: u64,
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl WeightProfile {
    fn merge(mut self, other: Self) -> Self {
        for i in 0..8 {
            self.min_by_support[i] = min_opt(self.min_by_support[i], other.min_by_support[i]);
        }
        self.min_block_weight = min_opt(self.min_block_weight, other.min_block_weight);
        self.enumerated += other.enumerated;
        self
    }

    #[inline]
    fn observe(&mut self, word: &[Elem], n: usize) {
        let mut mask = 0;
        let mut total = 0;
        for j in 0..M {
            let w = word[j * n..(j + 1) * n].iter().filter(|&&x| x != 0).count();
            if w > 0 {
                mask |= 1 << j;
                total += w;
                self.min_block_weight = min_opt(self.min_block_weight, Some(w));
            }
        }
        self.enumerated += 1;
        if mask != 0 {
            self.min_by_support[mask] = min_opt(self.min_by_support[mask], Some(total));
        }
    }

    /// Minimum weight over codewords with exactly `i` nonzero sub-blocks.
    pub fn d_i(&self, i: u32) -> Option<usize> {
        (1..8usize)
            .filter(|m| m.count_ones() == i)
            .fold(None, |acc, m| min_opt(acc, self.min_by_support[m]))
    }

    pub fn min_distance(&self) -> Option<usize> {
        (1..8).fold(None, |acc, m| min_opt(acc, self.min_by_support[m]))
    }
}

/// Number of lines through the origin in a `dim`-dimensional space over GF(q).
pub fn projective_count(q: u32, dim: usize) -> u128 {
    let q = q as u128;
    (0..dim).fold(0u128, |acc, i| {
        acc.saturating_add(q.saturating_pow(i as u32))
    })
}

/// Enumeration limits and randomized-fallback settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest number of codewords (one per projective line) to enumerate.
    pub max_messages: u128,
    /// Largest number of candidate codewords for the two-sub-block witness search.
    pub max_witness: u128,
    /// Largest number of column subsets for the exhaustive rank oracle.
    pub max_subsets: u128,
    /// Subsets drawn when the rank oracle falls back to sampling.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_messages: 1 << 26,
            max_witness: 1 << 26,
            max_subsets: 200_000,
            samples: 20_000,
            seed: 0x5eed,
        }
    }
}

/// Enumerates one nonzero codeword per projective point of `span(generators)`.
pub fn enumerate_span(
    field: &Field,
    n: usize,
    generators: &[Vec<Elem>],
    max_messages: u128,
) -> Result<WeightProfile> {
    let q = field.order();
    let dim = generators.len();
    let needed = projective_count(q, dim);
    if needed > max_messages {
        return Err(Error::BudgetExceeded {
            needed,
            budget: max_messages,
        });
    }
    if dim == 0 {
        return Ok(WeightProfile::default());
    }
    let len = generators[0].len();
    // scaled[i][c] = c * generators[i]
    let scaled: Vec<Vec<Vec<Elem>>> = generators
        .iter()
        .map(|g| {
            (0..q)
                .map(|c| g.iter().map(|&x| field.mul(c as Elem, x)).collect())
                .collect()
        })
        .collect();

    // Tasks: (lead index, number of prefix coordinates fixed, prefix value).
    let mut tasks = Vec::new();
    for lead in 0..dim {
        let rest = dim - 1 - lead;
        let split = rest.min(2);
        for prefix in 0..(q as u64).pow(split as u32) {
            tasks.push((lead, split, prefix));
        }
    }

    let profile = tasks
        .par_iter()
        .map(|&(lead, split, prefix)| {
            let mut word = generators[lead].clone();
            let mut p = prefix;
            for i in 0..split {
                let c = (p % q as u64) as usize;
                p /= q as u64;
                axpy_table(field, &mut word, &scaled[lead + 1 + i][c]);
            }
            let free: Vec<usize> = (lead + 1 + split..dim).collect();
            let mut digits = vec![0u32; free.len()];
            let mut prof = WeightProfile::default();
            prof.observe(&word, n);
            'odometer: loop {
                let mut i = 0;
                loop {
                    if i == free.len() {
                        break 'odometer;
                    }
                    let old = digits[i];
                    let (new, carry) = if old + 1 < q {
                        (old + 1, false)
                    } else {
                        (0, true)
                    };
                    let delta = field.sub(new as Elem, old as Elem);
                    axpy_table(field, &mut word, &scaled[free[i]][delta as usize]);
                    digits[i] = new;
                    if !carry {
                        break;
                    }
                    i += 1;
                }
                prof.observe(&word, n);
            }
            debug_assert_eq!(word.len(), len);
            prof
        })
        .reduce(WeightProfile::default, WeightProfile::merge);
    Ok(profile)
}

#[inline]
fn axpy_table(field: &Field, word: &mut [Elem], scaled: &[Elem]) {
    for (x, &y) in word.iter_mut().zip(scaled) {
        *x = field.add(*x, y);
    }
}

/// Minimum weight over nonzero subcode codewords whose nonzero sub-blocks are exactly
/// the unconstrained ones; `Ok(None)` when no such codeword exists.
pub fn min_weight_enumerate(
    layout: &Layout,
    subcode: &Subcode,
    max_messages: u128,
) -> Result<Option<usize>> {
    let params = layout.params();
    let prof = enumerate_span(params.field(), params.n(), &subcode.codewords, max_messages)?;
    Ok(prof.min_by_support[subcode.constraint.free_mask()])
}

/// Outcome of [`span_membership`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanCheck {
    /// Whether every power of the claimed interval is a common root.
    pub holds: bool,
    /// Powers `i` with `c(alpha^-i) = 0` for every projected basis word.
    pub common_roots: Vec<usize>,
    /// Longest cyclic run of common roots.
    pub max_run: CyclicInterval,
    /// Rank of the projected basis.
    pub projected_rank: usize,
}

impl SpanCheck {
    /// Weight lower bound for a nonzero projection (`run + 1`).
    pub fn weight_bound(&self) -> usize {
        self.max_run.len() + 1
    }
}

fn longest_cyclic_run(is_root: &[bool]) -> CyclicInterval {
    let n = is_root.len();
    if is_root.iter().all(|&r| r) {
        return CyclicInterval::with_len(0, n, n);
    }
    let mut best = (0usize, 0usize);
    // Start scanning right after a non-root so wrapped runs are seen whole.
    let anchor = is_root.iter().position(|&r| !r).unwrap();
    let mut run_start = 0;
    let mut run_len = 0;
    for off in 1..=n {
        let i = (anchor + off) % n;
        if is_root[i] {
            if run_len == 0 {
                run_start = i;
            }
            run_len += 1;
            if run_len > best.1 {
                best = (run_start, run_len);
            }
        } else {
            run_len = 0;
        }
    }
    CyclicInterval::with_len(best.0 as i64, best.1, n)
}

/// Projects a subcode onto sub-block `column` and measures its common spectral roots.
pub fn span_membership(
    layout: &Layout,
    constraint: SupportConstraint,
    column: usize,
    claimed: CyclicInterval,
) -> SpanCheck {
    let sub = subcode_basis(layout, constraint);
    span_membership_of(layout, &sub, column, claimed)
}

pub fn span_membership_of(
    layout: &Layout,
    sub: &Subcode,
    column: usize,
    claimed: CyclicInterval,
) -> SpanCheck {
    let params = layout.params();
    let n = params.n();
    let domain = layout.domain();
    let projected: Vec<Vec<Elem>> = sub
        .codewords
        .iter()
        .map(|w| w[column * n..(column + 1) * n].to_vec())
        .collect();
    let is_root: Vec<bool> = (0..n)
        .map(|i| projected.iter().all(|w| domain.spectrum(w, i as i64) == 0))
        .collect();
    let common_roots: Vec<usize> = (0..n).filter(|&i| is_root[i]).collect();
    let holds = claimed.members().all(|i| is_root[i]);
    let projected_rank = if projected.is_empty() {
        0
    } else {
        Matrix::from_rows(&projected).rank(params.field())
    };
    SpanCheck {
        holds,
        common_roots,
        max_run: longest_cyclic_run(&is_root),
        projected_rank,
    }
}

/// Outcome of [`erasure_rank_oracle`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankOracle {
    pub erasures: usize,
    /// Every checked pattern left rank `3k`.
    pub holds: bool,
    pub exhaustive: bool,
    pub checked: u64,
    pub counterexample: Option<Vec<usize>>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn full_rank_without(layout: &Layout, erased: &[usize]) -> bool {
    let params = layout.params();
    let keep: Vec<usize> = (0..params.block_len())
        .filter(|i| !erased.contains(i))
        .collect();
    layout
        .generator()
        .select_columns(&keep)
        .rank(params.field())
        == params.message_len()
}

/// `d >= e + 1` iff deleting any `e` columns leaves rank `3k`. Exhaustive when
/// `C(3n, e)` fits the budget, otherwise a seeded random sample.
pub fn erasure_rank_oracle(layout: &Layout, e: usize, budget: &Budget) -> RankOracle {
    let total = layout.params().block_len();
    let count = binomial(total, e);
    if count <= budget.max_subsets {
        let combos = Combinations::new(total, e).collect::<Vec<_>>();
        let counterexample = combos
            .par_iter()
            .find_first(|c| !full_rank_without(layout, c))
            .cloned();
        RankOracle {
            erasures: e,
            holds: counterexample.is_none(),
            exhaustive: true,
            checked: count as u64,
            counterexample,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let patterns: Vec<Vec<usize>> = (0..budget.samples)
            .map(|_| {
                let mut v = sample(&mut rng, total, e).into_vec();
                v.sort_unstable();
                v
            })
            .collect();
        let counterexample = patterns
            .par_iter()
            .find_first(|c| !full_rank_without(layout, c))
            .cloned();
        RankOracle {
            erasures: e,
            holds: counterexample.is_none(),
            exhaustive: false,
            checked: budget.samples as u64,
            counterexample,
        }
    }
}

/// Lexicographic `k`-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Searches for a codeword nonzero exactly on sub-blocks `a` and `b` with weights at
/// most `(wa, wb)`, by forcing `n - wa` zeros in sub-block `a`.
///
/// Returns the message of the first witness found (zero sets in lexicographic order),
/// `Ok(None)` if the search is exhausted, or a budget error.
pub fn two_block_witness(
    layout: &Layout,
    a: usize,
    b: usize,
    wa: usize,
    wb: usize,
    max_messages: u128,
) -> Result<Option<Vec<Elem>>> {
    let params = layout.params();
    let f = params.field();
    let n = params.n();
    assert!(a != b && a < M && b < M);
    let c = 3 - a - b;
    let sub = subcode_basis(layout, SupportConstraint::without(c));
    let dim = sub.dim();
    let zeros = n.saturating_sub(wa);
    let sets = binomial(n, zeros);
    let per_set = projective_count(f.order(), dim.saturating_sub(zeros));
    let needed = sets.saturating_mul(per_set);
    if needed > max_messages {
        return Err(Error::BudgetExceeded {
            needed,
            budget: max_messages,
        });
    }
    let zero_sets: Vec<Vec<usize>> = Combinations::new(n, zeros).collect();
    let found = zero_sets.par_iter().find_map_first(|z| {
        let mut m = Matrix::zeros(dim, z.len());
        for (i, cw) in sub.codewords.iter().enumerate() {
            for (col, &pos) in z.iter().enumerate() {
                m.set(i, col, cw[a * n + pos]);
            }
        }
        let kernel = m.left_nullspace(f);
        search_kernel(f, n, &sub, &kernel, a, b, wa, wb)
    });
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn search_kernel(
    f: &Field,
    n: usize,
    sub: &Subcode,
    kernel: &[Vec<Elem>],
    a: usize,
    b: usize,
    wa: usize,
    wb: usize,
) -> Option<Vec<Elem>> {
    let q = f.order();
    let kd = kernel.len();
    // Kernel coordinates -> subcode codewords and messages.
    let combine = |coords: &[Elem], rows: &[Vec<Elem>]| {
        let mut out = vec![0; rows[0].len()];
        for (x, r) in coords.iter().zip(kernel) {
            if *x != 0 {
                for (i, &ri) in r.iter().enumerate() {
                    if ri != 0 {
                        axpy(f, &mut out, f.mul(*x, ri), &rows[i]);
                    }
                }
            }
        }
        out
    };
    for lead in 0..kd {
        let rest = kd - 1 - lead;
        for idx in 0..(q as u64).pow(rest as u32) {
            let mut coords = vec![0 as Elem; kd];
            coords[lead] = 1;
            let mut x = idx;
            for slot in coords.iter_mut().skip(lead + 1) {
                *slot = (x % q as u64) as Elem;
                x /= q as u64;
            }
            let word = combine(&coords, &sub.codewords);
            let wt = |j: usize| word[j * n..(j + 1) * n].iter().filter(|&&s| s != 0).count();
            let (wa_got, wb_got) = (wt(a), wt(b));
            if wa_got > 0 && wb_got > 0 && wa_got <= wa && wb_got <= wb {
                return Some(combine(&coords, &sub.basis));
            }
        }
    }
    None
}

/// A measured distance; `exact == false` marks a lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Measured {
    pub value: usize,
    pub exact: bool,
    pub method: String,
}

impl Measured {
    pub fn exact(value: usize, method: impl Into<String>) -> Self {
        Measured {
            value,
            exact: true,
            method: method.into(),
        }
    }

    pub fn at_least(value: usize, method: impl Into<String>) -> Self {
        Measured {
            value,
            exact: false,
            method: method.into(),
        }
    }
}

/// Oracle results for one layout.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Measurements {
    pub delta: Option<Measured>,
    pub d1: Option<Measured>,
    pub d2: Option<Measured>,
    pub d3: Option<Measured>,
    pub d: Option<Measured>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Outside the range where a claim exists; reported without a verdict.
    Info,
}

/// One checked quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub name: String,
    pub predicted: Option<usize>,
    pub measured: Option<usize>,
    /// `"exact"`, `"lower-bound"` or `"boolean"`.
    pub kind: String,
    pub method: String,
    pub verdict: Verdict,
}

impl Record {
    fn boolean(name: impl Into<String>, ok: bool, method: impl Into<String>) -> Self {
        Record {
            name: name.into(),
            predicted: None,
            measured: None,
            kind: "boolean".into(),
            method: method.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    }

    fn value(
        name: impl Into<String>,
        predicted: usize,
        measured: usize,
        method: impl Into<String>,
    ) -> Self {
        Record {
            name: name.into(),
            predicted: Some(predicted),
            measured: Some(measured),
            kind: "exact".into(),
            method: method.into(),
            verdict: if predicted == measured {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    /// One `key=value` line.
    pub fn line(&self) -> String {
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        let measured = match (self.kind.as_str(), self.measured) {
            ("lower-bound", Some(v)) => format!(">={v}"),
            (_, v) => opt(v),
        };
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        };
        format!(
            "check={} predicted={} measured={} method={} verdict={}",
            self.name,
            opt(self.predicted),
            measured,
            self.method,
            verdict
        )
    }
}

/// Compares oracle results with the closed-form predictions and the distance bound.
pub fn check_theorems(params: &MbicParams, m: &Measurements) -> Vec<Record> {
    let pred = params.predicted_distances();
    let label = params.construction();
    let mut records = Vec::new();
    let compare = |name: &str, predicted: usize, measured: &Option<Measured>, claimed: bool| {
        let meas = measured.as_ref()?;
        let ok = if meas.exact {
            meas.value == predicted
        } else {
            meas.value >= predicted
        };
        Some(Record {
            name: format!("{label}.{name}"),
            predicted: Some(predicted),
            measured: Some(meas.value),
            kind: if meas.exact { "exact" } else { "lower-bound" }.into(),
            method: meas.method.clone(),
            verdict: match (claimed, ok) {
                (false, _) => Verdict::Info,
                (true, true) => Verdict::Pass,
                (true, false) => Verdict::Fail,
            },
        })
    };
    records.extend(compare("delta", pred.delta.value, &m.delta, true));
    records.extend(compare("d1", pred.d1.value, &m.d1, true));
    records.extend(compare("d2", pred.d2.value, &m.d2, true));
    // 3 delta is only a lower bound; an exact d3 passes when it reaches it.
    if let Some(d3) = &m.d3 {
        records.push(Record {
            name: format!("{label}.d3"),
            predicted: Some(pred.d3.value),
            measured: Some(d3.value),
            kind: if d3.exact { "exact" } else { "lower-bound" }.into(),
            method: d3.method.clone(),
            verdict: if d3.value >= pred.d3.value {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        });
    }
    records.extend(compare("d", pred.d.value, &m.d, pred.in_theorem_range));

    let (n, k, t) = (params.n(), params.k(), params.t());
    if let (Ok(bound), Some(d)) = (distance_bound(M, n, k, t), &m.d) {
        let optimal_claim = label == Construction::C3 && 4 * t <= n - k + 1;
        let verdict = if optimal_claim {
            // d <= bound always; a matching lower bound or exact value gives equality.
            d.value == bound
        } else {
            !d.exact || d.value <= bound
        };
        records.push(Record {
            name: format!("{label}.bound"),
            predicted: Some(bound),
            measured: Some(d.value),
            kind: if d.exact { "exact" } else { "lower-bound" }.into(),
            method: if optimal_claim {
                "d meets n-k+2t+1".into()
            } else {
                "d <= n-k+2t+1".into()
            },
            verdict: if verdict {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        });
    }
    records
}

/// Everything the verifier checked for one preset.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub preset: String,
    pub records: Vec<Record>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn lines(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| format!("preset={} {}", self.preset, r.line()))
            .collect()
    }
}

/// Structural and distance checks for one layout.
pub fn verify_layout(layout: &Layout, budget: &Budget) -> (Measurements, Vec<Record>) {
    let params = layout.params();
    let f = params.field();
    let (n, k, t, s) = (params.n(), params.k(), params.t(), params.s());
    let label = params.construction();
    let mut records = Vec::new();
    let mut meas = Measurements::default();

    let rank = layout.generator().rank(f);
    records.push(Record::value(
        format!("{label}.rank"),
        params.message_len(),
        rank,
        "elimination",
    ));

    // Each sub-block projection equals RS([k+t : n-1]).
    let full = subcode_basis(layout, SupportConstraint::unconstrained());
    let claimed = CyclicInterval::with_len((k + t) as i64, n - k - t, n);
    let mut delta_ok = true;
    for c in 0..M {
        let chk = span_membership_of(layout, &full, c, claimed);
        let ok = chk.holds && chk.projected_rank == k + t;
        delta_ok &= ok;
        records.push(Record::boolean(
            format!("{label}.subblock_code[{c}]"),
            ok,
            format!("roots {} rank {}", chk.max_run, chk.projected_rank),
        ));
    }
    if delta_ok {
        meas.delta = Some(Measured::exact(
            n - k - t + 1,
            "projected code = RS([k+t:n-1])",
        ));
    }

    // One-sub-block subcodes.
    let d1_dim = match label {
        Construction::C3 => k - 2 * t,
        Construction::K3 => k - 3 * s,
    };
    let mut d1: Option<Measured> = None;
    for j in 0..M {
        let sub = subcode_basis(layout, SupportConstraint::only(j));
        records.push(Record::value(
            format!("{label}.dim_one_block[{j}]"),
            d1_dim,
            sub.dim(),
            "kernel",
        ));
        let m = match min_weight_enumerate(layout, &sub, budget.max_messages) {
            Ok(Some(w)) => Measured::exact(w, format!("enumerate q^{}", sub.dim())),
            Ok(None) => Measured::at_least(usize::MAX, "empty subcode"),
            Err(_) => {
                let chk = span_membership_of(layout, &sub, j, claimed);
                Measured::at_least(chk.weight_bound(), format!("roots {}", chk.max_run))
            }
        };
        d1 = Some(match d1 {
            None => m,
            Some(prev) if m.value < prev.value => m,
            Some(prev) => prev,
        });
    }
    meas.d1 = d1;

    // Two-sub-block subcodes: consecutive roots in each surviving column.
    let run_needed = match label {
        Construction::C3 => n - k - t,
        Construction::K3 => n - k - s,
    };
    let mut d2_lower = usize::MAX;
    for z in 0..M {
        let sub = subcode_basis(layout, SupportConstraint::without(z));
        let mut bound = 0;
        for c in (0..M).filter(|&c| c != z) {
            let chk = span_membership_of(layout, &sub, c, CyclicInterval::with_len(0, 0, n));
            records.push(Record {
                name: format!("{label}.two_block_roots[zero={z},col={c}]"),
                predicted: Some(run_needed),
                measured: Some(chk.max_run.len()),
                kind: "lower-bound".into(),
                method: format!("common roots {}", chk.max_run),
                verdict: if chk.max_run.len() >= run_needed {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                },
            });
            bound += chk.weight_bound();
        }
        d2_lower = d2_lower.min(bound);
    }
    meas.d2 = Some(Measured::at_least(
        d2_lower,
        "BCH bound on two-block subcodes",
    ));

    // Achievability of the lower bound.
    let per_block = d2_lower / 2;
    if d2_lower % 2 == 0 {
        if let Ok(found) = two_block_witness(layout, 0, 1, per_block, per_block, budget.max_witness)
        {
            records.push(Record::boolean(
                format!("{label}.d2_witness"),
                found.is_some(),
                format!("search weight ({per_block},{per_block}) codeword"),
            ));
            if found.is_some() {
                meas.d2 = Some(Measured::exact(d2_lower, "BCH bound + witness codeword"));
            }
        }
    }

    meas.d3 = meas
        .delta
        .as_ref()
        .map(|d| Measured::at_least(3 * d.value, "3 * delta"));

    // Full enumeration when affordable, otherwise min of the component bounds.
    match enumerate_span(f, n, &full.codewords, budget.max_messages) {
        Ok(prof) => {
            let get = |i| prof.d_i(i).unwrap_or(usize::MAX);
            meas.delta = Some(Measured::exact(
                prof.min_block_weight.unwrap_or(0),
                "full enumeration",
            ));
            meas.d1 = Some(Measured::exact(get(1), "full enumeration"));
            meas.d2 = Some(Measured::exact(get(2), "full enumeration"));
            meas.d3 = Some(Measured::exact(get(3), "full enumeration"));
            meas.d = Some(Measured::exact(
                prof.min_distance().unwrap_or(0),
                "full enumeration",
            ));
        }
        Err(_) => {
            let parts = [&meas.d1, &meas.d2, &meas.d3];
            if parts.iter().all(|p| p.is_some()) {
                let value = parts
                    .iter()
                    .map(|p| p.as_ref().unwrap().value)
                    .min()
                    .unwrap();
                let exact = parts
                    .iter()
                    .map(|p| p.as_ref().unwrap())
                    .filter(|p| p.value == value)
                    .any(|p| p.exact);
                meas.d = Some(Measured {
                    value,
                    exact,
                    method: "min(d1, d2, d3)".into(),
                });
            }
        }
    }

    // Rank oracle agrees with the measured distance.
    if let Some(d) = &meas.d {
        let below = erasure_rank_oracle(layout, d.value - 1, budget);
        records.push(Record::boolean(
            format!("{label}.erasures[{}]", d.value - 1),
            below.holds,
            format!(
                "rank oracle ({} {} patterns)",
                below.checked,
                if below.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                }
            ),
        ));
        if d.exact {
            let at = erasure_rank_oracle(layout, d.value, budget);
            if at.exhaustive {
                records.push(Record::boolean(
                    format!("{label}.erasures[{}]_fails", d.value),
                    !at.holds,
                    "rank oracle finds a deficient pattern",
                ));
            }
        }
    }

    records.extend(check_theorems(params, &meas));
    (meas, records)
}

/// Runs [`verify_layout`] for a preset; P4 checks both constructions and their crossover.
pub fn verify_preset(preset: Preset, budget: &Budget) -> VerificationReport {
    let mut report = VerificationReport {
        preset: preset.to_string(),
        records: Vec::new(),
    };
    let constructions: &[Construction] = match preset {
        Preset::P4 => &[Construction::C3, Construction::K3],
        _ => &[preset.construction()],
    };
    let mut lower_d = Vec::new();
    for &c in constructions {
        let params = preset.params_with(c).expect("preset parameters are valid");
        let layout = Layout::new(params).expect("preset layout builds");
        let (meas, recs) = verify_layout(&layout, budget);
        report.records.extend(recs);
        lower_d.push((c, meas.d.map(|d| d.value)));
    }
    if preset == Preset::P4 {
        let (n, k, t) = preset.shape();
        let c3 = predicted_distances(Construction::C3, n, k, t).d.value;
        let k3 = predicted_distances(Construction::K3, n, k, t).d.value;
        report.records.push(Record::boolean(
            "crossover",
            k3 > c3 && 7 * t > 2 * (n - k + 1),
            format!("K3 d={k3} vs C3 d={c3}, t={t} > 2(n-k+1)/7"),
        ));
        for (c, d) in lower_d {
            if let Some(d) = d {
                let p = predicted_distances(c, n, k, t).d.value;
                report.records.push(Record {
                    name: format!("{c}.d_confirmed"),
                    predicted: Some(p),
                    measured: Some(d),
                    kind: "lower-bound".into(),
                    method: "span checks".into(),
                    verdict: if d >= p { Verdict::Pass } else { Verdict::Fail },
                });
            }
        }
    }
    report
}
