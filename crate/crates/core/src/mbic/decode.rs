//! Local reads (sub-block decode + reverse map) and global erasure decoding.
//!
//! Sub-blocks and sub-units are indexed `0..3`; a scenario is described relative to
//! its pivot sub-block `h` with neighbours `h+1`, `h+2` taken mod 3, matching the cyclic
//! layout of the generator.

use super::{Construction, ErasurePattern, Layout, MbicParams, Message, Part, WriteBlock, M};
use crate::error::{Error, Result};
use crate::galois::Elem;
use crate::linalg::Solution;
use crate::rscodes::{CyclicInterval, RsCode};

/// Reads the own parts of a sub-unit off a sub-block spectrum indexed by power.
///
/// For K3 the `G4+G3` rows overlap the `G3` range, so `v_{j,4}` is read from the pure
/// `G4` range first and subtracted from the `G3` range to give `v_{j,3}`.
pub fn reverse_map(params: &MbicParams, spectrum: &[Elem]) -> Vec<Elem> {
    let f = params.field();
    let (k, t, s) = (params.k(), params.t(), params.s());
    let mut v = vec![0; k];
    match params.construction() {
        Construction::C3 => {
            v[params.part_range(Part::Info)].copy_from_slice(&spectrum[2 * t..k]);
            v[params.part_range(Part::P1)].copy_from_slice(&spectrum[0..t]);
            v[params.part_range(Part::P2)].copy_from_slice(&spectrum[t..2 * t]);
        }
        Construction::K3 => {
            v[params.part_range(Part::Info)].copy_from_slice(&spectrum[4 * s..k]);
            v[params.part_range(Part::P1)].copy_from_slice(&spectrum[0..s]);
            v[params.part_range(Part::P2)].copy_from_slice(&spectrum[s..2 * s]);
            let p4 = &spectrum[3 * s..4 * s];
            v[params.part_range(Part::P4)].copy_from_slice(p4);
            let p3: Vec<Elem> = spectrum[2 * s..3 * s]
                .iter()
                .zip(p4)
                .map(|(&a, &b)| f.sub(a, b))
                .collect();
            v[params.part_range(Part::P3)].copy_from_slice(&p3);
        }
    }
    v
}

/// Decodes one column of `received` against `code`, returning its spectrum by power.
fn decode_spectrum(code: &RsCode, word: &[Elem], erased: &[bool]) -> Result<Vec<Elem>> {
    let info = code.decode_erasures_info(word, erased)?;
    let n = code.length();
    let mut spectrum = vec![0; n];
    for (l, i) in code.support().members().enumerate() {
        spectrum[i] = info[l];
    }
    Ok(spectrum)
}

/// Fast path: decode sub-block `j` as an `[n, k+t]` RS code and reverse-map `v_j`.
pub fn local_read(
    layout: &Layout,
    j: usize,
    sub_block: &[Elem],
    erased: &[bool],
) -> Result<Vec<Elem>> {
    let params = layout.params();
    let n = params.n();
    if j >= M {
        return Err(Error::InvalidParams(format!(
            "sub-block index {j} out of range"
        )));
    }
    if sub_block.len() != n || erased.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: sub_block.len().min(erased.len()),
        });
    }
    let erasures = erased.iter().filter(|&&e| e).count();
    let capability = params.local_capability();
    if erasures > capability {
        return Err(Error::LocalReadFailure {
            sub_block: j,
            erasures,
            capability,
        });
    }
    let spectrum = decode_spectrum(&layout.sub_block_code(), sub_block, erased)?;
    Ok(reverse_map(params, &spectrum))
}

/// Which cascade applies to an erasure profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// C3: one sub-block with up to `n-k+2t` erasures, the others within `n-k-t`.
    C3Heavy { heavy: usize },
    /// K3: one sub-block with up to `n-k+3t/2` erasures, the others within `n-k-t`.
    K3OneHeavy { heavy: usize },
    /// K3: two sub-blocks with up to `n-k-t/2` erasures, the third within `n-k-t`.
    K3TwoHeavy { light: usize },
}

fn argmax(counts: &[usize; M]) -> usize {
    (0..M).fold(0, |best, j| if counts[j] > counts[best] { j } else { best })
}

fn argmin(counts: &[usize; M]) -> usize {
    (0..M).fold(0, |best, j| if counts[j] < counts[best] { j } else { best })
}

/// Matches per-sub-block erasure counts against the cascade preconditions
/// (one-heavy first, then two-heavy; ties go to the lowest index).
pub fn detect_scenario(params: &MbicParams, counts: [usize; M]) -> Option<Scenario> {
    let (n, k, t, s) = (params.n(), params.k(), params.t(), params.s());
    let light_cap = n - k - t;
    let others_within = |pivot: usize, cap: usize| (0..M).all(|j| j == pivot || counts[j] <= cap);
    match params.construction() {
        Construction::C3 => {
            let h = argmax(&counts);
            (counts[h] <= n - k + 2 * t && others_within(h, light_cap))
                .then_some(Scenario::C3Heavy { heavy: h })
        }
        Construction::K3 => {
            let h = argmax(&counts);
            if counts[h] <= n - k + 3 * s && others_within(h, light_cap) {
                return Some(Scenario::K3OneHeavy { heavy: h });
            }
            let r = argmin(&counts);
            (counts[r] <= light_cap && others_within(r, n - k - s))
                .then_some(Scenario::K3TwoHeavy { light: r })
        }
    }
}

struct Cascade<'a> {
    layout: &'a Layout,
    params: &'a MbicParams,
    received: &'a WriteBlock,
    erasures: &'a ErasurePattern,
}

impl Cascade<'_> {
    fn fail(&self, e: Error) -> Error {
        match e {
            Error::DecodeFailure | Error::CapabilityExceeded { .. } => Error::GlobalDecodeFailure {
                reason: format!("constituent decode: {e}"),
                profile: self.erasures.counts(),
            },
            other => other,
        }
    }

    fn iv(&self, start: usize, len: usize) -> CyclicInterval {
        CyclicInterval::with_len(start as i64, len, self.params.n())
    }

    /// Decodes sub-block `c` after cancelling the contribution of `known`.
    fn decode_column(
        &self,
        c: usize,
        support: CyclicInterval,
        known: Option<&Message>,
    ) -> Result<Vec<Elem>> {
        let f = self.params.field();
        let mut word = self.received.sub_block(c).to_vec();
        if let Some(known) = known {
            let contrib = self.layout.encode(known)?;
            for (x, &y) in word.iter_mut().zip(contrib.sub_block(c)) {
                *x = f.sub(*x, y);
            }
        }
        let code = RsCode::from_support(self.layout.domain().clone(), support);
        decode_spectrum(&code, &word, self.erasures.sub_block(c)).map_err(|e| self.fail(e))
    }

    fn sub(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let f = self.params.field();
        a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
    }

    fn c3_heavy(&self, h: usize) -> Result<Message> {
        let p = self.params;
        let (k, t) = (p.k(), p.t());
        let (c1, c2) = ((h + 1) % M, (h + 2) % M);
        let light = self.iv(0, k + t);
        let s1 = self.decode_column(c1, light, None)?;
        let s2 = self.decode_column(c2, light, None)?;

        let mut msg = Message::zeros(k);
        msg.sub_unit_mut(c1).copy_from_slice(&reverse_map(p, &s1));
        msg.sub_unit_mut(c2).copy_from_slice(&reverse_map(p, &s2));
        // GE in c1 carries v_{h,2} + v_{c2,1}; GE in c2 carries v_{h,1} + v_{c1,2}.
        let ge = k..k + t;
        let v_h2 = self.sub(&s1[ge.clone()], msg.part(p, c2, Part::P1));
        let v_h1 = self.sub(&s2[ge], msg.part(p, c1, Part::P2));
        msg.part_mut(p, h, Part::P1).copy_from_slice(&v_h1);
        msg.part_mut(p, h, Part::P2).copy_from_slice(&v_h2);

        // What is left in the heavy column comes from GI alone.
        let rest = self.decode_column(h, self.iv(2 * t, k - 2 * t), Some(&msg))?;
        msg.part_mut(p, h, Part::Info)
            .copy_from_slice(&rest[2 * t..k]);
        Ok(msg)
    }

    fn k3_one_heavy(&self, h: usize) -> Result<Message> {
        let p = self.params;
        let (k, t, s) = (p.k(), p.t(), p.s());
        let (c1, c2) = ((h + 1) % M, (h + 2) % M);
        let light = self.iv(0, k + t);
        let s1 = self.decode_column(c1, light, None)?;
        let s2 = self.decode_column(c2, light, None)?;

        let mut msg = Message::zeros(k);
        msg.sub_unit_mut(c1).copy_from_slice(&reverse_map(p, &s1));
        msg.sub_unit_mut(c2).copy_from_slice(&reverse_map(p, &s2));
        let ge = k..k + s;
        let gf = k + s..k + 2 * s;
        // GF in c1 is v_{h,1} alone.
        let v_h1 = s1[gf].to_vec();
        // GE in c1 is v_{h,2} + v_{c2,3} + v_{c2,4}.
        let cross = self.sub(&s1[ge.clone()], msg.part(p, c2, Part::P3));
        let v_h2 = self.sub(&cross, msg.part(p, c2, Part::P4));
        // GE in c2 is v_{h,3} + v_{h,4} + v_{c1,2}.
        let v_h34 = self.sub(&s2[ge], msg.part(p, c1, Part::P2));

        msg.part_mut(p, h, Part::P1).copy_from_slice(&v_h1);
        msg.part_mut(p, h, Part::P2).copy_from_slice(&v_h2);
        // Parked in the P3 slot, this cancels G3 (v_{h,3} + v_{h,4}) from the heavy column.
        msg.part_mut(p, h, Part::P3).copy_from_slice(&v_h34);

        // Remaining: G4 v_{h,4} + GI v_{h,I}, spectrum [3s : k-1].
        let rest = self.decode_column(h, self.iv(3 * s, k - 3 * s), Some(&msg))?;
        let v_h4 = rest[3 * s..4 * s].to_vec();
        let v_h3 = self.sub(&v_h34, &v_h4);
        msg.part_mut(p, h, Part::P3).copy_from_slice(&v_h3);
        msg.part_mut(p, h, Part::P4).copy_from_slice(&v_h4);
        msg.part_mut(p, h, Part::Info)
            .copy_from_slice(&rest[4 * s..k]);
        Ok(msg)
    }

    fn k3_two_heavy(&self, r: usize) -> Result<Message> {
        let p = self.params;
        let (k, t, s) = (p.k(), p.t(), p.s());
        let (left, center) = ((r + 1) % M, (r + 2) % M);
        let sr = self.decode_column(r, self.iv(0, k + t), None)?;

        let mut known = Message::zeros(k);
        known.sub_unit_mut(r).copy_from_slice(&reverse_map(p, &sr));
        // GF in the light column is v_{center,1}.
        known
            .part_mut(p, center, Part::P1)
            .copy_from_slice(&sr[k + s..k + 2 * s]);

        // Left column after cancelling: own spectrum plus GE, [0 : k+s-1].
        let sl = self.decode_column(left, self.iv(0, k + s), Some(&known))?;
        // Center column after cancelling: no G1, plus GE and GF, [s : k+2s-1].
        let sc = self.decode_column(center, self.iv(s, k + s), Some(&known))?;

        let mut msg = known;
        msg.sub_unit_mut(left).copy_from_slice(&reverse_map(p, &sl));
        let v_c1 = msg.part(p, center, Part::P1).to_vec();
        msg.sub_unit_mut(center)
            .copy_from_slice(&reverse_map(p, &sc));
        msg.part_mut(p, center, Part::P1).copy_from_slice(&v_c1);
        Ok(msg)
    }
}

fn check_inputs(layout: &Layout, received: &WriteBlock, erasures: &ErasurePattern) -> Result<()> {
    let n = layout.params().n();
    if received.n() != n || erasures.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: if received.n() != n {
                received.n()
            } else {
                erasures.n()
            },
        });
    }
    Ok(())
}

/// Runs the scenario cascade when the profile matches one; `Ok(None)` otherwise.
pub fn cascade_decode(
    layout: &Layout,
    received: &WriteBlock,
    erasures: &ErasurePattern,
) -> Result<Option<(Scenario, Message)>> {
    check_inputs(layout, received, erasures)?;
    let params = layout.params();
    let Some(scenario) = detect_scenario(params, erasures.counts()) else {
        return Ok(None);
    };
    let cascade = Cascade {
        layout,
        params,
        received,
        erasures,
    };
    let msg = match scenario {
        Scenario::C3Heavy { heavy } => cascade.c3_heavy(heavy)?,
        Scenario::K3OneHeavy { heavy } => cascade.k3_one_heavy(heavy)?,
        Scenario::K3TwoHeavy { light } => cascade.k3_two_heavy(light)?,
    };
    Ok(Some((scenario, msg)))
}

/// Solves `v G = c` on the surviving coordinates by elimination.
pub fn generic_erasure_solve(
    layout: &Layout,
    received: &WriteBlock,
    erasures: &ErasurePattern,
) -> Result<Message> {
    check_inputs(layout, received, erasures)?;
    let params = layout.params();
    let f = params.field();
    let keep: Vec<usize> = (0..params.block_len())
        .filter(|&i| !erasures.is_erased(i))
        .collect();
    let system = layout.generator().select_columns(&keep).transpose();
    let rhs: Vec<Elem> = keep.iter().map(|&i| received.symbols()[i]).collect();
    match system.solve(f, &rhs) {
        Solution::Unique(v) => Message::from_symbols(params.k(), v),
        Solution::Underdetermined { rank, .. } => Err(Error::GlobalDecodeFailure {
            reason: format!(
                "rank deficiency {} (rank {rank} of {})",
                params.message_len() - rank,
                params.message_len()
            ),
            profile: erasures.counts(),
        }),
        Solution::Inconsistent => Err(Error::DecodeFailure),
    }
}

/// How a global decode was carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodePath {
    Cascade(Scenario),
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDecoded {
    pub message: Message,
    pub path: DecodePath,
}

/// Scenario cascade when applicable, otherwise (or when a constituent decode inside
/// the cascade runs out of capability) the generic solver.
pub fn global_decode(
    layout: &Layout,
    received: &WriteBlock,
    erasures: &ErasurePattern,
) -> Result<GlobalDecoded> {
    match cascade_decode(layout, received, erasures) {
        Ok(Some((scenario, message))) => Ok(GlobalDecoded {
            message,
            path: DecodePath::Cascade(scenario),
        }),
        Err(e @ (Error::LengthMismatch { .. } | Error::DecodeFailure)) => Err(e),
        Ok(None) | Err(_) => Ok(GlobalDecoded {
            message: generic_erasure_solve(layout, received, erasures)?,
            path: DecodePath::Generic,
        }),
    }
}

/// Global decoder for C3: light sub-blocks first, then the heavy one as a GI-only code.
pub fn global_decode_c3(
    layout: &Layout,
    received: &WriteBlock,
    erasures: &ErasurePattern,
) -> Result<Message> {
    if layout.params().construction() != Construction::C3 {
        return Err(Error::InvalidParams("layout is not C3".into()));
    }
    global_decode(layout, received, erasures).map(|d| d.message)
}

/// Global decoder for K3 covering the one-heavy and two-heavy scenarios.
pub fn global_decode_k3(
    layout: &Layout,
    received: &WriteBlock,
    erasures: &ErasurePattern,
) -> Result<Message> {
    if layout.params().construction() != Construction::K3 {
        return Err(Error::InvalidParams("layout is not K3".into()));
    }
    global_decode(layout, received, erasures).map(|d| d.message)
}
