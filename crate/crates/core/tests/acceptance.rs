//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mbic::mbic::{
    cascade_decode, generic_erasure_solve, global_decode_k3, local_read, predicted_distances, M,
};
use mbic::presets::Preset;
use mbic::rscodes::CyclicInterval;
use mbic::verify::{
    enumerate_span, min_weight_enumerate, span_membership_of, subcode_basis, two_block_witness,
    verify_preset, Budget, Combinations, SupportConstraint, Verdict,
};
use mbic::{Construction, Elem, ErasurePattern, Error, Layout, Message, WriteBlock};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn random_message(layout: &Layout, rng: &mut ChaCha8Rng) -> Message {
    let p = layout.params();
    let q = p.field().order();
    let symbols = (0..p.message_len())
        .map(|_| rng.gen_range(0..q) as Elem)
        .collect();
    Message::from_symbols(p.k(), symbols).unwrap()
}

/// Erases `counts[j]` random positions of each sub-block and scrambles them.
fn erase(
    layout: &Layout,
    word: &WriteBlock,
    counts: [usize; M],
    rng: &mut ChaCha8Rng,
) -> (WriteBlock, ErasurePattern) {
    let n = layout.params().n();
    let q = layout.params().field().order();
    let mut idx = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        idx.extend(sample(rng, n, c).into_iter().map(|i| j * n + i));
    }
    let mut out = word.clone();
    for &i in &idx {
        out.symbols_mut()[i] = rng.gen_range(0..q) as Elem;
    }
    (out, ErasurePattern::from_indices(n, &idx).unwrap())
}

fn c1_exhaustive_p1() -> Outcome {
    let layout = Preset::P1.layout();
    let p = layout.params();
    let all = subcode_basis(&layout, SupportConstraint::unconstrained());
    // One codeword per line through the origin: support and weights are invariant under scaling.
    let prof = enumerate_span(p.field(), p.n(), &all.codewords, 1 << 26).unwrap();
    let lines = (8u64.pow(9) - 1) / 7;
    let got = (
        prof.min_block_weight,
        prof.d_i(1),
        prof.d_i(2),
        prof.d_i(3),
        prof.min_distance(),
    );
    let bound = p.n() - p.k() + 2 * p.t() + 1;
    let ok = prof.enumerated == lines
        && got == (Some(4), Some(7), Some(8), got.3, Some(7))
        && got.3.unwrap() >= 12
        && bound == 7;
    outcome(
        ok,
        format!(
            "lines={} (x7 scalings = 8^9-1) delta={:?} d1={:?} d2={:?} d3={:?} d={:?} bound={bound}",
            prof.enumerated, got.0, got.1, got.2, got.3, got.4
        ),
    )
}

fn block_weights_of(layout: &Layout, msg: &[Elem]) -> [usize; M] {
    let w = layout.encode_symbols(msg).unwrap();
    w.block_weights()
}

fn c2_subcodes_p2() -> Outcome {
    let layout = Preset::P2.layout();
    let n = layout.params().n();
    let budget = Budget::default().max_messages;
    let mut dims = Vec::new();
    let mut d1 = usize::MAX;
    for j in 0..M {
        let sub = subcode_basis(&layout, SupportConstraint::only(j));
        dims.push(sub.dim());
        d1 = d1.min(
            min_weight_enumerate(&layout, &sub, budget)
                .unwrap()
                .unwrap(),
        );
    }
    // Two-sub-block subcodes: 7 consecutive common roots per surviving column.
    let mut d2_lower = usize::MAX;
    for z in 0..M {
        let sub = subcode_basis(&layout, SupportConstraint::without(z));
        let b: usize = (0..M)
            .filter(|&c| c != z)
            .map(|c| {
                span_membership_of(&layout, &sub, c, CyclicInterval::with_len(0, 0, n))
                    .weight_bound()
            })
            .sum();
        d2_lower = d2_lower.min(b);
    }
    let witness = two_block_witness(&layout, 0, 1, 8, 8, budget).unwrap();
    let witness_w = witness.as_ref().map(|m| block_weights_of(&layout, m));
    let full = subcode_basis(&layout, SupportConstraint::unconstrained());
    let rs = CyclicInterval::new(8, 14, n);
    let projected = (0..M).all(|c| {
        let chk = span_membership_of(&layout, &full, c, rs);
        chk.holds && chk.projected_rank == 8 && chk.max_run == rs
    });
    let ok = dims == [2, 2, 2]
        && d1 == 14
        && d2_lower >= 16
        && witness_w == Some([8, 8, 0])
        && projected;
    outcome(
        ok,
        format!(
            "kernel_dims={dims:?} d1={d1} d2>={d2_lower} witness_weights={witness_w:?} projected=RS([8:14]_15):{projected} delta={}",
            n - 8 + 1
        ),
    )
}

fn c3_k3_p3() -> Outcome {
    let layout = Preset::P3.layout();
    let n = layout.params().n();
    let budget = Budget::default().max_messages;
    let mut dims = Vec::new();
    let mut d1 = usize::MAX;
    for j in 0..M {
        let sub = subcode_basis(&layout, SupportConstraint::only(j));
        dims.push(sub.dim());
        d1 = d1.min(
            min_weight_enumerate(&layout, &sub, budget)
                .unwrap()
                .unwrap(),
        );
    }
    let mut runs = Vec::new();
    let mut d2_lower = usize::MAX;
    for z in 0..M {
        let sub = subcode_basis(&layout, SupportConstraint::without(z));
        let mut b = 0;
        for c in (0..M).filter(|&c| c != z) {
            let chk = span_membership_of(&layout, &sub, c, CyclicInterval::with_len(0, 0, n));
            runs.push(chk.max_run.len());
            b += chk.weight_bound();
        }
        d2_lower = d2_lower.min(b);
    }
    let full = subcode_basis(&layout, SupportConstraint::unconstrained());
    let rs = CyclicInterval::new(8, 14, n);
    let delta_ok = (0..M).all(|c| {
        let chk = span_membership_of(&layout, &full, c, rs);
        chk.holds && chk.projected_rank == 8
    });
    let ok =
        dims == [3, 3, 3] && d1 == 13 && d2_lower >= 18 && runs.iter().all(|&r| r >= 8) && delta_ok;
    outcome(
        ok,
        format!("kernel_dims={dims:?} d1={d1} two_block_runs={runs:?} d2>={d2_lower} delta=8:{delta_ok}"),
    )
}

fn c4_crossover_p4() -> Outcome {
    let (n, k, t) = Preset::P4.shape();
    let c3 = predicted_distances(Construction::C3, n, k, t);
    let k3 = predicted_distances(Construction::K3, n, k, t);
    let threshold = 2.0 * (n - k + 1) as f64 / 7.0;
    let report = verify_preset(Preset::P4, &Budget::default());
    let confirmed = |name: &str| {
        report
            .get(name)
            .map(|r| (r.measured, r.verdict == Verdict::Pass))
    };
    let (c3c, k3c) = (confirmed("C3.d_confirmed"), confirmed("K3.d_confirmed"));
    let ok = k3.d.value == 24
        && c3.d.value == 18
        && (t as f64) > threshold
        && 2 * t <= n - k + 1
        && c3c == Some((Some(18), true))
        && k3c == Some((Some(24), true))
        && report.passed();
    outcome(
        ok,
        format!(
            "K3 d={} C3 d={} t={t}>{threshold:.2} span lower bounds C3>={:?} K3>={:?} all_records_pass={}",
            k3.d.value,
            c3.d.value,
            c3c.and_then(|c| c.0),
            k3c.and_then(|c| c.0),
            report.passed()
        ),
    )
}

fn all_layouts() -> Vec<(String, Layout)> {
    let mut v: Vec<(String, Layout)> = Preset::ALL
        .iter()
        .map(|p| (p.to_string(), p.layout()))
        .collect();
    v.push((
        "P4/C3".into(),
        Layout::new(Preset::P4.params_with(Construction::C3).unwrap()).unwrap(),
    ));
    v
}

fn c5_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let mut names = Vec::new();
    for (name, layout) in all_layouts() {
        let n = layout.params().n();
        for _ in 0..1000 {
            let m = random_message(&layout, &mut rng);
            let w = layout.encode(&m).unwrap();
            for j in 0..M {
                match local_read(&layout, j, w.sub_block(j), &vec![false; n]) {
                    Ok(v) if v == m.sub_unit(j) => {}
                    _ => failures += 1,
                }
            }
        }
        names.push(name);
    }
    outcome(
        failures == 0,
        format!("1000 messages x 3 sub-units on {names:?}, failures={failures}"),
    )
}

fn c6_local_capability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut report = Vec::new();
    let mut ok = true;
    for preset in [Preset::P2, Preset::P3] {
        let layout = preset.layout();
        let n = layout.params().n();
        let cap = layout.params().local_capability();
        let (mut good, mut raised, mut silent) = (0, 0, 0);
        for _ in 0..10_000 {
            let m = random_message(&layout, &mut rng);
            let j = rng.gen_range(0..M);
            let mut counts = [0; M];
            counts[j] = cap;
            let (w, e) = erase(&layout, &layout.encode(&m).unwrap(), counts, &mut rng);
            if local_read(&layout, j, w.sub_block(j), e.sub_block(j))
                .ok()
                .as_deref()
                == Some(m.sub_unit(j))
            {
                good += 1;
            }
        }
        for _ in 0..1000 {
            let m = random_message(&layout, &mut rng);
            let j = rng.gen_range(0..M);
            let mut counts = [0; M];
            counts[j] = cap + 1;
            let (w, e) = erase(&layout, &layout.encode(&m).unwrap(), counts, &mut rng);
            match local_read(&layout, j, w.sub_block(j), e.sub_block(j)) {
                Err(Error::LocalReadFailure { .. }) => raised += 1,
                Ok(v) if v == m.sub_unit(j) => {}
                _ => silent += 1,
            }
        }
        ok &= cap == 7 && good == 10_000 && raised == 1000 && silent == 0 && n == 15;
        report.push(format!("{preset}: {cap}-erasure ok={good}/10000, {}-erasure failure raised={raised}/1000 silent={silent}", cap + 1));
    }
    outcome(ok, report.join("; "))
}

fn c7_scenarios_p3() -> Outcome {
    let layout = Preset::P3.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fails = [0usize; 2];
    for (scenario, failed) in fails.iter_mut().enumerate() {
        for _ in 0..10_000 {
            let m = random_message(&layout, &mut rng);
            let mut counts = [0; M];
            let a = rng.gen_range(0..M);
            if scenario == 0 {
                for (j, c) in counts.iter_mut().enumerate() {
                    *c = if j == a { 12 } else { rng.gen_range(0..=7) };
                }
            } else {
                for (j, c) in counts.iter_mut().enumerate() {
                    *c = if j == a { rng.gen_range(0..=7) } else { 8 };
                }
            }
            let (w, e) = erase(&layout, &layout.encode(&m).unwrap(), counts, &mut rng);
            if global_decode_k3(&layout, &w, &e).ok() != Some(m) {
                *failed += 1;
            }
        }
    }
    outcome(
        fails == [0, 0],
        format!(
            "one heavy (12,<=7,<=7) failures={}/10000, two heavy (8,8,<=7) failures={}/10000",
            fails[0], fails[1]
        ),
    )
}

fn c8_cascade_vs_generic_p1() -> Outcome {
    let layout = Preset::P1.layout();
    let total = layout.params().block_len();
    let n = layout.params().n();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let m = random_message(&layout, &mut rng);
    let clean = layout.encode(&m).unwrap();
    let (mut patterns, mut generic_fail, mut cascaded, mut disagree) = (0u64, 0u64, 0u64, 0u64);
    for e in 0..=6 {
        for idx in Combinations::new(total, e) {
            patterns += 1;
            let mut w = clean.clone();
            for &i in &idx {
                w.symbols_mut()[i] = rng.gen_range(0..8);
            }
            let pat = ErasurePattern::from_indices(n, &idx).unwrap();
            let generic = generic_erasure_solve(&layout, &w, &pat);
            match &generic {
                Ok(g) if *g == m => {}
                _ => generic_fail += 1,
            }
            if let Ok(Some((_, c))) = cascade_decode(&layout, &w, &pat) {
                cascaded += 1;
                if generic.as_ref().ok() != Some(&c) {
                    disagree += 1;
                }
            }
        }
    }
    outcome(
        generic_fail == 0 && disagree == 0 && patterns == 82_160,
        format!("patterns={patterns} generic_failures={generic_fail} cascade_applicable={cascaded} disagreements={disagree}"),
    )
}

fn binomial_tail(n: u32, p: f64, above: u32) -> f64 {
    let choose = |k: u32| (0..k).fold(1.0f64, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    (above + 1..=n)
        .map(|k| choose(k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .sum()
}

fn c9_simulation() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_mbic"))
            .args([
                "simulate",
                "--preset",
                "P3",
                "--erase-prob",
                "0.2",
                "--blocks",
                "10000",
                "--seed",
                "42",
            ])
            .output()
            .expect("run mbic")
    };
    let (a, b) = (run(), run());
    let text = String::from_utf8_lossy(&a.stdout).to_string();
    let field = |key: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .and_then(|v| v.parse::<f64>().ok())
    };
    let blocks = 10_000.0;
    let p = binomial_tail(15, 0.2, 7);
    let sigma = (p * (1.0 - p) / blocks).sqrt();
    let rate = field("escalation_rate").unwrap_or(f64::NAN);
    let wrong = field("wrong_data").unwrap_or(f64::NAN);
    let identical = a.status.success() && a.stdout == b.stdout;
    let ok = (rate - p).abs() <= 3.0 * sigma && identical && wrong == 0.0;
    outcome(
        ok,
        format!(
            "escalation_rate={rate:.6} tail={p:.6} 3sigma={:.6} wrong_data={wrong} byte_identical={identical}",
            3.0 * sigma
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("exhaustive distances at P1", c1_exhaustive_p1),
        ("subcode verification at P2", c2_subcodes_p2),
        ("K3 verification at P3", c3_k3_p3),
        ("regime crossover at P4", c4_crossover_p4),
        ("reverse-map roundtrip", c5_roundtrip),
        ("local erasure capability", c6_local_capability),
        ("decoder scenarios at P3", c7_scenarios_p3),
        ("cascade/generic agreement at P1", c8_cascade_vs_generic_p1),
        ("simulation sanity", c9_simulation),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        println!(
            "{} {label}: {} ({:.1}s)",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += !o.ok as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
