//! Algebraic invariants checked on random inputs.

use std::sync::Arc;

use proptest::prelude::*;

use mbic::linalg::Matrix;
use mbic::mbic::{cascade_decode, global_decode, local_read, M};
use mbic::presets::Preset;
use mbic::rscodes::{CyclicInterval, Domain, RsCode};
use mbic::{Elem, ErasurePattern, Field, Layout, Message};

fn layouts() -> Vec<Layout> {
    Preset::ALL.iter().take(3).map(|p| p.layout()).collect()
}

fn message_for(layout: &Layout, raw: &[u16]) -> Message {
    let p = layout.params();
    let q = p.field().order() as u16;
    let symbols = raw
        .iter()
        .take(p.message_len())
        .map(|&x| (x % q) as Elem)
        .collect();
    Message::from_symbols(p.k(), symbols).unwrap()
}

fn raw_message() -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(any::<u16>(), 18)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn encode_then_local_read_roundtrips(preset in 0usize..3, raw in raw_message()) {
        let layout = &layouts()[preset];
        let m = message_for(layout, &raw);
        let w = layout.encode(&m).unwrap();
        for j in 0..M {
            let v = local_read(layout, j, w.sub_block(j), &vec![false; layout.params().n()]).unwrap();
            prop_assert_eq!(&v[..], m.sub_unit(j));
        }
    }

    #[test]
    fn encoding_is_linear(preset in 0usize..3, a in raw_message(), b in raw_message(), c in 1u16..16) {
        let layout = &layouts()[preset];
        let f = layout.params().field().clone();
        let (ma, mb) = (message_for(layout, &a), message_for(layout, &b));
        let c = c % (f.order() as u16 - 1) + 1;
        let combo: Vec<Elem> = ma.symbols().iter().zip(mb.symbols())
            .map(|(&x, &y)| f.add(f.mul(c, x), y))
            .collect();
        let lhs = layout.encode_symbols(&combo).unwrap();
        let (wa, wb) = (layout.encode(&ma).unwrap(), layout.encode(&mb).unwrap());
        let rhs: Vec<Elem> = wa.symbols().iter().zip(wb.symbols())
            .map(|(&x, &y)| f.add(f.mul(c, x), y))
            .collect();
        prop_assert_eq!(lhs.symbols(), &rhs[..]);
    }

    #[test]
    fn sub_blocks_lie_in_the_sub_block_code(preset in 0usize..3, raw in raw_message()) {
        let layout = &layouts()[preset];
        let w = layout.encode(&message_for(layout, &raw)).unwrap();
        let code = layout.sub_block_code();
        for j in 0..M {
            prop_assert!(code.is_codeword(w.sub_block(j)));
        }
    }

    /// Any n-k columns of an RS generator can be deleted without losing rank.
    #[test]
    fn rs_codes_are_mds(start in 0i64..15, k in 1usize..15, seed in any::<u64>()) {
        let f = Arc::new(Field::binary(4).unwrap());
        let d = Arc::new(Domain::new(f.clone(), 15).unwrap());
        let code = RsCode::from_support(d, CyclicInterval::with_len(start, k, 15));
        let g = code.generator_matrix();
        let mut cols: Vec<usize> = (0..15).collect();
        let mut s = seed;
        for i in (1..cols.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            cols.swap(i, (s >> 33) as usize % (i + 1));
        }
        cols.truncate(k);
        prop_assert_eq!(g.select_columns(&cols).rank(&f), k);
        prop_assert_eq!(code.min_distance(), 15 - k + 1);
    }

    #[test]
    fn rs_erasure_decoding_restores_word(start in 0i64..15, k in 1usize..15, info in prop::collection::vec(0u16..16, 15), mask in prop::collection::vec(any::<bool>(), 15)) {
        let f = Arc::new(Field::binary(4).unwrap());
        let d = Arc::new(Domain::new(f, 15).unwrap());
        let code = RsCode::from_support(d, CyclicInterval::with_len(start, k, 15));
        let word = code.encode(&info[..k]).unwrap();
        let mut erased = mask.clone();
        while erased.iter().filter(|&&e| e).count() > 15 - k {
            let i = erased.iter().position(|&e| e).unwrap();
            erased[i] = false;
        }
        let mut received = word.clone();
        for (r, &e) in received.iter_mut().zip(&erased) {
            if e { *r = 0; }
        }
        prop_assert_eq!(code.decode_erasures(&received, &erased).unwrap(), word);
    }

    /// Global decoding agrees with the rank oracle: it succeeds exactly when the
    /// surviving columns have full rank, and then returns the written message.
    #[test]
    fn global_decode_matches_rank_oracle(raw in raw_message(), mask in prop::collection::vec(prop::bool::weighted(0.35), 45)) {
        let layout = Preset::P3.layout();
        let p = layout.params();
        let m = message_for(&layout, &raw);
        let mut w = layout.encode(&m).unwrap();
        let pattern = ErasurePattern::from_mask(p.n(), mask).unwrap();
        for i in pattern.indices() {
            w.symbols_mut()[i] = 7;
        }
        let keep: Vec<usize> = (0..p.block_len()).filter(|&i| !pattern.is_erased(i)).collect();
        let full_rank = layout.generator().select_columns(&keep).rank(p.field()) == p.message_len();
        match global_decode(&layout, &w, &pattern) {
            Ok(d) => {
                prop_assert!(full_rank);
                prop_assert_eq!(d.message, m.clone());
            }
            Err(_) => prop_assert!(!full_rank),
        }
        if let Ok(Some((_, c))) = cascade_decode(&layout, &w, &pattern) {
            prop_assert_eq!(c, m);
        }
    }

    #[test]
    fn field_inverse_and_distributivity(w in 2u32..9, a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let f = Field::binary(w).unwrap();
        let q = f.order() as u16;
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..6, cols in 1usize..7, data in prop::collection::vec(0u16..8, 42)) {
        let f = Field::binary(3).unwrap();
        let m = Matrix::from_rows(&(0..rows).map(|r| data[r * cols..(r + 1) * cols].to_vec()).collect::<Vec<_>>());
        let ns = m.nullspace(&f);
        prop_assert_eq!(m.rank(&f) + ns.len(), cols);
        for v in ns {
            let mv: Vec<Elem> = (0..rows)
                .map(|r| (0..cols).fold(0, |acc, c| f.add(acc, f.mul(m.get(r, c), v[c]))))
                .collect();
            prop_assert!(mv.iter().all(|&x| x == 0));
        }
    }
}
