mod common;

use common::rng;
use foakit_core::pattern::*;
use proptest::prelude::*;
use rand::Rng;

fn matrix(n: usize, frames: usize, vocab: u16, seed: u64) -> CodeMatrix {
    let mut r = rng(seed);
    let codes = (0..4 * n * frames).map(|_| r.random_range(0..vocab)).collect();
    CodeMatrix::new(n, frames, vocab, codes).unwrap()
}

fn pattern() -> impl Strategy<Value = Pattern> {
    prop::sample::select(Pattern::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn round_trip_and_slot_accounting(n in 1usize..6, frames in 1usize..25, vocab in 1u16..2048, seed in any::<u64>(), p in pattern()) {
        let c = matrix(n, frames, vocab, seed);
        let packed = pack(&c, p);
        prop_assert_eq!(packed.steps(), p.steps(n, frames));
        prop_assert_eq!(&unpack(&packed).unwrap(), &c);
        let filled = packed.codes().iter().filter(|v| **v != vocab).count();
        prop_assert_eq!(filled, 4 * n * frames);
        // every cell lands in exactly one slot
        let mut seen = std::collections::HashSet::new();
        for row in 1..=4 * n {
            for t in 1..=frames {
                let s = p.step_of(row, t, n);
                prop_assert!(seen.insert((row, s)));
                prop_assert_eq!(packed.get(row, s), c.get(row, t));
                prop_assert_eq!(p.time_at(row, s, n, frames), Some(t));
            }
        }
    }

    #[test]
    fn pack_is_injective(n in 1usize..4, frames in 1usize..10, seed in any::<u64>(), p in pattern(), cell in any::<prop::sample::Index>()) {
        let a = matrix(n, frames, 8, seed);
        let mut codes = a.codes().to_vec();
        let k = cell.index(codes.len());
        codes[k] = (codes[k] + 1) % 8;
        let b = CodeMatrix::new(n, frames, 8, codes).unwrap();
        prop_assert_ne!(pack(&a, p), pack(&b, p));
    }

    #[test]
    fn proposed_residual_lags_primary(n in 2usize..6, frames in 2usize..20, seed in any::<u64>()) {
        let c = matrix(n, frames, 100, seed);
        let packed = pack(&c, Pattern::Proposed);
        for s in (3..2 * frames + 1).step_by(2) {
            for row in 1..=4 * n {
                let group = group_of(row, n).unwrap();
                match group {
                    CodeGroup::Wp => prop_assert_eq!(packed.get(row, s), c.get(row, s.div_ceil(2))),
                    CodeGroup::Sr => prop_assert_eq!(packed.get(row, s), c.get(row, (s - 1) / 2)),
                    _ => prop_assert!(packed.is_pad(row, s)),
                }
            }
        }
    }

    #[test]
    fn sequential_delay_offsets(n in 1usize..5, frames in 1usize..15, seed in any::<u64>()) {
        let c = matrix(n, frames, 50, seed);
        let packed = pack(&c, Pattern::SequentialDelay);
        for row in 1..=4 * n {
            for s in 1..=packed.steps() {
                let inside = s >= row && s < row + frames;
                prop_assert_eq!(!packed.is_pad(row, s), inside);
                if inside {
                    prop_assert_eq!(packed.get(row, s), c.get(row, s - row + 1));
                }
            }
        }
    }
}

#[test]
fn large_random_round_trip() {
    for trial in 0..200 {
        let c = matrix(9, 50, 1024, trial);
        for p in Pattern::ALL {
            assert_eq!(unpack(&pack(&c, p)).unwrap(), c);
        }
    }
}

#[test]
fn malformed_reorganized_matrix_is_rejected() {
    let c = matrix(2, 3, 10, 1);
    let mut packed = pack(&c, Pattern::Proposed);
    // step 1 must be padding for residual rows
    packed.set(2, 1, 0);
    assert!(unpack(&packed).is_err());
    let mut packed = pack(&c, Pattern::Proposed);
    packed.set(1, 1, 10);
    assert!(unpack(&packed).is_err());
}
