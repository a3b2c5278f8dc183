mod common;

use std::sync::Arc;

use common::*;
use foakit_core::foa::*;
use proptest::prelude::*;

fn clip_strategy() -> impl Strategy<Value = FoaClip> {
    (1usize..64, any::<u64>()).prop_map(|(len, seed)| random_clip(&mut rng(seed), len, 48_000))
}

fn rotation_strategy() -> impl Strategy<Value = Rotation> {
    any::<u64>().prop_map(|seed| random_rotation(&mut rng(seed)))
}

fn direction_strategy() -> impl Strategy<Value = Direction> {
    any::<u64>().prop_map(|seed| random_direction(&mut rng(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_preserves_directional_energy(clip in clip_strategy(), r in rotation_strategy()) {
        let out = rotate(&clip, &r);
        prop_assert_eq!(out.w(), clip.w());
        for n in 0..clip.len() {
            let e0 = clip.x()[n].powi(2) + clip.y()[n].powi(2) + clip.z()[n].powi(2);
            let e1 = out.x()[n].powi(2) + out.y()[n].powi(2) + out.z()[n].powi(2);
            prop_assert!((e0 - e1).abs() <= 1e-9 * e0.max(1e-300));
        }
    }

    #[test]
    fn decoding_commutes_with_rotation(clip in clip_strategy(), r in rotation_strategy(), d in direction_strategy()) {
        let a = decode_to_mono(&rotate(&clip, &r), &r.apply_direction(&d));
        let b = decode_to_mono(&clip, &d);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_energy_follows_rotation(clip in clip_strategy(), r in rotation_strategy(), d in direction_strategy()) {
        let before = ChannelMoments::from_window(&clip, 0, clip.len()).unwrap();
        let after = ChannelMoments::from_window(&rotate(&clip, &r), 0, clip.len()).unwrap();
        for mode in [EnergyMode::Power, EnergyMode::LiteralLinear] {
            let e0 = before.value_at(&d, mode);
            let e1 = after.value_at(&r.apply_direction(&d), mode);
            prop_assert!((e0 - e1).abs() < 1e-6 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn grid_weights_sum_to_one(b in 1usize..80, a in 1usize..160) {
        let g = SphereGrid::new(b, a).unwrap();
        let total: f64 = g.weights().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_round_trip(clip in clip_strategy(), r in rotation_strategy()) {
        let inverse = Rotation::new({
            let m = r.matrix();
            std::array::from_fn(|i| std::array::from_fn(|j| m[j][i]))
        }).unwrap();
        let back = rotate(&rotate(&clip, &r), &inverse);
        for c in 0..4 {
            for (x, y) in back.channel(c).iter().zip(clip.channel(c)) {
                prop_assert!((x - y).abs() < 1e-12 * (1.0 + y.abs()));
            }
        }
    }
}

#[test]
fn power_map_matches_per_sample_decode() {
    let mut r = rng(11);
    let grid = Arc::new(SphereGrid::new(6, 12).unwrap());
    let clip = random_clip(&mut r, 500, 8000);
    let window = SampleWindow::new(37, 421);
    let map = energy_map(&clip, &grid, window, EnergyMode::Power).unwrap();
    for (cell, v) in grid.cells().iter().zip(map.values()) {
        let d = cell.direction;
        let oracle = brute_power(&clip, 37, 421, d.azimuth(), d.elevation());
        assert!((v - oracle).abs() < 1e-9 * oracle.max(1.0), "{v} vs {oracle}");
    }
}

#[test]
fn linear_map_matches_mean_of_decode() {
    let mut r = rng(12);
    let grid = Arc::new(SphereGrid::new(5, 9).unwrap());
    let clip = random_clip(&mut r, 300, 8000);
    let map = energy_map(&clip, &grid, SampleWindow::new(0, 300), EnergyMode::LiteralLinear).unwrap();
    for (cell, v) in grid.cells().iter().zip(map.values()) {
        let u = unit(cell.direction.azimuth(), cell.direction.elevation());
        let oracle: f64 = (0..300)
            .map(|n| clip.w()[n] + clip.x()[n] * u[0] + clip.y()[n] * u[1] + clip.z()[n] * u[2])
            .sum::<f64>()
            / 300.0;
        assert!((v - oracle).abs() < 1e-12);
    }
}

#[test]
fn gain_peaks_at_source_direction() {
    let mut r = rng(13);
    let grid = SphereGrid::default();
    for _ in 0..100 {
        let d = random_direction(&mut r);
        let clip = encode_mono(&[1.0], &d, 8000).unwrap();
        let at_source = decode_to_mono(&clip, &d)[0];
        assert!((at_source - (std::f64::consts::FRAC_1_SQRT_2 + 1.0)).abs() < 1e-12);
        for cell in grid.cells() {
            assert!(decode_to_mono(&clip, &cell.direction)[0] <= at_source + 1e-12);
        }
    }
}
