//! FOA clips, directions and sound-field rotation.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel order used everywhere in the crate.
pub const CHANNEL_NAMES: [&str; 4] = ["W", "X", "Y", "Z"];

/// Four-channel (W, X, Y, Z) first-order ambisonics waveform.
///
/// W carries the omnidirectional pressure scaled by 1/√2; X, Y and Z are the
/// figure-of-eight components along the front, left and up axes.
#[derive(Debug, Clone, PartialEq)]
pub struct FoaClip {
    channels: [Vec<f64>; 4],
    sample_rate: u32,
}

impl FoaClip {
    pub fn new(channels: [Vec<f64>; 4], sample_rate: u32) -> Result<Self> {
        let len = channels[0].len();
        if len == 0 {
            return Err(Error::InvalidInput("clip must have at least one sample".into()));
        }
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::InvalidInput("all four channels must have the same length".into()));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        for (name, ch) in CHANNEL_NAMES.iter().zip(&channels) {
            if let Some(i) = ch.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite sample in channel {name} at index {i}")));
            }
        }
        Ok(Self { channels, sample_rate })
    }

    /// Silent clip of `len` samples.
    pub fn zeros(len: usize, sample_rate: u32) -> Result<Self> {
        Self::new(std::array::from_fn(|_| vec![0.0; len]), sample_rate)
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channels(&self) -> &[Vec<f64>; 4] {
        &self.channels
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn w(&self) -> &[f64] {
        &self.channels[0]
    }

    pub fn x(&self) -> &[f64] {
        &self.channels[1]
    }

    pub fn y(&self) -> &[f64] {
        &self.channels[2]
    }

    pub fn z(&self) -> &[f64] {
        &self.channels[3]
    }

    pub fn into_channels(self) -> [Vec<f64>; 4] {
        self.channels
    }

    /// Sample-wise sum of two clips with equal length and rate.
    pub fn mix(&self, other: &FoaClip) -> Result<FoaClip> {
        if self.len() != other.len() || self.sample_rate != other.sample_rate {
            return Err(Error::IncompatibleClips("mix requires equal length and sample rate".into()));
        }
        let channels = std::array::from_fn(|c| {
            self.channels[c]
                .iter()
                .zip(&other.channels[c])
                .map(|(a, b)| a + b)
                .collect()
        });
        FoaClip::new(channels, self.sample_rate)
    }
}

/// Azimuth/elevation pair in radians.
///
/// Azimuth is measured counterclockwise from the front (+x) towards the left
/// (+y) and is normalized to `[0, 2π)`. Elevation is measured from the
/// horizon towards the zenith (+z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    azimuth: f64,
    elevation: f64,
}

impl Direction {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() {
            return Err(Error::InvalidInput("direction angles must be finite".into()));
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&elevation) {
            return Err(Error::InvalidInput(format!("elevation {elevation} outside [-pi/2, pi/2]")));
        }
        let mut azimuth = azimuth.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if azimuth >= TAU {
            azimuth = 0.0;
        }
        Ok(Self { azimuth, elevation })
    }

    pub fn from_degrees(azimuth: f64, elevation: f64) -> Result<Self> {
        Self::new(azimuth.to_radians(), elevation.to_radians())
    }

    /// Direction of a nonzero Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidInput("cannot take the direction of a zero vector".into()));
        }
        let elevation = (v[2] / norm).clamp(-1.0, 1.0).asin();
        Self::new(v[1].atan2(v[0]), elevation)
    }

    pub fn front() -> Self {
        Self { azimuth: 0.0, elevation: 0.0 }
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    /// Cartesian unit vector `(cos α cos ε, sin α cos ε, sin ε)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        [ca * ce, sa * ce, se]
    }

    /// Great-circle distance in radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        sin.atan2(cos)
    }
}

/// Proper rotation of the directional channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    matrix: [[f64; 3]; 3],
}

const ORTHO_TOL: f64 = 1e-9;

impl Rotation {
    /// Validates `MᵀM = I` and `det M = +1` within 1e-9.
    pub fn new(matrix: [[f64; 3]; 3]) -> Result<Self> {
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRotation("matrix has non-finite entries".into()));
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| matrix[k][i] * matrix[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > ORTHO_TOL {
                    return Err(Error::InvalidRotation(format!(
                        "not orthogonal: (M^T M)[{i}][{j}] = {dot}"
                    )));
                }
            }
        }
        let m = &matrix;
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (det - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidRotation(format!("determinant is {det}, expected +1")));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self {
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Exact 90° counterclockwise turn about the vertical axis.
    pub fn quarter_turn_z() -> Self {
        Self {
            matrix: [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Counterclockwise rotation about the vertical axis.
    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            matrix: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Rodrigues rotation by `angle` radians about `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !norm.is_finite() || norm <= 0.0 || !angle.is_finite() {
            return Err(Error::InvalidRotation("axis must be a finite nonzero vector".into()));
        }
        let [x, y, z] = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Self::new([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.matrix
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.matrix;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn apply_direction(&self, d: &Direction) -> Direction {
        Direction::from_vector(self.apply(d.unit_vector())).expect("rotation preserves norm")
    }

    pub fn compose(&self, then: &Rotation) -> Rotation {
        let (a, b) = (&then.matrix, &self.matrix);
        let matrix = std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()));
        Rotation { matrix }
    }
}

/// Pans a mono signal to `direction`.
pub fn encode_mono(signal: &[f64], direction: &Direction, sample_rate: u32) -> Result<FoaClip> {
    if signal.is_empty() {
        return Err(Error::InvalidInput("signal is empty".into()));
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite sample at index {i}")));
    }
    let [gx, gy, gz] = direction.unit_vector();
    let w = signal.iter().map(|s| s * FRAC_1_SQRT_2).collect();
    let x = signal.iter().map(|s| gx * s).collect();
    let y = signal.iter().map(|s| gy * s).collect();
    let z = signal.iter().map(|s| gz * s).collect();
    FoaClip::new([w, x, y, z], sample_rate)
}

/// Virtual cardioid microphone pointed at `direction`: `W + ⟨(X, Y, Z), u⟩`.
pub fn decode_to_mono(clip: &FoaClip, direction: &Direction) -> Vec<f64> {
    let [gx, gy, gz] = direction.unit_vector();
    let [w, x, y, z] = clip.channels();
    (0..clip.len())
        .map(|t| w[t] + x[t] * gx + y[t] * gy + z[t] * gz)
        .collect()
}

/// Rotates the sound field; W passes through untouched.
pub fn rotate(clip: &FoaClip, rotation: &Rotation) -> FoaClip {
    let m = rotation.matrix();
    let [w, x, y, z] = clip.channels();
    let row = |r: usize| -> Vec<f64> {
        (0..clip.len())
            .map(|t| m[r][0] * x[t] + m[r][1] * y[t] + m[r][2] * z[t])
            .collect()
    };
    FoaClip {
        channels: [w.clone(), row(0), row(1), row(2)],
        sample_rate: clip.sample_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI, SQRT_2};

    fn clip_wxyz(w: f64, x: f64, y: f64, z: f64) -> FoaClip {
        FoaClip::new([vec![w], vec![x], vec![y], vec![z]], 44100).unwrap()
    }

    #[test]
    fn encode_front_and_zenith() {
        let c = encode_mono(&[1.0], &Direction::front(), 44100).unwrap();
        assert_eq!(c.w(), &[FRAC_1_SQRT_2]);
        assert_eq!(c.x(), &[1.0]);
        assert_eq!(c.y(), &[0.0]);
        assert_eq!(c.z(), &[0.0]);

        let c = encode_mono(&[1.0], &Direction::new(0.0, FRAC_PI_2).unwrap(), 44100).unwrap();
        assert_eq!(c.w(), &[FRAC_1_SQRT_2]);
        assert!(c.x()[0].abs() < 1e-16);
        assert_eq!(c.y(), &[0.0]);
        assert_eq!(c.z(), &[1.0]);
    }

    #[test]
    fn encode_rejects_bad_signals() {
        assert!(matches!(encode_mono(&[], &Direction::front(), 1), Err(Error::InvalidInput(_))));
        assert!(matches!(
            encode_mono(&[0.0, f64::NAN], &Direction::front(), 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn decode_examples() {
        let c = clip_wxyz(1.0, 2.0, 3.0, 4.0);
        assert_eq!(decode_to_mono(&c, &Direction::front()), vec![3.0]);
        let left = decode_to_mono(&c, &Direction::new(FRAC_PI_2, 0.0).unwrap());
        assert!((left[0] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn decode_of_encode_scales_by_cardioid_peak() {
        let s: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
        let d = Direction::new(1.1, -0.4).unwrap();
        let out = decode_to_mono(&encode_mono(&s, &d, 8000).unwrap(), &d);
        for (o, s) in out.iter().zip(&s) {
            assert!((o - s * (FRAC_1_SQRT_2 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rms_ratios_match_panning_gains() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s: Vec<f64> = (0..4410).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = Direction::new(FRAC_PI_3, FRAC_PI_6).unwrap();
        let c = encode_mono(&s, &d, 44100).unwrap();
        let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
        let w = rms(c.w());
        let expected = [
            SQRT_2 * FRAC_PI_3.cos() * FRAC_PI_6.cos(),
            SQRT_2 * FRAC_PI_3.sin() * FRAC_PI_6.cos(),
            SQRT_2 * FRAC_PI_6.sin(),
        ];
        for (ch, e) in [c.x(), c.y(), c.z()].iter().zip(expected) {
            assert!((rms(ch) / w - e).abs() < 1e-12);
        }
    }

    #[test]
    fn direction_normalizes_azimuth() {
        let d = Direction::new(-FRAC_PI_2, 0.0).unwrap();
        assert!((d.azimuth() - 1.5 * PI).abs() < 1e-15);
        let d = Direction::new(5.0 * PI, 0.0).unwrap();
        assert!((d.azimuth() - PI).abs() < 1e-12);
        assert!(Direction::new(-1e-300, 0.0).unwrap().azimuth() < TAU);
        assert!(Direction::new(0.0, 1.6).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn unit_vector_is_unit() {
        for i in 0..50 {
            let d = Direction::new(i as f64 * 0.731, (i as f64 * 0.113).sin() * FRAC_PI_2).unwrap();
            let v = d.unit_vector();
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
            let back = Direction::from_vector(v).unwrap();
            assert!(back.angle_to(&d) < 1e-7);
        }
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation::new([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        // reflection: orthogonal but det -1
        assert!(Rotation::new([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(Rotation::from_axis_angle([0.3, -1.0, 2.0], 0.77).is_ok());
    }

    #[test]
    fn quarter_turn_maps_front_to_left() {
        let c = clip_wxyz(0.5, 1.0, 2.0, 3.0);
        let r = rotate(&c, &Rotation::quarter_turn_z());
        assert_eq!(r.channels(), &[vec![0.5], vec![-2.0], vec![1.0], vec![3.0]]);
        let d = Rotation::quarter_turn_z().apply_direction(&Direction::front());
        assert!((d.azimuth() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn identity_rotation_is_exact() {
        let c = clip_wxyz(0.25, -0.7, 0.3, 0.9);
        assert_eq!(rotate(&c, &Rotation::identity()), c);
    }

    #[test]
    fn compose_applies_in_order() {
        let a = Rotation::about_z(0.4);
        let b = Rotation::from_axis_angle([1.0, 0.0, 0.0], 0.9).unwrap();
        let v = [0.2, -0.5, 0.8];
        let lhs = a.compose(&b).apply(v);
        let rhs = b.apply(a.apply(v));
        for k in 0..3 {
            assert!((lhs[k] - rhs[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn clip_validation() {
        assert!(FoaClip::new([vec![], vec![], vec![], vec![]], 1).is_err());
        assert!(FoaClip::new([vec![0.0], vec![0.0], vec![0.0, 1.0], vec![0.0]], 1).is_err());
        assert!(FoaClip::new([vec![0.0], vec![f64::INFINITY], vec![0.0], vec![0.0]], 1).is_err());
        assert!(FoaClip::new(std::array::from_fn(|_| vec![0.0]), 0).is_err());
    }
}
