//! First-order ambisonics: clips, panning, decoding, rotation and energy maps.

mod clip;
mod energy;
mod grid;

pub use clip::{decode_to_mono, encode_mono, rotate, Direction, FoaClip, Rotation, CHANNEL_NAMES};
pub use energy::{energy_map, full_power_map, ChannelMoments, EnergyMap, EnergyMode, SampleWindow};
pub use grid::{GridCell, SphereGrid, DEFAULT_AZIMUTH_SAMPLES, DEFAULT_ELEVATION_BANDS};

pub(crate) use energy::map_from_moments;
