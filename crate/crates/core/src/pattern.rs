//! Generation schedules for four-channel RVQ code matrices.
//!
//! A raw code matrix has `4N` rows (N codebooks for each of W, X, Y, Z,
//! channel-major) and `L_c` time columns. Rows fall into four groups:
//! primary or residual codebook of the omnidirectional channel (`Wp`, `Wr`)
//! and of the spatial channels (`Sp`, `Sr`). A pattern assigns every
//! `(row, time)` cell to one generation step; unassigned slots hold `PAD`.
//!
//! | pattern            | steps        | placement (1-based time `t`)              |
//! |--------------------|--------------|-------------------------------------------|
//! | `Proposed`         | `2L_c + 1`   | Wp at `2t−1`, Wr∪Sp at `2t`, Sr at `2t+1` |
//! | `SequentialDelay`  | `L_c + 4N−1` | row `i` at `t + i − 1`                    |
//! | `ResidualOnly`     | `2L_c`       | Wp∪Sp at `2t−1`, Wr∪Sr at `2t`            |
//! | `SpatialOnly`      | `2L_c`       | Wp∪Wr at `2t−1`, Sp∪Sr at `2t`            |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeGroup {
    /// Primary codebook of W.
    Wp,
    /// Residual codebooks of W.
    Wr,
    /// Primary codebooks of X, Y, Z.
    Sp,
    /// Residual codebooks of X, Y, Z.
    Sr,
}

/// Group of 1-based row `row` for `n` codebooks per channel.
///
/// Primary rows are `{i | (i − 1) mod N = 0}`, the first codebook of each
/// channel.
pub fn group_of(row: usize, n: usize) -> Result<CodeGroup> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one codebook per channel".into()));
    }
    if row == 0 || row > 4 * n {
        return Err(Error::InvalidParameter(format!("row {row} outside 1..={}", 4 * n)));
    }
    let primary = (row - 1).is_multiple_of(n);
    let omni = row <= n;
    Ok(match (omni, primary) {
        (true, true) => CodeGroup::Wp,
        (true, false) => CodeGroup::Wr,
        (false, true) => CodeGroup::Sp,
        (false, false) => CodeGroup::Sr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Proposed,
    SequentialDelay,
    ResidualOnly,
    SpatialOnly,
}

impl Pattern {
    pub const ALL: [Pattern; 4] = [
        Pattern::Proposed,
        Pattern::SequentialDelay,
        Pattern::ResidualOnly,
        Pattern::SpatialOnly,
    ];

    /// Identifier used in serialized code files; 0 is reserved for raw matrices.
    pub fn id(&self) -> u32 {
        match self {
            Pattern::Proposed => 1,
            Pattern::SequentialDelay => 2,
            Pattern::ResidualOnly => 3,
            Pattern::SpatialOnly => 4,
        }
    }

    pub fn from_id(id: u32) -> Option<Pattern> {
        Pattern::ALL.into_iter().find(|p| p.id() == id)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Pattern::Proposed => "proposed",
            Pattern::SequentialDelay => "sequential_delay",
            Pattern::ResidualOnly => "residual_only",
            Pattern::SpatialOnly => "spatial_only",
        }
    }

    pub fn steps(&self, n: usize, frames: usize) -> usize {
        match self {
            Pattern::Proposed => 2 * frames + 1,
            Pattern::SequentialDelay => frames + 4 * n - 1,
            Pattern::ResidualOnly | Pattern::SpatialOnly => 2 * frames,
        }
    }

    /// 1-based step at which cell (`row`, `time`) is generated.
    pub fn step_of(&self, row: usize, time: usize, n: usize) -> usize {
        let group = group_of(row, n).expect("row in range");
        match self {
            Pattern::Proposed => match group {
                CodeGroup::Wp => 2 * time - 1,
                CodeGroup::Wr | CodeGroup::Sp => 2 * time,
                CodeGroup::Sr => 2 * time + 1,
            },
            Pattern::SequentialDelay => time + row - 1,
            Pattern::ResidualOnly => match group {
                CodeGroup::Wp | CodeGroup::Sp => 2 * time - 1,
                CodeGroup::Wr | CodeGroup::Sr => 2 * time,
            },
            Pattern::SpatialOnly => match group {
                CodeGroup::Wp | CodeGroup::Wr => 2 * time - 1,
                CodeGroup::Sp | CodeGroup::Sr => 2 * time,
            },
        }
    }

    /// 1-based time index held at (`row`, `step`), or `None` for a padding slot.
    ///
    /// For `Proposed` this is the case analysis on step parity: odd steps
    /// carry Wp at `(s+1)/2` (except the last step) and Sr at `(s−1)/2`
    /// (except the first step), even steps carry Wr ∪ Sp at `s/2`.
    pub fn time_at(&self, row: usize, step: usize, n: usize, frames: usize) -> Option<usize> {
        let group = group_of(row, n).ok()?;
        if step == 0 || step > self.steps(n, frames) {
            return None;
        }
        let odd = step % 2 == 1;
        let time = match self {
            Pattern::Proposed => match (odd, group) {
                (true, CodeGroup::Wp) if step != 2 * frames + 1 => step.div_ceil(2),
                (true, CodeGroup::Sr) if step != 1 => (step - 1) / 2,
                (false, CodeGroup::Wr | CodeGroup::Sp) => step / 2,
                _ => return None,
            },
            Pattern::SequentialDelay => {
                if step < row {
                    return None;
                }
                step - row + 1
            }
            Pattern::ResidualOnly => match (odd, group) {
                (true, CodeGroup::Wp | CodeGroup::Sp) => step.div_ceil(2),
                (false, CodeGroup::Wr | CodeGroup::Sr) => step / 2,
                _ => return None,
            },
            Pattern::SpatialOnly => match (odd, group) {
                (true, CodeGroup::Wp | CodeGroup::Wr) => step.div_ceil(2),
                (false, CodeGroup::Sp | CodeGroup::Sr) => step / 2,
                _ => return None,
            },
        };
        (1..=frames).contains(&time).then_some(time)
    }

    /// 1-based rows that receive a code at `step`.
    pub fn active_rows(&self, step: usize, n: usize, frames: usize) -> Vec<usize> {
        (1..=4 * n)
            .filter(|&row| self.time_at(row, step, n, frames).is_some())
            .collect()
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.replace('-', "_");
        Pattern::ALL
            .into_iter()
            .find(|p| p.name() == normalized)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown pattern '{s}'")))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw `4N × L_c` code matrix, rows channel-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMatrix {
    n_per_channel: usize,
    frames: usize,
    vocab_size: u16,
    codes: Vec<u16>,
}

impl CodeMatrix {
    /// `codes` is row-major with `4 * n_per_channel` rows of `frames` entries.
    pub fn new(n_per_channel: usize, frames: usize, vocab_size: u16, codes: Vec<u16>) -> Result<Self> {
        if n_per_channel == 0 || frames == 0 {
            return Err(Error::InvalidInput("code matrix needs at least one codebook and one frame".into()));
        }
        if vocab_size == 0 || vocab_size == u16::MAX {
            return Err(Error::InvalidInput(format!(
                "vocabulary size must be in 1..{} so the padding code fits in 16 bits",
                u16::MAX
            )));
        }
        if codes.len() != 4 * n_per_channel * frames {
            return Err(Error::DimensionMismatch(format!(
                "{} codes for a {}x{} matrix",
                codes.len(),
                4 * n_per_channel,
                frames
            )));
        }
        if let Some(i) = codes.iter().position(|c| *c >= vocab_size) {
            return Err(Error::InvalidInput(format!(
                "code {} at row {}, column {} is outside [0, {vocab_size})",
                codes[i],
                i / frames + 1,
                i % frames + 1
            )));
        }
        Ok(Self {
            n_per_channel,
            frames,
            vocab_size,
            codes,
        })
    }

    pub fn n_per_channel(&self) -> usize {
        self.n_per_channel
    }

    pub fn rows(&self) -> usize {
        4 * self.n_per_channel
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn vocab_size(&self) -> u16 {
        self.vocab_size
    }

    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    /// Code at 1-based (`row`, `time`).
    pub fn get(&self, row: usize, time: usize) -> u16 {
        self.codes[(row - 1) * self.frames + (time - 1)]
    }
}

/// Pattern-scheduled `4N × steps` matrix; padding slots hold `vocab_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorgMatrix {
    pattern: Pattern,
    n_per_channel: usize,
    frames: usize,
    vocab_size: u16,
    codes: Vec<u16>,
}

impl ReorgMatrix {
    /// Wraps row-major slot data without checking the padding layout; use
    /// [`unpack`] to validate.
    pub fn from_raw(pattern: Pattern, n_per_channel: usize, frames: usize, vocab_size: u16, codes: Vec<u16>) -> Result<Self> {
        if n_per_channel == 0 || frames == 0 || vocab_size == 0 || vocab_size == u16::MAX {
            return Err(Error::InvalidInput("invalid pattern matrix dimensions".into()));
        }
        let expected = 4 * n_per_channel * pattern.steps(n_per_channel, frames);
        if codes.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} slots, expected {expected} for pattern {pattern}",
                codes.len()
            )));
        }
        Ok(Self {
            pattern,
            n_per_channel,
            frames,
            vocab_size,
            codes,
        })
    }

    /// All-padding matrix for the given layout.
    pub fn empty(pattern: Pattern, n_per_channel: usize, frames: usize, vocab_size: u16) -> Result<Self> {
        let len = 4 * n_per_channel * pattern.steps(n_per_channel, frames);
        Self::from_raw(pattern, n_per_channel, frames, vocab_size, vec![vocab_size; len])
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn n_per_channel(&self) -> usize {
        self.n_per_channel
    }

    pub fn rows(&self) -> usize {
        4 * self.n_per_channel
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn steps(&self) -> usize {
        self.pattern.steps(self.n_per_channel, self.frames)
    }

    pub fn vocab_size(&self) -> u16 {
        self.vocab_size
    }

    pub fn pad(&self) -> u16 {
        self.vocab_size
    }

    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    /// Slot at 1-based (`row`, `step`).
    pub fn get(&self, row: usize, step: usize) -> u16 {
        self.codes[(row - 1) * self.steps() + (step - 1)]
    }

    pub fn is_pad(&self, row: usize, step: usize) -> bool {
        self.get(row, step) == self.pad()
    }

    pub fn set(&mut self, row: usize, step: usize, code: u16) {
        let steps = self.steps();
        self.codes[(row - 1) * steps + (step - 1)] = code;
    }

    /// Column of one step, top row first.
    pub fn column(&self, step: usize) -> Vec<u16> {
        (1..=self.rows()).map(|r| self.get(r, step)).collect()
    }
}

pub fn pack(c: &CodeMatrix, pattern: Pattern) -> ReorgMatrix {
    let mut out = ReorgMatrix::empty(pattern, c.n_per_channel, c.frames, c.vocab_size).expect("valid dimensions");
    for row in 1..=c.rows() {
        for time in 1..=c.frames {
            out.set(row, pattern.step_of(row, time, c.n_per_channel), c.get(row, time));
        }
    }
    out
}

/// Recovers the raw matrix, rejecting any slot whose padding disagrees with
/// the declared pattern.
pub fn unpack(r: &ReorgMatrix) -> Result<CodeMatrix> {
    let (n, frames) = (r.n_per_channel, r.frames);
    let mut codes = vec![0u16; 4 * n * frames];
    for row in 1..=r.rows() {
        for step in 1..=r.steps() {
            let slot = r.get(row, step);
            match r.pattern.time_at(row, step, n, frames) {
                Some(time) => {
                    if slot >= r.vocab_size {
                        return Err(Error::MalformedPattern(format!(
                            "row {row}, step {step} should hold a code but has {slot}"
                        )));
                    }
                    codes[(row - 1) * frames + (time - 1)] = slot;
                }
                None if slot != r.pad() => {
                    return Err(Error::MalformedPattern(format!(
                        "row {row}, step {step} should be padding but holds {slot}"
                    )));
                }
                None => {}
            }
        }
    }
    CodeMatrix::new(n, frames, r.vocab_size, codes)
}
