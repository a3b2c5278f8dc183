use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GUIDANCE_SCALE: f64 = 2.5;

/// One logit row per codebook row for the current step, `rows × vocab`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitSet {
    rows: usize,
    vocab: usize,
    data: Vec<f64>,
}

impl LogitSet {
    pub fn new(rows: usize, vocab: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || vocab == 0 {
            return Err(Error::InvalidInput("logit set must have at least one row and one entry".into()));
        }
        if data.len() != rows * vocab {
            return Err(Error::DimensionMismatch(format!(
                "{} logits for a {rows}x{vocab} set",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("logits must be finite".into()));
        }
        Ok(Self { rows, vocab, data })
    }

    pub fn zeros(rows: usize, vocab: usize) -> Self {
        Self {
            rows,
            vocab,
            data: vec![0.0; rows * vocab],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let vocab = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != vocab) {
            return Err(Error::DimensionMismatch("logit rows have different lengths".into()));
        }
        Self::new(rows.len(), vocab, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn vocab(&self) -> usize {
        self.vocab
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Logits of 0-based `row`.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.vocab..(row + 1) * self.vocab]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.vocab..(row + 1) * self.vocab]
    }

    fn same_shape(&self, other: &LogitSet) -> bool {
        self.rows == other.rows && self.vocab == other.vocab
    }
}

/// Which of the two conditions (video `V`, direction `D`) a forward pass sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conditioning {
    /// `(V, D)`
    Full,
    /// `(∅, D)`
    DirectionOnly,
    /// `(V, ∅)`
    VisualOnly,
    /// `(∅, ∅)`
    Unconditional,
}

impl Conditioning {
    pub fn label(&self) -> &'static str {
        match self {
            Conditioning::Full => "(V, D)",
            Conditioning::DirectionOnly => "(null, D)",
            Conditioning::VisualOnly => "(V, null)",
            Conditioning::Unconditional => "(null, null)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidanceMode {
    None,
    /// Guides the direction: `L(V,D) + ω(L(∅,D) − L(∅,∅))`.
    Directional,
    /// Guides the video: `L(V,D) + ω(L(V,∅) − L(∅,∅))`.
    Visual,
    /// Guides both jointly: `L(V,D) + ω(L(V,D) − L(∅,∅))`.
    #[default]
    Joint,
    /// Guides both separately with `ω₁` and `ω₂`.
    Dual,
}

impl GuidanceMode {
    pub fn name(&self) -> &'static str {
        match self {
            GuidanceMode::None => "none",
            GuidanceMode::Directional => "directional",
            GuidanceMode::Visual => "visual",
            GuidanceMode::Joint => "joint",
            GuidanceMode::Dual => "dual",
        }
    }

    /// Forward passes this mode consumes, in query order.
    pub fn required(&self) -> &'static [Conditioning] {
        use Conditioning::*;
        match self {
            GuidanceMode::None => &[Full],
            GuidanceMode::Directional => &[Full, DirectionOnly, Unconditional],
            GuidanceMode::Visual => &[Full, VisualOnly, Unconditional],
            GuidanceMode::Joint => &[Full, Unconditional],
            GuidanceMode::Dual => &[Full, DirectionOnly, VisualOnly, Unconditional],
        }
    }
}

impl FromStr for GuidanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            GuidanceMode::None,
            GuidanceMode::Directional,
            GuidanceMode::Visual,
            GuidanceMode::Joint,
            GuidanceMode::Dual,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown guidance mode '{s}'")))
    }
}

impl fmt::Display for GuidanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceConfig {
    pub mode: GuidanceMode,
    pub omega: f64,
    /// Visual scale, used only by [`GuidanceMode::Dual`].
    pub omega2: f64,
}

impl GuidanceConfig {
    pub fn new(mode: GuidanceMode, omega: f64, omega2: f64) -> Result<Self> {
        if !omega.is_finite() || !omega2.is_finite() {
            return Err(Error::InvalidParameter("guidance scales must be finite".into()));
        }
        Ok(Self { mode, omega, omega2 })
    }
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self {
            mode: GuidanceMode::default(),
            omega: DEFAULT_GUIDANCE_SCALE,
            omega2: DEFAULT_GUIDANCE_SCALE,
        }
    }
}

/// The forward passes available for one step; only those the mode needs
/// have to be present.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConditionalLogits<'a> {
    pub full: Option<&'a LogitSet>,
    pub direction_only: Option<&'a LogitSet>,
    pub visual_only: Option<&'a LogitSet>,
    pub unconditional: Option<&'a LogitSet>,
}

impl<'a> ConditionalLogits<'a> {
    pub fn get(&self, c: Conditioning) -> Option<&'a LogitSet> {
        match c {
            Conditioning::Full => self.full,
            Conditioning::DirectionOnly => self.direction_only,
            Conditioning::VisualOnly => self.visual_only,
            Conditioning::Unconditional => self.unconditional,
        }
    }

    pub fn set(&mut self, c: Conditioning, logits: &'a LogitSet) {
        match c {
            Conditioning::Full => self.full = Some(logits),
            Conditioning::DirectionOnly => self.direction_only = Some(logits),
            Conditioning::VisualOnly => self.visual_only = Some(logits),
            Conditioning::Unconditional => self.unconditional = Some(logits),
        }
    }
}

pub fn combine(mode: GuidanceMode, logits: &ConditionalLogits<'_>, omega: f64, omega2: f64) -> Result<LogitSet> {
    let fetch = |c: Conditioning| {
        logits.get(c).ok_or(Error::MissingLogits {
            mode: mode.name(),
            variant: c.label(),
        })
    };
    let full = fetch(Conditioning::Full)?;
    let mut needed = Vec::with_capacity(4);
    for &c in mode.required() {
        let set = fetch(c)?;
        if !set.same_shape(full) {
            return Err(Error::DimensionMismatch(format!(
                "{} logits are {}x{}, {} logits are {}x{}",
                c.label(),
                set.rows,
                set.vocab,
                Conditioning::Full.label(),
                full.rows,
                full.vocab
            )));
        }
        needed.push(set);
    }

    let mut out = full.clone();
    let zip3 = |a: &LogitSet, b: &LogitSet, scale: f64, out: &mut LogitSet| {
        for ((o, x), y) in out.data.iter_mut().zip(&a.data).zip(&b.data) {
            *o += scale * (x - y);
        }
    };
    match mode {
        GuidanceMode::None => {}
        GuidanceMode::Directional => zip3(needed[1], needed[2], omega, &mut out),
        GuidanceMode::Visual => zip3(needed[1], needed[2], omega, &mut out),
        GuidanceMode::Joint => zip3(full, needed[1], omega, &mut out),
        GuidanceMode::Dual => {
            zip3(needed[1], needed[3], omega, &mut out);
            zip3(needed[2], needed[3], omega2, &mut out);
        }
    }
    Ok(out)
}
