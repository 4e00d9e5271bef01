use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels that index the rows and columns of a comparison grid.
pub trait ClassLabel: Copy + Eq + fmt::Display + fmt::Debug + Send + Sync + 'static {
    fn all() -> &'static [Self];
    fn index(self) -> usize;
}

/// Fine misconception classification. Declaration order is the canonical
/// order used for every tie-break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FineClass {
    Ate,
    Amo,
    Mis,
    Au,
    Lwh,
    Lze,
    Lrv,
    Lu,
    Sdf,
    Srn,
    Su,
    Un,
}

impl FineClass {
    pub const COUNT: usize = 12;
    pub const ALL: [FineClass; 12] = [
        FineClass::Ate,
        FineClass::Amo,
        FineClass::Mis,
        FineClass::Au,
        FineClass::Lwh,
        FineClass::Lze,
        FineClass::Lrv,
        FineClass::Lu,
        FineClass::Sdf,
        FineClass::Srn,
        FineClass::Su,
        FineClass::Un,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            FineClass::Ate => "ATE",
            FineClass::Amo => "AMO",
            FineClass::Mis => "MIS",
            FineClass::Au => "AU",
            FineClass::Lwh => "LWH",
            FineClass::Lze => "LZE",
            FineClass::Lrv => "LRV",
            FineClass::Lu => "LU",
            FineClass::Sdf => "SDF",
            FineClass::Srn => "SRN",
            FineClass::Su => "SU",
            FineClass::Un => "UN",
        }
    }

    /// The LU/SU/AU/UN classes, which the expert rules can only pin down on
    /// types 1 and 2 (or not at all).
    pub fn is_unspecific(self) -> bool {
        matches!(self, FineClass::Au | FineClass::Lu | FineClass::Su | FineClass::Un)
    }
}

impl fmt::Display for FineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FineClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        FineClass::ALL
            .into_iter()
            .find(|c| c.label() == up)
            .ok_or_else(|| Error::input(format!("unknown fine class `{s}`")))
    }
}

impl ClassLabel for FineClass {
    fn all() -> &'static [Self] {
        &Self::ALL
    }
    fn index(self) -> usize {
        self as usize
    }
}

/// Coarse grouping: longer-is-larger, shorter-is-larger, apparent expert, other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoarseClass {
    L,
    S,
    A,
    #[serde(rename = "UN")]
    Un,
}

impl CoarseClass {
    pub const ALL: [CoarseClass; 4] = [CoarseClass::L, CoarseClass::S, CoarseClass::A, CoarseClass::Un];

    pub fn label(self) -> &'static str {
        match self {
            CoarseClass::L => "L",
            CoarseClass::S => "S",
            CoarseClass::A => "A",
            CoarseClass::Un => "UN",
        }
    }
}

impl fmt::Display for CoarseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CoarseClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        CoarseClass::ALL
            .into_iter()
            .find(|c| c.label() == up)
            .ok_or_else(|| Error::input(format!("unknown coarse class `{s}`")))
    }
}

impl ClassLabel for CoarseClass {
    fn all() -> &'static [Self] {
        &Self::ALL
    }
    fn index(self) -> usize {
        self as usize
    }
}

/// What the experts expect a class to score on an item type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Expectation {
    High,
    Low,
    /// `.` in the expert table: any performance level.
    Unknown,
}

impl Expectation {
    pub fn symbol(self) -> char {
        match self {
            Expectation::High => 'H',
            Expectation::Low => 'L',
            Expectation::Unknown => '.',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'H' | 'h' => Some(Expectation::High),
            'L' | 'l' => Some(Expectation::Low),
            '.' => Some(Expectation::Unknown),
            _ => None,
        }
    }
}

/// Aggregated performance on one item type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    High,
    Medium,
    Low,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::High, Band::Medium, Band::Low];

    pub fn symbol(self) -> char {
        match self {
            Band::High => 'H',
            Band::Medium => 'M',
            Band::Low => 'L',
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Band::High => "H",
            Band::Medium => "M",
            Band::Low => "L",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Bands a correct-count to High/Medium/Low.
///
/// Low is 0 or 1 correct and High is all but at most one correct, so five
/// items split {0,1}/{2,3}/{4,5}, four items {0,1}/{2}/{3,4}, and three items
/// have no Medium at all. Types with one or two items band 0 as Low and a full
/// score as High.
pub fn band_of(score: usize, n_items: usize) -> Result<Band> {
    if n_items == 0 {
        return Err(Error::input("item type with zero items"));
    }
    if score > n_items {
        return Err(Error::input(format!("score {score} exceeds {n_items} items")));
    }
    let band = if n_items <= 2 {
        match score {
            0 => Band::Low,
            s if s == n_items => Band::High,
            _ => Band::Medium,
        }
    } else if score <= 1 {
        Band::Low
    } else if score + 1 >= n_items {
        Band::High
    } else {
        Band::Medium
    };
    Ok(band)
}

/// Value scheme of the item-type nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueScheme {
    /// States `0..=N`, the number of items answered correctly.
    Count,
    /// States H/M/L (Medium dropped where unreachable).
    Band,
}

impl FromStr for ValueScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "count" | "0-n" | "counts" => Ok(ValueScheme::Count),
            "band" | "h/m/l" | "hml" | "bands" => Ok(ValueScheme::Band),
            other => Err(Error::input(format!("unknown value scheme `{other}`"))),
        }
    }
}

impl fmt::Display for ValueScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueScheme::Count => "count",
            ValueScheme::Band => "band",
        })
    }
}

/// Per-item probability of a careless mistake.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Pcm(f64);

impl Pcm {
    pub const LOW: Pcm = Pcm(0.03);
    pub const MID: Pcm = Pcm(0.11);
    pub const HIGH: Pcm = Pcm(0.22);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Pcm(p))
        } else {
            Err(Error::input(format!("pcm {p} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Pcm {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Pcm::new(p)
    }
}

impl From<Pcm> for f64 {
    fn from(p: Pcm) -> f64 {
        p.0
    }
}

impl FromStr for Pcm {
    type Err = Error;

    /// Accepts a preset name (`low`, `mid`, `high`) or a number.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(Pcm::LOW),
            "mid" => Ok(Pcm::MID),
            "high" => Ok(Pcm::HIGH),
            other => other.parse::<f64>().map_err(|_| Error::input(format!("bad pcm `{s}`"))).and_then(Pcm::new),
        }
    }
}

impl fmt::Display for Pcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
