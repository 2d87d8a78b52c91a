use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub type TokenId = u16;

/// Which of the two notations a sequence uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RepresentationKind {
    /// NoteOn / NoteOff events.
    #[serde(rename = "onoff")]
    OnOff,
    /// NoteOn events followed by an explicit Duration token.
    #[serde(rename = "explicit")]
    ExplicitDuration,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 2] =
        [RepresentationKind::OnOff, RepresentationKind::ExplicitDuration];

    pub fn name(self) -> &'static str {
        match self {
            RepresentationKind::OnOff => "onoff",
            RepresentationKind::ExplicitDuration => "explicit",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            RepresentationKind::OnOff => 0,
            RepresentationKind::ExplicitDuration => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(RepresentationKind::OnOff),
            1 => Some(RepresentationKind::ExplicitDuration),
            _ => None,
        }
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepresentationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "onoff" | "on-off" | "original" => Ok(RepresentationKind::OnOff),
            "explicit" | "duration" => Ok(RepresentationKind::ExplicitDuration),
            other => Err(format!("unknown representation '{other}' (expected onoff or explicit)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    NoteOn,
    NoteOff,
    Duration,
    TimeShift,
    Velocity,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::NoteOn => "NOTE_ON",
            Family::NoteOff => "NOTE_OFF",
            Family::Duration => "DURATION",
            Family::TimeShift => "TIME_SHIFT",
            Family::Velocity => "VELOCITY",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "NOTE_ON" => Family::NoteOn,
            "NOTE_OFF" => Family::NoteOff,
            "DURATION" => Family::Duration,
            "TIME_SHIFT" => Family::TimeShift,
            "VELOCITY" => Family::Velocity,
            _ => return None,
        })
    }

    /// Smallest valid index within the family.
    pub fn first_index(self) -> u16 {
        match self {
            Family::TimeShift | Family::Duration => 1,
            _ => 0,
        }
    }
}

/// A decoded token: a family and its index within that family.
///
/// Indices are pitches for NOTE_ON/NOTE_OFF, 10 ms steps (1–100) for
/// TIME_SHIFT, duration bins (1–140) for DURATION and velocity bins (0–31)
/// for VELOCITY.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub family: Family,
    pub index: u16,
}

impl Token {
    pub fn new(family: Family, index: u16) -> Self {
        Self { family, index }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<{}>", self.family.name(), self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyRange {
    pub family: Family,
    pub cardinality: u16,
    pub first_id: TokenId,
}

/// Contiguous id assignment over the families of one notation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    kind: RepresentationKind,
    families: Vec<FamilyRange>,
    size: u16,
}

impl Vocabulary {
    pub fn new(kind: RepresentationKind) -> Self {
        let layout: &[(Family, u16)] = match kind {
            RepresentationKind::OnOff => &[
                (Family::NoteOn, 128),
                (Family::NoteOff, 128),
                (Family::TimeShift, 100),
                (Family::Velocity, 32),
            ],
            RepresentationKind::ExplicitDuration => &[
                (Family::NoteOn, 128),
                (Family::Duration, 140),
                (Family::TimeShift, 100),
                (Family::Velocity, 32),
            ],
        };
        let mut next = 0u16;
        let families = layout
            .iter()
            .map(|&(family, cardinality)| {
                let r = FamilyRange {
                    family,
                    cardinality,
                    first_id: next,
                };
                next += cardinality;
                r
            })
            .collect();
        Self {
            kind,
            families,
            size: next,
        }
    }

    pub fn kind(&self) -> RepresentationKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        usize::from(self.size)
    }

    pub fn families(&self) -> &[FamilyRange] {
        &self.families
    }

    pub fn id(&self, token: Token) -> Option<TokenId> {
        let r = self.families.iter().find(|r| r.family == token.family)?;
        let offset = token.index.checked_sub(token.family.first_index())?;
        (offset < r.cardinality).then(|| r.first_id + offset)
    }

    pub fn token(&self, id: TokenId) -> Option<Token> {
        let r = self
            .families
            .iter()
            .find(|r| id >= r.first_id && id < r.first_id + r.cardinality)?;
        Some(Token::new(r.family, id - r.first_id + r.family.first_index()))
    }

    pub(crate) fn id_of(&self, family: Family, index: u16) -> TokenId {
        self.id(Token::new(family, index))
            .unwrap_or_else(|| panic!("{}<{index}> is outside the {} vocabulary", family.name(), self.kind))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_family_layout() {
        assert_eq!(Vocabulary::new(RepresentationKind::OnOff).size(), 388);
        assert_eq!(Vocabulary::new(RepresentationKind::ExplicitDuration).size(), 400);
    }

    #[test]
    fn ids_are_a_bijection() {
        for kind in RepresentationKind::ALL {
            let v = Vocabulary::new(kind);
            for id in 0..v.size() as u16 {
                let tok = v.token(id).unwrap();
                assert_eq!(v.id(tok), Some(id));
            }
            assert_eq!(v.token(v.size() as u16), None);
        }
    }

    #[test]
    fn layout_is_contiguous_in_family_order() {
        let v = Vocabulary::new(RepresentationKind::ExplicitDuration);
        assert_eq!(v.id(Token::new(Family::NoteOn, 0)), Some(0));
        assert_eq!(v.id(Token::new(Family::Duration, 1)), Some(128));
        assert_eq!(v.id(Token::new(Family::Duration, 140)), Some(267));
        assert_eq!(v.id(Token::new(Family::TimeShift, 1)), Some(268));
        assert_eq!(v.id(Token::new(Family::Velocity, 31)), Some(399));
        let v = Vocabulary::new(RepresentationKind::OnOff);
        assert_eq!(v.id(Token::new(Family::NoteOff, 127)), Some(255));
        assert_eq!(v.id(Token::new(Family::TimeShift, 100)), Some(355));
        assert_eq!(v.id(Token::new(Family::Velocity, 0)), Some(356));
    }

    #[test]
    fn foreign_families_and_out_of_range_indices_have_no_id() {
        let v = Vocabulary::new(RepresentationKind::OnOff);
        assert_eq!(v.id(Token::new(Family::Duration, 1)), None);
        assert_eq!(v.id(Token::new(Family::TimeShift, 0)), None);
        assert_eq!(v.id(Token::new(Family::TimeShift, 101)), None);
        assert_eq!(v.id(Token::new(Family::NoteOn, 128)), None);
    }

    #[test]
    fn kind_parses_from_cli_names() {
        assert_eq!("onoff".parse::<RepresentationKind>(), Ok(RepresentationKind::OnOff));
        assert_eq!(
            "explicit".parse::<RepresentationKind>(),
            Ok(RepresentationKind::ExplicitDuration)
        );
        assert!("remi".parse::<RepresentationKind>().is_err());
    }
}
