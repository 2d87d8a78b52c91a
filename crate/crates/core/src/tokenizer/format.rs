//! Token file formats.
//!
//! Text: one `FAMILY<index>` per line, UTF-8. Binary: the magic `STOK`, a
//! version byte (1), a representation byte (0 = onoff, 1 = explicit), then
//! each id as a little-endian `u16` until end of file.

use super::vocab::{Family, RepresentationKind, Token, Vocabulary};
use super::{TokenError, TokenSequence};

pub const BINARY_MAGIC: &[u8; 4] = b"STOK";
pub const BINARY_VERSION: u8 = 1;

pub fn to_text(seq: &TokenSequence) -> String {
    let vocab = Vocabulary::new(seq.kind);
    let mut out = String::with_capacity(seq.ids.len() * 12);
    for &id in &seq.ids {
        match vocab.token(id) {
            Some(tok) => out.push_str(&tok.to_string()),
            None => out.push_str(&format!("INVALID<{id}>")),
        }
        out.push('\n');
    }
    out
}

fn parse_line(line: &str) -> Option<Token> {
    let (name, rest) = line.split_once('<')?;
    let index = rest.strip_suffix('>')?.parse().ok()?;
    Some(Token::new(Family::from_name(name)?, index))
}

/// Parses the text format. Blank lines are skipped.
pub fn from_text(
    text: &str,
    kind: RepresentationKind,
    source: impl Into<String>,
) -> Result<TokenSequence, TokenError> {
    let vocab = Vocabulary::new(kind);
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let id = parse_line(line)
            .and_then(|tok| vocab.id(tok))
            .ok_or_else(|| TokenError::BadTokenText {
                line: i + 1,
                text: line.to_string(),
            })?;
        ids.push(id);
    }
    Ok(TokenSequence {
        kind,
        ids,
        source: source.into(),
    })
}

pub fn to_binary(seq: &TokenSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(6 + seq.ids.len() * 2);
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    out.push(seq.kind.code());
    for &id in &seq.ids {
        out.extend_from_slice(&id.to_le_bytes());
    }
    out
}

pub fn from_binary(bytes: &[u8], source: impl Into<String>) -> Result<TokenSequence, TokenError> {
    if bytes.len() < 6 || &bytes[..4] != BINARY_MAGIC {
        return Err(TokenError::BadMagic);
    }
    if bytes[4] != BINARY_VERSION {
        return Err(TokenError::UnsupportedVersion(bytes[4]));
    }
    let kind = RepresentationKind::from_code(bytes[5]).ok_or(TokenError::UnknownKind(bytes[5]))?;
    let body = &bytes[6..];
    if body.len() % 2 != 0 {
        return Err(TokenError::TruncatedId);
    }
    let size = Vocabulary::new(kind).size();
    let ids = body
        .chunks_exact(2)
        .map(|c| {
            let id = u16::from_le_bytes([c[0], c[1]]);
            if usize::from(id) < size {
                Ok(id)
            } else {
                Err(TokenError::IdOutOfRange { id, size })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TokenSequence {
        kind,
        ids,
        source: source.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_lines_look_like_family_and_index() {
        let v = Vocabulary::new(RepresentationKind::OnOff);
        let seq = TokenSequence {
            kind: RepresentationKind::OnOff,
            ids: vec![
                v.id(Token::new(Family::Velocity, 20)).unwrap(),
                v.id(Token::new(Family::NoteOn, 60)).unwrap(),
                v.id(Token::new(Family::TimeShift, 50)).unwrap(),
            ],
            source: String::new(),
        };
        assert_eq!(to_text(&seq), "VELOCITY<20>\nNOTE_ON<60>\nTIME_SHIFT<50>\n");
    }

    #[test]
    fn bad_text_reports_line() {
        let err = from_text("NOTE_ON<60>\n\nDURATION<5>\n", RepresentationKind::OnOff, "").unwrap_err();
        assert_eq!(
            err,
            TokenError::BadTokenText {
                line: 3,
                text: "DURATION<5>".into()
            }
        );
        assert!(from_text("NOTE_ON 60", RepresentationKind::OnOff, "").is_err());
    }

    #[test]
    fn binary_header_layout() {
        let seq = TokenSequence {
            kind: RepresentationKind::ExplicitDuration,
            ids: vec![0x0102, 7],
            source: String::new(),
        };
        assert_eq!(to_binary(&seq), b"STOK\x01\x01\x02\x01\x07\x00");
    }

    #[test]
    fn binary_errors() {
        assert_eq!(from_binary(b"STOP\x01\x00", ""), Err(TokenError::BadMagic));
        assert_eq!(from_binary(b"STOK\x02\x00", ""), Err(TokenError::UnsupportedVersion(2)));
        assert_eq!(from_binary(b"STOK\x01\x07", ""), Err(TokenError::UnknownKind(7)));
        assert_eq!(from_binary(b"STOK\x01\x00\x01", ""), Err(TokenError::TruncatedId));
        assert_eq!(
            from_binary(b"STOK\x01\x00\x84\x01", ""),
            Err(TokenError::IdOutOfRange { id: 388, size: 388 })
        );
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(explicit in any::<bool>(), raw in proptest::collection::vec(0u16..388, 0..200)) {
            let kind = if explicit { RepresentationKind::ExplicitDuration } else { RepresentationKind::OnOff };
            let seq = TokenSequence { kind, ids: raw, source: "s".into() };
            prop_assert_eq!(from_binary(&to_binary(&seq), "s").unwrap(), seq.clone());
            prop_assert_eq!(from_text(&to_text(&seq), kind, "s").unwrap(), seq);
        }
    }
}
