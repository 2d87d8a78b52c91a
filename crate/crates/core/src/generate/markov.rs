use std::collections::HashMap;

use super::{GenerateError, GeneratorModel};
use crate::tokenizer::{RepresentationKind, TokenId, TokenSequence, Vocabulary};

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const MODEL_MAGIC: &[u8; 4] = b"SMKV";
pub const MODEL_VERSION: u8 = 1;

#[derive(Debug, Clone, Default, PartialEq)]
struct NextCounts {
    total: u64,
    next: HashMap<TokenId, u64>,
}

/// Additively smoothed k-gram model with backoff.
///
/// Counts are kept for every context length from 0 (unigram over tokens
/// that follow something) to k. A query uses the longest suffix of the
/// context that was seen in training, giving `(count + alpha) / (total +
/// alpha * V)`; with nothing seen at any order the distribution is uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    kind: RepresentationKind,
    order: usize,
    alpha: f64,
    vocab_size: usize,
    table: HashMap<Vec<TokenId>, NextCounts>,
}

/// Trains on sequences of one notation using its full vocabulary.
pub fn train_markov(corpus: &[TokenSequence], order: usize, alpha: f64) -> Result<MarkovModel, GenerateError> {
    let kind = corpus.first().ok_or(GenerateError::EmptyCorpus)?.kind;
    if corpus.iter().any(|s| s.kind != kind) {
        return Err(GenerateError::MixedKinds);
    }
    MarkovModel::train_ids(
        kind,
        Vocabulary::new(kind).size(),
        order,
        alpha,
        corpus.iter().map(|s| s.ids.as_slice()),
    )
}

impl MarkovModel {
    /// Trains on raw id sequences over a vocabulary of `vocab_size` ids.
    pub fn train_ids<'a>(
        kind: RepresentationKind,
        vocab_size: usize,
        order: usize,
        alpha: f64,
        sequences: impl IntoIterator<Item = &'a [TokenId]>,
    ) -> Result<Self, GenerateError> {
        if order == 0 || order > usize::from(u8::MAX) {
            return Err(GenerateError::InvalidConfig(format!("order must be 1..=255, got {order}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(GenerateError::InvalidConfig(format!("smoothing must be positive, got {alpha}")));
        }
        let mut table: HashMap<Vec<TokenId>, NextCounts> = HashMap::new();
        let mut any = false;
        for seq in sequences {
            any = true;
            for i in 1..seq.len() {
                let target = seq[i];
                for len in 0..=order.min(i) {
                    let entry = table.entry(seq[i - len..i].to_vec()).or_default();
                    entry.total += 1;
                    *entry.next.entry(target).or_default() += 1;
                }
            }
        }
        if !any {
            return Err(GenerateError::EmptyCorpus);
        }
        Ok(Self {
            kind,
            order,
            alpha,
            vocab_size,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Count of `next` after exactly `context`, 0 when unseen.
    pub fn count(&self, context: &[TokenId], next: TokenId) -> u64 {
        self.table
            .get(context)
            .and_then(|c| c.next.get(&next).copied())
            .unwrap_or(0)
    }

    /// Number of contexts (of any order) seen in training.
    pub fn context_count(&self) -> usize {
        self.table.len()
    }

    fn sorted_entries(&self) -> Vec<(&Vec<TokenId>, &NextCounts)> {
        let mut entries: Vec<_> = self.table.iter().collect();
        entries.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        entries
    }

    /// Serializes to the versioned "SMKV" format: magic, version, kind code,
    /// order, alpha (f64), vocabulary size (u32), entry count (u32), then per
    /// context its length, ids, and sorted (id, count) pairs. All integers
    /// little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MODEL_MAGIC);
        out.push(MODEL_VERSION);
        out.push(self.kind.code());
        out.push(self.order as u8);
        out.extend_from_slice(&self.alpha.to_le_bytes());
        out.extend_from_slice(&(self.vocab_size as u32).to_le_bytes());
        let entries = self.sorted_entries();
        out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
        for (ctx, counts) in entries {
            out.push(ctx.len() as u8);
            for id in ctx {
                out.extend_from_slice(&id.to_le_bytes());
            }
            let mut next: Vec<(&TokenId, &u64)> = counts.next.iter().collect();
            next.sort();
            out.extend_from_slice(&(next.len() as u32).to_le_bytes());
            for (id, count) in next {
                out.extend_from_slice(&id.to_le_bytes());
                out.extend_from_slice(&count.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GenerateError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MODEL_MAGIC {
            return Err(GenerateError::BadMagic);
        }
        let version = r.u8()?;
        if version != MODEL_VERSION {
            return Err(GenerateError::UnsupportedVersion(version));
        }
        let kind = RepresentationKind::from_code(r.u8()?).ok_or(GenerateError::Malformed)?;
        let order = usize::from(r.u8()?);
        let alpha = f64::from_le_bytes(r.take(8)?.try_into().map_err(|_| GenerateError::Malformed)?);
        let vocab_size = r.u32()? as usize;
        if order == 0 || !(alpha > 0.0) || vocab_size == 0 {
            return Err(GenerateError::Malformed);
        }
        let entries = r.u32()?;
        let mut table = HashMap::new();
        for _ in 0..entries {
            let len = usize::from(r.u8()?);
            let ctx = (0..len).map(|_| r.u16()).collect::<Result<Vec<_>, _>>()?;
            let n = r.u32()?;
            let mut counts = NextCounts::default();
            for _ in 0..n {
                let id = r.u16()?;
                let c = r.u64()?;
                if usize::from(id) >= vocab_size {
                    return Err(GenerateError::Malformed);
                }
                counts.total += c;
                counts.next.insert(id, c);
            }
            table.insert(ctx, counts);
        }
        if r.pos != bytes.len() {
            return Err(GenerateError::Malformed);
        }
        Ok(Self {
            kind,
            order,
            alpha,
            vocab_size,
            table,
        })
    }
}

impl GeneratorModel for MarkovModel {
    fn kind(&self) -> RepresentationKind {
        self.kind
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn distribution(&self, context: &[TokenId]) -> Vec<f64> {
        let v = self.vocab_size;
        let longest = self.order.min(context.len());
        let seen = (0..=longest)
            .rev()
            .find_map(|len| self.table.get(&context[context.len() - len..]));
        match seen {
            Some(counts) => {
                let denom = counts.total as f64 + self.alpha * v as f64;
                let mut p = vec![self.alpha / denom; v];
                for (&id, &c) in &counts.next {
                    p[usize::from(id)] = (c as f64 + self.alpha) / denom;
                }
                p
            }
            None => vec![1.0 / v as f64; v],
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GenerateError> {
        let end = self.pos.checked_add(n).ok_or(GenerateError::Malformed)?;
        let s = self.bytes.get(self.pos..end).ok_or(GenerateError::Malformed)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, GenerateError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, GenerateError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, GenerateError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u64(&mut self) -> Result<u64, GenerateError> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().map_err(|_| GenerateError::Malformed)?))
    }
}
