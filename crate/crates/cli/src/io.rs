//! File discovery and reading/writing helpers shared by the commands.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use structok_core::smf::{extract_notes, parse_smf, Extraction};
use structok_core::tokenizer::{from_binary, from_text, RepresentationKind, TokenSequence, BINARY_MAGIC};

use crate::CliError;

fn is_midi(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("mid") || e.eq_ignore_ascii_case("midi"))
}

fn walk(dir: &Path, accept: &dyn Fn(&Path) -> bool, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            walk(&p, accept, out)?;
        } else if accept(&p) {
            out.push(p);
        }
    }
    Ok(())
}

/// An input file with the name its outputs are derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Input {
    pub path: PathBuf,
    /// Path relative to the directory it was found in, `/`-separated and
    /// without extension; the file stem for direct file arguments.
    pub name: String,
}

/// Expands files and directories into a list of inputs. Directories are
/// searched recursively for files `accept` allows, in lexicographic order;
/// files named directly are always taken.
pub fn discover(inputs: &[PathBuf], accept: &dyn Fn(&Path) -> bool) -> Result<Vec<Input>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found = Vec::new();
            walk(input, accept, &mut found)?;
            for p in found {
                let rel = p.strip_prefix(input).unwrap_or(&p).with_extension("");
                let name = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/");
                out.push(Input { path: p, name });
            }
        } else {
            let name = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".into());
            out.push(Input {
                path: input.clone(),
                name,
            });
        }
    }
    Ok(out)
}

pub fn discover_midi(inputs: &[PathBuf]) -> Result<Vec<Input>> {
    discover(inputs, &is_midi)
}

/// Flat, unique output file stems for a list of inputs: path separators
/// become `__`, and repeated names get a numeric suffix.
pub fn output_stems(inputs: &[Input]) -> Vec<String> {
    let mut used = HashSet::new();
    inputs
        .iter()
        .map(|i| {
            let base = i.name.replace('/', "__");
            let mut stem = base.clone();
            let mut n = 1;
            while !used.insert(stem.clone()) {
                stem = format!("{base}-{n}");
                n += 1;
            }
            stem
        })
        .collect()
}

pub fn load_midi(path: &Path) -> Result<Extraction> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = parse_smf(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok(extract_notes(&doc))
}

pub fn is_token_binary(bytes: &[u8]) -> bool {
    bytes.starts_with(BINARY_MAGIC)
}

/// Reads a token file in either format. Text files need `kind`.
pub fn read_tokens(path: &Path, kind: Option<RepresentationKind>, source: &str) -> Result<TokenSequence> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if is_token_binary(&bytes) {
        return from_binary(&bytes, source).with_context(|| format!("decoding {}", path.display()));
    }
    let kind = kind.ok_or(CliError::KindRequired)?;
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    from_text(&text, kind, source).with_context(|| format!("reading tokens from {}", path.display()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    write_bytes(path, json.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn write_csv<H, R>(path: &Path, header: &[H], rows: &[R]) -> Result<()>
where
    H: AsRef<str>,
    R: AsRef<[String]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for r in rows {
        w.write_record(r.as_ref())?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
    write_bytes(path, &bytes)
}
