//! Line-oriented text formats for basis files, catalogs and matrix dumps.
//!
//! Basis files:
//! ```text
//! space level=<M> weight=<k|k1,k2,..> group=<g0|g1> char=<spec|none> trunc=<B> coeffring=int
//! a_1,a_2,...,a_B
//! ...
//! ```
//! A weight list must have one entry per row. Catalog files use the leading
//! keyword `catalog` and prefix each row with `<label>:`; they may declare
//! `coeffring=nf:c0,c1,..,1` with each coefficient written as `;`-joined
//! rationals in the power basis. Parse errors carry line numbers.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::character::{CharError, DirichletCharacter};
use crate::hecke::{HeckeError, SpaceBasis};
use crate::linalg::int::IntMatrix;
use crate::numfield::{NfElem, NfError, NfPoly};
use crate::qexp::{Group, QExpansion, WeightTag};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}:{line}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("could not read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Nf(#[from] NfError),
}

fn syntax(path: &str, line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

struct Header {
    level: u64,
    weights: WeightSpec,
    group: Group,
    character: Option<DirichletCharacter>,
    trunc: usize,
    coeffring: CoeffRing,
}

enum WeightSpec {
    Single(u32),
    PerRow(Vec<u32>),
}

pub enum CoeffRing {
    Int,
    Nf(Arc<NfPoly>),
}

fn parse_header(
    path: &str,
    lineno: usize,
    line: &str,
    keyword: &str,
) -> Result<Header, ParseError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.is_empty() || toks[0] != keyword {
        return Err(syntax(
            path,
            lineno,
            format!("expected leading '{keyword}'"),
        ));
    }
    let mut level = None;
    let mut weights = None;
    let mut group = None;
    let mut character: Option<String> = None;
    let mut trunc = None;
    let mut coeffring = CoeffRing::Int;
    for t in &toks[1..] {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| syntax(path, lineno, format!("expected key=value, got '{t}'")))?;
        match k {
            "level" => level = Some(v.parse().map_err(|_| syntax(path, lineno, "bad level"))?),
            "weight" => {
                let parts: Result<Vec<u32>, _> = v.split(',').map(str::parse).collect();
                let parts = parts.map_err(|_| syntax(path, lineno, "bad weight"))?;
                weights = Some(if parts.len() == 1 {
                    WeightSpec::Single(parts[0])
                } else {
                    WeightSpec::PerRow(parts)
                });
            }
            "group" => {
                group = Some(match v {
                    "g0" => Group::Gamma0,
                    "g1" => Group::Gamma1,
                    _ => return Err(syntax(path, lineno, format!("unknown group '{v}'"))),
                })
            }
            "char" => character = Some(v.to_string()),
            "trunc" => trunc = Some(v.parse().map_err(|_| syntax(path, lineno, "bad trunc"))?),
            "coeffring" => {
                if v == "int" {
                    coeffring = CoeffRing::Int;
                } else if let Some(spec) = v.strip_prefix("nf:") {
                    let cs: Result<Vec<i64>, _> = spec.split(',').map(str::parse).collect();
                    let cs = cs.map_err(|_| syntax(path, lineno, "bad nf polynomial"))?;
                    coeffring = CoeffRing::Nf(
                        NfPoly::from_i64(&cs).map_err(|e| syntax(path, lineno, e.to_string()))?,
                    );
                } else {
                    return Err(syntax(path, lineno, format!("unknown coeffring '{v}'")));
                }
            }
            _ => return Err(syntax(path, lineno, format!("unknown header key '{k}'"))),
        }
    }
    let level = level.ok_or_else(|| syntax(path, lineno, "missing level"))?;
    let weights = weights.ok_or_else(|| syntax(path, lineno, "missing weight"))?;
    let group = group.ok_or_else(|| syntax(path, lineno, "missing group"))?;
    let trunc = trunc.ok_or_else(|| syntax(path, lineno, "missing trunc"))?;
    let character = match character.as_deref() {
        None | Some("none") => None,
        Some(spec) => DirichletCharacter::parse(spec, Some(level))?,
    };
    Ok(Header {
        level,
        weights,
        group,
        character,
        trunc,
        coeffring,
    })
}

fn parse_int_row(
    path: &str,
    lineno: usize,
    line: &str,
    trunc: usize,
) -> Result<Vec<BigInt>, ParseError> {
    let mut out = Vec::with_capacity(trunc);
    for (i, tok) in line.split(',').enumerate() {
        let c: BigInt = tok
            .trim()
            .parse()
            .map_err(|_| syntax(path, lineno, format!("bad integer in column {}", i + 1)))?;
        out.push(c);
    }
    if out.len() != trunc {
        return Err(syntax(
            path,
            lineno,
            format!(
                "row has {} coefficients, header declares trunc={}",
                out.len(),
                trunc
            ),
        ));
    }
    Ok(out)
}

/// Parse a space/basis file into a validated [`SpaceBasis`] (rank checked,
/// lattice saturated or repaired with a warning).
pub fn parse_space_str(path_label: &str, text: &str) -> Result<SpaceBasis, ParseError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| syntax(path_label, 1, "empty file"))?;
    let header = parse_header(path_label, hline + 1, htext, "space")?;
    if let CoeffRing::Nf(_) = header.coeffring {
        return Err(syntax(
            path_label,
            hline + 1,
            "space bases over number fields are not supported; use integer bases \
             (catalogs may carry number-field coefficients)",
        ));
    }
    let mut rows = Vec::new();
    for (ln, line) in lines {
        rows.push(parse_int_row(
            path_label,
            ln + 1,
            line.trim(),
            header.trunc,
        )?);
    }
    if rows.is_empty() {
        return Err(syntax(path_label, hline + 1, "no basis rows"));
    }
    let weights = match header.weights {
        WeightSpec::Single(k) => vec![k; rows.len()],
        WeightSpec::PerRow(ws) => {
            if ws.len() != rows.len() {
                return Err(syntax(
                    path_label,
                    hline + 1,
                    format!(
                        "weight list has {} entries for {} rows",
                        ws.len(),
                        rows.len()
                    ),
                ));
            }
            ws
        }
    };
    Ok(SpaceBasis::new(
        header.level,
        header.group,
        header.character,
        weights,
        rows,
    )?)
}

pub fn parse_space_file(path: &Path) -> Result<SpaceBasis, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_space_str(&path.display().to_string(), &text)
}

/// Parse a one-row space file as a bare q-expansion. Unlike
/// [`parse_space_file`] this performs no lattice validation or saturation
/// repair: the row is taken verbatim as an expansion.
pub fn parse_form_file(path: &Path) -> Result<QExpansion<BigInt>, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let label = path.display().to_string();
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| syntax(&label, 1, "empty file"))?;
    let header = parse_header(&label, hline + 1, htext, "space")?;
    if let CoeffRing::Nf(_) = header.coeffring {
        return Err(syntax(
            &label,
            hline + 1,
            "form files carry integer coefficients",
        ));
    }
    let weight = match header.weights {
        WeightSpec::Single(k) => k,
        WeightSpec::PerRow(_) => {
            return Err(syntax(
                &label,
                hline + 1,
                "a form file declares a single weight",
            ))
        }
    };
    let mut rows = Vec::new();
    for (ln, line) in lines {
        rows.push(parse_int_row(&label, ln + 1, line.trim(), header.trunc)?);
    }
    if rows.len() != 1 {
        return Err(syntax(&label, hline + 1, "expected exactly one row"));
    }
    Ok(QExpansion::cusp_form(
        header.level,
        weight,
        header.group,
        header.character,
        rows.pop().unwrap(),
    ))
}

pub fn write_space_file(
    path: &Path,
    level: u64,
    weights: &[u32],
    group: Group,
    char_spec: &str,
    rows: &[Vec<BigInt>],
) -> std::io::Result<()> {
    let trunc = rows[0].len();
    let wspec = if weights.iter().all(|&w| w == weights[0]) {
        weights[0].to_string()
    } else {
        weights
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = format!(
        "space level={level} weight={wspec} group={group} char={char_spec} trunc={trunc} coeffring=int\n"
    );
    for r in rows {
        out.push_str(
            &r.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    fs::write(path, out)
}

/// A catalog of characteristic-zero normalized eigenforms with labels.
pub enum CatalogEntry {
    Int(String, QExpansion<BigInt>),
    Nf(String, QExpansion<NfElem>),
}

impl CatalogEntry {
    pub fn label(&self) -> &str {
        match self {
            CatalogEntry::Int(l, _) | CatalogEntry::Nf(l, _) => l,
        }
    }

    pub fn trunc(&self) -> usize {
        match self {
            CatalogEntry::Int(_, q) => q.trunc(),
            CatalogEntry::Nf(_, q) => q.trunc(),
        }
    }
}

pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub digest: String,
}

pub fn parse_catalog_str(path_label: &str, text: &str) -> Result<Catalog, ParseError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| syntax(path_label, 1, "empty file"))?;
    let header = parse_header(path_label, hline + 1, htext, "catalog")?;
    let mut entries = Vec::new();
    for (ln, line) in lines {
        let (label, rest) = line
            .trim()
            .split_once(':')
            .ok_or_else(|| syntax(path_label, ln + 1, "expected '<label>:<coefficients>'"))?;
        let weight = match header.weights {
            WeightSpec::Single(k) => k,
            WeightSpec::PerRow(_) => {
                return Err(syntax(
                    path_label,
                    hline + 1,
                    "catalogs use a single weight",
                ))
            }
        };
        match &header.coeffring {
            CoeffRing::Int => {
                let coeffs = parse_int_row(path_label, ln + 1, rest, header.trunc)?;
                entries.push(CatalogEntry::Int(
                    label.to_string(),
                    QExpansion::cusp_form(
                        header.level,
                        weight,
                        header.group,
                        header.character.clone(),
                        coeffs,
                    ),
                ));
            }
            CoeffRing::Nf(poly) => {
                let mut coeffs = Vec::new();
                for (i, tok) in rest.split(',').enumerate() {
                    let comps: Result<Vec<BigRational>, _> = tok
                        .trim()
                        .split(';')
                        .map(|c| {
                            c.parse::<BigRational>()
                                .or_else(|_| c.parse::<BigInt>().map(BigRational::from))
                        })
                        .collect();
                    let mut comps = comps.map_err(|_| {
                        syntax(
                            path_label,
                            ln + 1,
                            format!("bad number-field entry in column {}", i + 1),
                        )
                    })?;
                    comps.resize(poly.degree(), BigRational::from(BigInt::from(0)));
                    coeffs.push(
                        NfElem::from_coords(poly, comps)
                            .map_err(|e| syntax(path_label, ln + 1, e.to_string()))?,
                    );
                }
                if coeffs.len() != header.trunc {
                    return Err(syntax(
                        path_label,
                        ln + 1,
                        format!(
                            "row has {} coefficients, header declares trunc={}",
                            coeffs.len(),
                            header.trunc
                        ),
                    ));
                }
                let zero = NfElem::zero(poly);
                entries.push(CatalogEntry::Nf(
                    label.to_string(),
                    QExpansion {
                        level: header.level,
                        weight: WeightTag::Single(weight),
                        group: header.group,
                        character: header.character.clone(),
                        constant: zero,
                        coeffs,
                        prime_choice: None,
                    },
                ));
            }
        }
    }
    let digest = digest_str(text);
    Ok(Catalog { entries, digest })
}

pub fn parse_catalog_file(path: &Path) -> Result<Catalog, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_catalog_str(&path.display().to_string(), &text)
}

pub fn write_catalog_file(
    path: &Path,
    level: u64,
    weight: u32,
    group: Group,
    char_spec: &str,
    entries: &[(String, Vec<BigInt>)],
) -> std::io::Result<()> {
    let trunc = entries[0].1.len();
    let mut out = format!(
        "catalog level={level} weight={weight} group={group} char={char_spec} trunc={trunc} coeffring=int\n"
    );
    for (label, coeffs) in entries {
        out.push_str(label);
        out.push(':');
        out.push_str(
            &coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    fs::write(path, out)
}

/// Debug matrix dump: `matrix rows=<r> cols=<c>` then one row per line,
/// space separated.
pub fn write_matrix_str(m: &IntMatrix) -> String {
    let mut out = format!("matrix rows={} cols={}\n", m.rows, m.cols);
    for i in 0..m.rows {
        out.push_str(
            &(0..m.cols)
                .map(|j| m.get(i, j).to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push('\n');
    }
    out
}

pub fn parse_matrix_str(path_label: &str, text: &str) -> Result<IntMatrix, ParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| syntax(path_label, 1, "empty matrix"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"matrix") {
        return Err(syntax(path_label, 1, "expected leading 'matrix'"));
    }
    let mut rows_n = None;
    let mut cols_n = None;
    for t in &toks[1..] {
        if let Some((k, v)) = t.split_once('=') {
            match k {
                "rows" => rows_n = v.parse().ok(),
                "cols" => cols_n = v.parse().ok(),
                _ => {}
            }
        }
    }
    let (rn, cn): (usize, usize) = (
        rows_n.ok_or_else(|| syntax(path_label, 1, "missing rows"))?,
        cols_n.ok_or_else(|| syntax(path_label, 1, "missing cols"))?,
    );
    let mut rows = Vec::with_capacity(rn);
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<BigInt>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| syntax(path_label, ln + 1, "bad integer"))?;
        if row.len() != cn {
            return Err(syntax(path_label, ln + 1, "wrong row length"));
        }
        rows.push(row);
    }
    if rows.len() != rn {
        return Err(syntax(path_label, 1, "wrong number of rows"));
    }
    Ok(IntMatrix::from_rows(rows))
}

/// Hex SHA-256 of a text (input digests for reports, cache keys).
pub fn digest_str(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<String, ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(digest_str(&text))
}
