//! Reading and writing arrays.
//!
//! Cache-level arrays have a plain text form: one line per row, cells
//! separated by whitespace, each cell a `*` or a 1-based symbol id. Both
//! array kinds also have a JSON form:
//!
//! ```json
//! {
//!   "rows": 3, "cols": 6,
//!   "grid": [["*", 3, 5, "*", 1, 2], ...],
//!   "row_labels": [...], "col_labels": [...],
//!   "user_to_cache": [1, 1, 2, ...]
//! }
//! ```
//!
//! Grid cells are `"*"`, a 1-based symbol id, or a `[symbol, replica]` pair;
//! a bare id in a user-level file means replica 1. The labels are optional;
//! `user_to_cache` (1-based) is present exactly when the file holds a
//! user-level array. All ids are 1-based on disk and 0-based in memory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpda::{GCell, GeneralizedPda};
use crate::pda::{Cell, Pda};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawCell {
    Star(String),
    Symbol(u64),
    Pair([u64; 2]),
}

#[derive(Debug, Serialize, Deserialize)]
struct ArrayFile {
    rows: usize,
    cols: usize,
    grid: Vec<Vec<RawCell>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    user_to_cache: Option<Vec<u64>>,
}

/// Either kind of array, as found in a file.
#[derive(Debug, Clone)]
pub enum LoadedArray {
    Cache(Pda),
    User(GeneralizedPda),
}

// ---- text format -------------------------------------------------------

/// Parse the text form of a cache-level array. Blank lines are ignored.
pub fn parse_pda_text(text: &str) -> Result<Pda> {
    let mut grid = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<Cell> = line
            .split_whitespace()
            .map(|tok| match tok {
                "*" => Ok(Cell::Star),
                _ => match tok.parse::<usize>() {
                    Ok(0) => Err(Error::Parse("symbol ids are 1-based, got 0".into())),
                    Ok(n) => Ok(Cell::Symbol(n - 1)),
                    Err(_) => Err(Error::Parse(format!("unrecognized cell {tok:?}"))),
                },
            })
            .collect::<Result<_>>()?;
        grid.push(row);
    }
    Pda::from_grid(grid).map_err(Error::Invalid)
}

pub fn render_pda_text(pda: &Pda) -> String {
    pda.grid_rows()
        .iter()
        .map(|row| {
            row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Display form of a user-level array (not a parseable input format).
pub fn render_gpda_text(gpda: &GeneralizedPda) -> String {
    gpda.grid_rows()
        .iter()
        .map(|row| {
            row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

// ---- JSON format ---------------------------------------------------------

fn raw_to_cell(raw: &RawCell) -> Result<Cell> {
    match raw {
        RawCell::Star(s) if s == "*" => Ok(Cell::Star),
        RawCell::Star(s) => Err(Error::Parse(format!("unrecognized cell {s:?}"))),
        RawCell::Symbol(0) => Err(Error::Parse("symbol ids are 1-based, got 0".into())),
        RawCell::Symbol(n) => Ok(Cell::Symbol(*n as usize - 1)),
        RawCell::Pair(_) => {
            Err(Error::Parse("replicated entry in a cache-level array".into()))
        }
    }
}

fn raw_to_gcell(raw: &RawCell) -> Result<GCell> {
    match raw {
        RawCell::Star(s) if s == "*" => Ok(GCell::Star),
        RawCell::Star(s) => Err(Error::Parse(format!("unrecognized cell {s:?}"))),
        RawCell::Symbol(0) => Err(Error::Parse("symbol ids are 1-based, got 0".into())),
        RawCell::Symbol(n) => Ok(GCell::Pair(*n as usize - 1, 1)),
        RawCell::Pair([0, _]) => Err(Error::Parse("symbol ids are 1-based, got 0".into())),
        RawCell::Pair([s, i]) => Ok(GCell::Pair(*s as usize - 1, *i as usize)),
    }
}

fn check_declared_shape(file: &ArrayFile) -> Result<()> {
    if file.grid.len() != file.rows
        || file.grid.iter().any(|row| row.len() != file.cols)
    {
        return Err(Error::Parse(format!(
            "grid does not match the declared {}x{} shape",
            file.rows, file.cols
        )));
    }
    Ok(())
}

fn file_from_pda(pda: &Pda) -> ArrayFile {
    ArrayFile {
        rows: pda.rows(),
        cols: pda.cols(),
        grid: pda
            .grid_rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Star => RawCell::Star("*".into()),
                        Cell::Symbol(s) => RawCell::Symbol(*s as u64 + 1),
                    })
                    .collect()
            })
            .collect(),
        row_labels: pda.row_labels().map(<[String]>::to_vec),
        col_labels: pda.col_labels().map(<[String]>::to_vec),
        user_to_cache: None,
    }
}

fn file_from_gpda(gpda: &GeneralizedPda) -> ArrayFile {
    ArrayFile {
        rows: gpda.rows(),
        cols: gpda.cols(),
        grid: gpda
            .grid_rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        GCell::Star => RawCell::Star("*".into()),
                        GCell::Pair(s, i) => RawCell::Pair([*s as u64 + 1, *i as u64]),
                    })
                    .collect()
            })
            .collect(),
        row_labels: gpda.row_labels().map(<[String]>::to_vec),
        col_labels: gpda.col_labels().map(<[String]>::to_vec),
        user_to_cache: Some(gpda.user_to_cache().iter().map(|&c| c as u64 + 1).collect()),
    }
}

fn pda_from_file(file: &ArrayFile) -> Result<Pda> {
    check_declared_shape(file)?;
    let grid = file
        .grid
        .iter()
        .map(|row| row.iter().map(raw_to_cell).collect())
        .collect::<Result<Vec<Vec<Cell>>>>()?;
    Pda::from_grid_with_labels(grid, file.row_labels.clone(), file.col_labels.clone())
        .map_err(Error::Invalid)
}

fn gpda_from_file(file: &ArrayFile) -> Result<GeneralizedPda> {
    check_declared_shape(file)?;
    let grid = file
        .grid
        .iter()
        .map(|row| row.iter().map(raw_to_gcell).collect())
        .collect::<Result<Vec<Vec<GCell>>>>()?;
    let raw_map = file
        .user_to_cache
        .as_ref()
        .ok_or_else(|| Error::Parse("user-level array without user_to_cache".into()))?;
    let user_to_cache = raw_map
        .iter()
        .map(|&c| match c {
            0 => Err(Error::Parse("cache ids are 1-based, got 0".into())),
            n => Ok(n as usize - 1),
        })
        .collect::<Result<Vec<usize>>>()?;
    GeneralizedPda::from_grid_with_labels(
        grid,
        user_to_cache,
        file.row_labels.clone(),
        file.col_labels.clone(),
    )
    .map_err(Error::Invalid)
}

pub fn pda_to_json(pda: &Pda) -> String {
    serde_json::to_string_pretty(&file_from_pda(pda)).expect("array serialization")
}

pub fn parse_pda_json(text: &str) -> Result<Pda> {
    let file: ArrayFile = serde_json::from_str(text)?;
    if file.user_to_cache.is_some() {
        return Err(Error::Parse(
            "file holds a user-level array, expected a cache-level one".into(),
        ));
    }
    pda_from_file(&file)
}

pub fn gpda_to_json(gpda: &GeneralizedPda) -> String {
    serde_json::to_string_pretty(&file_from_gpda(gpda)).expect("array serialization")
}

pub fn parse_gpda_json(text: &str) -> Result<GeneralizedPda> {
    let file: ArrayFile = serde_json::from_str(text)?;
    gpda_from_file(&file)
}

// ---- files ---------------------------------------------------------------

/// Read an array file, auto-detecting kind and format: JSON when the content
/// starts with `{` (user-level when `user_to_cache` or a pair cell is
/// present), the text form otherwise.
pub fn load_array(path: &Path) -> Result<LoadedArray> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        std::io::Error::new(err.kind(), format!("{}: {err}", path.display()))
    })?;
    if !text.trim_start().starts_with('{') {
        return Ok(LoadedArray::Cache(parse_pda_text(&text)?));
    }
    let file: ArrayFile = serde_json::from_str(&text)?;
    let has_pairs = file
        .grid
        .iter()
        .flatten()
        .any(|c| matches!(c, RawCell::Pair(_)));
    if file.user_to_cache.is_some() || has_pairs {
        Ok(LoadedArray::User(gpda_from_file(&file)?))
    } else {
        Ok(LoadedArray::Cache(pda_from_file(&file)?))
    }
}

pub fn load_pda(path: &Path) -> Result<Pda> {
    match load_array(path)? {
        LoadedArray::Cache(pda) => Ok(pda),
        LoadedArray::User(_) => Err(Error::Parse(format!(
            "{} holds a user-level array, expected a cache-level one",
            path.display()
        ))),
    }
}

pub fn load_gpda(path: &Path) -> Result<GeneralizedPda> {
    match load_array(path)? {
        LoadedArray::User(g) => Ok(g),
        LoadedArray::Cache(_) => Err(Error::Parse(format!(
            "{} holds a cache-level array, expected a user-level one",
            path.display()
        ))),
    }
}

pub fn save_pda_json(pda: &Pda, path: &Path) -> Result<()> {
    std::fs::write(path, pda_to_json(pda) + "\n")?;
    Ok(())
}

pub fn save_pda_text(pda: &Pda, path: &Path) -> Result<()> {
    std::fs::write(path, render_pda_text(pda) + "\n")?;
    Ok(())
}

pub fn save_gpda_json(gpda: &GeneralizedPda, path: &Path) -> Result<()> {
    std::fs::write(path, gpda_to_json(gpda) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::construct_b;
    use crate::gpda::build_gpda;
    use crate::ordering::Profile;
    use crate::pda::tests::SIX_CACHE;

    #[test]
    fn text_round_trip() {
        let pda = parse_pda_text(SIX_CACHE).unwrap();
        assert_eq!(render_pda_text(&pda), SIX_CACHE);
    }

    #[test]
    fn text_parser_rejects_bad_tokens() {
        assert!(matches!(parse_pda_text("* 0\n1 *"), Err(Error::Parse(_))));
        assert!(matches!(parse_pda_text("* x\n1 *"), Err(Error::Parse(_))));
        // A ragged grid parses but fails validation.
        assert!(matches!(parse_pda_text("* 1 2\n1 *"), Err(Error::Invalid(_))));
    }

    #[test]
    fn json_round_trip_keeps_labels() {
        let pda = construct_b(2, 1).unwrap();
        let parsed = parse_pda_json(&pda_to_json(&pda)).unwrap();
        assert_eq!(parsed, pda);
        assert_eq!(parsed.col_labels().unwrap()[0], "(0,0)");
    }

    #[test]
    fn gpda_json_round_trip() {
        let pda = parse_pda_text(SIX_CACHE).unwrap();
        let profile = Profile::normalize(&[5, 4, 3, 2, 2, 1]).unwrap();
        let g = build_gpda(&pda, &profile).unwrap();
        let parsed = parse_gpda_json(&gpda_to_json(&g)).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn json_ids_are_one_based_on_disk() {
        let text = r#"{
            "rows": 2, "cols": 2,
            "grid": [[["1", 1], "*"], ["*", [1, 2]]],
            "user_to_cache": [1, 2]
        }"#;
        // Symbol ids may be numbers or [s, i] pairs; strings other than "*"
        // are rejected.
        assert!(parse_gpda_json(text).is_err());

        let text = r#"{
            "rows": 2, "cols": 2,
            "grid": [[[1, 1], "*"], ["*", [1, 2]]],
            "user_to_cache": [1, 2]
        }"#;
        let g = parse_gpda_json(text).unwrap();
        assert_eq!(g.cell(0, 0), GCell::Pair(0, 1));
        assert_eq!(g.cell(1, 1), GCell::Pair(0, 2));
        assert_eq!(g.user_to_cache(), &[0, 1]);
    }

    #[test]
    fn bare_ids_in_user_files_mean_replica_one() {
        let text = r#"{
            "rows": 2, "cols": 2,
            "grid": [[1, "*"], ["*", 2]],
            "user_to_cache": [1, 2]
        }"#;
        let g = parse_gpda_json(text).unwrap();
        assert_eq!(g.cell(0, 0), GCell::Pair(0, 1));
        assert_eq!(g.cell(1, 1), GCell::Pair(1, 1));
    }

    #[test]
    fn declared_shape_must_match() {
        let text = r#"{"rows": 3, "cols": 2, "grid": [[1, "*"], ["*", 2]]}"#;
        assert!(matches!(parse_pda_json(text), Err(Error::Parse(_))));
    }

    #[test]
    fn loading_auto_detects_kind_and_format() {
        let dir = tempfile::tempdir().unwrap();
        let pda = parse_pda_text(SIX_CACHE).unwrap();

        let text_path = dir.path().join("p.txt");
        save_pda_text(&pda, &text_path).unwrap();
        assert!(matches!(load_array(&text_path).unwrap(), LoadedArray::Cache(_)));
        assert_eq!(load_pda(&text_path).unwrap(), pda);

        let json_path = dir.path().join("p.json");
        save_pda_json(&pda, &json_path).unwrap();
        assert_eq!(load_pda(&json_path).unwrap(), pda);

        let profile = Profile::normalize(&[5, 4, 3, 2, 2, 1]).unwrap();
        let g = build_gpda(&pda, &profile).unwrap();
        let gpda_path = dir.path().join("g.json");
        save_gpda_json(&g, &gpda_path).unwrap();
        assert!(matches!(load_array(&gpda_path).unwrap(), LoadedArray::User(_)));
        assert_eq!(load_gpda(&gpda_path).unwrap(), g);
        assert!(load_pda(&gpda_path).is_err());
        assert!(load_gpda(&text_path).is_err());
    }
}
