//! Access to shipped data tables: font metrics, Word internal width
//! tables, a sample name dictionary, and sample context text.
//!
//! Defaults are compiled in so the library works without installation.
//! Setting `GLYPHGATE_DATA` to a directory with the same layout
//! (`metrics/*.csv`, `word_internal/*.csv`, `dicts/`, `corpus/`)
//! overrides any table present there.

use crate::error::{Error, Result};
use crate::metrics::FontMetrics;
use std::path::PathBuf;
use std::sync::Arc;

pub const DATA_ENV: &str = "GLYPHGATE_DATA";

/// Canonical names of the shipped metrics tables.
pub const SHIPPED_FONTS: [&str; 4] = ["Times New Roman", "Arial", "Calibri", "Courier"];

const TNR_CSV: &str = include_str!("../data/metrics/times_new_roman.csv");
const ARIAL_CSV: &str = include_str!("../data/metrics/arial.csv");
const CALIBRI_CSV: &str = include_str!("../data/metrics/calibri.csv");
const COURIER_CSV: &str = include_str!("../data/metrics/courier.csv");

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_ENV).map(PathBuf::from)
}

fn csv_file_stem(font: &str) -> String {
    font.to_ascii_lowercase().replace(' ', "_")
}

/// Resolve a font name (possibly a PDF BaseFont like
/// `ABCDE+TimesNewRomanPSMT`) to a shipped table name.
pub fn resolve_font_name(raw: &str) -> Option<&'static str> {
    let stripped = raw.rsplit('+').next().unwrap_or(raw);
    let key: String = stripped
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    for name in SHIPPED_FONTS {
        let compact: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if key.contains(&compact) {
            return Some(match name {
                "Times New Roman" => "Times New Roman",
                "Arial" => "Arial",
                "Calibri" => "Calibri",
                _ => "Courier",
            });
        }
    }
    // Times variants used by common producers.
    if key.contains("timesroman") || key.contains("timesnew") || key.contains("times") {
        return Some("Times New Roman");
    }
    if key.contains("couriernew") {
        return Some("Courier");
    }
    None
}

/// Load a shipped metrics table by canonical name.
pub fn font(name: &str) -> Result<Arc<FontMetrics>> {
    let canonical = resolve_font_name(name).ok_or_else(|| Error::UnknownFont(name.to_string()))?;
    if let Some(dir) = data_dir() {
        let path = dir.join("metrics").join(format!("{}.csv", csv_file_stem(canonical)));
        if path.is_file() {
            return FontMetrics::load_csv(canonical, &path).map(Arc::new);
        }
    }
    let embedded = match canonical {
        "Times New Roman" => TNR_CSV,
        "Arial" => ARIAL_CSV,
        "Calibri" => CALIBRI_CSV,
        "Courier" => COURIER_CSV,
        _ => return Err(Error::UnknownFont(name.to_string())),
    };
    FontMetrics::parse_csv(canonical, embedded)
        .map(Arc::new)
        .map_err(|reason| Error::BadDataFile {
            path: format!("embedded:{canonical}"),
            reason,
        })
}

/// All shipped metrics tables.
pub fn all_fonts() -> Vec<Arc<FontMetrics>> {
    SHIPPED_FONTS.iter().map(|n| font(n).expect("shipped table")).collect()
}

/// Shipped sample dictionary of personal names with census-style counts.
pub fn sample_names_tsv() -> &'static str {
    include_str!("../data/dicts/names.tsv")
}

/// Shipped sample context text for leakage measurement.
pub fn sample_corpus_text() -> &'static str {
    include_str!("../data/corpus/sample.txt")
}

/// Raw CSV text of the shipped Word internal width table for a font,
/// size, and scheme year, if one ships.
pub fn word_internal_csv(font: &str, size_pt: u32, year: u16) -> Option<String> {
    let canonical = resolve_font_name(font)?;
    let stem = format!("{}_{}_{}", csv_file_stem(canonical), size_pt, year);
    if let Some(dir) = data_dir() {
        let path = dir.join("word_internal").join(format!("{stem}.csv"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            return Some(text);
        }
    }
    EMBEDDED_WORD_INTERNAL
        .iter()
        .find(|(name, _)| *name == stem)
        .map(|(_, text)| (*text).to_string())
}

macro_rules! internal_tables {
    ($($stem:literal),* $(,)?) => {
        &[ $( ($stem, include_str!(concat!("../data/word_internal/", $stem, ".csv"))) ),* ]
    };
}

const EMBEDDED_WORD_INTERNAL: &[(&str, &str)] = internal_tables![
    "times_new_roman_10_2007",
    "times_new_roman_10_2019",
    "times_new_roman_12_2007",
    "times_new_roman_12_2019",
    "arial_10_2007",
    "arial_10_2019",
    "arial_12_2007",
    "arial_12_2019",
    "calibri_10_2007",
    "calibri_10_2019",
    "calibri_12_2007",
    "calibri_12_2019",
    "courier_10_2007",
    "courier_10_2019",
    "courier_12_2007",
    "courier_12_2019",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_font_names_resolve() {
        assert_eq!(resolve_font_name("ABCDEF+TimesNewRomanPSMT"), Some("Times New Roman"));
        assert_eq!(resolve_font_name("Times New Roman"), Some("Times New Roman"));
        assert_eq!(resolve_font_name("Arial-BoldMT"), Some("Arial"));
        assert_eq!(resolve_font_name("Calibri"), Some("Calibri"));
        assert_eq!(resolve_font_name("CourierNewPSMT"), Some("Courier"));
        assert_eq!(resolve_font_name("ComicSans"), None);
    }

    #[test]
    fn shipped_tables_load() {
        for name in SHIPPED_FONTS {
            let m = font(name).unwrap();
            assert!(!m.widths.is_empty());
            assert_eq!(m.units_per_em, 1000);
        }
        assert!(font("Courier").unwrap().monospaced);
        assert!(!font("Arial").unwrap().monospaced);
    }
}
