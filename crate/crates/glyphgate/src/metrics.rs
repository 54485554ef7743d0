//! Per-font advance-width tables and width equivalence classes.
//!
//! Widths are stored on a 1000-per-em text-space scale, so the total
//! advance of a string is independent of point size. Tables ship as CSV
//! data files (`glyph,unicode_hex,width_1000em`) for Times New Roman,
//! Arial, Calibri, and Courier.

use crate::error::{Error, Result};
use crate::units::TextSpaceUnit;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

/// Advance-width table for one font.
#[derive(Debug, Clone, PartialEq)]
pub struct FontMetrics {
    pub name: String,
    pub units_per_em: u32,
    pub widths: BTreeMap<char, TextSpaceUnit>,
    pub monospaced: bool,
    /// Ascent/descent per 1000 em, used for glyph coverage boxes.
    pub ascent: i32,
    pub descent: i32,
}

impl FontMetrics {
    pub fn new(name: &str, units_per_em: u32, widths: BTreeMap<char, TextSpaceUnit>) -> Self {
        let monospaced = {
            let mut it = widths.values();
            match it.next() {
                Some(first) => it.all(|w| w == first),
                None => false,
            }
        };
        FontMetrics {
            name: name.to_string(),
            units_per_em,
            widths,
            monospaced,
            ascent: 800,
            descent: -200,
        }
    }

    pub fn width_of(&self, c: char) -> Result<TextSpaceUnit> {
        self.widths
            .get(&c)
            .copied()
            .ok_or_else(|| Error::MissingGlyph(c, self.name.clone()))
    }

    /// Advance width of the space glyph, if present.
    pub fn space_width(&self) -> Option<TextSpaceUnit> {
        self.widths.get(&' ').copied()
    }

    /// Load a metrics table from `glyph,unicode_hex,width_1000em` CSV.
    pub fn load_csv(name: &str, path: &Path) -> Result<FontMetrics> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(name, &text).map_err(|reason| Error::BadDataFile {
            path: path.display().to_string(),
            reason,
        })
    }

    pub fn parse_csv(name: &str, text: &str) -> std::result::Result<FontMetrics, String> {
        let mut widths = BTreeMap::new();
        let mut units_per_em = 1000u32;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                if let Some(rest) = line.strip_prefix("#units_per_em=") {
                    units_per_em = rest
                        .trim()
                        .parse()
                        .map_err(|_| format!("line {}: bad units_per_em", lineno + 1))?;
                }
                continue;
            }
            if lineno == 0 && line.starts_with("glyph,") {
                continue; // header
            }
            let mut cols = line.splitn(3, ',');
            let _glyph = cols.next().unwrap_or("");
            let hex = cols
                .next()
                .ok_or_else(|| format!("line {}: missing unicode column", lineno + 1))?;
            let width: i64 = cols
                .next()
                .ok_or_else(|| format!("line {}: missing width column", lineno + 1))?
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad width", lineno + 1))?;
            if width <= 0 {
                return Err(format!("line {}: width must be positive", lineno + 1));
            }
            let cp = u32::from_str_radix(hex.trim(), 16)
                .map_err(|_| format!("line {}: bad unicode hex", lineno + 1))?;
            let c = char::from_u32(cp).ok_or_else(|| format!("line {}: bad scalar", lineno + 1))?;
            widths.insert(c, TextSpaceUnit(width));
        }
        if widths.is_empty() {
            return Err("no width entries".to_string());
        }
        let mut m = FontMetrics::new(name, units_per_em, widths);
        m.units_per_em = units_per_em;
        Ok(m)
    }
}

/// Total advance width of `text`, in 1000-per-em units (size independent).
pub fn advance_width(text: &str, font: &FontMetrics) -> Result<TextSpaceUnit> {
    let mut total = TextSpaceUnit::ZERO;
    for c in text.chars() {
        total += font.width_of(c)?;
    }
    Ok(total)
}

/// Partition of an alphabet of glyphs by advance width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthClassTable {
    pub classes: BTreeMap<TextSpaceUnit, BTreeSet<char>>,
}

impl WidthClassTable {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, c: char) -> Option<TextSpaceUnit> {
        self.classes
            .iter()
            .find(|(_, set)| set.contains(&c))
            .map(|(w, _)| *w)
    }
}

/// Width classes over the ASCII letter alphabet, the partition usually
/// quoted for a font.
pub fn width_classes(font: &FontMetrics) -> WidthClassTable {
    let letters: Vec<char> = ('A'..='Z').chain('a'..='z').collect();
    width_classes_over(font, letters.into_iter().filter(|c| font.widths.contains_key(c)))
}

/// Width classes over an arbitrary alphabet. Every glyph lands in exactly
/// one class keyed by its width.
pub fn width_classes_over(
    font: &FontMetrics,
    alphabet: impl IntoIterator<Item = char>,
) -> WidthClassTable {
    let mut classes: BTreeMap<TextSpaceUnit, BTreeSet<char>> = BTreeMap::new();
    for c in alphabet {
        if let Some(&w) = font.widths.get(&c) {
            classes.entry(w).or_default().insert(c);
        }
    }
    WidthClassTable { classes }
}

/// Width-bucketed index over a list of dictionary entries.
///
/// Buckets are disjoint and their union is the whole dictionary, so a
/// width lookup prunes every entry outside the matching bucket in one
/// probe.
#[derive(Debug, Clone)]
pub struct DictWidthIndex {
    pub buckets: BTreeMap<TextSpaceUnit, Vec<u32>>,
    entry_count: usize,
}

impl DictWidthIndex {
    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn entry_count(&self) -> usize {
        self.entry_count
    }

    /// Entry indices whose total width is `w`.
    pub fn lookup(&self, w: TextSpaceUnit) -> &[u32] {
        self.buckets.get(&w).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Entry indices whose total width lies within `tolerance` of `w`.
    pub fn lookup_with_tolerance(&self, w: TextSpaceUnit, tolerance: i64) -> Vec<u32> {
        let lo = TextSpaceUnit(w.0 - tolerance);
        let hi = TextSpaceUnit(w.0 + tolerance);
        self.buckets
            .range(lo..=hi)
            .flat_map(|(_, v)| v.iter().copied())
            .collect()
    }
}

/// Bucket every dictionary entry by its total advance width.
pub fn index_dictionary<'a>(
    entries: impl IntoIterator<Item = &'a str>,
    font: &FontMetrics,
) -> Result<DictWidthIndex> {
    let mut buckets: BTreeMap<TextSpaceUnit, Vec<u32>> = BTreeMap::new();
    let mut count = 0usize;
    for (i, entry) in entries.into_iter().enumerate() {
        let w = advance_width(entry, font)?;
        buckets.entry(w).or_default().push(i as u32);
        count += 1;
    }
    Ok(DictWidthIndex {
        buckets,
        entry_count: count,
    })
}

/// Handle for shipped metrics tables.
pub type SharedMetrics = Arc<FontMetrics>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    #[test]
    fn empty_string_has_zero_width() {
        let tnr = data::font("Times New Roman").unwrap();
        assert_eq!(advance_width("", &tnr).unwrap(), TextSpaceUnit(0));
    }

    #[test]
    fn anagram_class_words_share_width() {
        let tnr = data::font("Times New Roman").unwrap();
        for word in ["martian", "templar", "mineral", "tamarin", "trample", "railmen"] {
            assert_eq!(advance_width(word, &tnr).unwrap(), TextSpaceUnit(6256), "{word}");
        }
    }

    #[test]
    fn cat_and_dog_widths() {
        let tnr = data::font("Times New Roman").unwrap();
        assert_eq!(advance_width("cat", &tnr).unwrap(), TextSpaceUnit(2387));
        assert_eq!(advance_width("dog", &tnr).unwrap(), TextSpaceUnit(3072));
    }

    #[test]
    fn missing_glyph_is_an_error() {
        let tnr = data::font("Times New Roman").unwrap();
        match advance_width("cät", &tnr) {
            Err(Error::MissingGlyph(c, _)) => assert_eq!(c, 'ä'),
            other => panic!("expected MissingGlyph, got {other:?}"),
        }
    }

    #[test]
    fn tnr_letter_classes() {
        let tnr = data::font("Times New Roman").unwrap();
        let classes = width_classes(&tnr);
        assert_eq!(classes.class_count(), 12);
        let c1479: String = classes.classes[&TextSpaceUnit(1479)].iter().collect();
        assert_eq!(c1479, "ADGHKNOQUVXYw");
    }

    #[test]
    fn calibri_w_is_a_singleton_class() {
        let calibri = data::font("Calibri").unwrap();
        let classes = width_classes(&calibri);
        let class = &classes.classes[&TextSpaceUnit(1822)];
        assert_eq!(class.len(), 1);
        assert!(class.contains(&'W'));
    }

    #[test]
    fn monospace_has_one_letter_class() {
        let courier = data::font("Courier").unwrap();
        assert!(courier.monospaced);
        assert_eq!(width_classes(&courier).class_count(), 1);
    }

    #[test]
    fn width_is_additive() {
        let tnr = data::font("Times New Roman").unwrap();
        let a = "mar";
        let b = "tian";
        let whole = advance_width("martian", &tnr).unwrap();
        let parts = advance_width(a, &tnr).unwrap() + advance_width(b, &tnr).unwrap();
        assert_eq!(whole, parts);
    }

    #[test]
    fn dictionary_index_buckets() {
        let tnr = data::font("Times New Roman").unwrap();
        let entries = ["cat", "dog", "martian", "templar"];
        let idx = index_dictionary(entries.iter().copied(), &tnr).unwrap();
        assert_eq!(idx.bucket_count(), 3);
        assert_eq!(idx.lookup(TextSpaceUnit(2387)), &[0]);
        assert_eq!(idx.lookup(TextSpaceUnit(3072)), &[1]);
        assert_eq!(idx.lookup(TextSpaceUnit(6256)), &[2, 3]);
        // Buckets partition the dictionary.
        let total: usize = idx.buckets.values().map(|v| v.len()).sum();
        assert_eq!(total, entries.len());
    }

    #[test]
    fn singleton_dictionary_has_one_bucket() {
        let tnr = data::font("Times New Roman").unwrap();
        let idx = index_dictionary(["martian"].iter().copied(), &tnr).unwrap();
        assert_eq!(idx.bucket_count(), 1);
    }

    #[test]
    fn monospace_buckets_are_length_classes() {
        let courier = data::font("Courier").unwrap();
        let entries = ["cat", "dog", "ox", "martian", "templar"];
        let idx = index_dictionary(entries.iter().copied(), &courier).unwrap();
        // Distinct lengths 2, 3, 7 -> three buckets.
        assert_eq!(idx.bucket_count(), 3);
        assert_eq!(idx.lookup(TextSpaceUnit(3 * 600)).len(), 2);
        assert_eq!(idx.lookup(TextSpaceUnit(7 * 600)).len(), 2);
    }
}
