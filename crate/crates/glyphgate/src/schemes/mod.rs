//! Glyph-shifting scheme models and page-level scheme identification.

pub mod ocr;
pub mod word;

pub use ocr::{infer_left_margin, ocr_infer_redaction_width, OcrInference};
pub use word::{
    apply_edit, compute_edit_adjustments, edit_suffix, word_edit_variants, word_emit_shifts,
    word_init_widths, word_wysiwyg_widths, EditVariant, InternalWidthTable, WordVersion,
    WysiwygState,
};

use crate::data;
use crate::ir::{DocumentIR, PageIR, TextLine};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    Unadjusted,
    Word2007,
    Word2019,
    AdobeOcr,
    NearWord,
    Unrecognized,
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SchemeId::Unadjusted => "unadjusted",
            SchemeId::Word2007 => "word2007",
            SchemeId::Word2019 => "word2019",
            SchemeId::AdobeOcr => "ocr",
            SchemeId::NearWord => "nearword",
            SchemeId::Unrecognized => "unrecognized",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SchemeId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "unadjusted" => Ok(SchemeId::Unadjusted),
            "word2007" => Ok(SchemeId::Word2007),
            "word2019" => Ok(SchemeId::Word2019),
            "ocr" | "adobeocr" => Ok(SchemeId::AdobeOcr),
            "nearword" => Ok(SchemeId::NearWord),
            "unrecognized" => Ok(SchemeId::Unrecognized),
            other => Err(format!("unknown scheme {other}")),
        }
    }
}

/// Loaded internal width tables plus identification options.
pub struct SchemeModels {
    tables: BTreeMap<(String, u32, u16), Arc<InternalWidthTable>>,
    /// Apply the single-unit i/l correction on pages containing both
    /// letters.
    pub il_fix: bool,
}

impl SchemeModels {
    /// Load every shipped internal width table.
    pub fn shipped() -> SchemeModels {
        let mut tables = BTreeMap::new();
        for font in data::SHIPPED_FONTS {
            for size in [10u32, 12] {
                for year in [2007u16, 2019] {
                    if let Some(csv) = data::word_internal_csv(font, size, year) {
                        if let Ok(t) = InternalWidthTable::parse_csv(&csv) {
                            tables.insert((font.to_string(), size, year), Arc::new(t));
                        }
                    }
                }
            }
        }
        SchemeModels {
            tables,
            il_fix: false,
        }
    }

    pub fn insert(&mut self, font: &str, size: u32, table: InternalWidthTable) {
        let year = table.version.year();
        self.tables
            .insert((font.to_string(), size, year), Arc::new(table));
    }

    pub fn table(&self, font: &str, size: f64, version: WordVersion) -> Option<&Arc<InternalWidthTable>> {
        let canonical = data::resolve_font_name(font)?;
        let size_key = size.round() as u32;
        self.tables
            .get(&(canonical.to_string(), size_key, version.year()))
    }
}

#[derive(Debug, Clone)]
pub struct SchemeIdentification {
    pub scheme: SchemeId,
    /// Glyphs on lines whose entire shift vector matches the chosen
    /// scheme.
    pub matched_glyphs: usize,
    /// Match counts for every scheme that matched at least one line.
    pub counts: BTreeMap<SchemeId, usize>,
    /// Per-line tags.
    pub line_tags: Vec<SchemeId>,
}

/// Minimum matching glyphs for a model scheme to claim a page.
pub const SCHEME_GLYPH_THRESHOLD: usize = 100;
/// Near-Word acceptance: L1 distance from the Word model, units per 100
/// glyphs.
pub const NEAR_WORD_L1_PER_100: f64 = 10.0;

/// Word-model shift prediction for a line, when every glyph is mappable,
/// the line is in a single resolvable font and size, and a table ships
/// for it.
pub fn predict_word_line(
    line: &TextLine,
    doc: &DocumentIR,
    models: &SchemeModels,
    version: WordVersion,
    il_fix_active: bool,
) -> Option<Vec<f64>> {
    let first = line.glyphs.first()?;
    let font = doc.font(first.font_id);
    let size = first.font_size;
    if line
        .glyphs
        .iter()
        .any(|g| g.font_id != first.font_id || (g.font_size - size).abs() > 1e-9)
    {
        return None;
    }
    let chars: Option<Vec<char>> = line.glyphs.iter().map(|g| g.unicode).collect();
    let chars = chars?;
    let canonical = font.shipped?;
    let metrics = data::font(canonical).ok()?;
    let table = models.table(canonical, size, version)?;
    let mut shifts = word_emit_shifts(&chars, &metrics, table, size, version).ok()?;
    if il_fix_active {
        for (s, &c) in shifts.iter_mut().zip(chars.iter()) {
            if (c == 'i' || c == 'l') && *s != 0.0 {
                *s -= s.signum();
            }
        }
    }
    Some(shifts)
}

fn shifts_match(observed: &[f64], predicted: &[f64]) -> bool {
    observed.len() == predicted.len()
        && observed
            .iter()
            .zip(predicted)
            .all(|(a, b)| (a - b).abs() < 1e-9)
}

/// Identify the shifting scheme of one page.
///
/// A model scheme claims the page when at least 100 glyphs sit on lines
/// whose entire shift vectors match it exactly; a page whose shifts are
/// all zero is unadjusted (the tie against a monospaced Word model breaks
/// that way); pages within 10 units L1 per 100 glyphs of a Word model
/// are near-Word; anything else is unrecognized.
pub fn identify_scheme(page: &PageIR, doc: &DocumentIR, models: &SchemeModels) -> SchemeIdentification {
    let il_fix_active = models.il_fix && {
        let mut has_i = false;
        let mut has_l = false;
        for line in &page.lines {
            for g in &line.glyphs {
                match g.unicode {
                    Some('i') => has_i = true,
                    Some('l') => has_l = true,
                    _ => {}
                }
            }
        }
        has_i && has_l
    };

    let mut counts: BTreeMap<SchemeId, usize> = BTreeMap::new();
    let mut line_tags = Vec::with_capacity(page.lines.len());
    let mut near_word_l1 = 0.0f64;
    let mut near_word_glyphs = 0usize;
    let mut all_zero = true;

    for line in &page.lines {
        let observed = line.shift_vector();
        let n = line.glyphs.len();
        let zero_line = observed.iter().all(|&s| s == 0.0);
        if !zero_line {
            all_zero = false;
        }
        let mut tag = SchemeId::Unrecognized;
        if zero_line {
            *counts.entry(SchemeId::Unadjusted).or_default() += n;
            tag = SchemeId::Unadjusted;
        }
        let mut best_word_dist: Option<f64> = None;
        for version in [WordVersion::W2019, WordVersion::W2007] {
            if let Some(pred) = predict_word_line(line, doc, models, version, il_fix_active) {
                if shifts_match(&observed, &pred) {
                    let id = match version {
                        WordVersion::W2019 => SchemeId::Word2019,
                        WordVersion::W2007 => SchemeId::Word2007,
                    };
                    *counts.entry(id).or_default() += n;
                    if tag == SchemeId::Unrecognized {
                        tag = id;
                    }
                } else {
                    let dist: f64 = observed
                        .iter()
                        .zip(&pred)
                        .map(|(a, b)| (a - b).abs())
                        .sum();
                    best_word_dist = Some(best_word_dist.map_or(dist, |d: f64| d.min(dist)));
                }
            }
        }
        if let Some(d) = best_word_dist {
            near_word_l1 += d;
            near_word_glyphs += n;
        }
        if ocr_line_matches(line) {
            *counts.entry(SchemeId::AdobeOcr).or_default() += n;
            if tag == SchemeId::Unrecognized {
                tag = SchemeId::AdobeOcr;
            }
        }
        line_tags.push(tag);
    }

    let count = |id: SchemeId| counts.get(&id).copied().unwrap_or(0);
    let (scheme, matched_glyphs) = if page.glyph_count() == 0 {
        (SchemeId::Unadjusted, 0)
    } else if all_zero {
        (SchemeId::Unadjusted, count(SchemeId::Unadjusted))
    } else if count(SchemeId::Word2019).max(count(SchemeId::Word2007)) >= SCHEME_GLYPH_THRESHOLD {
        if count(SchemeId::Word2019) >= count(SchemeId::Word2007) {
            (SchemeId::Word2019, count(SchemeId::Word2019))
        } else {
            (SchemeId::Word2007, count(SchemeId::Word2007))
        }
    } else if count(SchemeId::AdobeOcr) >= SCHEME_GLYPH_THRESHOLD {
        (SchemeId::AdobeOcr, count(SchemeId::AdobeOcr))
    } else if near_word_glyphs > 0
        && near_word_l1 / near_word_glyphs as f64 * 100.0 <= NEAR_WORD_L1_PER_100
    {
        (SchemeId::NearWord, near_word_glyphs)
    } else {
        (SchemeId::Unrecognized, 0)
    };

    SchemeIdentification {
        scheme,
        matched_glyphs,
        counts,
        line_tags,
    }
}

/// Structural signature of an OCR overlay line: every word carries one
/// uniform nonzero character-spacing value (extending over its successor
/// space), and at least one word is present.
fn ocr_line_matches(line: &TextLine) -> bool {
    if line.words.is_empty() {
        return false;
    }
    let annotated = line.ocr_words.len();
    annotated == line.words.len() && annotated > 0
}

/// Identify the scheme for every page and aggregate to a document-level
/// call: the page scheme seen with the most matched glyphs wins.
pub fn identify_document(doc: &DocumentIR, models: &SchemeModels) -> (SchemeId, usize, Vec<SchemeIdentification>) {
    let per_page: Vec<SchemeIdentification> = doc
        .pages
        .iter()
        .map(|p| identify_scheme(p, doc, models))
        .collect();
    let mut totals: BTreeMap<SchemeId, usize> = BTreeMap::new();
    for id in &per_page {
        *totals.entry(id.scheme).or_default() += id.matched_glyphs.max(1);
    }
    let (&scheme, _) = totals
        .iter()
        .max_by_key(|(id, n)| (**n, order_key(**id)))
        .unwrap_or((&SchemeId::Unrecognized, &0));
    let matched = per_page
        .iter()
        .filter(|p| p.scheme == scheme)
        .map(|p| p.matched_glyphs)
        .sum();
    (scheme, matched, per_page)
}

fn order_key(id: SchemeId) -> u8 {
    match id {
        SchemeId::Word2019 => 5,
        SchemeId::Word2007 => 4,
        SchemeId::AdobeOcr => 3,
        SchemeId::NearWord => 2,
        SchemeId::Unadjusted => 1,
        SchemeId::Unrecognized => 0,
    }
}
