//! Redaction-width recovery for OCR overlays.
//!
//! OCR flows position each recognized word with its own operator and
//! stretch it with per-character spacing that also covers the word's
//! successor space. Redaction keeps both artifacts: the surviving space
//! still carries the removed word's spacing value, and the drawn box
//! starts where the word's positioning operator placed it. Together they
//! bound the removed text exactly.

use crate::error::{Error, Result};
use crate::ir::{RectFill, TextLine};

/// Result of reconstructing a removed word's span on an OCR line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcrInference {
    /// Exact geometric span of the removed text in text-space units:
    /// the sum of the removed advances plus one spacing step per glyph.
    pub span_units: f64,
    /// Per-glyph character spacing recovered from the successor space,
    /// in units; 0 when no successor space survived.
    pub tc_units: f64,
}

/// Infer the exact width of a removed word from its box and the line's
/// surviving glyphs.
///
/// The box's left edge is taken as the word's post-positioning start x;
/// when no text precedes the box on the line, the supplied left margin
/// is used instead. Fails when the span cannot be bounded on both sides.
pub fn ocr_infer_redaction_width(
    line: &TextLine,
    site_box: &RectFill,
    left_margin_x: Option<f64>,
) -> Result<OcrInference> {
    const EPS: f64 = 0.01;
    let after = line
        .glyphs
        .iter()
        .filter(|g| g.origin_x > site_box.x0 + EPS)
        .min_by(|a, b| a.origin_x.partial_cmp(&b.origin_x).unwrap())
        .ok_or(Error::SideChannelAbsent)?;
    let has_prefix = line.glyphs.iter().any(|g| g.origin_x < site_box.x0 - EPS);
    let start_x = if has_prefix {
        site_box.x0
    } else {
        left_margin_x.ok_or(Error::SideChannelAbsent)?
    };
    let scale = after.unit_scale();
    if scale <= 0.0 {
        return Err(Error::SideChannelAbsent);
    }
    let span_units = (after.origin_x - start_x) / scale;
    if span_units <= 0.0 {
        return Err(Error::DegenerateSite(format!(
            "ocr span {span_units:.3} units at x {start_x:.2}"
        )));
    }
    let tc_units = if after.is_space() { after.tc_units } else { 0.0 };
    Ok(OcrInference { span_units, tc_units })
}

/// Most common line-start x on a page, used when a redaction removed the
/// first word of a line.
pub fn infer_left_margin(lines: &[TextLine]) -> Option<f64> {
    let mut starts: Vec<f64> = lines
        .iter()
        .filter_map(|l| l.glyphs.first().map(|g| g.origin_x))
        .collect();
    if starts.is_empty() {
        return None;
    }
    starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Mode over 0.1 pt buckets; ties resolve to the leftmost.
    let mut best = (0usize, starts[0]);
    let mut i = 0;
    while i < starts.len() {
        let mut j = i;
        while j < starts.len() && (starts[j] - starts[i]).abs() < 0.1 {
            j += 1;
        }
        if j - i > best.0 {
            best = (j - i, starts[i]);
        }
        i = j;
    }
    Some(best.1)
}
