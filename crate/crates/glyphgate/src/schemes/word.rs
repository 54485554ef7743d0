//! Model of the glyph-shifting scheme produced by Microsoft Word's
//! Save-as-PDF path, reconstructed at the level of its three passes:
//! width initialization, WYSIWYG pixel-width correction, and the
//! left-to-right displacement emission that writes TJ adjustments.
//!
//! Word lays text out twice: once on an internal 600-dpi dot grid and
//! once with the TrueType widths that end up in the PDF. The passes
//! below reconcile the two. Accumulator float widths (f32 vs f64) are
//! part of the observable behavior and must not be "improved".

use crate::error::{Error, Result};
use crate::metrics::FontMetrics;
use crate::units::round_half_away;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WordVersion {
    /// Word 2007-2016.
    W2007,
    /// Word 2019 and later.
    W2019,
}

impl WordVersion {
    pub fn year(self) -> u16 {
        match self {
            WordVersion::W2007 => 2007,
            WordVersion::W2019 => 2019,
        }
    }
}

/// Word-internal per-glyph dot widths for one font at one size.
///
/// These are data, not something derivable from the font file; the repo
/// ships tables fit against observed Save-as-PDF output. All model
/// constants can be overridden per table file.
#[derive(Debug, Clone)]
pub struct InternalWidthTable {
    pub version: WordVersion,
    pub font_size: f64,
    /// Divisor normalizing raw metric widths onto the 1000-per-em grid.
    pub u_const: f64,
    /// fontScaledWidth units per 600-dpi dot.
    pub pixel_divisor: f64,
    /// fontScaledWidth total at which the correction pass restarts
    /// (the equivalent of a 468 pt line).
    pub brkpoint: i64,
    /// Internal dot width per glyph.
    pub dots: BTreeMap<char, i64>,
}

impl InternalWidthTable {
    pub fn parse_csv(text: &str) -> std::result::Result<InternalWidthTable, String> {
        let mut version = WordVersion::W2019;
        let mut u_const = 1000.0;
        let mut pixel_divisor = 240.0;
        let mut brkpoint = 936000i64;
        let mut font_size = 12.0;
        let mut dots = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    let v = v.trim();
                    match k.trim() {
                        "version" => {
                            version = match v {
                                "2007" => WordVersion::W2007,
                                "2019" => WordVersion::W2019,
                                other => return Err(format!("unknown version {other}")),
                            }
                        }
                        "u_const" => u_const = v.parse().map_err(|_| "bad u_const".to_string())?,
                        "pixel_divisor" => {
                            pixel_divisor = v.parse().map_err(|_| "bad pixel_divisor".to_string())?
                        }
                        "brkpoint" => brkpoint = v.parse().map_err(|_| "bad brkpoint".to_string())?,
                        "font_size" => font_size = v.parse().map_err(|_| "bad font_size".to_string())?,
                        _ => {}
                    }
                }
                continue;
            }
            if lineno == 0 && line.starts_with("glyph,") {
                continue;
            }
            let (glyph, width) = line
                .split_once(',')
                .ok_or_else(|| format!("line {}: expected glyph,width", lineno + 1))?;
            let c = match glyph {
                "space" => ' ',
                "comma" => ',',
                g => {
                    let mut chars = g.chars();
                    let c = chars.next().ok_or_else(|| format!("line {}: empty glyph", lineno + 1))?;
                    if chars.next().is_some() {
                        return Err(format!("line {}: glyph must be one character", lineno + 1));
                    }
                    c
                }
            };
            let w: i64 = width
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad width", lineno + 1))?;
            if w <= 0 {
                return Err(format!("line {}: width must be positive", lineno + 1));
            }
            dots.insert(c, w);
        }
        if dots.is_empty() {
            return Err("no glyph entries".to_string());
        }
        Ok(InternalWidthTable {
            version,
            font_size,
            u_const,
            pixel_divisor,
            brkpoint,
            dots,
        })
    }

    pub fn dot_width(&self, c: char) -> Result<i64> {
        self.dots
            .get(&c)
            .copied()
            .ok_or_else(|| Error::MissingGlyph(c, "word internal table".to_string()))
    }

    /// Ideal dot width of a fontScaledWidth total.
    pub fn pixel_w(&self, font_scaled: i64) -> i64 {
        (font_scaled as f64 / self.pixel_divisor + 0.5).floor() as i64
    }
}

/// State carried through the three passes for one line (or fragment).
#[derive(Debug, Clone)]
pub struct WysiwygState {
    pub chars: Vec<char>,
    pub version: WordVersion,
    pub font_size: f64,
    /// widths[i] * fontSize * 2.
    pub font_scaled_widths: Vec<i64>,
    /// Version-specific rounding of widths onto the 1000-per-em grid.
    pub text_space_widths: Vec<f64>,
    /// Internal dot widths, corrected in place by the WYSIWYG pass.
    pub pixel_widths: Vec<i64>,
    pub uncorrected_pixel_widths: Vec<i64>,
    pixel_divisor: f64,
    brkpoint: i64,
}

impl WysiwygState {
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// Device width of glyph `i` in points (600-dpi dots scaled), as the
    /// emission pass sees it.
    fn device_width(&self, i: usize) -> f32 {
        const DOT_TO_PT: f32 = 72.0 / 600.0;
        self.pixel_widths[i] as f32 * DOT_TO_PT
    }
}

/// Pass 1: initialize per-glyph width arrays.
///
/// 2007 rounds `width / u * 10000` then divides by 10, all in f32;
/// 2019 rounds `width / u * 1000` in f64. With the shipped 1000-per-em
/// metrics and u = 1000 both land on the metric width itself.
pub fn word_init_widths(
    text: &[char],
    metrics: &FontMetrics,
    internal: &InternalWidthTable,
    size: f64,
    version: WordVersion,
) -> Result<WysiwygState> {
    let mut font_scaled = Vec::with_capacity(text.len());
    let mut tsw = Vec::with_capacity(text.len());
    let mut pixels = Vec::with_capacity(text.len());
    for &c in text {
        let w = metrics.width_of(c)?.0;
        font_scaled.push(round_half_away(w as f64 * size * 2.0));
        let t = match version {
            WordVersion::W2007 => {
                let inner = ((w as f32) / (internal.u_const as f32) * 10000.0).round();
                ((inner / 10.0).round()) as f64
            }
            WordVersion::W2019 => ((w as f64) / internal.u_const * 1000.0).round(),
        };
        tsw.push(t);
        pixels.push(internal.dot_width(c)?);
    }
    Ok(WysiwygState {
        chars: text.to_vec(),
        version,
        font_size: size,
        font_scaled_widths: font_scaled,
        text_space_widths: tsw,
        pixel_widths: pixels,
        uncorrected_pixel_widths: vec![0; text.len()],
        pixel_divisor: internal.pixel_divisor,
        brkpoint: internal.brkpoint,
    })
}

/// Pass 2: correct the internal dot widths against the running
/// TrueType total, spreading the error by halves with a parity term and
/// restarting when the running total passes the break point.
pub fn word_wysiwyg_widths(state: &mut WysiwygState) {
    let n = state.len();
    if n == 0 {
        return;
    }
    let pixel_w = |w: i64| (w as f64 / state.pixel_divisor + 0.5).floor() as i64;
    let fsw = &state.font_scaled_widths;
    let pixel = &mut state.pixel_widths;
    let uncorrected = &mut state.uncorrected_pixel_widths;

    let mut i = 0usize;
    let mut tracking_adj: i64;
    while i < n {
        let mut total_width: i64 = 0;
        let mut amount_adjusted: i64;
        total_width += fsw[i];
        let new_adjustment = pixel_w(total_width);
        let mut accumulated_diff = pixel[i] - new_adjustment;
        pixel[i] = new_adjustment;
        amount_adjusted = new_adjustment;
        let mut last_new_adj = new_adjustment;
        uncorrected[i] = new_adjustment;
        i += 1;
        if i == n {
            break;
        }
        while i < n {
            total_width += fsw[i];
            if total_width > state.brkpoint {
                break;
            }
            let orig_adjustment = pixel[i];
            let mut new_adj = pixel_w(total_width);
            new_adj -= amount_adjusted;
            let adjustment_difference = orig_adjustment - new_adj;
            tracking_adj = adjustment_difference - accumulated_diff;
            if adjustment_difference != accumulated_diff {
                let parity = tracking_adj & 1;
                if tracking_adj <= 0 {
                    tracking_adj >>= 1;
                    if adjustment_difference < -accumulated_diff {
                        tracking_adj += parity;
                    }
                    if -new_adj >= tracking_adj {
                        tracking_adj = -new_adj;
                    }
                } else {
                    tracking_adj >>= 1;
                    if accumulated_diff < -adjustment_difference {
                        tracking_adj += parity;
                    }
                    if last_new_adj < tracking_adj {
                        tracking_adj = last_new_adj;
                    }
                }
            }
            pixel[i - 1] -= tracking_adj;
            let new_track_adj = new_adj + tracking_adj;
            amount_adjusted += new_adj;
            accumulated_diff = orig_adjustment - new_track_adj;
            pixel[i] = new_track_adj;
            uncorrected[i] = new_track_adj;
            last_new_adj = new_adj;
            i += 1;
        }
    }
}

/// Internal shift layout: `shifts[j]` is the TJ number written after
/// glyph `j`. The public IR convention attaches a number to the glyph it
/// displaces (the one after it), so conversion shifts indices by one.
pub(crate) fn to_ir_shifts(internal: &[f64]) -> Vec<f64> {
    let n = internal.len();
    let mut out = vec![0.0; n];
    for j in 0..n.saturating_sub(1) {
        out[j + 1] = internal[j];
    }
    out
}

/// Pass 3: accumulate TrueType vs device width error left to right and
/// emit a displacement whenever it exceeds 0.003 em (strict), resetting
/// both accumulators. Writes into `shifts[start_after+1..]` in the
/// internal (number-after-glyph) layout; pass `-1` for a whole line.
fn run_adjust(state: &WysiwygState, shifts: &mut [f64], start_after: isize, force_f64: bool) {
    let n = state.len();
    let size = state.font_size;
    let mut leading_space = true;
    let mut ttf32: f32 = 0.0;
    let mut dev32: f32 = 0.0;
    let mut ttf64: f64 = 0.0;
    let mut dev64: f64 = 0.0;
    let begin = (start_after + 1).max(0) as usize;
    for (j, slot) in shifts.iter_mut().enumerate().take(n).skip(begin) {
        if state.chars[j] == ' ' && leading_space {
            continue;
        }
        leading_space = false;
        let disp = if force_f64 {
            let t = state.text_space_widths[j] / 1000.0;
            let d = state.device_width(j) as f64 / size;
            ttf64 += t;
            dev64 += d;
            ttf64 - dev64
        } else {
            match state.version {
                WordVersion::W2007 => {
                    let t = (state.text_space_widths[j] as f32) / 1000.0;
                    let d = (state.device_width(j) as f64) / size;
                    ttf32 += t;
                    dev32 = ((dev32 as f64) + d) as f32;
                }
                WordVersion::W2019 => {
                    let t = (state.text_space_widths[j] as f32) / 1000.0;
                    let d = state.device_width(j) / (size as f32);
                    ttf32 += t;
                    dev32 += d;
                }
            }
            ttf32 as f64 - dev32 as f64
        };
        if (disp > 0.003 || disp < -0.003) && j != n - 1 {
            let adj = (disp * 1000.0 + 0.5) as i64; // C truncation toward zero
            *slot = adj as f64;
            ttf32 = 0.0;
            dev32 = 0.0;
            ttf64 = 0.0;
            dev64 = 0.0;
        } else {
            *slot = 0.0;
        }
    }
}

/// Shift vector (one entry per glyph, IR convention) that Word's
/// Save-as-PDF writer produces for a line of text.
pub fn word_emit_shifts(
    text: &[char],
    metrics: &FontMetrics,
    internal: &InternalWidthTable,
    size: f64,
    version: WordVersion,
) -> Result<Vec<f64>> {
    let internal_shifts = word_emit_shifts_internal(text, metrics, internal, size, version, false)?;
    Ok(to_ir_shifts(&internal_shifts))
}

pub(crate) fn word_emit_shifts_internal(
    text: &[char],
    metrics: &FontMetrics,
    internal: &InternalWidthTable,
    size: f64,
    version: WordVersion,
    force_f64: bool,
) -> Result<Vec<f64>> {
    let mut state = word_init_widths(text, metrics, internal, size, version)?;
    word_wysiwyg_widths(&mut state);
    let mut shifts = vec![0.0; text.len()];
    run_adjust(&state, &mut shifts, -1, force_f64);
    Ok(shifts)
}

// ---------------------------------------------------------------------------
// Edit history

/// A fragment-split placement and the shift vector it produces.
#[derive(Debug, Clone, PartialEq)]
pub struct EditVariant {
    /// Glyph indices after which the fragment boundary sits, strictly
    /// increasing.
    pub split_points: Vec<usize>,
    /// Resulting shifts, IR convention.
    pub shifts: Vec<f64>,
}

fn dots_to_pdf_units(dots: i64) -> f64 {
    dots as f64 * (72.0 / 600.0)
}

fn round_to_digits(x: f64, digits: i32) -> f64 {
    let p = 10f64.powi(digits);
    (x * p).round() / p
}

/// Adjustment each position would need to restore the line's true width
/// if the fragment were split there. The 600-dot offset is the one-inch
/// margin Word measures from.
pub fn compute_edit_adjustments(state: &WysiwygState, shifts: &[f64]) -> Vec<f64> {
    let n = state.len();
    let k = state.font_size / 1000.0;
    let mut total_dots: i64 = 0;
    let mut total_dev_width: f64 = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        total_dots += if i == n - 1 {
            state.uncorrected_pixel_widths[i]
        } else {
            state.pixel_widths[i]
        };
        total_dev_width += (state.text_space_widths[i] - shifts[i]) * k;
        let real_width = total_dev_width + dots_to_pdf_units(600);
        let edited_width = round_to_digits(dots_to_pdf_units(total_dots + 600), 5);
        out.push((real_width - edited_width) / k);
    }
    out
}

/// Apply an edit boundary after glyph `i`: add the rounded restoration
/// shift there and re-run the emission pass for everything after it.
pub fn apply_edit(
    state: &WysiwygState,
    shifts: &mut Vec<f64>,
    e_adjs: &[f64],
    i: usize,
) -> Vec<f64> {
    let k = state.font_size / 1000.0;
    // Milli-point rounding through f32, matching the writer.
    let r = ((e_adjs[i] * k * 1000.0) as f32).round();
    let disp = ((r / 1000.0) as f64) / k;
    shifts[i] += disp;
    run_adjust(state, shifts, i as isize, false);
    compute_edit_adjustments(state, shifts)
}

/// Replay a recorded suffix against a saved line state, applying edits
/// wherever the recorded shift equals the saved shift plus the edit
/// adjustment, then the hyphen rule: a fragment boundary lands both
/// before and at each '-'.
pub fn edit_suffix(
    state: &WysiwygState,
    saved_shifts: &mut Vec<f64>,
    mut saved_e_adjs: Vec<f64>,
    suffix_shifts: &[f64],
) -> Vec<f64> {
    let n = saved_shifts.len();
    let m = suffix_shifts.len();
    if m == 0 || m > n {
        return saved_e_adjs;
    }
    for i in 0..m.saturating_sub(1) {
        let ind = n - m + i;
        let guess = ((10.0 * saved_shifts[ind]) as f32).round();
        let check = ((10.0 * suffix_shifts[i]) as f32).round();
        if ind == n - 1 {
            saved_shifts[ind] = suffix_shifts[i];
            break;
        }
        let adj = ((10.0 * saved_e_adjs[ind]) as f32).round();
        if guess + adj == check {
            saved_e_adjs = apply_edit(state, saved_shifts, &saved_e_adjs.clone(), ind);
        }
    }
    for i in 1..n.saturating_sub(1) {
        if state.chars[i] == '-' {
            saved_e_adjs = apply_edit(state, saved_shifts, &saved_e_adjs.clone(), i - 1);
            saved_e_adjs = apply_edit(state, saved_shifts, &saved_e_adjs.clone(), i);
        }
    }
    saved_e_adjs
}

/// Enumerate the shift vectors reachable by splitting the line's
/// internal fragment at up to `max_splits` places inside or adjacent to
/// the redaction span. Hyphens always contribute their double-edit
/// variant. Vectors are deduplicated.
pub fn word_edit_variants(
    text: &[char],
    metrics: &FontMetrics,
    internal: &InternalWidthTable,
    size: f64,
    version: WordVersion,
    redaction_span: std::ops::Range<usize>,
    max_splits: usize,
    budget: usize,
) -> Result<Vec<EditVariant>> {
    let n = text.len();
    let mut state = word_init_widths(text, metrics, internal, size, version)?;
    word_wysiwyg_widths(&mut state);
    let mut base = vec![0.0; n];
    run_adjust(&state, &mut base, -1, false);
    let base_adjs = compute_edit_adjustments(&state, &base);

    let mut variants: Vec<EditVariant> = Vec::new();
    let mut push = |splits: Vec<usize>, shifts: Vec<f64>, variants: &mut Vec<EditVariant>| {
        let ir = to_ir_shifts(&shifts);
        if !variants.iter().any(|v| v.shifts == ir) {
            variants.push(EditVariant {
                split_points: splits,
                shifts: ir,
            });
        }
    };
    push(Vec::new(), base.clone(), &mut variants);
    if n < 2 {
        return Ok(variants);
    }

    // Boundaries inside or touching the span; a boundary after glyph i
    // is valid for i in [0, n-2].
    let lo = redaction_span.start.saturating_sub(1);
    let hi = redaction_span.end.min(n - 2);
    let mut candidates: Vec<usize> = (lo..=hi).collect();
    for (i, &c) in text.iter().enumerate() {
        if c == '-' && i >= 1 && i <= n - 2 {
            if !candidates.contains(&(i - 1)) {
                candidates.push(i - 1);
            }
            if !candidates.contains(&i) {
                candidates.push(i);
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    let mut combos = 0usize;
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((splits, next)) = stack.pop() {
        if splits.len() < max_splits {
            for (ci, &cand) in candidates.iter().enumerate().skip(next) {
                let mut s = splits.clone();
                s.push(cand);
                combos += 1;
                if combos > budget {
                    return Err(Error::CombinatoricBudgetExceeded(budget));
                }
                let mut shifts = base.clone();
                let mut adjs = base_adjs.clone();
                for &point in &s {
                    adjs = apply_edit(&state, &mut shifts, &adjs, point);
                }
                push(s.clone(), shifts, &mut variants);
                stack.push((s, ci + 1));
            }
        }
    }

    // The hyphen double edit applies regardless of the split budget; it
    // models what re-saving an edited hyphenated line does.
    let hyphens: Vec<usize> = text
        .iter()
        .enumerate()
        .filter(|(i, &c)| c == '-' && *i >= 1 && *i <= n - 2)
        .map(|(i, _)| i)
        .collect();
    if !hyphens.is_empty() {
        let mut shifts = base.clone();
        let mut adjs = base_adjs;
        let mut splits = Vec::new();
        for &i in &hyphens {
            adjs = apply_edit(&state, &mut shifts, &adjs, i - 1);
            adjs = apply_edit(&state, &mut shifts, &adjs, i);
            splits.push(i - 1);
            splits.push(i);
        }
        splits.sort_unstable();
        splits.dedup();
        push(splits, shifts, &mut variants);
    }
    Ok(variants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn table(font: &str, size: u32, version: WordVersion) -> InternalWidthTable {
        let csv = data::word_internal_csv(font, size, version.year()).expect("shipped table");
        InternalWidthTable::parse_csv(&csv).expect("valid table")
    }

    #[test]
    fn font_scaled_width_doubles_size_product() {
        // width 1000 at 12 pt -> 24000.
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let state =
            word_init_widths(&['b'], &tnr, &t, 12.0, WordVersion::W2019).unwrap();
        assert_eq!(state.font_scaled_widths[0], 1024 * 12 * 2);
    }

    #[test]
    fn empty_line_yields_empty_state() {
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let state = word_init_widths(&[], &tnr, &t, 12.0, WordVersion::W2019).unwrap();
        assert!(state.is_empty());
        assert_eq!(
            word_emit_shifts(&[], &tnr, &t, 12.0, WordVersion::W2019).unwrap(),
            Vec::<f64>::new()
        );
    }

    #[test]
    fn unit_normalized_tables_round_trip_text_space_widths() {
        // u = 1000 with 1000-per-em metrics keeps the metric width.
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        for version in [WordVersion::W2007, WordVersion::W2019] {
            let state = word_init_widths(&['t'], &tnr, &t, 12.0, version).unwrap();
            assert_eq!(state.text_space_widths[0], 569.0);
        }
    }

    #[test]
    fn single_glyph_pixel_width_is_ideal() {
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let mut state = word_init_widths(&['m'], &tnr, &t, 12.0, WordVersion::W2019).unwrap();
        word_wysiwyg_widths(&mut state);
        let ideal = t.pixel_w(state.font_scaled_widths[0]);
        assert_eq!(state.pixel_widths[0], ideal);
        assert_eq!(state.uncorrected_pixel_widths[0], ideal);
    }

    #[test]
    fn zero_error_pair_is_unchanged() {
        // Courier dots are exact at integer sizes, so no correction occurs.
        let courier = data::font("Courier").unwrap();
        let t = table("Courier", 12, WordVersion::W2019);
        let mut state =
            word_init_widths(&['a', 'b'], &courier, &t, 12.0, WordVersion::W2019).unwrap();
        let before = state.pixel_widths.clone();
        word_wysiwyg_widths(&mut state);
        assert_eq!(state.pixel_widths, before);
    }

    #[test]
    fn tracking_adjustment_halves_with_parity() {
        // Craft a two-glyph run where adjustmentDifference - accumulatedDiff
        // is 3: trackingAdj must become 1 (3>>1 us 1, plus parity only when
        // accumulatedDiff < -adjustmentDifference) and pixel[i-1] drops by it.
        let mut widths = BTreeMap::new();
        widths.insert('a', crate::units::TextSpaceUnit(1000));
        widths.insert('b', crate::units::TextSpaceUnit(1000));
        let metrics = FontMetrics::new("craft", 1000, widths);
        let mut dots = BTreeMap::new();
        dots.insert('a', 100); // ideal is 100 at 12pt (1000*12*2/240)
        dots.insert('b', 103); // ideal marginal is 100; difference 3
        let t = InternalWidthTable {
            version: WordVersion::W2019,
            font_size: 12.0,
            u_const: 1000.0,
            pixel_divisor: 240.0,
            brkpoint: 936000,
            dots,
        };
        let mut state = word_init_widths(&['a', 'b'], &metrics, &t, 12.0, WordVersion::W2019).unwrap();
        word_wysiwyg_widths(&mut state);
        // glyph 0: ideal 100, accumulatedDiff = 100-100 = 0.
        // glyph 1: orig 103, newAdj 100, adjustmentDifference 3, trackingAdj 3>>1 = 1.
        assert_eq!(state.pixel_widths[0], 99); // 100 - trackingAdj
        assert_eq!(state.pixel_widths[1], 101); // newAdj + trackingAdj
    }

    #[test]
    fn courier_line_emits_no_shifts() {
        let courier = data::font("Courier").unwrap();
        for version in [WordVersion::W2007, WordVersion::W2019] {
            let t = table("Courier", 12, version);
            let text: Vec<char> = "The quick brown fox jumps over the lazy dog".chars().collect();
            let shifts = word_emit_shifts(&text, &courier, &t, 12.0, version).unwrap();
            assert!(shifts.iter().all(|&s| s == 0.0));
        }
    }

    #[test]
    fn threshold_is_strict_and_value_truncates() {
        // Emission fires only beyond 0.003, and the value is
        // int(disp*1000 + 0.5).
        assert_eq!(((0.0031f64 * 1000.0) + 0.5) as i64, 3);
        assert_eq!(((0.004f64 * 1000.0) + 0.5) as i64, 4);
        let fires = |disp: f64| disp > 0.003 || disp < -0.003;
        assert!(!fires(0.003));
        assert!(fires(0.0031));
        assert!(!fires(-0.003));
        assert!(fires(-0.0031));
    }

    #[test]
    fn no_edit_variant_matches_plain_emission() {
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let text: Vec<char> = "Exhibit A. ".chars().collect();
        let base = word_emit_shifts(&text, &tnr, &t, 12.0, WordVersion::W2019).unwrap();
        let variants =
            word_edit_variants(&text, &tnr, &t, 12.0, WordVersion::W2019, 0..7, 0, 1000).unwrap();
        assert_eq!(variants.len(), 1);
        assert_eq!(variants[0].shifts, base);
        assert!(variants[0].split_points.is_empty());
    }

    #[test]
    fn hyphen_contributes_double_edit_variant() {
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let text: Vec<char> = "well-known remedy".chars().collect();
        let hyphen = text.iter().position(|&c| c == '-').unwrap();
        let variants =
            word_edit_variants(&text, &tnr, &t, 12.0, WordVersion::W2019, 0..4, 0, 1000).unwrap();
        assert!(variants
            .iter()
            .any(|v| v.split_points.contains(&(hyphen - 1)) && v.split_points.contains(&hyphen)));
    }

    #[test]
    fn edit_budget_is_enforced() {
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let text: Vec<char> = "a very long line of text for splitting".chars().collect();
        let res = word_edit_variants(&text, &tnr, &t, 12.0, WordVersion::W2019, 0..30, 4, 10);
        assert!(matches!(res, Err(Error::CombinatoricBudgetExceeded(10))));
    }

    #[test]
    fn suffix_replay_reproduces_edited_shifts() {
        let tnr = data::font("Times New Roman").unwrap();
        let t = table("Times New Roman", 12, WordVersion::W2019);
        let text: Vec<char> = "The witness stated that Garcia arrived".chars().collect();
        let mut state = word_init_widths(&text, &tnr, &t, 12.0, WordVersion::W2019).unwrap();
        word_wysiwyg_widths(&mut state);
        let mut base = vec![0.0; text.len()];
        run_adjust(&state, &mut base, -1, false);
        let base_adjs = compute_edit_adjustments(&state, &base);

        // Record an edited line: one split point mid-line.
        let mut edited = base.clone();
        let mut adjs = base_adjs.clone();
        adjs = apply_edit(&state, &mut edited, &adjs, 12);
        let _ = adjs;

        // Replay from the recorded suffix against the unedited state.
        let suffix_len = text.len() - 10;
        let suffix = edited[text.len() - suffix_len..].to_vec();
        let mut replayed = base.clone();
        let _ = edit_suffix(&state, &mut replayed, base_adjs, &suffix);
        assert_eq!(
            &replayed[text.len() - suffix_len..],
            suffix.as_slice(),
            "replayed suffix shifts must match the recording"
        );
    }
}
