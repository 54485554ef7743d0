//! Uniform glyph-positioning intermediate representation.
//!
//! All text-showing operators are folded into per-glyph advance widths and
//! shifts in integer text-space units, with sub-unit residue kept in a
//! side field. Filled rectangles are extracted with draw order and color.
//!
//! Shift sign convention: a glyph's shift is the net positional
//! adjustment applied immediately before it, in the TJ sense — a positive
//! value moves the glyph (and the rest of the line) left. The effective
//! advance between glyph `i` and glyph `i+1` is therefore
//! `advance[i] - shift[i+1]`, and `[(H)-2(i)] TJ` parses as H with shift
//! 0 followed by i with shift -2.

use crate::data;
use crate::error::Result;
use crate::metrics::FontMetrics;
use crate::pdf::{parse_content, ContentOp, Dict, Object, PdfFile};
use crate::units::{round_half_away, TextSpaceUnit};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FontId(pub usize);

/// One positioned glyph.
#[derive(Debug, Clone)]
pub struct Glyph {
    pub code: u32,
    pub unicode: Option<char>,
    /// Advance width from the document's width tables, 1000-per-em units.
    pub advance: TextSpaceUnit,
    /// Net positioning applied before this glyph, rounded to units.
    pub shift: TextSpaceUnit,
    /// Sub-unit remainder of the shift.
    pub shift_residue: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub font_id: FontId,
    pub font_size: f64,
    pub h_scale: f64,
    pub draw_order: u32,
    /// Character spacing active when the glyph was shown, in units.
    pub tc_units: f64,
    /// First glyph after an explicit positioning operator (Td/TD/Tm/T*).
    pub group_start: bool,
}

impl Glyph {
    /// Shift including its sub-unit residue.
    pub fn shift_exact(&self) -> f64 {
        self.shift.0 as f64 + self.shift_residue
    }

    pub fn is_space(&self) -> bool {
        self.unicode == Some(' ')
    }

    /// Points per text-space unit at this glyph's size and scale.
    pub fn unit_scale(&self) -> f64 {
        self.font_size * self.h_scale / 1000.0
    }
}

/// Word-level character-spacing annotation recovered from an OCR overlay.
#[derive(Debug, Clone, PartialEq)]
pub struct OcrWordAnnotation {
    /// Glyph index range of the word plus its successor space when the
    /// spacing carries over to it.
    pub span: Range<usize>,
    /// Per-glyph character spacing in text-space units.
    pub tc_units: f64,
    /// x coordinate where the word's positioning operator placed it.
    pub start_x: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TextLine {
    pub glyphs: Vec<Glyph>,
    pub baseline_y: f64,
    /// Index ranges of non-space glyph runs.
    pub words: Vec<Range<usize>>,
    pub ocr_words: Vec<OcrWordAnnotation>,
}

impl TextLine {
    pub fn text(&self) -> String {
        self.glyphs.iter().filter_map(|g| g.unicode).collect()
    }

    pub fn shift_vector(&self) -> Vec<f64> {
        self.glyphs.iter().map(|g| g.shift_exact()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectFill {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub color: (f64, f64, f64),
    pub draw_order: u32,
}

impl RectFill {
    pub fn contains_box(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> bool {
        const EPS: f64 = 1e-6;
        self.x0 <= x0 + EPS && self.y0 <= y0 + EPS && self.x1 >= x1 - EPS && self.y1 >= y1 - EPS
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }
}

#[derive(Debug, Clone, Default)]
pub struct PageIR {
    pub lines: Vec<TextLine>,
    pub rects: Vec<RectFill>,
    pub width: f64,
    pub height: f64,
}

impl PageIR {
    pub fn glyph_count(&self) -> usize {
        self.lines.iter().map(|l| l.glyphs.len()).sum()
    }
}

/// Per-font information gathered from the document itself.
#[derive(Debug, Clone)]
pub struct FontInfo {
    pub id: FontId,
    /// BaseFont name as written in the file.
    pub base_name: String,
    /// Canonical shipped-table name when the base name resolves to one.
    pub shipped: Option<&'static str>,
    /// Width table built from the document's font dictionaries.
    pub metrics: Arc<FontMetrics>,
    /// Glyphs present in the document's width/character maps.
    pub coverage: BTreeSet<char>,
    pub ascent: f64,
    pub descent: f64,
}

#[derive(Debug, Clone, Default)]
pub struct DocumentIR {
    pub pages: Vec<PageIR>,
    pub fonts: Vec<FontInfo>,
    pub producer_hint: Option<String>,
    pub warnings: Vec<String>,
}

impl DocumentIR {
    pub fn font(&self, id: FontId) -> &FontInfo {
        &self.fonts[id.0]
    }

    /// Union of glyph coverage over all fonts.
    pub fn glyph_coverage(&self) -> BTreeSet<char> {
        let mut set = BTreeSet::new();
        for f in &self.fonts {
            set.extend(f.coverage.iter().copied());
        }
        set
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Copy)]
struct Matrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    f: f64,
}

impl Matrix {
    const IDENTITY: Matrix = Matrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0, e: 0.0, f: 0.0 };

    fn mul(self, m: Matrix) -> Matrix {
        // self * m, row-vector convention: p' = p * self * m
        Matrix {
            a: self.a * m.a + self.b * m.c,
            b: self.a * m.b + self.b * m.d,
            c: self.c * m.a + self.d * m.c,
            d: self.c * m.b + self.d * m.d,
            e: self.e * m.a + self.f * m.c + m.e,
            f: self.e * m.b + self.f * m.d + m.f,
        }
    }

    fn translate(tx: f64, ty: f64) -> Matrix {
        Matrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0, e: tx, f: ty }
    }

    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)
    }

    fn is_axis_aligned(&self) -> bool {
        self.b.abs() < 1e-9 && self.c.abs() < 1e-9
    }
}

struct RawGlyph {
    code: u32,
    unicode: Option<char>,
    advance: i64,
    origin_x: f64,
    origin_y: f64,
    font_id: FontId,
    font_size: f64,
    h_scale: f64,
    draw_order: u32,
    tc_units: f64,
    group_start: bool,
}

struct Interp<'a> {
    file: &'a PdfFile,
    fonts: Vec<FontInfo>,
    font_by_obj: BTreeMap<u32, FontId>,
    warnings: Vec<String>,
    draw_order: u32,
}

struct TextState {
    tc: f64,
    tw: f64,
    tz: f64,
    tl: f64,
    rise: f64,
    size: f64,
    font: Option<FontId>,
    tm: Matrix,
    tlm: Matrix,
    group_start_pending: bool,
}

impl Default for TextState {
    fn default() -> Self {
        TextState {
            tc: 0.0,
            tw: 0.0,
            tz: 100.0,
            tl: 0.0,
            rise: 0.0,
            size: 0.0,
            font: None,
            tm: Matrix::IDENTITY,
            tlm: Matrix::IDENTITY,
            group_start_pending: true,
        }
    }
}

/// Parse a PDF into the glyph-positioning representation.
pub fn parse_document(bytes: &[u8]) -> Result<DocumentIR> {
    let file = PdfFile::parse(bytes)?;
    let mut interp = Interp {
        file: &file,
        fonts: Vec::new(),
        font_by_obj: BTreeMap::new(),
        warnings: Vec::new(),
        draw_order: 0,
    };
    let mut pages_ir = Vec::new();
    for page in file.pages()? {
        pages_ir.push(interp.run_page(&page)?);
    }
    let producer_hint = file
        .trailer
        .get("Info")
        .map(|o| file.resolve(o))
        .and_then(|o| o.as_dict().cloned())
        .and_then(|d| d.get("Producer").cloned())
        .and_then(|o| match o {
            Object::Str(s) => Some(String::from_utf8_lossy(&s).into_owned()),
            _ => None,
        });
    Ok(DocumentIR {
        pages: pages_ir,
        fonts: interp.fonts,
        producer_hint,
        warnings: interp.warnings,
    })
}

impl<'a> Interp<'a> {
    fn run_page(&mut self, page: &Dict) -> Result<PageIR> {
        let media = self
            .file
            .get(page, "MediaBox")
            .and_then(|o| o.as_array().map(|a| a.to_vec()))
            .unwrap_or_default();
        let (width, height) = if media.len() == 4 {
            (
                media[2].as_f64().unwrap_or(612.0) - media[0].as_f64().unwrap_or(0.0),
                media[3].as_f64().unwrap_or(792.0) - media[1].as_f64().unwrap_or(0.0),
            )
        } else {
            (612.0, 792.0)
        };

        let font_map = self.page_fonts(page);
        let content = self.file.page_content(page)?;
        let ops = parse_content(&content)?;
        let (glyphs, rects) = self.interpret(&ops, &font_map)?;
        let lines = assemble_lines(glyphs, &mut self.warnings);
        Ok(PageIR { lines, rects, width, height })
    }

    /// Resource-name to FontId map for one page.
    fn page_fonts(&mut self, page: &Dict) -> BTreeMap<String, FontId> {
        let mut map = BTreeMap::new();
        let Some(res) = self.file.get(page, "Resources").and_then(|o| o.as_dict().cloned()) else {
            return map;
        };
        let Some(fonts) = self.file.get(&res, "Font").and_then(|o| o.as_dict().cloned()) else {
            return map;
        };
        for (res_name, font_ref) in fonts {
            let obj_num = font_ref.as_ref().map(|r| r.num);
            if let Some(num) = obj_num {
                if let Some(&id) = self.font_by_obj.get(&num) {
                    map.insert(res_name, id);
                    continue;
                }
            }
            let Some(dict) = self.file.resolve(&font_ref).as_dict().cloned() else {
                continue;
            };
            let id = self.load_font(&dict);
            if let Some(num) = obj_num {
                self.font_by_obj.insert(num, id);
            }
            map.insert(res_name, id);
        }
        map
    }

    fn load_font(&mut self, dict: &Dict) -> FontId {
        let id = FontId(self.fonts.len());
        let base_name = self
            .file
            .get(dict, "BaseFont")
            .and_then(|o| o.as_name().map(str::to_string))
            .unwrap_or_else(|| format!("font-{}", id.0));
        let shipped = data::resolve_font_name(&base_name);

        let mut widths: BTreeMap<char, TextSpaceUnit> = BTreeMap::new();
        let first = self
            .file
            .get(dict, "FirstChar")
            .and_then(|o| o.as_int())
            .unwrap_or(0);
        let width_list = self
            .file
            .get(dict, "Widths")
            .and_then(|o| o.as_array().map(|a| a.to_vec()))
            .unwrap_or_default();
        for (i, w) in width_list.iter().enumerate() {
            let w = self.file.resolve(w).as_f64().unwrap_or(0.0);
            let code = first + i as i64;
            if w > 0.0 && (0..=255).contains(&code) {
                if let Some(c) = decode_code(code as u32) {
                    widths.insert(c, TextSpaceUnit(round_half_away(w)));
                }
            }
        }
        // No width array (e.g. builtin base-14 use): fall back to a
        // shipped table when the name resolves, so positions still fold.
        if widths.is_empty() {
            if let Some(canon) = shipped {
                if let Ok(m) = data::font(canon) {
                    widths = m.widths.clone();
                }
            }
        }
        let descriptor = self
            .file
            .get(dict, "FontDescriptor")
            .and_then(|o| o.as_dict().cloned());
        let ascent = descriptor
            .as_ref()
            .and_then(|d| self.file.get(d, "Ascent"))
            .and_then(|o| o.as_f64())
            .unwrap_or(800.0);
        let descent = descriptor
            .as_ref()
            .and_then(|d| self.file.get(d, "Descent"))
            .and_then(|o| o.as_f64())
            .unwrap_or(-200.0);

        let coverage: BTreeSet<char> = widths.keys().copied().collect();
        let metrics = if widths.is_empty() {
            self.warnings
                .push(format!("font {base_name}: no usable width table"));
            Arc::new(FontMetrics::new(&base_name, 1000, BTreeMap::new()))
        } else {
            Arc::new(FontMetrics::new(&base_name, 1000, widths))
        };
        self.fonts.push(FontInfo {
            id,
            base_name,
            shipped,
            metrics,
            coverage,
            ascent,
            descent,
        });
        id
    }

    fn interpret(
        &mut self,
        ops: &[ContentOp],
        font_map: &BTreeMap<String, FontId>,
    ) -> Result<(Vec<RawGlyph>, Vec<RectFill>)> {
        let mut glyphs = Vec::new();
        let mut rects = Vec::new();
        let mut ctm = Matrix::IDENTITY;
        let mut ctm_stack: Vec<Matrix> = Vec::new();
        let mut fill = (0.0, 0.0, 0.0);
        let mut fill_stack: Vec<(f64, f64, f64)> = Vec::new();
        let mut pending_rects: Vec<(f64, f64, f64, f64)> = Vec::new();
        let mut ts = TextState::default();

        let num = |op: &ContentOp, i: usize| op.operands.get(i).and_then(|o| o.as_f64());
        for op in ops {
            match op.operator.as_str() {
                "q" => {
                    ctm_stack.push(ctm);
                    fill_stack.push(fill);
                }
                "Q" => {
                    if let Some(m) = ctm_stack.pop() {
                        ctm = m;
                    }
                    if let Some(c) = fill_stack.pop() {
                        fill = c;
                    }
                }
                "cm" => {
                    if op.operands.len() == 6 {
                        let m = Matrix {
                            a: num(op, 0).unwrap_or(1.0),
                            b: num(op, 1).unwrap_or(0.0),
                            c: num(op, 2).unwrap_or(0.0),
                            d: num(op, 3).unwrap_or(1.0),
                            e: num(op, 4).unwrap_or(0.0),
                            f: num(op, 5).unwrap_or(0.0),
                        };
                        ctm = m.mul(ctm);
                    }
                }
                "g" => {
                    let v = num(op, 0).unwrap_or(0.0);
                    fill = (v, v, v);
                }
                "rg" => {
                    fill = (
                        num(op, 0).unwrap_or(0.0),
                        num(op, 1).unwrap_or(0.0),
                        num(op, 2).unwrap_or(0.0),
                    );
                }
                "k" => {
                    let (c, m, y, k) = (
                        num(op, 0).unwrap_or(0.0),
                        num(op, 1).unwrap_or(0.0),
                        num(op, 2).unwrap_or(0.0),
                        num(op, 3).unwrap_or(0.0),
                    );
                    fill = (
                        (1.0 - c) * (1.0 - k),
                        (1.0 - m) * (1.0 - k),
                        (1.0 - y) * (1.0 - k),
                    );
                }
                "sc" | "scn" => {
                    let vals: Vec<f64> = op.operands.iter().filter_map(|o| o.as_f64()).collect();
                    fill = match vals.len() {
                        1 => (vals[0], vals[0], vals[0]),
                        3 => (vals[0], vals[1], vals[2]),
                        4 => (
                            (1.0 - vals[0]) * (1.0 - vals[3]),
                            (1.0 - vals[1]) * (1.0 - vals[3]),
                            (1.0 - vals[2]) * (1.0 - vals[3]),
                        ),
                        _ => fill,
                    };
                }
                "re" => {
                    if op.operands.len() == 4 {
                        pending_rects.push((
                            num(op, 0).unwrap_or(0.0),
                            num(op, 1).unwrap_or(0.0),
                            num(op, 2).unwrap_or(0.0),
                            num(op, 3).unwrap_or(0.0),
                        ));
                    }
                }
                "f" | "F" | "f*" | "B" | "B*" | "b" | "b*" => {
                    for (x, y, w, h) in pending_rects.drain(..) {
                        if !ctm.is_axis_aligned() {
                            self.warnings.push("skipped rect under rotated transform".into());
                            continue;
                        }
                        let (x0, y0) = ctm.apply(x, y);
                        let (x1, y1) = ctm.apply(x + w, y + h);
                        self.draw_order += 1;
                        rects.push(RectFill {
                            x0: x0.min(x1),
                            y0: y0.min(y1),
                            x1: x0.max(x1),
                            y1: y0.max(y1),
                            color: fill,
                            draw_order: self.draw_order,
                        });
                    }
                }
                "S" | "s" | "n" => {
                    pending_rects.clear();
                }
                "W" | "W*" => {}
                "BT" => {
                    ts.tm = Matrix::IDENTITY;
                    ts.tlm = Matrix::IDENTITY;
                    ts.group_start_pending = true;
                }
                "ET" => {}
                "Tc" => ts.tc = num(op, 0).unwrap_or(0.0),
                "Tw" => ts.tw = num(op, 0).unwrap_or(0.0),
                "Tz" => ts.tz = num(op, 0).unwrap_or(100.0),
                "TL" => ts.tl = num(op, 0).unwrap_or(0.0),
                "Ts" => ts.rise = num(op, 0).unwrap_or(0.0),
                "Tf" => {
                    let name = op.operands.first().and_then(|o| o.as_name());
                    ts.font = name.and_then(|n| font_map.get(n).copied());
                    if ts.font.is_none() {
                        self.warnings
                            .push(format!("unknown font resource {name:?}"));
                    }
                    ts.size = num(op, 1).unwrap_or(0.0);
                }
                "Td" => {
                    let m = Matrix::translate(num(op, 0).unwrap_or(0.0), num(op, 1).unwrap_or(0.0));
                    ts.tlm = m.mul(ts.tlm);
                    ts.tm = ts.tlm;
                    ts.group_start_pending = true;
                }
                "TD" => {
                    ts.tl = -num(op, 1).unwrap_or(0.0);
                    let m = Matrix::translate(num(op, 0).unwrap_or(0.0), num(op, 1).unwrap_or(0.0));
                    ts.tlm = m.mul(ts.tlm);
                    ts.tm = ts.tlm;
                    ts.group_start_pending = true;
                }
                "Tm" => {
                    if op.operands.len() == 6 {
                        ts.tlm = Matrix {
                            a: num(op, 0).unwrap_or(1.0),
                            b: num(op, 1).unwrap_or(0.0),
                            c: num(op, 2).unwrap_or(0.0),
                            d: num(op, 3).unwrap_or(1.0),
                            e: num(op, 4).unwrap_or(0.0),
                            f: num(op, 5).unwrap_or(0.0),
                        };
                        ts.tm = ts.tlm;
                        ts.group_start_pending = true;
                    }
                }
                "T*" => {
                    let m = Matrix::translate(0.0, -ts.tl);
                    ts.tlm = m.mul(ts.tlm);
                    ts.tm = ts.tlm;
                    ts.group_start_pending = true;
                }
                "Tj" => {
                    if let Some(Object::Str(s)) = op.operands.first() {
                        let s = s.clone();
                        self.show_string(&s, &mut ts, ctm, &mut glyphs)?;
                    }
                }
                "'" => {
                    let m = Matrix::translate(0.0, -ts.tl);
                    ts.tlm = m.mul(ts.tlm);
                    ts.tm = ts.tlm;
                    ts.group_start_pending = true;
                    if let Some(Object::Str(s)) = op.operands.first() {
                        let s = s.clone();
                        self.show_string(&s, &mut ts, ctm, &mut glyphs)?;
                    }
                }
                "\"" => {
                    ts.tw = num(op, 0).unwrap_or(0.0);
                    ts.tc = num(op, 1).unwrap_or(0.0);
                    let m = Matrix::translate(0.0, -ts.tl);
                    ts.tlm = m.mul(ts.tlm);
                    ts.tm = ts.tlm;
                    ts.group_start_pending = true;
                    if let Some(Object::Str(s)) = op.operands.get(2) {
                        let s = s.clone();
                        self.show_string(&s, &mut ts, ctm, &mut glyphs)?;
                    }
                }
                "TJ" => {
                    if let Some(Object::Array(items)) = op.operands.first() {
                        let items = items.clone();
                        for item in items {
                            match item {
                                Object::Str(s) => {
                                    self.show_string(&s, &mut ts, ctm, &mut glyphs)?;
                                }
                                Object::Int(_) | Object::Real(_) => {
                                    let t = item.as_f64().unwrap_or(0.0);
                                    let tx = -t / 1000.0 * ts.size * (ts.tz / 100.0);
                                    ts.tm = Matrix::translate(tx, 0.0).mul(ts.tm);
                                }
                                _ => {}
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        Ok((glyphs, rects))
    }

    fn show_string(
        &mut self,
        s: &[u8],
        ts: &mut TextState,
        ctm: Matrix,
        glyphs: &mut Vec<RawGlyph>,
    ) -> Result<()> {
        let Some(font_id) = ts.font else {
            self.warnings.push("text shown with no font set".into());
            return Ok(());
        };
        let info = self.fonts[font_id.0].clone();
        let trm = ts.tm.mul(ctm);
        if !trm.is_axis_aligned() || trm.a <= 0.0 {
            self.warnings
                .push("skipped rotated or mirrored text".into());
            // Still advance the matrix so later text lands correctly.
        }
        for &code in s {
            let c = decode_code(code as u32);
            let unicode = match c {
                Some(ch) if info.metrics.widths.contains_key(&ch) || ch == ' ' => Some(ch),
                Some(ch) => Some(ch),
                None => {
                    self.warnings
                        .push(format!("unmappable glyph code {code:#x}"));
                    None
                }
            };
            let w0 = unicode
                .and_then(|ch| info.metrics.widths.get(&ch))
                .map(|w| w.0)
                .unwrap_or(0);
            let (ox, oy) = ts.tm.mul(ctm).apply(0.0, ts.rise);
            self.draw_order += 1;
            if trm.is_axis_aligned() && trm.a > 0.0 {
                glyphs.push(RawGlyph {
                    code: code as u32,
                    unicode,
                    advance: w0,
                    origin_x: ox,
                    origin_y: oy,
                    font_id,
                    font_size: ts.size * trm.a,
                    h_scale: ts.tz / 100.0,
                    draw_order: self.draw_order,
                    tc_units: if ts.size > 0.0 {
                        ts.tc * 1000.0 / ts.size
                    } else {
                        0.0
                    },
                    group_start: std::mem::take(&mut ts.group_start_pending),
                });
            }
            let mut tx = w0 as f64 / 1000.0 * ts.size + ts.tc;
            if code == 32 {
                tx += ts.tw;
            }
            tx *= ts.tz / 100.0;
            ts.tm = Matrix::translate(tx, 0.0).mul(ts.tm);
        }
        Ok(())
    }
}

/// Single-byte code to unicode. The corpus and the court-document PDFs
/// this tool targets use WinAnsi-compatible codes; the printable Latin-1
/// range maps directly.
fn decode_code(code: u32) -> Option<char> {
    match code {
        0x20..=0x7e => char::from_u32(code),
        0xa0..=0xff => char::from_u32(code),
        _ => None,
    }
}

/// Group raw glyphs into baseline lines, sort left to right, and derive
/// shifts from the gap between expected and actual origins.
fn assemble_lines(raw: Vec<RawGlyph>, warnings: &mut Vec<String>) -> Vec<TextLine> {
    if raw.is_empty() {
        return Vec::new();
    }
    // Cluster baselines within 0.2 pt.
    let mut ys: Vec<f64> = raw.iter().map(|g| g.origin_y).collect();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<f64> = Vec::new();
    for y in ys {
        match clusters.last() {
            Some(&last) if (y - last).abs() < 0.2 => {}
            _ => clusters.push(y),
        }
    }
    let cluster_of = |y: f64| -> usize {
        clusters
            .iter()
            .position(|&c| (y - c).abs() < 0.2)
            .unwrap_or(0)
    };

    let mut buckets: BTreeMap<usize, Vec<RawGlyph>> = BTreeMap::new();
    for g in raw {
        buckets.entry(cluster_of(g.origin_y)).or_default().push(g);
    }

    let mut lines = Vec::new();
    // Reading order: top of page first (device y grows upward).
    for (_, mut bucket) in buckets.into_iter().rev() {
        bucket.sort_by(|a, b| {
            a.origin_x
                .partial_cmp(&b.origin_x)
                .unwrap()
                .then(a.draw_order.cmp(&b.draw_order))
        });
        let baseline_y = bucket[0].origin_y;
        let mut glyphs = Vec::with_capacity(bucket.len());
        for (j, g) in bucket.iter().enumerate() {
            let shift_exact = if j == 0 {
                0.0
            } else {
                let prev = &bucket[j - 1];
                let expected = prev.origin_x + prev.advance as f64 * prev.font_size * prev.h_scale / 1000.0;
                let scale = g.font_size * g.h_scale / 1000.0;
                if scale > 0.0 {
                    (expected - g.origin_x) / scale
                } else {
                    0.0
                }
            };
            let units = round_half_away(shift_exact);
            // Snap float noise from serialized coordinates.
            let residue = {
                let r = shift_exact - units as f64;
                if r.abs() < 5e-4 {
                    0.0
                } else {
                    r
                }
            };
            glyphs.push(Glyph {
                code: g.code,
                unicode: g.unicode,
                advance: TextSpaceUnit(g.advance),
                shift: TextSpaceUnit(units),
                shift_residue: residue,
                origin_x: g.origin_x,
                origin_y: g.origin_y,
                font_id: g.font_id,
                font_size: g.font_size,
                h_scale: g.h_scale,
                draw_order: g.draw_order,
                tc_units: g.tc_units,
                group_start: g.group_start,
            });
        }
        for w in glyphs.windows(2) {
            if w[1].origin_x < w[0].origin_x - 1e-6 {
                warnings.push(format!(
                    "non-monotone glyph origins on line at y={baseline_y:.2}"
                ));
                break;
            }
        }
        let words = word_spans(&glyphs);
        let mut line = TextLine {
            glyphs,
            baseline_y,
            words,
            ocr_words: Vec::new(),
        };
        line.ocr_words = fold_ocr_operators(&line);
        lines.push(line);
    }
    lines
}

fn word_spans(glyphs: &[Glyph]) -> Vec<Range<usize>> {
    let mut words = Vec::new();
    let mut start = None;
    for (i, g) in glyphs.iter().enumerate() {
        if g.is_space() {
            if let Some(s) = start.take() {
                words.push(s..i);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        words.push(s..glyphs.len());
    }
    words
}

/// Recover word-granularity character-spacing annotations from a line,
/// as emitted by OCR overlays that set a spacing per word and position
/// each word with its own operator.
///
/// A word is annotated when all of its glyphs were shown under one
/// nonzero spacing value; the span extends over the successor space when
/// the same spacing still applied there.
pub fn fold_ocr_operators(line: &TextLine) -> Vec<OcrWordAnnotation> {
    let mut out = Vec::new();
    for word in &line.words {
        let glyphs = &line.glyphs[word.clone()];
        if glyphs.is_empty() {
            continue;
        }
        let tc = glyphs[0].tc_units;
        if tc == 0.0 || !glyphs.iter().all(|g| g.tc_units == tc) {
            continue;
        }
        let mut span = word.clone();
        if let Some(next) = line.glyphs.get(word.end) {
            if next.is_space() && next.tc_units == tc {
                span = span.start..word.end + 1;
            }
        }
        out.push(OcrWordAnnotation {
            span: span.clone(),
            tc_units: tc,
            start_x: line.glyphs[word.start].origin_x,
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Dump

/// Deterministic line-per-glyph listing of a parsed document.
///
/// Columns: page, line, glyph index, glyph, advance, shift, residue,
/// x, y, font, size. Shifts follow the TJ sign convention: positive
/// moves the glyph left, and `advance[i] - shift[i+1]` is the effective
/// advance between neighbors.
pub fn dump_ir(doc: &DocumentIR) -> String {
    let mut out = String::new();
    out.push_str("# glyph positioning dump; units are 1/1000 font size\n");
    out.push_str(
        "# shift sign: positive moves the glyph left (TJ convention); shift applies before its glyph\n",
    );
    out.push_str("page\tline\tglyph\tchar\tadvance\tshift\tresidue\tx\ty\tfont\tsize\n");
    for (p, page) in doc.pages.iter().enumerate() {
        for (l, line) in page.lines.iter().enumerate() {
            for (g, glyph) in line.glyphs.iter().enumerate() {
                let ch = match glyph.unicode {
                    Some(' ') => "space".to_string(),
                    Some(c) => c.to_string(),
                    None => format!("#{:02x}", glyph.code),
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}",
                    p,
                    l,
                    g,
                    ch,
                    glyph.advance.0,
                    glyph.shift.0,
                    glyph.shift_residue,
                    glyph.origin_x,
                    glyph.origin_y,
                    doc.font(glyph.font_id).base_name,
                    glyph.font_size,
                );
            }
        }
    }
    out
}
