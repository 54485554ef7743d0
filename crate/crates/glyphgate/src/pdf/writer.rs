//! PDF generation: full documents for the synthetic corpus and
//! incremental updates that rewrite only touched content streams.

use super::object::{format_real, write_object, Dict, ObjRef, Object, Stream};
use super::reader::{find_last, PdfFile};
use crate::data;
use crate::error::{Error, Result};
use flate2::write::ZlibEncoder;
use flate2::Compression;
use std::collections::BTreeMap;
use std::io::Write as _;

/// Items of a TJ show array.
#[derive(Debug, Clone)]
pub enum TjItem {
    Text(String),
    /// Positional adjustment in text-space units; positive moves the
    /// following text left.
    Adjust(f64),
}

/// Content being accumulated for one page.
pub struct PageContent {
    pub width: f64,
    pub height: f64,
    content: Vec<u8>,
    fonts_used: Vec<String>,
}

impl PageContent {
    pub fn new(width: f64, height: f64) -> Self {
        PageContent {
            width,
            height,
            content: Vec::new(),
            fonts_used: Vec::new(),
        }
    }

    pub fn us_letter() -> Self {
        PageContent::new(612.0, 792.0)
    }

    pub fn raw(&mut self, s: &str) {
        self.content.extend_from_slice(s.as_bytes());
        self.content.push(b'\n');
    }

    /// Filled rectangle in device space, drawn at the current position in
    /// the content stream (draw order is stream order).
    pub fn fill_rect(&mut self, x: f64, y: f64, w: f64, h: f64, rgb: (f64, f64, f64)) {
        self.raw(&format!(
            "{} {} {} rg {} {} {} {} re f",
            format_real(rgb.0),
            format_real(rgb.1),
            format_real(rgb.2),
            format_real(x),
            format_real(y),
            format_real(w),
            format_real(h)
        ));
    }

    pub fn begin_text(&mut self) {
        self.raw("BT");
    }

    pub fn end_text(&mut self) {
        self.raw("ET");
    }

    pub fn set_font(&mut self, res_name: &str, size: f64) {
        if !self.fonts_used.contains(&res_name.to_string()) {
            self.fonts_used.push(res_name.to_string());
        }
        self.raw(&format!("/{} {} Tf", res_name, format_real(size)));
    }

    pub fn set_text_matrix(&mut self, x: f64, y: f64) {
        self.raw(&format!("1 0 0 1 {} {} Tm", format_real(x), format_real(y)));
    }

    pub fn td(&mut self, dx: f64, dy: f64) {
        self.raw(&format!("{} {} Td", format_real(dx), format_real(dy)));
    }

    pub fn set_char_spacing(&mut self, tc_pt: f64) {
        self.raw(&format!("{} Tc", format_real(tc_pt)));
    }

    pub fn set_word_spacing(&mut self, tw_pt: f64) {
        self.raw(&format!("{} Tw", format_real(tw_pt)));
    }

    pub fn show_tj(&mut self, items: &[TjItem]) {
        let mut line = Vec::new();
        line.push(b'[');
        for item in items {
            match item {
                TjItem::Text(t) => {
                    write_object(&mut line, &Object::Str(encode_latin1(t)));
                }
                TjItem::Adjust(a) => {
                    line.extend_from_slice(format_real(*a).as_bytes());
                }
            }
        }
        line.extend_from_slice(b"] TJ");
        self.content.extend_from_slice(&line);
        self.content.push(b'\n');
    }

    pub fn show_tj_simple(&mut self, text: &str) {
        self.show_tj(&[TjItem::Text(text.to_string())]);
    }
}

/// Map text to single-byte codes. The corpus sticks to the printable
/// ASCII range so the identity mapping is enough.
pub fn encode_latin1(text: &str) -> Vec<u8> {
    text.chars()
        .map(|c| if (c as u32) < 256 { c as u8 } else { b'?' })
        .collect()
}

/// Builds a complete single- or multi-page PDF with simple fonts whose
/// width arrays come from shipped metrics.
pub struct PdfBuilder {
    pages: Vec<PageContent>,
    fonts: Vec<String>, // canonical font names; resource name is F{i+1}
    pub trailer_extra: Dict,
    pub compress: bool,
    pub producer: Option<String>,
}

impl Default for PdfBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl PdfBuilder {
    pub fn new() -> Self {
        PdfBuilder {
            pages: Vec::new(),
            fonts: Vec::new(),
            trailer_extra: Dict::new(),
            compress: false,
            producer: None,
        }
    }

    /// Register a font by canonical name, returning its resource name.
    pub fn register_font(&mut self, canonical: &str) -> String {
        if let Some(i) = self.fonts.iter().position(|f| f == canonical) {
            return format!("F{}", i + 1);
        }
        self.fonts.push(canonical.to_string());
        format!("F{}", self.fonts.len())
    }

    pub fn add_page(&mut self, page: PageContent) {
        self.pages.push(page);
    }

    pub fn finish(self) -> Vec<u8> {
        let n_pages = self.pages.len();
        let n_fonts = self.fonts.len();
        // Object layout: 1 catalog, 2 pages root, then per page
        // [page dict, content], then per font [font dict, descriptor],
        // then optional info.
        let page_obj = |i: usize| (3 + i * 2) as u32;
        let content_obj = |i: usize| (4 + i * 2) as u32;
        let font_obj = |i: usize| (3 + n_pages * 2 + i * 2) as u32;
        let desc_obj = |i: usize| (4 + n_pages * 2 + i * 2) as u32;

        let mut objects: Vec<(u32, Object)> = Vec::new();
        let mut catalog = Dict::new();
        catalog.insert("Type".into(), Object::Name("Catalog".into()));
        catalog.insert("Pages".into(), Object::Ref(ObjRef::new(2, 0)));
        objects.push((1, Object::Dict(catalog)));

        let mut pages_dict = Dict::new();
        pages_dict.insert("Type".into(), Object::Name("Pages".into()));
        pages_dict.insert(
            "Kids".into(),
            Object::Array(
                (0..n_pages)
                    .map(|i| Object::Ref(ObjRef::new(page_obj(i), 0)))
                    .collect(),
            ),
        );
        pages_dict.insert("Count".into(), Object::Int(n_pages as i64));
        objects.push((2, Object::Dict(pages_dict)));

        let mut font_res = Dict::new();
        for i in 0..n_fonts {
            font_res.insert(format!("F{}", i + 1), Object::Ref(ObjRef::new(font_obj(i), 0)));
        }

        for (i, page) in self.pages.iter().enumerate() {
            let mut d = Dict::new();
            d.insert("Type".into(), Object::Name("Page".into()));
            d.insert("Parent".into(), Object::Ref(ObjRef::new(2, 0)));
            d.insert(
                "MediaBox".into(),
                Object::Array(vec![
                    Object::Int(0),
                    Object::Int(0),
                    Object::Real(page.width),
                    Object::Real(page.height),
                ]),
            );
            let mut res = Dict::new();
            res.insert("Font".into(), Object::Dict(font_res.clone()));
            d.insert("Resources".into(), Object::Dict(res));
            d.insert("Contents".into(), Object::Ref(ObjRef::new(content_obj(i), 0)));
            objects.push((page_obj(i), Object::Dict(d)));

            let mut sd = Dict::new();
            let data = if self.compress {
                let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
                enc.write_all(&page.content).expect("in-memory write");
                let data = enc.finish().expect("in-memory flush");
                sd.insert("Filter".into(), Object::Name("FlateDecode".into()));
                data
            } else {
                page.content.clone()
            };
            sd.insert("Length".into(), Object::Int(data.len() as i64));
            objects.push((content_obj(i), Object::Stream(Stream { dict: sd, data })));
        }

        for (i, canonical) in self.fonts.iter().enumerate() {
            let metrics = data::font(canonical).expect("registered font ships metrics");
            let base = base_font_name(canonical);
            let widths: Vec<Object> = (32u8..=126)
                .map(|c| {
                    Object::Int(
                        metrics
                            .widths
                            .get(&(c as char))
                            .map(|w| w.0)
                            .unwrap_or(0),
                    )
                })
                .collect();
            let mut fd = Dict::new();
            fd.insert("Type".into(), Object::Name("Font".into()));
            fd.insert("Subtype".into(), Object::Name("TrueType".into()));
            fd.insert("BaseFont".into(), Object::Name(base.clone()));
            fd.insert("FirstChar".into(), Object::Int(32));
            fd.insert("LastChar".into(), Object::Int(126));
            fd.insert("Widths".into(), Object::Array(widths));
            fd.insert("Encoding".into(), Object::Name("WinAnsiEncoding".into()));
            fd.insert("FontDescriptor".into(), Object::Ref(ObjRef::new(desc_obj(i), 0)));
            objects.push((font_obj(i), Object::Dict(fd)));

            let mut dd = Dict::new();
            dd.insert("Type".into(), Object::Name("FontDescriptor".into()));
            dd.insert("FontName".into(), Object::Name(base));
            dd.insert("Flags".into(), Object::Int(if metrics.monospaced { 33 } else { 32 }));
            dd.insert("Ascent".into(), Object::Int(metrics.ascent as i64));
            dd.insert("Descent".into(), Object::Int(metrics.descent as i64));
            dd.insert("ItalicAngle".into(), Object::Int(0));
            dd.insert("CapHeight".into(), Object::Int(700));
            dd.insert("StemV".into(), Object::Int(80));
            dd.insert(
                "FontBBox".into(),
                Object::Array(vec![
                    Object::Int(-200),
                    Object::Int(metrics.descent as i64),
                    Object::Int(1200),
                    Object::Int(metrics.ascent as i64),
                ]),
            );
            objects.push((desc_obj(i), Object::Dict(dd)));
        }

        let mut info_ref = None;
        if let Some(producer) = &self.producer {
            let num = (3 + n_pages * 2 + n_fonts * 2) as u32;
            let mut d = Dict::new();
            d.insert("Producer".into(), Object::Str(producer.as_bytes().to_vec()));
            objects.push((num, Object::Dict(d)));
            info_ref = Some(num);
        }

        let mut out: Vec<u8> = Vec::new();
        out.extend_from_slice(b"%PDF-1.4\n%\xc7\xec\x8f\xa2\n");
        let mut offsets: BTreeMap<u32, usize> = BTreeMap::new();
        for (num, obj) in &objects {
            offsets.insert(*num, out.len());
            out.extend_from_slice(format!("{num} 0 obj\n").as_bytes());
            write_object(&mut out, obj);
            out.extend_from_slice(b"\nendobj\n");
        }
        let xref_pos = out.len();
        let size = objects.iter().map(|(n, _)| *n).max().unwrap_or(0) + 1;
        out.extend_from_slice(format!("xref\n0 {size}\n").as_bytes());
        out.extend_from_slice(b"0000000000 65535 f \n");
        for num in 1..size {
            match offsets.get(&num) {
                Some(off) => out.extend_from_slice(format!("{off:010} 00000 n \n").as_bytes()),
                None => out.extend_from_slice(b"0000000000 65535 f \n"),
            }
        }
        let mut trailer = Dict::new();
        trailer.insert("Size".into(), Object::Int(size as i64));
        trailer.insert("Root".into(), Object::Ref(ObjRef::new(1, 0)));
        if let Some(num) = info_ref {
            trailer.insert("Info".into(), Object::Ref(ObjRef::new(num, 0)));
        }
        for (k, v) in self.trailer_extra {
            trailer.insert(k, v);
        }
        out.extend_from_slice(b"trailer\n");
        write_object(&mut out, &Object::Dict(trailer));
        out.extend_from_slice(format!("\nstartxref\n{xref_pos}\n%%EOF\n").as_bytes());
        out
    }
}

pub fn base_font_name(canonical: &str) -> String {
    match canonical {
        "Times New Roman" => "TimesNewRomanPSMT".to_string(),
        "Arial" => "ArialMT".to_string(),
        "Courier" => "CourierNewPSMT".to_string(),
        other => other.replace(' ', ""),
    }
}

/// Append an incremental update replacing the content streams of the
/// given pages. `replacements` maps page object number to the new
/// (uncompressed) content stream bytes.
pub fn incremental_update(
    original: &[u8],
    file: &PdfFile,
    replacements: &BTreeMap<u32, Vec<u8>>,
) -> Result<Vec<u8>> {
    let prev_xref = {
        let idx = find_last(original, b"startxref")
            .ok_or_else(|| Error::MalformedPdf("original has no startxref".into()))?;
        let mut lex = super::lexer::Lexer::at(original, idx + b"startxref".len());
        match lex.read_object()? {
            Object::Int(v) if v >= 0 => v as usize,
            _ => return Err(Error::MalformedPdf("bad startxref".into())),
        }
    };

    let mut out = original.to_vec();
    if out.last() != Some(&b'\n') {
        out.push(b'\n');
    }
    let mut next_obj = file.max_obj + 1;
    let mut new_offsets: BTreeMap<u32, usize> = BTreeMap::new();

    for (&page_num, content) in replacements {
        let page = file
            .objects
            .get(&page_num)
            .and_then(|o| o.as_dict())
            .cloned()
            .ok_or_else(|| Error::MalformedPdf(format!("page object {page_num} missing")))?;
        let stream_num = next_obj;
        next_obj += 1;

        let mut sd = Dict::new();
        sd.insert("Length".into(), Object::Int(content.len() as i64));
        new_offsets.insert(stream_num, out.len());
        out.extend_from_slice(format!("{stream_num} 0 obj\n").as_bytes());
        write_object(
            &mut out,
            &Object::Stream(Stream {
                dict: sd,
                data: content.clone(),
            }),
        );
        out.extend_from_slice(b"\nendobj\n");

        let mut new_page = page;
        new_page.insert("Contents".into(), Object::Ref(ObjRef::new(stream_num, 0)));
        new_offsets.insert(page_num, out.len());
        out.extend_from_slice(format!("{page_num} 0 obj\n").as_bytes());
        write_object(&mut out, &Object::Dict(new_page));
        out.extend_from_slice(b"\nendobj\n");
    }

    let xref_pos = out.len();
    out.extend_from_slice(b"xref\n");
    // Contiguous subsections over the updated object numbers.
    let nums: Vec<u32> = new_offsets.keys().copied().collect();
    let mut i = 0;
    while i < nums.len() {
        let start = nums[i];
        let mut end = i;
        while end + 1 < nums.len() && nums[end + 1] == nums[end] + 1 {
            end += 1;
        }
        out.extend_from_slice(format!("{} {}\n", start, end - i + 1).as_bytes());
        for &n in &nums[i..=end] {
            out.extend_from_slice(format!("{:010} 00000 n \n", new_offsets[&n]).as_bytes());
        }
        i = end + 1;
    }
    let mut trailer = Dict::new();
    trailer.insert("Size".into(), Object::Int(next_obj as i64));
    trailer.insert("Prev".into(), Object::Int(prev_xref as i64));
    for key in ["Root", "Info", "ID"] {
        if let Some(v) = file.trailer.get(key) {
            trailer.insert(key.into(), v.clone());
        }
    }
    out.extend_from_slice(b"trailer\n");
    write_object(&mut out, &Object::Dict(trailer));
    out.extend_from_slice(format!("\nstartxref\n{xref_pos}\n%%EOF\n").as_bytes());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_parseable_pdf() {
        let mut b = PdfBuilder::new();
        let f = b.register_font("Times New Roman");
        let mut p = PageContent::us_letter();
        p.begin_text();
        p.set_font(&f, 12.0);
        p.set_text_matrix(72.0, 700.0);
        p.show_tj(&[
            TjItem::Text("Hello".into()),
            TjItem::Adjust(-2.0),
            TjItem::Text("world".into()),
        ]);
        p.end_text();
        p.fill_rect(100.0, 100.0, 50.0, 10.0, (0.0, 0.0, 0.0));
        b.add_page(p);
        let bytes = b.finish();
        let file = PdfFile::parse(&bytes).unwrap();
        let pages = file.pages().unwrap();
        assert_eq!(pages.len(), 1);
        let content = file.page_content(&pages[0]).unwrap();
        assert!(String::from_utf8_lossy(&content).contains("TJ"));
    }

    #[test]
    fn compressed_output_round_trips() {
        let mut b = PdfBuilder::new();
        let f = b.register_font("Arial");
        let mut p = PageContent::us_letter();
        p.begin_text();
        p.set_font(&f, 10.0);
        p.set_text_matrix(72.0, 700.0);
        p.show_tj_simple("compressed stream content");
        p.end_text();
        b.add_page(p);
        b.compress = true;
        let bytes = b.finish();
        let file = PdfFile::parse(&bytes).unwrap();
        let content = file.page_content(&file.pages().unwrap()[0]).unwrap();
        assert!(String::from_utf8_lossy(&content).contains("compressed stream content"));
    }

    #[test]
    fn deterministic_output() {
        let build = || {
            let mut b = PdfBuilder::new();
            let f = b.register_font("Calibri");
            let mut p = PageContent::us_letter();
            p.begin_text();
            p.set_font(&f, 11.0);
            p.set_text_matrix(72.0, 710.0);
            p.show_tj_simple("same bytes");
            p.end_text();
            b.add_page(p);
            b.finish()
        };
        assert_eq!(build(), build());
    }
}
