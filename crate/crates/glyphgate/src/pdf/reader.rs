//! Low-level PDF file reader: xref tables and streams, object storage,
//! stream filters, and the page tree.

use super::lexer::Lexer;
use super::object::{Dict, ObjRef, Object, Stream};
use crate::error::{Error, Result};
use flate2::read::ZlibDecoder;
use std::collections::BTreeMap;
use std::io::Read;

/// A parsed PDF file with random access to its objects.
pub struct PdfFile {
    pub objects: BTreeMap<u32, Object>,
    pub trailer: Dict,
    /// Highest object number seen, for incremental appends.
    pub max_obj: u32,
}

fn err(msg: impl Into<String>) -> Error {
    Error::MalformedPdf(msg.into())
}

impl PdfFile {
    pub fn parse(bytes: &[u8]) -> Result<PdfFile> {
        if !bytes.starts_with(b"%PDF-") {
            return Err(err("missing %PDF header"));
        }
        let mut file = PdfFile {
            objects: BTreeMap::new(),
            trailer: Dict::new(),
            max_obj: 0,
        };
        match file.load_via_xref(bytes) {
            Ok(()) => {}
            // Damaged or nonstandard xref: fall back to a linear object scan.
            Err(_) => file.load_by_scanning(bytes)?,
        }
        if file.trailer.contains_key("Encrypt") {
            return Err(Error::Encrypted);
        }
        if file.objects.is_empty() {
            return Err(err("no objects"));
        }
        file.expand_object_streams()?;
        Ok(file)
    }

    fn load_via_xref(&mut self, bytes: &[u8]) -> Result<()> {
        let tail_start = bytes.len().saturating_sub(2048);
        let tail = &bytes[tail_start..];
        let marker = b"startxref";
        let idx = find_last(tail, marker).ok_or_else(|| err("missing startxref"))?;
        let mut lex = Lexer::at(bytes, tail_start + idx + marker.len());
        let start = match lex.read_object()? {
            Object::Int(v) if v >= 0 => v as usize,
            _ => return Err(err("bad startxref offset")),
        };
        let mut offset = Some(start);
        let mut seen = Vec::new();
        while let Some(off) = offset {
            if seen.contains(&off) || off >= bytes.len() {
                break;
            }
            seen.push(off);
            offset = self.load_xref_section(bytes, off)?;
        }
        Ok(())
    }

    /// Parse one xref section (table or stream); returns /Prev offset.
    fn load_xref_section(&mut self, bytes: &[u8], offset: usize) -> Result<Option<usize>> {
        let mut lex = Lexer::at(bytes, offset);
        lex.skip_whitespace();
        if bytes[lex.pos..].starts_with(b"xref") {
            lex.pos += 4;
            self.load_xref_table(bytes, &mut lex)
        } else {
            // Cross-reference stream: "n g obj <<...>> stream".
            let _num = lex.read_object()?;
            let _gen = lex.read_object()?;
            lex.expect_keyword("obj")?;
            let obj = read_indirect_value(bytes, &mut lex)?;
            let Object::Stream(s) = obj else {
                return Err(err("xref offset does not point at an xref stream"));
            };
            self.load_xref_stream(bytes, &s)
        }
    }

    fn load_xref_table(&mut self, bytes: &[u8], lex: &mut Lexer) -> Result<Option<usize>> {
        loop {
            lex.skip_whitespace();
            if bytes[lex.pos..].starts_with(b"trailer") {
                lex.pos += b"trailer".len();
                let t = lex.read_object()?;
                let dict = t.as_dict().ok_or_else(|| err("trailer is not a dict"))?.clone();
                let prev = dict.get("Prev").and_then(|o| o.as_int()).map(|v| v as usize);
                // Earlier trailers must not override newer keys.
                for (k, v) in dict {
                    self.trailer.entry(k).or_insert(v);
                }
                return Ok(prev);
            }
            let first = match lex.read_object()? {
                Object::Int(v) => v as u32,
                _ => return Err(err("bad xref subsection start")),
            };
            let count = match lex.read_object()? {
                Object::Int(v) => v as usize,
                _ => return Err(err("bad xref subsection count")),
            };
            lex.skip_whitespace();
            for i in 0..count {
                let entry = bytes
                    .get(lex.pos..lex.pos + 20)
                    .ok_or_else(|| err("truncated xref entry"))?;
                lex.pos += 20;
                let off: usize = std::str::from_utf8(&entry[0..10])
                    .ok()
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| err("bad xref offset"))?;
                let kind = entry[17];
                let num = first + i as u32;
                if kind == b'n' && !self.objects.contains_key(&num) {
                    self.load_object_at(bytes, num, off)?;
                }
            }
        }
    }

    fn load_xref_stream(&mut self, bytes: &[u8], stream: &Stream) -> Result<Option<usize>> {
        let data = decode_stream(stream)?;
        let w = stream
            .dict
            .get("W")
            .and_then(|o| o.as_array())
            .ok_or_else(|| err("xref stream missing /W"))?;
        let widths: Vec<usize> = w
            .iter()
            .map(|o| o.as_int().unwrap_or(0) as usize)
            .collect();
        if widths.len() != 3 {
            return Err(err("xref stream /W must have 3 entries"));
        }
        let row = widths.iter().sum::<usize>();
        let size = stream
            .dict
            .get("Size")
            .and_then(|o| o.as_int())
            .unwrap_or(0);
        let default_index = vec![Object::Int(0), Object::Int(size)];
        let index = stream
            .dict
            .get("Index")
            .and_then(|o| o.as_array())
            .map(|a| a.to_vec())
            .unwrap_or(default_index);
        let mut rows = data.chunks(row);
        let mut compressed: Vec<(u32, u32)> = Vec::new();
        for pair in index.chunks(2) {
            let first = pair[0].as_int().unwrap_or(0) as u32;
            let count = pair.get(1).and_then(|o| o.as_int()).unwrap_or(0) as u32;
            for i in 0..count {
                let Some(r) = rows.next() else { break };
                let field = |k: usize| -> u64 {
                    let start: usize = widths[..k].iter().sum();
                    r[start..start + widths[k]]
                        .iter()
                        .fold(0u64, |acc, &b| (acc << 8) | b as u64)
                };
                let kind = if widths[0] == 0 { 1 } else { field(0) };
                let num = first + i;
                match kind {
                    1 => {
                        let off = field(1) as usize;
                        if !self.objects.contains_key(&num) {
                            self.load_object_at(bytes, num, off)?;
                        }
                    }
                    2 => {
                        // Object lives inside an object stream; expand later.
                        let container = field(1) as u32;
                        compressed.push((num, container));
                    }
                    _ => {}
                }
            }
        }
        // Make sure the container streams themselves are loaded.
        for (_, container) in &compressed {
            if !self.objects.contains_key(container) {
                // Already handled if it appeared in this or an earlier section.
                continue;
            }
        }
        for (k, v) in stream.dict.clone() {
            self.trailer.entry(k).or_insert(v);
        }
        let prev = stream
            .dict
            .get("Prev")
            .and_then(|o| o.as_int())
            .map(|v| v as usize);
        Ok(prev)
    }

    fn load_object_at(&mut self, bytes: &[u8], num: u32, off: usize) -> Result<()> {
        if off >= bytes.len() {
            return Err(err("xref offset out of range"));
        }
        let mut lex = Lexer::at(bytes, off);
        let got_num = match lex.read_object()? {
            Object::Int(v) => v as u32,
            _ => return Err(err("expected object number")),
        };
        let _gen = lex.read_object()?;
        lex.expect_keyword("obj")?;
        let obj = read_indirect_value(bytes, &mut lex)?;
        if got_num != num {
            return Err(err(format!("xref points to object {got_num}, expected {num}")));
        }
        self.max_obj = self.max_obj.max(num);
        self.objects.insert(num, obj);
        Ok(())
    }

    /// Recovery path: scan the whole file for "n g obj" headers.
    fn load_by_scanning(&mut self, bytes: &[u8]) -> Result<()> {
        self.objects.clear();
        let mut pos = 0usize;
        while let Some(idx) = find(&bytes[pos..], b" obj") {
            let at = pos + idx;
            // Walk back over "num gen".
            let line_start = bytes[..at].iter().rposition(|&b| b == b'\n' || b == b'\r').map(|p| p + 1).unwrap_or(0);
            let header = &bytes[line_start..at];
            let mut parts = std::str::from_utf8(header)
                .unwrap_or("")
                .split_whitespace();
            let num: Option<u32> = parts.next().and_then(|s| s.parse().ok());
            if let Some(num) = num {
                let mut lex = Lexer::at(bytes, at + 4);
                if let Ok(obj) = read_indirect_value(bytes, &mut lex) {
                    self.max_obj = self.max_obj.max(num);
                    self.objects.insert(num, obj);
                    pos = lex.pos;
                    continue;
                }
            }
            pos = at + 4;
        }
        if let Some(idx) = find_last(bytes, b"trailer") {
            let mut lex = Lexer::at(bytes, idx + b"trailer".len());
            if let Ok(t) = lex.read_object() {
                if let Some(d) = t.as_dict() {
                    self.trailer = d.clone();
                }
            }
        }
        if self.trailer.is_empty() {
            // Last resort: find the catalog by type.
            for (num, obj) in &self.objects {
                if obj.as_dict().and_then(|d| d.get("Type")).and_then(|t| t.as_name())
                    == Some("Catalog")
                {
                    self.trailer
                        .insert("Root".into(), Object::Ref(ObjRef::new(*num, 0)));
                    break;
                }
            }
        }
        if self.objects.is_empty() {
            return Err(err("no objects found"));
        }
        Ok(())
    }

    /// Pull objects out of /ObjStm containers.
    fn expand_object_streams(&mut self) -> Result<()> {
        let containers: Vec<u32> = self
            .objects
            .iter()
            .filter(|(_, o)| {
                o.as_dict()
                    .and_then(|d| d.get("Type"))
                    .and_then(|t| t.as_name())
                    == Some("ObjStm")
            })
            .map(|(n, _)| *n)
            .collect();
        for num in containers {
            let Some(Object::Stream(s)) = self.objects.get(&num) else { continue };
            let n = s.dict.get("N").and_then(|o| o.as_int()).unwrap_or(0) as usize;
            let first = s.dict.get("First").and_then(|o| o.as_int()).unwrap_or(0) as usize;
            let data = decode_stream(s)?;
            let mut lex = Lexer::new(&data);
            let mut pairs = Vec::with_capacity(n);
            for _ in 0..n {
                let onum = lex.read_object()?.as_int().unwrap_or(-1);
                let ooff = lex.read_object()?.as_int().unwrap_or(-1);
                if onum < 0 || ooff < 0 {
                    return Err(err("bad object stream header"));
                }
                pairs.push((onum as u32, ooff as usize));
            }
            for (onum, ooff) in pairs {
                if self.objects.contains_key(&onum) {
                    continue;
                }
                let mut olex = Lexer::at(&data, first + ooff);
                let obj = olex.read_object()?;
                self.max_obj = self.max_obj.max(onum);
                self.objects.insert(onum, obj);
            }
        }
        Ok(())
    }

    /// Follow references until a direct object is reached.
    pub fn resolve<'a>(&'a self, obj: &'a Object) -> &'a Object {
        let mut cur = obj;
        let mut hops = 0;
        while let Object::Ref(r) = cur {
            match self.objects.get(&r.num) {
                Some(next) => cur = next,
                None => return &Object::Null,
            }
            hops += 1;
            if hops > 64 {
                return &Object::Null;
            }
        }
        cur
    }

    pub fn get(&self, dict: &Dict, key: &str) -> Option<Object> {
        dict.get(key).map(|o| self.resolve(o).clone())
    }

    pub fn catalog(&self) -> Result<Dict> {
        let root = self
            .trailer
            .get("Root")
            .ok_or_else(|| err("trailer missing /Root"))?;
        self.resolve(root)
            .as_dict()
            .cloned()
            .ok_or_else(|| err("catalog is not a dict"))
    }

    /// Page dictionaries in document order, with inherited attributes
    /// (Resources, MediaBox) merged in.
    pub fn pages(&self) -> Result<Vec<Dict>> {
        let catalog = self.catalog()?;
        let pages_ref = catalog.get("Pages").ok_or_else(|| err("catalog missing /Pages"))?;
        let mut out = Vec::new();
        let mut inherit = Dict::new();
        self.walk_pages(pages_ref, &mut inherit, &mut out, 0)?;
        if out.is_empty() {
            return Err(err("document has no pages"));
        }
        Ok(out)
    }

    fn walk_pages(
        &self,
        node_ref: &Object,
        inherit: &mut Dict,
        out: &mut Vec<Dict>,
        depth: usize,
    ) -> Result<()> {
        if depth > 64 {
            return Err(err("page tree too deep"));
        }
        let node = self
            .resolve(node_ref)
            .as_dict()
            .cloned()
            .ok_or_else(|| err("page tree node is not a dict"))?;
        let ty = node.get("Type").and_then(|t| t.as_name()).unwrap_or("");
        let mut local = inherit.clone();
        for key in ["Resources", "MediaBox", "Rotate"] {
            if let Some(v) = node.get(key) {
                local.insert(key.to_string(), v.clone());
            }
        }
        if ty == "Page" || (ty.is_empty() && node.contains_key("Contents")) {
            let mut page = node.clone();
            for (k, v) in &local {
                page.entry(k.clone()).or_insert_with(|| v.clone());
            }
            out.push(page);
            return Ok(());
        }
        let kids = self
            .get(&node, "Kids")
            .and_then(|k| k.as_array().map(|a| a.to_vec()))
            .unwrap_or_default();
        for kid in kids {
            self.walk_pages(&kid, &mut local.clone(), out, depth + 1)?;
        }
        Ok(())
    }

    /// Concatenated, decoded content of a page.
    pub fn page_content(&self, page: &Dict) -> Result<Vec<u8>> {
        let Some(contents) = page.get("Contents") else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let resolved = self.resolve(contents);
        match resolved {
            Object::Array(items) => {
                let items = items.clone();
                for item in items {
                    if let Object::Stream(s) = self.resolve(&item) {
                        out.extend_from_slice(&decode_stream(s)?);
                        out.push(b'\n');
                    }
                }
            }
            Object::Stream(s) => out = decode_stream(s)?,
            _ => {}
        }
        Ok(out)
    }
}

/// Read the value of an indirect object, consuming stream data if present.
fn read_indirect_value(bytes: &[u8], lex: &mut Lexer) -> Result<Object> {
    let obj = lex.read_object()?;
    lex.skip_whitespace();
    if bytes[lex.pos..].starts_with(b"stream") {
        let dict = obj
            .as_dict()
            .cloned()
            .ok_or_else(|| err("stream without dict"))?;
        lex.pos += b"stream".len();
        if bytes.get(lex.pos) == Some(&b'\r') {
            lex.pos += 1;
        }
        if bytes.get(lex.pos) == Some(&b'\n') {
            lex.pos += 1;
        }
        // /Length may be an indirect reference; fall back to scanning for
        // endstream in that case.
        let len = dict.get("Length").and_then(|o| o.as_int());
        let start = lex.pos;
        let end = match len {
            Some(l) if l >= 0 && start + l as usize <= bytes.len() => {
                let e = start + l as usize;
                if find(&bytes[e..], b"endstream").map(|i| i <= 2).unwrap_or(false)
                    || bytes[e..].starts_with(b"endstream")
                    || bytes[e..].starts_with(b"\nendstream")
                    || bytes[e..].starts_with(b"\r\nendstream")
                {
                    e
                } else {
                    start + find(&bytes[start..], b"endstream").ok_or_else(|| err("unterminated stream"))?
                }
            }
            _ => start + find(&bytes[start..], b"endstream").ok_or_else(|| err("unterminated stream"))?,
        };
        let mut data = bytes[start..end].to_vec();
        // Strip the EOL that precedes endstream when we scanned for it.
        if len.is_none() {
            while data.last() == Some(&b'\n') || data.last() == Some(&b'\r') {
                data.pop();
            }
        }
        lex.pos = end;
        lex.expect_keyword("endstream")?;
        let save = lex.pos;
        if lex.expect_keyword("endobj").is_err() {
            lex.pos = save;
        }
        return Ok(Object::Stream(Stream { dict, data }));
    }
    let save = lex.pos;
    if lex.expect_keyword("endobj").is_err() {
        lex.pos = save;
    }
    Ok(obj)
}

/// Apply stream filters. Flate and ASCIIHex are supported; anything else
/// is reported as unsupported encoding.
pub fn decode_stream(stream: &Stream) -> Result<Vec<u8>> {
    let mut data = stream.data.clone();
    let filters: Vec<String> = match stream.dict.get("Filter") {
        None => Vec::new(),
        Some(Object::Name(n)) => vec![n.clone()],
        Some(Object::Array(a)) => a
            .iter()
            .filter_map(|o| o.as_name().map(str::to_string))
            .collect(),
        Some(_) => Vec::new(),
    };
    for filter in filters {
        data = match filter.as_str() {
            "FlateDecode" | "Fl" => {
                let mut out = Vec::new();
                ZlibDecoder::new(&data[..])
                    .read_to_end(&mut out)
                    .map_err(|e| err(format!("flate error: {e}")))?;
                if let Some(Object::Dict(parms)) = stream.dict.get("DecodeParms") {
                    out = apply_predictor(out, parms)?;
                }
                out
            }
            "ASCIIHexDecode" | "AHx" => {
                let mut out = Vec::new();
                let mut hi: Option<u8> = None;
                for &b in &data {
                    if b == b'>' {
                        break;
                    }
                    if b.is_ascii_hexdigit() {
                        let v = (b as char).to_digit(16).unwrap() as u8;
                        match hi.take() {
                            Some(h) => out.push(h << 4 | v),
                            None => hi = Some(v),
                        }
                    }
                }
                if let Some(h) = hi {
                    out.push(h << 4);
                }
                out
            }
            other => {
                return Err(Error::UnsupportedEncoding(format!("stream filter {other}")));
            }
        };
    }
    Ok(data)
}

/// PNG-style predictors used by xref streams.
fn apply_predictor(data: Vec<u8>, parms: &Dict) -> Result<Vec<u8>> {
    let predictor = parms.get("Predictor").and_then(|o| o.as_int()).unwrap_or(1);
    if predictor < 10 {
        return Ok(data);
    }
    let columns = parms.get("Columns").and_then(|o| o.as_int()).unwrap_or(1) as usize;
    let colors = parms.get("Colors").and_then(|o| o.as_int()).unwrap_or(1) as usize;
    let bpc = parms.get("BitsPerComponent").and_then(|o| o.as_int()).unwrap_or(8) as usize;
    let bpp = (colors * bpc + 7) / 8;
    let row_len = (columns * colors * bpc + 7) / 8;
    let mut out = Vec::with_capacity(data.len());
    let mut prev_row = vec![0u8; row_len];
    for chunk in data.chunks(row_len + 1) {
        if chunk.len() < 2 {
            break;
        }
        let tag = chunk[0];
        let mut row = chunk[1..].to_vec();
        row.resize(row_len, 0);
        match tag {
            0 => {}
            1 => {
                for i in bpp..row_len {
                    row[i] = row[i].wrapping_add(row[i - bpp]);
                }
            }
            2 => {
                for i in 0..row_len {
                    row[i] = row[i].wrapping_add(prev_row[i]);
                }
            }
            3 => {
                for i in 0..row_len {
                    let left = if i >= bpp { row[i - bpp] as u16 } else { 0 };
                    row[i] = row[i].wrapping_add(((left + prev_row[i] as u16) / 2) as u8);
                }
            }
            4 => {
                for i in 0..row_len {
                    let a = if i >= bpp { row[i - bpp] as i16 } else { 0 };
                    let b = prev_row[i] as i16;
                    let c = if i >= bpp { prev_row[i - bpp] as i16 } else { 0 };
                    let p = a + b - c;
                    let (pa, pb, pc) = ((p - a).abs(), (p - b).abs(), (p - c).abs());
                    let pred = if pa <= pb && pa <= pc {
                        a
                    } else if pb <= pc {
                        b
                    } else {
                        c
                    };
                    row[i] = row[i].wrapping_add(pred as u8);
                }
            }
            _ => return Err(err("unknown png predictor")),
        }
        out.extend_from_slice(&row);
        prev_row = row;
    }
    Ok(out)
}

pub fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack
        .windows(needle.len())
        .position(|w| w == needle)
}

pub fn find_last(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack
        .windows(needle.len())
        .rposition(|w| w == needle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdf::writer;

    #[test]
    fn rejects_non_pdf() {
        assert!(matches!(
            PdfFile::parse(b"hello world"),
            Err(Error::MalformedPdf(_))
        ));
    }

    #[test]
    fn rejects_encrypted() {
        // A minimal file whose trailer carries /Encrypt.
        let mut builder = writer::PdfBuilder::new();
        let page = writer::PageContent::new(612.0, 792.0);
        builder.add_page(page);
        builder.trailer_extra.insert(
            "Encrypt".into(),
            Object::Str(b"stub".to_vec()),
        );
        let bytes = builder.finish();
        assert!(matches!(PdfFile::parse(&bytes), Err(Error::Encrypted)));
    }
}
