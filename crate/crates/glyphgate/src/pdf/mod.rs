//! Minimal PDF machinery: object model, file reader, content stream
//! tokenizer, and writers for synthetic documents and incremental
//! updates.

pub mod content;
pub mod lexer;
pub mod object;
pub mod reader;
pub mod writer;

pub use content::{parse_content, ContentOp};
pub use object::{Dict, ObjRef, Object, Stream};
pub use reader::PdfFile;
pub use writer::{incremental_update, PageContent, PdfBuilder, TjItem};
