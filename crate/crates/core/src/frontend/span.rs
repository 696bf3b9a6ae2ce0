use std::fmt;
use std::path::{Path, PathBuf};

/// Index of a file inside a [`SourceMap`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FileId(pub u32);

/// A byte range in a source file together with its 1-based line/column
/// coordinates. `end_col` is exclusive: a one-character token at column 5
/// has `start_col == 5` and `end_col == 6`. Columns count characters, not
/// bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub file: FileId,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub byte_offset: u32,
    pub byte_len: u32,
}

impl Span {
    pub fn lo(&self) -> usize {
        self.byte_offset as usize
    }

    pub fn hi(&self) -> usize {
        (self.byte_offset + self.byte_len) as usize
    }

    /// Smallest span covering both `self` and `other`. Both must come from
    /// the same file.
    pub fn to(self, other: Span) -> Span {
        debug_assert_eq!(self.file, other.file);
        let (first, last) = if self.lo() <= other.lo() { (self, other) } else { (other, self) };
        let end = if last.hi() >= first.hi() { last } else { first };
        Span {
            file: self.file,
            start_line: first.start_line,
            start_col: first.start_col,
            end_line: end.end_line,
            end_col: end.end_col,
            byte_offset: first.byte_offset,
            byte_len: (end.hi() - first.lo()) as u32,
        }
    }

    /// The last character of the span, e.g. the closing brace of a block.
    /// Assumes that character is a single byte.
    pub fn last_char(self) -> Span {
        if self.byte_len == 0 {
            return self;
        }
        Span {
            start_line: self.end_line,
            start_col: self.end_col.saturating_sub(1).max(1),
            byte_offset: self.byte_offset + self.byte_len - 1,
            byte_len: 1,
            ..self
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.file == other.file && self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    /// Ordering key used for findings and reports.
    pub fn sort_key(&self) -> (FileId, u32, u32, u32) {
        (self.file, self.start_line, self.start_col, self.byte_offset)
    }
}

impl PartialOrd for Span {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Span {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.file, self.byte_offset, self.byte_len).cmp(&(other.file, other.byte_offset, other.byte_len))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

/// One loaded source file.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub id: FileId,
    pub path: PathBuf,
    pub text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(id: FileId, path: impl Into<PathBuf>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        SourceFile { id, path: path.into(), text, line_starts }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// 1-based (line, column) of a byte offset.
    pub fn line_col(&self, offset: usize) -> (u32, u32) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line];
        let col = self.text[start..offset].chars().count() + 1;
        (line as u32 + 1, col as u32)
    }

    pub fn span(&self, lo: usize, hi: usize) -> Span {
        let (start_line, start_col) = self.line_col(lo);
        let (end_line, end_col) = self.line_col(hi);
        Span {
            file: self.id,
            start_line,
            start_col,
            end_line,
            end_col,
            byte_offset: lo as u32,
            byte_len: (hi - lo) as u32,
        }
    }

    pub fn snippet(&self, span: &Span) -> &str {
        &self.text[span.lo()..span.hi()]
    }

    /// Text of a 1-based line without its terminator.
    pub fn line_text(&self, line: u32) -> &str {
        let idx = line.saturating_sub(1) as usize;
        let Some(&start) = self.line_starts.get(idx) else { return "" };
        let end = self.line_starts.get(idx + 1).copied().unwrap_or(self.text.len());
        self.text[start..end].trim_end_matches(['\n', '\r'])
    }

    pub fn line_count(&self) -> usize {
        self.line_starts.len()
    }
}

/// All files that make up one compilation unit.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    files: Vec<SourceFile>,
}

impl SourceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl Into<PathBuf>, text: impl Into<String>) -> FileId {
        let id = FileId(self.files.len() as u32);
        self.files.push(SourceFile::new(id, path, text));
        id
    }

    pub fn get(&self, id: FileId) -> &SourceFile {
        &self.files[id.0 as usize]
    }

    pub fn files(&self) -> &[SourceFile] {
        &self.files
    }

    pub fn snippet(&self, span: &Span) -> &str {
        self.get(span.file).snippet(span)
    }
}
