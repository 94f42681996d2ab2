//! Line-oriented input with independent, repositionable cursors.
//!
//! Lines that are empty or start with `#` are skipped; every other line is
//! one input element. A cursor position is the byte offset just past the
//! last element line read, so a cursor reopened there continues with the
//! next element.

use std::fs::File;
use std::io::{BufRead, BufReader, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};

pub trait LineSource: Send + Sync {
    /// Opens a cursor at byte offset `pos`.
    fn cursor(&self, pos: u64) -> Result<Box<dyn LineCursor + Send>>;

    /// Number of element lines.
    fn count_elements(&self) -> Result<u64> {
        let mut c = self.cursor(0)?;
        let mut n = 0;
        while c.next_line()?.is_some() {
            n += 1;
        }
        Ok(n)
    }
}

pub trait LineCursor {
    /// Next element line without its terminator, or `None` at end of input.
    fn next_line(&mut self) -> Result<Option<&str>>;

    /// Byte offset just past the last line returned.
    fn position(&self) -> u64;

    /// 1-based line number of the last line returned, when the cursor
    /// started at the beginning of the input.
    fn line_number(&self) -> Option<u64>;
}

fn is_element(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && !t.starts_with('#')
}

/// Input held in memory.
#[derive(Debug, Clone)]
pub struct MemorySource {
    text: Arc<str>,
}

impl MemorySource {
    pub fn new(text: impl Into<Arc<str>>) -> Self {
        MemorySource { text: text.into() }
    }
}

struct MemoryCursor {
    text: Arc<str>,
    pos: usize,
    line: Option<u64>,
}

impl LineSource for MemorySource {
    fn cursor(&self, pos: u64) -> Result<Box<dyn LineCursor + Send>> {
        let pos = pos as usize;
        if pos > self.text.len() || !self.text.is_char_boundary(pos) {
            return Err(Error::Input(format!("cannot seek to byte {pos}")));
        }
        Ok(Box::new(MemoryCursor {
            text: Arc::clone(&self.text),
            pos,
            line: (pos == 0).then_some(0),
        }))
    }
}

impl LineCursor for MemoryCursor {
    fn next_line(&mut self) -> Result<Option<&str>> {
        loop {
            if self.pos >= self.text.len() {
                return Ok(None);
            }
            let rest = &self.text[self.pos..];
            let (raw, advance) = match rest.find('\n') {
                Some(i) => (&rest[..i], i + 1),
                None => (rest, rest.len()),
            };
            let start = self.pos;
            self.pos += advance;
            if let Some(l) = self.line.as_mut() {
                *l += 1;
            }
            if is_element(raw) {
                let line = self.text[start..start + raw.len()].trim_end_matches('\r');
                return Ok(Some(line));
            }
        }
    }

    fn position(&self) -> u64 {
        self.pos as u64
    }

    fn line_number(&self) -> Option<u64> {
        self.line
    }
}

/// Input read from a file; every cursor owns its own handle.
#[derive(Debug, Clone)]
pub struct FileSource {
    path: PathBuf,
}

impl FileSource {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        File::open(&path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Ok(FileSource { path })
    }
}

struct FileCursor {
    reader: BufReader<File>,
    buf: String,
    pos: u64,
    line: Option<u64>,
}

impl LineSource for FileSource {
    fn cursor(&self, pos: u64) -> Result<Box<dyn LineCursor + Send>> {
        let mut file = File::open(&self.path)?;
        file.seek(SeekFrom::Start(pos))?;
        Ok(Box::new(FileCursor {
            reader: BufReader::new(file),
            buf: String::new(),
            pos,
            line: (pos == 0).then_some(0),
        }))
    }
}

impl LineCursor for FileCursor {
    fn next_line(&mut self) -> Result<Option<&str>> {
        loop {
            self.buf.clear();
            let n = self.reader.read_line(&mut self.buf)?;
            if n == 0 {
                return Ok(None);
            }
            self.pos += n as u64;
            if let Some(l) = self.line.as_mut() {
                *l += 1;
            }
            if is_element(&self.buf) {
                return Ok(Some(self.buf.trim_end_matches(['\n', '\r'])));
            }
        }
    }

    fn position(&self) -> u64 {
        self.pos
    }

    fn line_number(&self) -> Option<u64> {
        self.line
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "# header\n5,0\n\n7,0\r\n3,2\n9,1";

    fn drain(c: &mut dyn LineCursor) -> Vec<(String, u64)> {
        let mut out = Vec::new();
        while let Some(l) = c.next_line().unwrap() {
            let l = l.to_string();
            out.push((l, c.position()));
        }
        out
    }

    #[test]
    fn skips_comments_and_blanks() {
        let src = MemorySource::new(TEXT);
        let mut c = src.cursor(0).unwrap();
        let lines: Vec<String> = drain(c.as_mut()).into_iter().map(|(l, _)| l).collect();
        assert_eq!(lines, ["5,0", "7,0", "3,2", "9,1"]);
        assert_eq!(src.count_elements().unwrap(), 4);
    }

    #[test]
    fn reopened_cursor_continues() {
        let src = MemorySource::new(TEXT);
        let mut c = src.cursor(0).unwrap();
        c.next_line().unwrap();
        c.next_line().unwrap();
        let mut again = src.cursor(c.position()).unwrap();
        assert_eq!(again.next_line().unwrap(), Some("3,2"));
        assert_eq!(again.line_number(), None);
    }

    #[test]
    fn line_numbers_count_every_line() {
        let src = MemorySource::new(TEXT);
        let mut c = src.cursor(0).unwrap();
        c.next_line().unwrap();
        assert_eq!(c.line_number(), Some(2));
        c.next_line().unwrap();
        assert_eq!(c.line_number(), Some(4));
    }

    #[test]
    fn file_and_memory_agree() {
        let dir = std::env::temp_dir().join(format!("cstack-input-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("in.txt");
        std::fs::write(&path, TEXT).unwrap();
        let file = FileSource::open(&path).unwrap();
        let mem = MemorySource::new(TEXT);
        let a = drain(file.cursor(0).unwrap().as_mut());
        let b = drain(mem.cursor(0).unwrap().as_mut());
        assert_eq!(a, b);
        let mid = a[1].1;
        let a = drain(file.cursor(mid).unwrap().as_mut());
        let b = drain(mem.cursor(mid).unwrap().as_mut());
        assert_eq!(a, b);
        std::fs::remove_dir_all(&dir).ok();
    }
}
