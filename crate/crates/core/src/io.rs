//! Graph file formats.
//!
//! Binary (`PRGB`): magic, version byte 1, `n` as u64 little endian, then `n`
//! rows of `ceil(n/64)` little-endian u64 words holding the full symmetric
//! matrix. Text: one `u v` edge per line, `#` starts a comment; an optional
//! `# n <count>` header fixes the vertex count (otherwise max id + 1).

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{words_for, Graph};

pub const MAGIC: &[u8; 4] = b"PRGB";
pub const VERSION: u8 = 1;

pub fn write_binary<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(g.raw_rows().len() * 8);
    for word in g.raw_rows() {
        buf.extend_from_slice(&word.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Graph> {
    let mut header = [0u8; 13];
    r.read_exact(&mut header).map_err(truncated)?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    if header[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let n = u64::from_le_bytes(header[5..13].try_into().unwrap());
    let n = usize::try_from(n).map_err(|_| Error::Format(format!("vertex count {n} too large")))?;
    let words = n
        .checked_mul(words_for(n))
        .filter(|&w| w <= 1 << 31)
        .ok_or_else(|| Error::Format(format!("vertex count {n} too large")))?;
    let mut bytes = vec![0u8; words * 8];
    r.read_exact(&mut bytes).map_err(truncated)?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after adjacency rows".into()));
    }
    let rows = bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    Graph::from_rows(n, rows)
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("file truncated".into())
    } else {
        Error::Io(e)
    }
}

pub fn write_text<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "# n {}", g.n())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_text<R: BufRead>(r: R) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let (body, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(&line[i + 1..])),
            None => (line.as_str(), None),
        };
        if let Some(c) = comment {
            let mut parts = c.split_whitespace();
            if parts.next() == Some("n") {
                if let Some(Ok(n)) = parts.next().map(str::parse::<usize>) {
                    declared = Some(n);
                }
            }
        }
        let mut parts = body.split_whitespace();
        let Some(a) = parts.next() else { continue };
        let bad = || Error::Format(format!("line {}: expected `u v`", lineno + 1));
        let b = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let u: usize = a.parse().map_err(|_| bad())?;
        let v: usize = b.parse().map_err(|_| bad())?;
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Binary,
    Text,
}

impl Format {
    /// `.prgb` is binary, anything else is text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("prgb") => Format::Binary,
            _ => Format::Text,
        }
    }
}

/// Reads a graph, sniffing the binary magic before falling back to text.
pub fn read_path(path: &Path) -> Result<Graph> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes[..])
    } else {
        read_text(&bytes[..])
    }
}

pub fn write_path(g: &Graph, path: &Path, format: Format) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        Format::Binary => write_binary(g, file),
        Format::Text => write_text(g, file),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::random_graph;
    use proptest::prelude::*;

    #[test]
    fn truncated_and_corrupt_files_are_rejected() {
        let g = random_graph(70, 0.5, 1);
        let mut buf = Vec::new();
        write_binary(&g, &mut buf).unwrap();
        assert!(matches!(read_binary(&buf[..buf.len() - 3]), Err(Error::Format(_))));
        assert!(matches!(read_binary(&buf[..7]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_binary(&bad[..]), Err(Error::Format(_))));
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(read_binary(&extra[..]), Err(Error::Format(_))));
        let mut asym = buf;
        asym[13] ^= 0b10;
        assert!(matches!(read_binary(&asym[..]), Err(Error::Format(_))));
    }

    #[test]
    fn text_parsing() {
        let g = read_text("# a comment\n0 1\n\n1 2 # trailing\n".as_bytes()).unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 2));
        let g = read_text("# n 10\n0 1\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 10);
        assert!(read_text("0 1 2\n".as_bytes()).is_err());
        assert!(read_text("0 x\n".as_bytes()).is_err());
        assert!(read_text("3 3\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn round_trips(n in 0usize..150, p in 0.0f64..1.0, seed: u64) {
            let g = random_graph(n, p, seed);
            let mut bin = Vec::new();
            write_binary(&g, &mut bin).unwrap();
            prop_assert_eq!(bin.len(), 13 + 8 * n * n.div_ceil(64));
            prop_assert_eq!(&read_binary(&bin[..]).unwrap(), &g);
            let mut txt = Vec::new();
            write_text(&g, &mut txt).unwrap();
            prop_assert_eq!(&read_text(&txt[..]).unwrap(), &g);
        }
    }
}
