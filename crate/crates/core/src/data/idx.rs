//! Big-endian IDX files as distributed for MNIST, optionally gzipped.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::RawDataset;
use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    let mut reader: Box<dyn Read> = if is_gz(path) {
        Box::new(GzDecoder::new(BufReader::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    reader.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn u32(&mut self) -> Result<u32> {
        let chunk = self.take(4)?;
        Ok(u32::from_be_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]))
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::TruncatedFile {
                path: self.path.to_path_buf(),
            }),
        }
    }
}

fn expect_magic(cur: &mut Cursor<'_>, expected: u32) -> Result<()> {
    let found = cur.u32()?;
    if found != expected {
        return Err(Error::BadMagic {
            path: cur.path.to_path_buf(),
            expected,
            found,
        });
    }
    Ok(())
}

pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<RawDataset> {
    let (images_path, labels_path) = (images_path.as_ref(), labels_path.as_ref());

    let bytes = read_all(images_path)?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
        path: images_path,
    };
    expect_magic(&mut cur, IMAGE_MAGIC)?;
    let count = cur.u32()? as usize;
    let rows = cur.u32()? as usize;
    let cols = cur.u32()? as usize;
    let mut images = Vec::with_capacity(count);
    for _ in 0..count {
        images.push(cur.take(rows * cols)?.to_vec());
    }

    let bytes = read_all(labels_path)?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
        path: labels_path,
    };
    expect_magic(&mut cur, LABEL_MAGIC)?;
    let label_count = cur.u32()? as usize;
    if label_count != count {
        return Err(Error::CountMismatch {
            images: count,
            labels: label_count,
        });
    }
    let labels = cur.take(label_count)?.to_vec();

    Ok(RawDataset {
        rows,
        cols,
        images,
        labels,
    })
}

fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out: Box<dyn Write> = if is_gz(path) {
        Box::new(GzEncoder::new(BufWriter::new(file), Compression::default()))
    } else {
        Box::new(BufWriter::new(file))
    };
    out.write_all(bytes).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Writes `raw` as an image/label IDX pair (gzipped when the path ends in `.gz`).
pub fn write_idx(raw: &RawDataset, images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<()> {
    let mut img = Vec::with_capacity(16 + raw.images.len() * raw.rows * raw.cols);
    for v in [IMAGE_MAGIC, raw.images.len() as u32, raw.rows as u32, raw.cols as u32] {
        img.extend_from_slice(&v.to_be_bytes());
    }
    for image in &raw.images {
        img.extend_from_slice(image);
    }
    write_all(images_path.as_ref(), &img)?;

    let mut lbl = Vec::with_capacity(8 + raw.labels.len());
    lbl.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    lbl.extend_from_slice(&(raw.labels.len() as u32).to_be_bytes());
    lbl.extend_from_slice(&raw.labels);
    write_all(labels_path.as_ref(), &lbl)
}
