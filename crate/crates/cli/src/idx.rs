//! IDX binary dataset loader (big-endian, magic-checked).

use std::fmt;
use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use qiga::fitness::Dataset;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Loader diagnostics; each corruption mode is distinct.
#[derive(Debug)]
pub enum IdxError {
    Io(PathBuf, io::Error),
    BadMagic {
        path: PathBuf,
        expected: u32,
        got: u32,
    },
    Truncated {
        path: PathBuf,
        expected_bytes: usize,
        got_bytes: usize,
    },
    CountMismatch {
        images: usize,
        labels: usize,
    },
}

impl fmt::Display for IdxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdxError::Io(path, err) => write!(f, "{}: {err}", path.display()),
            IdxError::BadMagic {
                path,
                expected,
                got,
            } => write!(
                f,
                "{}: bad magic 0x{got:08x}, expected 0x{expected:08x}",
                path.display()
            ),
            IdxError::Truncated {
                path,
                expected_bytes,
                got_bytes,
            } => write!(
                f,
                "{}: truncated payload, expected {expected_bytes} bytes, got {got_bytes}",
                path.display()
            ),
            IdxError::CountMismatch { images, labels } => {
                write!(
                    f,
                    "image count {images} does not match label count {labels}"
                )
            }
        }
    }
}

impl std::error::Error for IdxError {}

struct Reader {
    path: PathBuf,
    bytes: Vec<u8>,
    cursor: usize,
}

impl Reader {
    fn open(path: &Path) -> Result<Self, IdxError> {
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| IdxError::Io(path.to_path_buf(), e))?;
        Ok(Self {
            path: path.to_path_buf(),
            bytes,
            cursor: 0,
        })
    }

    fn read_u32(&mut self) -> Result<u32, IdxError> {
        let end = self.cursor + 4;
        if end > self.bytes.len() {
            return Err(IdxError::Truncated {
                path: self.path.clone(),
                expected_bytes: end,
                got_bytes: self.bytes.len(),
            });
        }
        let mut word = [0u8; 4];
        word.copy_from_slice(&self.bytes[self.cursor..end]);
        self.cursor = end;
        Ok(u32::from_be_bytes(word))
    }

    fn expect_magic(&mut self, expected: u32) -> Result<(), IdxError> {
        let got = self.read_u32()?;
        if got != expected {
            return Err(IdxError::BadMagic {
                path: self.path.clone(),
                expected,
                got,
            });
        }
        Ok(())
    }

    fn payload(&self, expected: usize) -> Result<&[u8], IdxError> {
        let available = self.bytes.len() - self.cursor;
        if available < expected {
            return Err(IdxError::Truncated {
                path: self.path.clone(),
                expected_bytes: self.cursor + expected,
                got_bytes: self.bytes.len(),
            });
        }
        Ok(&self.bytes[self.cursor..self.cursor + expected])
    }
}

/// Parsed header of an IDX image file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdxHeader {
    pub samples: usize,
    pub rows: usize,
    pub cols: usize,
}

/// Read just the image-file header.
pub fn read_header(images: &Path) -> Result<IdxHeader, IdxError> {
    let mut reader = Reader::open(images)?;
    reader.expect_magic(IMAGES_MAGIC)?;
    Ok(IdxHeader {
        samples: reader.read_u32()? as usize,
        rows: reader.read_u32()? as usize,
        cols: reader.read_u32()? as usize,
    })
}

/// Load the first `max_samples` image/label pairs; pixel bytes scale to
/// [0, 1].
pub fn load_idx(
    images: &Path,
    labels: &Path,
    max_samples: usize,
) -> Result<Dataset<f64>, IdxError> {
    let mut image_reader = Reader::open(images)?;
    image_reader.expect_magic(IMAGES_MAGIC)?;
    let n = image_reader.read_u32()? as usize;
    let rows = image_reader.read_u32()? as usize;
    let cols = image_reader.read_u32()? as usize;
    let pixels_per_image = rows * cols;
    let image_payload = image_reader.payload(n * pixels_per_image)?;

    let mut label_reader = Reader::open(labels)?;
    label_reader.expect_magic(LABELS_MAGIC)?;
    let label_count = label_reader.read_u32()? as usize;
    if label_count != n {
        return Err(IdxError::CountMismatch {
            images: n,
            labels: label_count,
        });
    }
    let label_payload = label_reader.payload(n)?;

    let take = max_samples.min(n);
    let samples: Vec<Vec<f64>> = (0..take)
        .map(|i| {
            image_payload[i * pixels_per_image..(i + 1) * pixels_per_image]
                .iter()
                .map(|&b| f64::from(b) / 255.0)
                .collect()
        })
        .collect();
    let labels: Vec<usize> = label_payload[..take].iter().map(|&b| b as usize).collect();
    Dataset::new(pixels_per_image, samples, labels).map_err(|_| IdxError::CountMismatch {
        images: take,
        labels: take,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_images(path: &Path, n: u32, rows: u32, cols: u32, truncate_by: usize) {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&n.to_be_bytes());
        bytes.extend_from_slice(&rows.to_be_bytes());
        bytes.extend_from_slice(&cols.to_be_bytes());
        let payload = (n * rows * cols) as usize;
        bytes.extend(std::iter::repeat_n(
            128u8,
            payload.saturating_sub(truncate_by),
        ));
        File::create(path).unwrap().write_all(&bytes).unwrap();
    }

    fn write_labels(path: &Path, n: u32) {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&n.to_be_bytes());
        bytes.extend((0..n).map(|i| (i % 10) as u8));
        File::create(path).unwrap().write_all(&bytes).unwrap();
    }

    #[test]
    fn reference_header_shape() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("t10k-images-idx3-ubyte");
        write_images(&images, 10_000, 28, 28, 0);
        let header = read_header(&images).unwrap();
        assert_eq!(
            header,
            IdxHeader {
                samples: 10_000,
                rows: 28,
                cols: 28
            }
        );
    }

    #[test]
    fn loads_and_scales_samples() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        write_images(&images, 20, 4, 4, 0);
        write_labels(&labels, 20);
        let data = load_idx(&images, &labels, 10).unwrap();
        assert_eq!(data.len(), 10);
        assert_eq!(data.features(), 16);
        assert!((data.samples()[0][0] - 128.0 / 255.0).abs() < 1e-12);
        assert_eq!(data.labels()[3], 3);
    }

    #[test]
    fn truncated_payload_names_byte_counts() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        write_images(&images, 8, 4, 4, 5);
        write_labels(&labels, 8);
        match load_idx(&images, &labels, 8) {
            Err(IdxError::Truncated {
                expected_bytes,
                got_bytes,
                ..
            }) => {
                assert_eq!(expected_bytes, 16 + 8 * 16);
                assert_eq!(got_bytes, 16 + 8 * 16 - 5);
            }
            other => panic!("expected truncation diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_and_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        write_labels(&labels, 8);
        // Labels file used as images: wrong magic.
        match load_idx(&labels, &labels, 8) {
            Err(IdxError::BadMagic { expected, got, .. }) => {
                assert_eq!(expected, IMAGES_MAGIC);
                assert_eq!(got, LABELS_MAGIC);
            }
            other => panic!("expected magic diagnostic, got {other:?}"),
        }
        write_images(&images, 9, 4, 4, 0);
        match load_idx(&images, &labels, 8) {
            Err(IdxError::CountMismatch {
                images: i,
                labels: l,
            }) => {
                assert_eq!((i, l), (9, 8));
            }
            other => panic!("expected count diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn zero_max_samples_is_empty_not_error() {
        let dir = tempfile::tempdir().unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        write_images(&images, 6, 2, 2, 0);
        write_labels(&labels, 6);
        let data = load_idx(&images, &labels, 0).unwrap();
        assert!(data.is_empty());
    }
}
