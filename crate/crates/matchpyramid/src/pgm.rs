//! Plain-text (P2) graymaps with per-image min-max scaling.

use std::fmt::Write as _;

pub const MAXVAL: u16 = 255;
/// Gray level used for every pixel of a constant image.
pub const MID_GRAY: u8 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

/// Value range an image was scaled from; `min == max` means the image
/// carries no contrast and was rendered as uniform mid-gray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

impl ValueRange {
    pub fn is_degenerate(&self) -> bool {
        self.min == self.max
    }

    /// Maps a gray level back to the value it encodes (up to quantisation).
    pub fn unscale(&self, level: u8) -> f64 {
        if self.is_degenerate() {
            self.min
        } else {
            self.min + (self.max - self.min) * f64::from(level) / f64::from(MAXVAL)
        }
    }
}

/// `round(255 * (v - min) / (max - min))` per pixel.
///
/// # Panics
/// If `values.len() != width * height` or a value is not finite.
pub fn scale(values: &[f64], width: usize, height: usize) -> (GrayImage, ValueRange) {
    assert_eq!(values.len(), width * height, "pixel count");
    assert!(values.iter().all(|v| v.is_finite()), "non-finite pixel value");
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = ValueRange { min, max };
    let pixels = if values.is_empty() || range.is_degenerate() {
        vec![MID_GRAY; values.len()]
    } else {
        values.iter().map(|v| ((v - min) / (max - min) * f64::from(MAXVAL)).round() as u8).collect()
    };
    (GrayImage { width, height, pixels }, range)
}

pub fn to_p2(img: &GrayImage) -> String {
    let mut s = format!("P2\n{} {}\n{MAXVAL}\n", img.width, img.height);
    for row in img.pixels.chunks(img.width.max(1)) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PgmError {
    #[error("not a P2 graymap (magic {0:?})")]
    Magic(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("bad number {0:?}")]
    Number(String),
    #[error("maxval {0} unsupported (1..=255)")]
    MaxVal(u32),
    #[error("pixel {value} exceeds maxval {maxval}")]
    Range { value: u32, maxval: u32 },
    #[error("expected {expected} pixels, found {found}")]
    Count { expected: usize, found: usize },
}

/// Parses a P2 file; `#` comments run to the end of a line.
pub fn parse_p2(text: &str) -> Result<GrayImage, PgmError> {
    let mut tokens = text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace);
    match tokens.next() {
        Some("P2") => {}
        Some(other) => return Err(PgmError::Magic(other.to_string())),
        None => return Err(PgmError::Missing("magic")),
    }
    let mut number = |what: &'static str| -> Result<u32, PgmError> {
        let t = tokens.next().ok_or(PgmError::Missing(what))?;
        t.parse().map_err(|_| PgmError::Number(t.to_string()))
    };
    let width = number("width")? as usize;
    let height = number("height")? as usize;
    let maxval = number("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(PgmError::MaxVal(maxval));
    }
    let mut pixels = Vec::with_capacity(width * height);
    for t in tokens {
        let value: u32 = t.parse().map_err(|_| PgmError::Number(t.to_string()))?;
        if value > maxval {
            return Err(PgmError::Range { value, maxval });
        }
        pixels.push(value as u8);
    }
    if pixels.len() != width * height {
        return Err(PgmError::Count { expected: width * height, found: pixels.len() });
    }
    Ok(GrayImage { width, height, pixels })
}
