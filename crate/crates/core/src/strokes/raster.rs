use std::path::Path;

use crate::error::{Error, Result};

/// Binary image, row-major, `true` = ink.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RasterGlyph {
    width: usize,
    height: usize,
    ink: Vec<bool>,
}

impl std::fmt::Debug for RasterGlyph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RasterGlyph {}x{}", self.width, self.height)?;
        for r in 0..self.height {
            let row: String = (0..self.width)
                .map(|c| if self.get(r, c) { '#' } else { '.' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

pub(crate) const NEIGHBORS8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

impl RasterGlyph {
    pub fn blank(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("glyph dimensions must be at least 1".into()));
        }
        Ok(RasterGlyph {
            width,
            height,
            ink: vec![false; width * height],
        })
    }

    /// Builds a glyph from text rows; `#`, `1`, `X` and `x` are ink.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut g = Self::blank(width, height)?;
        for (r, line) in rows.iter().enumerate() {
            if line.chars().count() != width {
                return Err(Error::InvalidArgument(format!("row {r} has a different width")));
            }
            for (c, ch) in line.chars().enumerate() {
                if matches!(ch, '#' | '1' | 'X' | 'x') {
                    g.set(r, c, true);
                }
            }
        }
        Ok(g)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        r < self.height && c < self.width && self.ink[r * self.width + c]
    }

    /// Out-of-bounds coordinates read as background.
    pub fn get_i(&self, r: isize, c: isize) -> bool {
        r >= 0 && c >= 0 && self.get(r as usize, c as usize)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = self.width;
        self.ink[r * w + c] = v;
    }

    pub fn ink_count(&self) -> usize {
        self.ink.iter().filter(|&&b| b).count()
    }

    /// Ink pixels as `(row, col)` in raster order.
    pub fn ink_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ink
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / self.width, i % self.width))
    }

    pub(crate) fn neighbors8(&self, r: usize, c: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        NEIGHBORS8.iter().filter_map(move |&(dr, dc)| {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            self.get_i(nr, nc).then_some((nr as usize, nc as usize))
        })
    }

    /// 8-connected component label per pixel (`usize::MAX` for background)
    /// and the component count.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let mut labels = vec![usize::MAX; self.ink.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.ink.len() {
            if !self.ink[start] || labels[start] != usize::MAX {
                continue;
            }
            labels[start] = count;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (r, c) = (i / self.width, i % self.width);
                for (nr, nc) in self.neighbors8(r, c) {
                    let j = nr * self.width + nc;
                    if labels[j] == usize::MAX {
                        labels[j] = count;
                        stack.push(j);
                    }
                }
            }
            count += 1;
        }
        (labels, count)
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// True when some 2×2 window is entirely ink.
    pub fn has_solid_2x2(&self) -> bool {
        (0..self.height.saturating_sub(1)).any(|r| {
            (0..self.width.saturating_sub(1)).any(|c| {
                self.get(r, c) && self.get(r, c + 1) && self.get(r + 1, c) && self.get(r + 1, c + 1)
            })
        })
    }

    /// Copy placed on a larger canvas with the given margins.
    pub fn padded(&self, top: usize, left: usize, bottom: usize, right: usize) -> Self {
        let mut out = RasterGlyph {
            width: self.width + left + right,
            height: self.height + top + bottom,
            ink: vec![false; (self.width + left + right) * (self.height + top + bottom)],
        };
        for (r, c) in self.ink_pixels() {
            out.set(r + top, c + left, true);
        }
        out
    }

    /// Nearest-neighbour upscale: every pixel becomes a `factor`×`factor` block.
    pub fn upscaled(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let mut out = RasterGlyph {
            width: self.width * factor,
            height: self.height * factor,
            ink: vec![false; self.width * self.height * factor * factor],
        };
        for (r, c) in self.ink_pixels() {
            for dr in 0..factor {
                for dc in 0..factor {
                    out.set(r * factor + dr, c * factor + dc, true);
                }
            }
        }
        out
    }

    /// Parses a binary (P5) or ASCII (P2) PGM and binarizes it: pixels darker
    /// than half of maxval are ink. If that makes most of the image ink, the
    /// polarity is flipped so that strokes stay the minority.
    pub fn from_pgm_bytes(data: &[u8]) -> std::result::Result<Self, String> {
        let mut pos = 0usize;
        let magic = next_token(data, &mut pos).ok_or("missing PGM magic")?;
        let binary = match magic.as_slice() {
            b"P5" => true,
            b"P2" => false,
            _ => return Err("not a PGM file (expected P2 or P5)".into()),
        };
        let mut header = [0usize; 3];
        for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
            let tok = next_token(data, &mut pos).ok_or_else(|| format!("missing {name}"))?;
            header[i] = std::str::from_utf8(&tok)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("bad {name}"))?;
        }
        let [width, height, maxval] = header;
        if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
            return Err("invalid PGM header".into());
        }
        let n = width * height;
        let mut values = Vec::with_capacity(n);
        if binary {
            pos += 1; // single whitespace after maxval
            let bpp = if maxval > 255 { 2 } else { 1 };
            let body = data.get(pos..pos + n * bpp).ok_or("truncated PGM raster")?;
            if bpp == 1 {
                values.extend(body.iter().map(|&b| b as usize));
            } else {
                values.extend(body.chunks(2).map(|p| ((p[0] as usize) << 8) | p[1] as usize));
            }
        } else {
            for _ in 0..n {
                let tok = next_token(data, &mut pos).ok_or("truncated PGM raster")?;
                let v: usize = std::str::from_utf8(&tok)
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or("bad PGM sample")?;
                values.push(v);
            }
        }
        // threshold 128 on the 0..=255 scale
        let mut ink: Vec<bool> = values.iter().map(|&v| v * 255 < 128 * maxval).collect();
        if ink.iter().filter(|&&b| b).count() * 2 > n {
            ink.iter_mut().for_each(|b| *b = !*b);
        }
        Ok(RasterGlyph { width, height, ink })
    }

    pub fn read_pgm(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_pgm_bytes(&data).map_err(|message| Error::Data {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Binary PGM with black (0) ink on white (255).
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.ink.iter().map(|&b| if b { 0u8 } else { 255u8 }));
        out
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_pgm_bytes()).map_err(|e| Error::io(path, e))
    }
}

fn next_token(data: &[u8], pos: &mut usize) -> Option<Vec<u8>> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| data[start..*pos].to_vec())
}
