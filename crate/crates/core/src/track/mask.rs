use super::{TrackError, TrackImage};

/// 8-neighbour offsets in clockwise order starting north
/// (`P2..P9` in the usual thinning notation). Image y grows downward.
pub(crate) const NEIGHBOURS: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// A binary raster. Pixels outside the grid read as background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.set(x, y, f(x, y));
            }
        }
        m
    }

    /// Parses rows of `#` (set) and `.` (clear).
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.len()) as u32;
        Self::from_fn(width, height, |x, y| rows[y as usize].as_bytes()[x as usize] == b'#')
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Set pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i as u32 % w, i as u32 / w))
    }

    /// Neighbour states in `NEIGHBOURS` order.
    pub(crate) fn ring(&self, x: u32, y: u32) -> [bool; 8] {
        NEIGHBOURS.map(|(dx, dy)| self.get(x as i64 + dx, y as i64 + dy))
    }

    pub fn neighbour_count(&self, x: u32, y: u32) -> usize {
        self.ring(x, y).iter().filter(|b| **b).count()
    }

    /// 8-connected components, each as a list of pixels.
    pub fn components(&self) -> Vec<Vec<(u32, u32)>> {
        let mut seen = vec![false; self.bits.len()];
        let w = self.width as usize;
        let mut out = Vec::new();
        for (x, y) in self.pixels() {
            let idx = y as usize * w + x as usize;
            if seen[idx] {
                continue;
            }
            seen[idx] = true;
            let mut component = Vec::new();
            let mut stack = vec![(x, y)];
            while let Some((cx, cy)) = stack.pop() {
                component.push((cx, cy));
                for (dx, dy) in NEIGHBOURS {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if self.get(nx, ny) {
                        let nidx = ny as usize * w + nx as usize;
                        if !seen[nidx] {
                            seen[nidx] = true;
                            stack.push((nx as u32, ny as u32));
                        }
                    }
                }
            }
            out.push(component);
        }
        out
    }
}

/// Thresholds a track image: `>= threshold` when the track is brighter than
/// the background, `<= threshold` otherwise.
pub fn binarize(image: &TrackImage, track_is_bright: bool) -> Result<Mask, TrackError> {
    let t = image.threshold;
    let mask = Mask {
        width: image.width(),
        height: image.height(),
        bits: image
            .pixels()
            .iter()
            .map(|&v| if track_is_bright { v >= t } else { v <= t })
            .collect(),
    };
    if mask.is_empty() {
        return Err(TrackError::EmptyMask {
            threshold: t,
            track_is_bright,
        });
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_dark_image_is_empty() {
        let img = TrackImage::new(4, 4, vec![0; 16], 128).unwrap();
        assert!(matches!(binarize(&img, true), Err(TrackError::EmptyMask { .. })));
        // inverted polarity sees every pixel
        assert_eq!(binarize(&img, false).unwrap().count(), 16);
    }

    #[test]
    fn single_bright_pixel() {
        let mut px = vec![0; 12];
        px[7] = 255;
        let img = TrackImage::new(4, 3, px, 128).unwrap();
        let mask = binarize(&img, true).unwrap();
        assert_eq!(mask.pixels().collect::<Vec<_>>(), vec![(3, 1)]);
    }

    #[test]
    fn checkerboard_is_half_set() {
        let px = (0..64).map(|i| if (i % 8 + i / 8) % 2 == 0 { 255 } else { 0 }).collect();
        let img = TrackImage::new(8, 8, px, 128).unwrap();
        assert_eq!(binarize(&img, true).unwrap().count(), 32);
    }

    #[test]
    fn components_use_eight_connectivity() {
        let m = Mask::from_ascii(&["#...", ".#..", "...#", "...#"]);
        assert_eq!(m.components().len(), 2);
    }
}
