use std::path::Path;

use image::{DynamicImage, GrayImage, Luma};

use super::TrackError;

/// An 8-bit grayscale digital-twin image with its binarization threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    pub threshold: u8,
}

impl TrackImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>, threshold: u8) -> Result<Self, TrackError> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(TrackError::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            threshold,
        })
    }

    /// Reads a PNG or PGM file. Color inputs are reduced to Rec. 601 luma.
    pub fn load(path: &Path, threshold: u8) -> Result<Self, TrackError> {
        let img = image::open(path)
            .map_err(|e| TrackError::InvalidImage(format!("{}: {e}", path.display())))?;
        Self::from_dynamic(img, threshold)
    }

    pub fn from_dynamic(img: DynamicImage, threshold: u8) -> Result<Self, TrackError> {
        let gray = match img {
            DynamicImage::ImageLuma8(g) => g,
            DynamicImage::ImageLumaA8(g) => {
                GrayImage::from_fn(g.width(), g.height(), |x, y| Luma([g.get_pixel(x, y)[0]]))
            }
            other => {
                let rgb = other.to_rgb8();
                GrayImage::from_fn(rgb.width(), rgb.height(), |x, y| {
                    let [r, g, b] = rgb.get_pixel(x, y).0;
                    Luma([rec601_luma(r, g, b)])
                })
            }
        };
        let (w, h) = gray.dimensions();
        Self::new(w, h, gray.into_raw(), threshold)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn to_gray_image(&self) -> GrayImage {
        GrayImage::from_raw(self.width, self.height, self.pixels.clone())
            .expect("length checked at construction")
    }

    pub fn save_png(&self, path: &Path) -> Result<(), TrackError> {
        self.to_gray_image()
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| TrackError::InvalidImage(format!("{}: {e}", path.display())))
    }

    /// PNG-encoded bytes of the image.
    pub fn encode_png(&self) -> Vec<u8> {
        let mut out = std::io::Cursor::new(Vec::new());
        self.to_gray_image()
            .write_to(&mut out, image::ImageFormat::Png)
            .expect("in-memory PNG encoding");
        out.into_inner()
    }
}

fn rec601_luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .round()
        .clamp(0.0, 255.0) as u8
}
