use image::imageops::{self, FilterType};
use image::{DynamicImage, RgbaImage};

use crate::model::AtlasDescriptor;

/// Packed thumbnail pages plus the geometry used to address them.
#[derive(Debug, Clone)]
pub struct Atlas {
    pub descriptor: AtlasDescriptor,
    pub pages: Vec<RgbaImage>,
}

/// Places thumbnails on a row-major grid: object `i` goes to page
/// `i / per_page`, column `i % cols`, row `(i % per_page) / cols`, where
/// `cols = page_px / thumb_px`. Unused cells stay fully transparent.
///
/// # Panics
/// If a thumbnail is not `thumb_px` square or `thumb_px` does not divide
/// `page_px`.
pub fn build_atlas(thumbnails: &[RgbaImage], thumb_px: u32, page_px: u32) -> Atlas {
    assert!(thumb_px > 0 && page_px % thumb_px == 0, "thumb_px must divide page_px");
    let descriptor = AtlasDescriptor::for_objects(thumbnails.len(), thumb_px, page_px);
    let mut pages: Vec<RgbaImage> = (0..descriptor.page_count)
        .map(|_| RgbaImage::new(page_px, page_px))
        .collect();
    for (i, thumb) in thumbnails.iter().enumerate() {
        assert_eq!(thumb.dimensions(), (thumb_px, thumb_px), "thumbnail {i} is not square");
        let (page, col, row) = descriptor.cell(i);
        imageops::replace(
            &mut pages[page],
            thumb,
            (col as u32 * thumb_px).into(),
            (row as u32 * thumb_px).into(),
        );
    }
    Atlas { descriptor, pages }
}

impl Atlas {
    /// Pixel offset of object `i`'s cell within its page.
    pub fn cell_origin(&self, i: usize) -> (usize, u32, u32) {
        let (page, col, row) = self.descriptor.cell(i);
        let t = self.descriptor.thumb_px;
        (page, col as u32 * t, row as u32 * t)
    }

    /// Copies object `i`'s thumbnail back out of the atlas.
    pub fn read_cell(&self, i: usize) -> RgbaImage {
        let (page, x, y) = self.cell_origin(i);
        let t = self.descriptor.thumb_px;
        imageops::crop_imm(&self.pages[page], x, y, t, t).to_image()
    }
}

/// Aspect-preserving downscale until the shorter side equals `thumb_px`,
/// then a center crop to a `thumb_px` square.
pub fn make_thumbnail(image: &DynamicImage, thumb_px: u32) -> RgbaImage {
    let rgba = image.to_rgba8();
    let (w, h) = rgba.dimensions();
    let short = w.min(h).max(1);
    let scale = f64::from(thumb_px) / f64::from(short);
    let sw = ((f64::from(w) * scale).round() as u32).max(thumb_px);
    let sh = ((f64::from(h) * scale).round() as u32).max(thumb_px);
    let scaled = if (sw, sh) == (w, h) {
        rgba
    } else {
        imageops::resize(&rgba, sw, sh, FilterType::Triangle)
    };
    let x = (sw - thumb_px) / 2;
    let y = (sh - thumb_px) / 2;
    imageops::crop_imm(&scaled, x, y, thumb_px, thumb_px).to_image()
}
