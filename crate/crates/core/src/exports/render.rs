use image::codecs::png::PngEncoder;
use image::{ImageEncoder, Rgba, RgbaImage};
use serde::{Deserialize, Serialize};

use super::ExportError;
use crate::filters::SelectionMask;
use crate::ingest::Atlas;
use crate::model::{Bundle, ProjectionTable};

/// Opacity multiplier for objects that fail the filters.
pub const GREY_ALPHA: f32 = 0.4;

const MAX_CANVAS: u32 = 8192;

/// Camera and appearance for a PNG export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewState {
    pub projection: String,
    #[serde(default)]
    pub center: [f64; 2],
    /// 1 shows the full `[-1, 1]` extent.
    #[serde(default = "one")]
    pub zoom: f64,
    #[serde(default = "default_canvas")]
    pub canvas_px: u32,
    /// Thumbnail edge in pixels on a 512 px canvas at zoom 1.
    #[serde(default = "default_thumb_size")]
    pub thumb_size: f64,
    /// How much thumbnails grow with zoom: 0 keeps them fixed on screen,
    /// 1 scales them with the scene.
    #[serde(default = "default_thumb_scale")]
    pub thumb_scale: f64,
    #[serde(default = "yes")]
    pub show_greyed: bool,
}

fn one() -> f64 {
    1.0
}
fn default_canvas() -> u32 {
    512
}
fn default_thumb_size() -> f64 {
    24.0
}
fn default_thumb_scale() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}

impl ViewState {
    pub fn new(projection: impl Into<String>) -> Self {
        ViewState {
            projection: projection.into(),
            center: [0.0, 0.0],
            zoom: 1.0,
            canvas_px: default_canvas(),
            thumb_size: default_thumb_size(),
            thumb_scale: default_thumb_scale(),
            show_greyed: true,
        }
    }

    pub fn validate(&self) -> Result<(), ExportError> {
        let bad = |m: String| Err(ExportError::InvalidView(m));
        if !(self.zoom.is_finite() && self.zoom > 0.0) {
            return bad(format!("zoom must be positive, got {}", self.zoom));
        }
        if !(64..=MAX_CANVAS).contains(&self.canvas_px) {
            return bad(format!("canvas_px must be in 64..={MAX_CANVAS}, got {}", self.canvas_px));
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return bad("center must be finite".into());
        }
        if !(self.thumb_size.is_finite() && self.thumb_size > 0.0) {
            return bad(format!("thumb_size must be positive, got {}", self.thumb_size));
        }
        if !self.thumb_scale.is_finite() {
            return bad("thumb_scale must be finite".into());
        }
        Ok(())
    }

    /// Drawn thumbnail edge in pixels.
    pub fn thumb_px_at_zoom(&self) -> f64 {
        self.thumb_size * (f64::from(self.canvas_px) / 512.0) * self.zoom.powf(self.thumb_scale)
    }

    /// Continuous pixel position of a world point; y grows downwards.
    pub fn to_pixel(&self, p: [f32; 2]) -> (f64, f64) {
        let half = f64::from(self.canvas_px) / 2.0;
        let x = (f64::from(p[0]) - self.center[0]) * self.zoom * half + half;
        let y = -(f64::from(p[1]) - self.center[1]) * self.zoom * half + half;
        (x, y)
    }

    /// Culling in world units, so it does not depend on the canvas size.
    fn visible(&self, p: [f32; 2]) -> bool {
        let reach = 1.0 / self.zoom
            + self.thumb_size / 512.0 * self.zoom.powf(self.thumb_scale) / self.zoom;
        (f64::from(p[0]) - self.center[0]).abs() <= reach
            && (f64::from(p[1]) - self.center[1]).abs() <= reach
    }
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub png: Vec<u8>,
    pub image: RgbaImage,
    /// Objects drawn, in painting order.
    pub drawn: Vec<usize>,
}

/// Rasterizes a projection from its atlas. The background is transparent.
pub fn render_png(
    projection: &ProjectionTable,
    atlas: &Atlas,
    mask: &SelectionMask,
    view: &ViewState,
) -> Result<Rendered, ExportError> {
    view.validate()?;
    let n = projection.len();
    if mask.len() != n {
        return Err(ExportError::MaskLength {
            mask: mask.len(),
            objects: n,
        });
    }
    let mut order: Vec<usize> = (0..n)
        .filter(|&i| mask.get(i) || view.show_greyed)
        .filter(|&i| view.visible(projection.xy(i)))
        .collect();
    order.sort_by(|&a, &b| projection.depth(a).total_cmp(&projection.depth(b)).then(a.cmp(&b)));

    let size = view.canvas_px;
    let mut canvas = RgbaImage::new(size, size);
    let d = view.thumb_px_at_zoom();
    for &i in &order {
        let (cx, cy) = view.to_pixel(projection.xy(i));
        draw_thumb(&mut canvas, atlas, i, cx - d / 2.0, cy - d / 2.0, d, !mask.get(i));
    }

    let mut png = Vec::new();
    PngEncoder::new(&mut png).write_image(
        canvas.as_raw(),
        size,
        size,
        image::ExtendedColorType::Rgba8,
    )?;
    Ok(Rendered {
        png,
        image: canvas,
        drawn: order,
    })
}

/// Looks up the view's projection in `bundle` and renders it.
pub fn render_view(
    bundle: &Bundle,
    atlas: &Atlas,
    mask: &SelectionMask,
    view: &ViewState,
) -> Result<Rendered, ExportError> {
    let projection = bundle
        .projection(&view.projection)
        .ok_or_else(|| ExportError::UnknownProjection(view.projection.clone()))?;
    render_png(projection, atlas, mask, view)
}

/// Pixels whose centers fall inside `[left, left + d)` horizontally (and
/// likewise vertically), nearest-neighbour sampled from the atlas cell.
fn draw_thumb(
    canvas: &mut RgbaImage,
    atlas: &Atlas,
    i: usize,
    left: f64,
    top: f64,
    d: f64,
    greyed: bool,
) {
    let t = atlas.descriptor.thumb_px;
    let (page, ox, oy) = atlas.cell_origin(i);
    let Some(page) = atlas.pages.get(page) else {
        return;
    };
    let size = f64::from(canvas.width());
    let span = |start: f64| {
        let a = (start - 0.5).ceil().max(0.0);
        let b = (start + d - 0.5).ceil().min(size);
        (a as u32, b.max(a) as u32)
    };
    let (x0, x1) = span(left);
    let (y0, y1) = span(top);
    let texel = |p: u32, start: f64| {
        let u = ((f64::from(p) + 0.5 - start) / d * f64::from(t)).floor();
        (u.max(0.0) as u32).min(t - 1)
    };
    for py in y0..y1 {
        let v = texel(py, top);
        for px in x0..x1 {
            let u = texel(px, left);
            let mut src = *page.get_pixel(ox + u, oy + v);
            if greyed {
                src = grey(src);
            }
            blend(canvas.get_pixel_mut(px, py), src);
        }
    }
}

fn grey(p: Rgba<u8>) -> Rgba<u8> {
    let [r, g, b, a] = p.0.map(f32::from);
    let l = (0.2126 * r + 0.7152 * g + 0.0722 * b).round().clamp(0.0, 255.0) as u8;
    Rgba([l, l, l, (a * GREY_ALPHA).round() as u8])
}

/// Source-over compositing with straight alpha.
fn blend(dst: &mut Rgba<u8>, src: Rgba<u8>) {
    let sa = f32::from(src[3]) / 255.0;
    if sa == 0.0 {
        return;
    }
    let da = f32::from(dst[3]) / 255.0;
    let oa = sa + da * (1.0 - sa);
    let mut out = [0u8; 4];
    for c in 0..3 {
        let v = (f32::from(src[c]) * sa + f32::from(dst[c]) * da * (1.0 - sa)) / oa;
        out[c] = v.round().clamp(0.0, 255.0) as u8;
    }
    out[3] = (oa * 255.0).round() as u8;
    *dst = Rgba(out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_atlas;

    fn solid_atlas(n: usize) -> Atlas {
        let thumbs: Vec<RgbaImage> = (0..n)
            .map(|i| RgbaImage::from_pixel(8, 8, Rgba([200, (i * 20) as u8, 40, 255])))
            .collect();
        build_atlas(&thumbs, 8, 64)
    }

    fn bbox(img: &RgbaImage) -> Option<(u32, u32, u32, u32)> {
        let mut b: Option<(u32, u32, u32, u32)> = None;
        for (x, y, p) in img.enumerate_pixels() {
            if p[3] > 0 {
                b = Some(match b {
                    None => (x, y, x, y),
                    Some((a, c, e, f)) => (a.min(x), c.min(y), e.max(x), f.max(y)),
                });
            }
        }
        b
    }

    #[test]
    fn single_object_is_centered() {
        let p = ProjectionTable::from_xy("p", &[[0.0, 0.0]]);
        let view = ViewState::new("p");
        let r = render_png(&p, &solid_atlas(1), &SelectionMask::full(1), &view).unwrap();
        // 24 px thumbnail covering pixels 244..=267, centered on 256.
        assert_eq!(bbox(&r.image), Some((244, 244, 267, 267)));
        assert_eq!(&r.png[..4], b"\x89PNG");
    }

    #[test]
    fn right_edge_and_y_inversion() {
        let p = ProjectionTable::from_xy("p", &[[1.0, 0.0], [0.0, 1.0]]);
        let view = ViewState::new("p");
        let a = render_png(&p, &solid_atlas(2), &SelectionMask::from_bools([true, false]), &ViewState {
            show_greyed: false,
            ..view.clone()
        })
        .unwrap();
        assert_eq!(bbox(&a.image), Some((500, 244, 511, 267)));
        let b = render_png(&p, &solid_atlas(2), &SelectionMask::from_bools([false, true]), &ViewState {
            show_greyed: false,
            ..view
        })
        .unwrap();
        assert_eq!(bbox(&b.image), Some((244, 0, 267, 11)));
    }

    #[test]
    fn greyed_objects_are_translucent_luma() {
        let p = ProjectionTable::from_xy("p", &[[0.0, 0.0]]);
        let r = render_png(&p, &solid_atlas(1), &SelectionMask::empty(1), &ViewState::new("p")).unwrap();
        let px = r.image.get_pixel(256, 256);
        let l = (0.2126f32 * 200.0 + 0.7152 * 0.0 + 0.0722 * 40.0).round() as u8;
        assert_eq!(px.0, [l, l, l, 102]);
        let hidden = render_png(&p, &solid_atlas(1), &SelectionMask::empty(1), &ViewState {
            show_greyed: false,
            ..ViewState::new("p")
        })
        .unwrap();
        assert!(hidden.drawn.is_empty());
        assert!(bbox(&hidden.image).is_none());
    }

    #[test]
    fn painter_order_follows_depth() {
        // n = 4: derived depths 0, 0.5, 0.25, 0.75.
        let p = ProjectionTable::from_xy("p", &[[0.0, 0.0]; 4]);
        let r = render_png(&p, &solid_atlas(4), &SelectionMask::full(4), &ViewState::new("p")).unwrap();
        assert_eq!(r.drawn, [0, 2, 1, 3]);
        assert_eq!(r.image.get_pixel(256, 256)[1], 60);
    }

    #[test]
    fn culling_is_canvas_independent() {
        let xy: Vec<[f32; 2]> = (0..50)
            .map(|i| {
                let t = i as f32 * 0.37;
                [t.sin(), (t * 1.7).cos()]
            })
            .collect();
        let p = ProjectionTable::from_xy("p", &xy);
        let atlas = solid_atlas(50);
        let mut view = ViewState::new("p");
        view.zoom = 3.0;
        view.center = [0.3, -0.2];
        let small = render_png(&p, &atlas, &SelectionMask::full(50), &view).unwrap();
        view.canvas_px = 1024;
        let large = render_png(&p, &atlas, &SelectionMask::full(50), &view).unwrap();
        assert!(small.drawn.len() < 50);
        assert!(small.drawn.iter().all(|i| large.drawn.contains(i)));
    }

    #[test]
    fn invalid_views_are_rejected() {
        let p = ProjectionTable::from_xy("p", &[[0.0, 0.0]]);
        for v in [
            ViewState { zoom: 0.0, ..ViewState::new("p") },
            ViewState { canvas_px: 32, ..ViewState::new("p") },
            ViewState { center: [f64::NAN, 0.0], ..ViewState::new("p") },
        ] {
            assert!(matches!(
                render_png(&p, &solid_atlas(1), &SelectionMask::full(1), &v),
                Err(ExportError::InvalidView(_))
            ));
        }
    }
}
