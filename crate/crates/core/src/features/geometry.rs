use crate::error::{Error, Result};
use crate::graph::BoundingBox;

/// Crop sizes the backbones expect. Recorded for reference only; no pixels
/// are resampled here.
pub const SINGLE_BODY_RESIZE: (u32, u32) = (227, 227);
pub const CONTEXT_RESIZE: (u32, u32) = (224, 224);

const BODY_WIDTH_FACTOR: f64 = 3.0;
const BODY_HEIGHT_FACTOR: f64 = 6.0;

/// Width of the box starting at `lo` whose far edge lands on `hi`.
/// Plain `hi - lo` can be off by an ulp once added back to `lo`.
fn span(lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    let candidates = [w, w.next_up(), w.next_down(), w.next_up().next_up()];
    candidates
        .into_iter()
        .find(|c| lo + c == hi)
        .or_else(|| candidates.into_iter().filter(|c| lo + c >= hi).reduce(f64::min))
        .unwrap_or(w)
}

/// Body box from a face box: three face widths wide and six face heights
/// tall, centred horizontally on the face with its top on the face top,
/// then clamped to the image.
pub fn expand_face_box(face: &BoundingBox, image_w: u32, image_h: u32) -> Result<BoundingBox> {
    if !face.is_valid() {
        return Err(Error::Geometry(format!("degenerate face box {face:?}")));
    }
    if !face.within_image(image_w, image_h) {
        return Err(Error::Geometry(format!(
            "face box {face:?} outside {image_w}x{image_h} image"
        )));
    }
    let w = BODY_WIDTH_FACTOR * face.w;
    let h = BODY_HEIGHT_FACTOR * face.h;
    let left = face.x + face.w / 2.0 - w / 2.0;
    let top = face.y;

    let x0 = left.max(0.0);
    let y0 = top.max(0.0);
    let x1 = (left + w).min(f64::from(image_w));
    let y1 = (top + h).min(f64::from(image_h));
    Ok(BoundingBox::new(x0, y0, span(x0, x1), span(y0, y1)))
}

/// Smallest box containing both inputs.
pub fn context_box(a: &BoundingBox, b: &BoundingBox) -> BoundingBox {
    let x0 = a.x.min(b.x);
    let y0 = a.y.min(b.y);
    let x1 = a.right().max(b.right());
    let y1 = a.bottom().max(b.bottom());
    BoundingBox::new(x0, y0, span(x0, x1), span(y0, y1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_examples() {
        let b = expand_face_box(&BoundingBox::new(100.0, 50.0, 20.0, 30.0), 1000, 1000).unwrap();
        assert_eq!(b, BoundingBox::new(80.0, 50.0, 60.0, 180.0));
        let b = expand_face_box(&BoundingBox::new(0.0, 0.0, 10.0, 10.0), 100, 100).unwrap();
        assert_eq!(b, BoundingBox::new(0.0, 0.0, 20.0, 60.0));
    }

    #[test]
    fn expand_errors() {
        assert!(matches!(
            expand_face_box(&BoundingBox::new(5.0, 5.0, 0.0, 10.0), 100, 100),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            expand_face_box(&BoundingBox::new(95.0, 5.0, 10.0, 10.0), 100, 100),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn context_examples() {
        let a = BoundingBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BoundingBox::new(20.0, 20.0, 10.0, 10.0);
        assert_eq!(context_box(&a, &a), a);
        assert_eq!(context_box(&a, &b), BoundingBox::new(0.0, 0.0, 30.0, 30.0));
        assert_eq!(context_box(&a, &b), context_box(&b, &a));
    }
}
