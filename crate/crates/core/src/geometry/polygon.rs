//! 2D convex polygon helpers: clipping, areas, rectangles.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

/// Axis-aligned rectangle in some 2D frame, as `[min, max]` corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect2 {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect2 {
    pub fn area(&self) -> f64 {
        ((self.max.x - self.min.x) * (self.max.y - self.min.y)).max(0.0)
    }

    pub fn intersection_area(&self, other: &Rect2) -> f64 {
        let w = self.max.x.min(other.max.x) - self.min.x.max(other.min.x);
        let h = self.max.y.min(other.max.y) - self.min.y.max(other.min.y);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec2>) -> Option<Rect2> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut rect = Rect2 { min: first, max: first };
        for p in it {
            rect.min.x = rect.min.x.min(p.x);
            rect.min.y = rect.min.y.min(p.y);
            rect.max.x = rect.max.x.max(p.x);
            rect.max.y = rect.max.y.max(p.y);
        }
        Some(rect)
    }
}

/// Shoelace area of a simple polygon given in CCW order.
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc += a.x * b.y - b.x * a.y;
    }
    acc.abs() * 0.5
}

fn edge_side(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

fn clip_halfplane(poly: &[Vec2], a: Vec2, b: Vec2) -> Vec<Vec2> {
    let n = poly.len();
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let sc = edge_side(a, b, s);
        let ec = edge_side(a, b, e);
        let s_in = sc >= 0.0;
        let e_in = ec >= 0.0;
        match (s_in, e_in) {
            (true, true) => out.push(e),
            (true, false) | (false, true) => {
                let denom = sc - ec;
                if denom.abs() > 1e-30 {
                    let t = sc / denom;
                    out.push(s + (e - s) * t);
                }
                if e_in {
                    out.push(e);
                }
            }
            (false, false) => {}
        }
    }
    out
}

/// Sutherland-Hodgman clip of `subject` against a CCW convex `clip` polygon.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    if subject.len() < 3 || clip.len() < 3 {
        return Vec::new();
    }
    let mut result = subject.to_vec();
    for i in 0..clip.len() {
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        result = clip_halfplane(&result, a, b);
        if result.len() < 3 {
            return Vec::new();
        }
    }
    result
}

/// Area of the intersection of two CCW convex polygons.
pub fn intersection_area(a: &[Vec2], b: &[Vec2]) -> f64 {
    polygon_area(&clip_convex(a, b))
}
