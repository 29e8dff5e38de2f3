//! Shape classes of digitized angles.
//!
//! With `alpha = a(x0 - 1/2) - b(y0 - 1/2)` and `beta = c(x0 - 1/2) - d(y0 - 1/2)`
//! the digitized angle is `R(alpha, beta) = {(m, n) : am - bn >= alpha,
//! cm - dn >= beta}`. Because the forms are integers on the lattice, only the
//! ceilings of `alpha` and `beta` matter. Two integer parameter pairs give
//! translates of one another exactly when their difference is
//! `(ka - lb, kc - ld)` for integers `k, l`; reducing `alpha` to zero that way
//! leaves `beta` modulo `ad - bc` as a complete invariant, the class index.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digitizer::{to_i64, window_pixels, AngleSpec, PixelIndex, Point, Slopes};
use crate::numerics::{extended_gcd, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("classes {first} and {second} coincide in a window of half-width {window}")]
    WindowTooSmall {
        window: i64,
        first: i64,
        second: i64,
    },
    #[error("reflection axis offset {0} is not a pixel-corner or pixel-center line")]
    InvalidAxis(Rational),
    #[error("window half-width must be at least 1")]
    InvalidWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub alpha_ceil: i64,
    pub beta_ceil: i64,
}

impl RegionParams {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        RegionParams {
            alpha,
            beta,
            alpha_ceil: to_i64(alpha.ceil()),
            beta_ceil: to_i64(beta.ceil()),
        }
    }

    pub fn integer(alpha: i64, beta: i64) -> Self {
        RegionParams::new(alpha.into(), beta.into())
    }
}

pub fn region_params(spec: &AngleSpec) -> RegionParams {
    let s = &spec.slopes;
    let u = spec.corner.x - Rational::HALF;
    let v = spec.corner.y - Rational::HALF;
    RegionParams::new(
        u.mul_int(s.a()) - v.mul_int(s.b()),
        u.mul_int(s.c()) - v.mul_int(s.d()),
    )
}

/// Corner point whose region parameters are exactly `(alpha, beta)`.
pub fn corner_for_params(slopes: &Slopes, alpha: Rational, beta: Rational) -> Point {
    let det = Rational::from(slopes.determinant());
    let u = (alpha.mul_int(slopes.d()) - beta.mul_int(slopes.b())) / det;
    let v = (alpha.mul_int(slopes.c()) - beta.mul_int(slopes.a())) / det;
    Point::new(u + Rational::HALF, v + Rational::HALF)
}

/// `beta'` with `R(alpha, beta) ≡ R(0, beta')`, for integer parameters.
fn reduce_beta(slopes: &Slopes, alpha: i64, beta: i64) -> i128 {
    // a*a1 - b*b1 = 1, so (k, l) = alpha*(a1, b1) solves k*a - l*b = alpha.
    let (_, a1, b1) = extended_gcd(slopes.a(), slopes.b()).expect("slope pair is nonzero");
    let k = alpha as i128 * a1 as i128;
    let l = alpha as i128 * b1 as i128;
    beta as i128 - (k * slopes.c() as i128 - l * slopes.d() as i128)
}

/// Whether `R(p1)` and `R(p2)` are integer translates of each other.
pub fn equivalent(p1: &RegionParams, p2: &RegionParams, slopes: &Slopes) -> bool {
    let dalpha = p1.alpha_ceil - p2.alpha_ceil;
    let dbeta = p1.beta_ceil - p2.beta_ceil;
    reduce_beta(slopes, dalpha, dbeta).rem_euclid(slopes.class_count() as i128) == 0
}

/// Class index `j` in `[0, |ad - bc|)` of the integer parameters.
pub fn class_of_params(slopes: &Slopes, alpha: i64, beta: i64) -> i64 {
    let d = slopes.class_count() as i128;
    reduce_beta(slopes, alpha, beta).rem_euclid(d) as i64
}

/// Class index of the angle at `spec.corner`.
pub fn class_index(spec: &AngleSpec) -> i64 {
    let p = region_params(spec);
    class_of_params(&spec.slopes, p.alpha_ceil, p.beta_ceil)
}

/// A finite set of pixels. Serializes as a sorted list of `[m, n]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PixelSet {
    pixels: BTreeSet<PixelIndex>,
}

impl PixelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn insert(&mut self, px: PixelIndex) -> bool {
        self.pixels.insert(px)
    }

    pub fn contains(&self, px: PixelIndex) -> bool {
        self.pixels.contains(&px)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PixelIndex> + '_ {
        self.pixels.iter()
    }

    /// Lowest occupied column and row, if any.
    pub fn min_corner(&self) -> Option<PixelIndex> {
        let m = self.pixels.iter().map(|p| p.m).min()?;
        let n = self.pixels.iter().map(|p| p.n).min()?;
        Some(PixelIndex::new(m, n))
    }

    pub fn max_corner(&self) -> Option<PixelIndex> {
        let m = self.pixels.iter().map(|p| p.m).max()?;
        let n = self.pixels.iter().map(|p| p.n).max()?;
        Some(PixelIndex::new(m, n))
    }

    pub fn translated(&self, dm: i64, dn: i64) -> PixelSet {
        self.pixels
            .iter()
            .map(|p| PixelIndex::new(p.m + dm, p.n + dn))
            .collect()
    }

    /// Translate so the lowest occupied column and row are both 0.
    pub fn canonical(&self) -> PixelSet {
        match self.min_corner() {
            Some(c) => self.translated(-c.m, -c.n),
            None => PixelSet::new(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.min_corner().is_none_or(|c| c.m == 0 && c.n == 0)
    }

    /// Same shape up to integer translation.
    pub fn translation_equivalent(&self, other: &PixelSet) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}

impl FromIterator<PixelIndex> for PixelSet {
    fn from_iter<I: IntoIterator<Item = PixelIndex>>(iter: I) -> Self {
        PixelSet {
            pixels: iter.into_iter().collect(),
        }
    }
}

impl From<BTreeSet<PixelIndex>> for PixelSet {
    fn from(pixels: BTreeSet<PixelIndex>) -> Self {
        PixelSet { pixels }
    }
}

/// `R(alpha, beta)` restricted to the window around `anchor`, compared exactly.
pub fn region_in_window(
    slopes: &Slopes,
    alpha: Rational,
    beta: Rational,
    anchor: PixelIndex,
    window: i64,
) -> PixelSet {
    window_pixels(anchor, window)
        .filter(|px| {
            let (f, g) = slopes.forms(px.m, px.n);
            Rational::from(f) >= alpha && Rational::from(g) >= beta
        })
        .collect()
}

/// Integer-parameter variant of [`region_in_window`].
pub fn integer_region_in_window(
    slopes: &Slopes,
    alpha: i64,
    beta: i64,
    anchor: PixelIndex,
    window: i64,
) -> PixelSet {
    window_pixels(anchor, window)
        .filter(|px| {
            let (f, g) = slopes.forms(px.m, px.n);
            f >= alpha && g >= beta
        })
        .collect()
}

/// Pixel holding the corner point of the integer parameters.
pub fn params_anchor(slopes: &Slopes, alpha: i64, beta: i64) -> PixelIndex {
    let c = corner_for_params(slopes, alpha.into(), beta.into());
    PixelIndex::new(to_i64(c.x.floor()), to_i64(c.y.floor()))
}

/// Canonical bitmap of `R(alpha, beta)` in a window anchored at its corner.
pub fn windowed_shape(slopes: &Slopes, alpha: i64, beta: i64, window: i64) -> PixelSet {
    let anchor = params_anchor(slopes, alpha, beta);
    integer_region_in_window(slopes, alpha, beta, anchor, window).canonical()
}

/// Window anchor for the angle at `spec.corner`.
///
/// This is the corner pixel of `R(ceil alpha, ceil beta)`, not of the corner
/// itself: corners of one class differ by non-integer offsets, while their
/// integerized corners differ by exact lattice translations.
pub fn spec_anchor(spec: &AngleSpec) -> PixelIndex {
    let p = region_params(spec);
    params_anchor(&spec.slopes, p.alpha_ceil, p.beta_ceil)
}

/// Canonical windowed bitmap of the angle at `spec.corner`.
pub fn spec_shape(spec: &AngleSpec, window: i64) -> PixelSet {
    let p = region_params(spec);
    region_in_window(&spec.slopes, p.alpha, p.beta, spec_anchor(spec), window).canonical()
}

/// Default half-width used when enumerating shapes.
pub fn default_window(slopes: &Slopes) -> i64 {
    2 * slopes.magnitude()
}

/// Largest multiple of the starting window tried before giving up.
pub const WINDOW_GROWTH_CAP: i64 = 8;

/// One translation-equivalence class: the windowed bitmap of `R(0, index)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeClass {
    pub slopes: Slopes,
    pub index: i64,
    pub window: i64,
    pub pixels: PixelSet,
}

impl ShapeClass {
    pub fn new(slopes: Slopes, index: i64, window: i64) -> Self {
        ShapeClass {
            slopes,
            index,
            window,
            pixels: windowed_shape(&slopes, 0, index, window),
        }
    }

    /// Position of the corner pixel inside the canonical bitmap.
    pub fn corner_pixel(&self) -> PixelIndex {
        let anchor = params_anchor(&self.slopes, 0, self.index);
        let raw = integer_region_in_window(&self.slopes, 0, self.index, anchor, self.window);
        let offset = raw.min_corner().unwrap_or(anchor);
        PixelIndex::new(anchor.m - offset.m, anchor.n - offset.n)
    }
}

/// All `|ad - bc|` shape classes, in index order.
///
/// Starts at `window` (or [`default_window`]) and doubles while two classes
/// still look alike, up to [`WINDOW_GROWTH_CAP`] times the start.
pub fn enumerate_shapes(slopes: &Slopes, window: Option<i64>) -> Result<Vec<ShapeClass>, ShapeError> {
    let start = window.unwrap_or_else(|| default_window(slopes));
    if start < 1 {
        return Err(ShapeError::InvalidWindow);
    }
    let mut w = start;
    loop {
        match shapes_at_window(slopes, w) {
            Ok(shapes) => return Ok(shapes),
            Err(e) if w * 2 > start * WINDOW_GROWTH_CAP => return Err(e),
            Err(_) => w *= 2,
        }
    }
}

fn shapes_at_window(slopes: &Slopes, window: i64) -> Result<Vec<ShapeClass>, ShapeError> {
    let shapes: Vec<ShapeClass> = (0..slopes.class_count())
        .map(|j| ShapeClass::new(*slopes, j, window))
        .collect();
    let mut seen = std::collections::HashMap::new();
    for s in &shapes {
        if let Some(&first) = seen.get(&s.pixels) {
            return Err(ShapeError::WindowTooSmall {
                window,
                first,
                second: s.index,
            });
        }
        seen.insert(&s.pixels, s.index);
    }
    Ok(shapes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// `y = offset`
    Horizontal,
    /// `x = offset`
    Vertical,
    /// `y = x + offset`
    Diagonal45,
    /// `x + y = offset`
    Antidiagonal45,
}

fn twice_integer(r: Rational) -> Option<i64> {
    let t = r * Rational::from(2);
    t.is_integer().then(|| to_i64(t.numer()))
}

/// Whether reflecting `ps` across the axis reproduces it exactly.
///
/// Horizontal and vertical axes may run along pixel edges or through pixel
/// centers (integer or half-integer offset). Diagonal axes must pass through
/// pixel corners, so their offset must be an integer; a half-integer
/// diagonal maps pixels onto non-pixels and is rejected too.
pub fn reflection_symmetric(ps: &PixelSet, axis: Axis, offset: Rational) -> Result<bool, ShapeError> {
    let invalid = || ShapeError::InvalidAxis(offset);
    let image = |p: &PixelIndex, s2: i64| -> PixelIndex {
        match axis {
            Axis::Vertical => PixelIndex::new(s2 - 1 - p.m, p.n),
            Axis::Horizontal => PixelIndex::new(p.m, s2 - 1 - p.n),
            Axis::Diagonal45 => PixelIndex::new(p.n - s2 / 2, p.m + s2 / 2),
            Axis::Antidiagonal45 => PixelIndex::new(s2 / 2 - p.n - 1, s2 / 2 - p.m - 1),
        }
    };
    let s2 = twice_integer(offset).ok_or_else(invalid)?;
    if matches!(axis, Axis::Diagonal45 | Axis::Antidiagonal45) && s2 % 2 != 0 {
        return Err(invalid());
    }
    Ok(ps.iter().all(|p| ps.contains(image(p, s2))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn case_p() -> Slopes {
        Slopes::new(2, 1, -3, 1).unwrap()
    }

    fn case_q() -> Slopes {
        Slopes::new(3, -1, -1, 2).unwrap()
    }

    fn spec(slopes: Slopes, x: Rational, y: Rational) -> AngleSpec {
        AngleSpec::new(slopes, Point::new(x, y))
    }

    #[test]
    fn region_params_examples() {
        let p = region_params(&spec(case_p(), r(1, 2), r(1, 2)));
        assert_eq!((p.alpha, p.beta), (Rational::ZERO, Rational::ZERO));
        // 2(1/10 - 1/2) - (7/10 - 1/2) = -1 and -3(-2/5) - 1/5 = 1
        let p = region_params(&spec(case_p(), r(1, 10), r(7, 10)));
        assert_eq!((p.alpha, p.beta), (r(-1, 1), r(1, 1)));
        let p = region_params(&spec(case_p(), r(9, 10), r(3, 10)));
        assert_eq!((p.alpha, p.beta), (r(1, 1), r(-1, 1)));
        assert_eq!((p.alpha_ceil, p.beta_ceil), (1, -1));
    }

    #[test]
    fn corner_for_params_inverts_region_params() {
        for (x, y) in [(r(1, 10), r(7, 10)), (r(-13, 7), r(22, 9)), (r(5, 3), r(-1, 4))] {
            for s in [case_p(), case_q(), Slopes::new(1, 1, -1, 1).unwrap()] {
                let p = region_params(&spec(s, x, y));
                assert_eq!(corner_for_params(&s, p.alpha, p.beta), Point::new(x, y));
            }
        }
    }

    #[test]
    fn pixel_membership_matches_params() {
        let sp = spec(case_q(), r(3, 7), r(-2, 9));
        let p = region_params(&sp);
        for px in window_pixels(sp.corner_pixel(), 5) {
            let (f, g) = sp.slopes.forms(px.m, px.n);
            let by_params = Rational::from(f) >= p.alpha && Rational::from(g) >= p.beta;
            assert_eq!(crate::digitizer::pixel_in_angle(px, &sp), by_params);
        }
    }

    // Oracle: search k, l directly for the translation equations.
    fn translation_search(s: &Slopes, da: i64, db: i64, bound: i64) -> bool {
        (-bound..=bound).any(|k| {
            (-bound..=bound)
                .any(|l| k * s.a() - l * s.b() == da && k * s.c() - l * s.d() == db)
        })
    }

    #[test]
    fn equivalence_examples() {
        let s = case_p();
        let p00 = RegionParams::integer(0, 0);
        assert!(equivalent(&p00, &p00, &s));
        assert!(equivalent(&p00, &RegionParams::integer(0, 5), &s));
        assert!(translation_search(&s, 0, -5, 50));
        assert!(!equivalent(&p00, &RegionParams::integer(0, 2), &s));
        assert!(!translation_search(&s, 0, -2, 50));
    }

    #[test]
    fn equivalence_agrees_with_bounded_search() {
        for s in [case_p(), case_q(), Slopes::new(1, 2, -3, 1).unwrap()] {
            for da in -6..=6 {
                for db in -6..=6 {
                    let closed = equivalent(
                        &RegionParams::integer(da, db),
                        &RegionParams::integer(0, 0),
                        &s,
                    );
                    assert_eq!(closed, translation_search(&s, da, db, 60), "{s:?} {da} {db}");
                }
            }
        }
    }

    #[test]
    fn class_index_examples() {
        assert_eq!(class_index(&spec(case_p(), r(1, 2), r(1, 2))), 0);
        assert_eq!(class_index(&spec(case_p(), r(1, 10), r(7, 10))), 2);
        assert_eq!(class_index(&spec(case_p(), r(7, 10), r(9, 10))), 4);
    }

    #[test]
    fn class_index_matches_bitmap_oracle() {
        // Brute force: find the enumerated bitmap equal to the windowed region.
        let s = case_p();
        let shapes = enumerate_shapes(&s, None).unwrap();
        let w = shapes[0].window;
        for (x, y, expected) in [(r(1, 10), r(7, 10), 2), (r(7, 10), r(9, 10), 4)] {
            let bitmap = spec_shape(&spec(s, x, y), w);
            let found: Vec<i64> = shapes
                .iter()
                .filter(|c| c.pixels == bitmap)
                .map(|c| c.index)
                .collect();
            assert_eq!(found, vec![expected]);
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_shapes(&case_p(), None).unwrap().len(), 5);
        assert_eq!(enumerate_shapes(&case_q(), None).unwrap().len(), 5);
        let right = Slopes::new(1, 1, -1, 1).unwrap();
        let shapes = enumerate_shapes(&right, None).unwrap();
        assert_eq!(shapes.len(), 2);
        assert!(shapes.iter().all(|s| s.pixels.is_canonical() && !s.pixels.is_empty()));
        assert_eq!(shapes.iter().map(|s| s.index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn right_angle_count_by_corner_sampling() {
        // Classify corners on a 100 x 100 sub-unit grid; count distinct bitmaps.
        let s = Slopes::new(1, 1, -1, 1).unwrap();
        let w = default_window(&s);
        let mut seen = std::collections::HashSet::new();
        for i in 0..100 {
            for j in 0..100 {
                seen.insert(spec_shape(&spec(s, r(2 * i + 1, 200), r(2 * j + 1, 200)), w));
            }
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn tiny_window_grows() {
        let shapes = enumerate_shapes(&case_p(), Some(1)).unwrap();
        assert!(shapes[0].window > 1);
        assert_eq!(shapes.len(), 5);
        assert_eq!(enumerate_shapes(&case_p(), Some(0)), Err(ShapeError::InvalidWindow));
    }

    #[test]
    fn shape_class_json() {
        let s = Slopes::new(1, 1, -1, 1).unwrap();
        let c = ShapeClass::new(s, 1, 1);
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["slopes"], serde_json::json!([1, 1, -1, 1]));
        assert_eq!(json["index"], 1);
        assert_eq!(json["window"], 1);
        assert!(json["pixels"].is_array());
        let back: ShapeClass = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn corner_pixel_is_in_the_canonical_frame() {
        let c = ShapeClass::new(case_p(), 0, 4);
        // R(0, 0) has its corner at the center of pixel (0, 0), which is a member.
        let corner = c.corner_pixel();
        assert!(c.pixels.contains(corner));
    }

    #[test]
    fn reflection_examples() {
        let one: PixelSet = [PixelIndex::new(0, 0)].into_iter().collect();
        assert_eq!(reflection_symmetric(&one, Axis::Vertical, r(1, 2)), Ok(true));
        assert_eq!(reflection_symmetric(&one, Axis::Horizontal, r(1, 2)), Ok(true));
        assert_eq!(reflection_symmetric(&one, Axis::Vertical, r(1, 1)), Ok(false));
        assert_eq!(reflection_symmetric(&one, Axis::Diagonal45, r(0, 1)), Ok(true));
        assert_eq!(reflection_symmetric(&one, Axis::Antidiagonal45, r(1, 1)), Ok(true));
        let pair: PixelSet = [PixelIndex::new(0, 0), PixelIndex::new(2, 0)].into_iter().collect();
        assert_eq!(reflection_symmetric(&pair, Axis::Vertical, r(3, 2)), Ok(true));
        assert_eq!(
            reflection_symmetric(&pair, Axis::Vertical, r(1, 3)),
            Err(ShapeError::InvalidAxis(r(1, 3)))
        );
        assert_eq!(
            reflection_symmetric(&pair, Axis::Diagonal45, r(1, 2)),
            Err(ShapeError::InvalidAxis(r(1, 2)))
        );
    }

    #[test]
    fn p0_is_not_mirror_symmetric_about_its_corner_column() {
        let c = ShapeClass::new(case_p(), 0, 4);
        let col = Rational::from(c.corner_pixel().m) + Rational::HALF;
        assert_eq!(reflection_symmetric(&c.pixels, Axis::Vertical, col), Ok(false));
    }
}
