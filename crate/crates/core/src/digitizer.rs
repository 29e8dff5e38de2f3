//! Rounding of straight paths onto pixel boundaries, and the pixel-center
//! membership rule for angular regions.
//!
//! Pixels are unit squares with integer corners; pixel `(m, n)` has its lower
//! left corner at `(m, n)` and its center at `(m + 1/2, n + 1/2)`. A path is
//! digitized by rounding both coordinates to the nearest integer as the path
//! is swept. The sweep is event driven: the exact parameters at which a
//! coordinate meets a half-integer split the path into open intervals, and the
//! rounded position is constant on each interval.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{gcd, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigitizeError {
    #[error("{0} is exactly halfway between two integers")]
    HalfIntegerTie(Rational),
    #[error("path touches the pixel center ({x}, {y})")]
    PixelCenterHit { x: Rational, y: Rational },
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("no pixel of the window lies in the region")]
    EmptyRegion,
    #[error("window half-width must be at least 1")]
    InvalidWindow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("slope pair ({0}, {1}) is not coprime")]
    NotCoprime(i64, i64),
    #[error("slopes are parallel (ad - bc = 0)")]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }
}

/// Pixel whose lower left corner is `(m, n)`. Serializes as `[m, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct PixelIndex {
    pub m: i64,
    pub n: i64,
}

impl PixelIndex {
    pub const fn new(m: i64, n: i64) -> Self {
        PixelIndex { m, n }
    }

    pub fn center(&self) -> Point {
        Point::new(
            Rational::from(self.m) + Rational::HALF,
            Rational::from(self.n) + Rational::HALF,
        )
    }
}

impl From<(i64, i64)> for PixelIndex {
    fn from((m, n): (i64, i64)) -> Self {
        PixelIndex { m, n }
    }
}

impl From<PixelIndex> for (i64, i64) {
    fn from(p: PixelIndex) -> Self {
        (p.m, p.n)
    }
}

/// Path along pixel boundaries, one unit step per edge.
///
/// Serializes as a list of `[x, y]` lattice vertices. Closed paths repeat the
/// first vertex at the end.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPath {
    pub vertices: Vec<(i64, i64)>,
}

impl GridPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.len() > 1 && self.vertices.first() == self.vertices.last()
    }

    /// Every consecutive pair is one horizontal or vertical unit step.
    pub fn is_unit_stepped(&self) -> bool {
        self.vertices
            .windows(2)
            .all(|w| (w[0].0 - w[1].0).abs() + (w[0].1 - w[1].1).abs() == 1)
    }

    pub fn reversed(&self) -> GridPath {
        GridPath {
            vertices: self.vertices.iter().rev().copied().collect(),
        }
    }

    /// Winding number of a closed path around the center of `px`.
    pub fn winding_number(&self, px: PixelIndex) -> i64 {
        self.vertices
            .windows(2)
            .filter_map(|w| vertical_crossing(w[0], w[1]))
            .filter(|&(x, row, _)| row == px.n && x > px.m)
            .map(|(_, _, s)| s)
            .sum()
    }

    /// Pixels whose centers have nonzero winding number.
    pub fn enclosed_pixels(&self) -> BTreeSet<PixelIndex> {
        let mut rows: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for w in self.vertices.windows(2) {
            if let Some((x, row, s)) = vertical_crossing(w[0], w[1]) {
                rows.entry(row).or_default().push((x, s));
            }
        }
        let mut out = BTreeSet::new();
        for (row, mut edges) in rows {
            // Sweep right to left; winding at column m sums edges with x > m.
            edges.sort_unstable_by_key(|e| std::cmp::Reverse(e.0));
            let mut winding = 0;
            let mut i = 0;
            let max_x = edges[0].0;
            let min_x = edges[edges.len() - 1].0;
            for m in (min_x..max_x).rev() {
                while i < edges.len() && edges[i].0 > m {
                    winding += edges[i].1;
                    i += 1;
                }
                if winding != 0 {
                    out.insert(PixelIndex::new(m, row));
                }
            }
        }
        out
    }
}

// A vertical unit edge at x spanning row `row`, with +1 for upward travel.
fn vertical_crossing(p: (i64, i64), q: (i64, i64)) -> Option<(i64, i64, i64)> {
    if p.0 != q.0 {
        return None;
    }
    match q.1 - p.1 {
        1 => Some((p.0, p.1, 1)),
        -1 => Some((p.0, q.1, -1)),
        _ => None,
    }
}

/// Two directed slopes `a/b` and `c/d`, each pair coprime, with `ad - bc != 0`.
///
/// The angular region they bound at a corner `(x0, y0)` is
/// `a(x - x0) - b(y - y0) >= 0` and `c(x - x0) - d(y - y0) >= 0`. Negating a
/// pair selects the opposite half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct Slopes {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl Slopes {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, SpecError> {
        if gcd(a, b) != 1 {
            return Err(SpecError::NotCoprime(a, b));
        }
        if gcd(c, d) != 1 {
            return Err(SpecError::NotCoprime(c, d));
        }
        let s = Slopes { a, b, c, d };
        if s.determinant() == 0 {
            return Err(SpecError::Parallel);
        }
        Ok(s)
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `ad - bc`, signed.
    pub fn determinant(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// `|ad - bc|`: the number of distinct digitized shapes.
    pub fn class_count(&self) -> i64 {
        self.determinant().abs()
    }

    /// `a*m - b*n` and `c*m - d*n`.
    pub fn forms(&self, m: i64, n: i64) -> (i64, i64) {
        (self.a * m - self.b * n, self.c * m - self.d * n)
    }

    /// Sum of absolute entries; sets the default shape window.
    pub fn magnitude(&self) -> i64 {
        self.a.abs() + self.b.abs() + self.c.abs() + self.d.abs()
    }
}

impl TryFrom<[i64; 4]> for Slopes {
    type Error = SpecError;
    fn try_from(v: [i64; 4]) -> Result<Self, Self::Error> {
        Slopes::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Slopes> for [i64; 4] {
    fn from(s: Slopes) -> Self {
        s.as_array()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub slopes: Slopes,
    pub corner: Point,
}

impl AngleSpec {
    pub fn new(slopes: Slopes, corner: Point) -> Self {
        AngleSpec { slopes, corner }
    }

    /// The two linear forms at `p`, relative to the corner.
    pub fn forms_at(&self, p: Point) -> (Rational, Rational) {
        let s = &self.slopes;
        let dx = p.x - self.corner.x;
        let dy = p.y - self.corner.y;
        (
            dx.mul_int(s.a) - dy.mul_int(s.b),
            dx.mul_int(s.c) - dy.mul_int(s.d),
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        let (f, g) = self.forms_at(p);
        f >= Rational::ZERO && g >= Rational::ZERO
    }

    /// Pixel containing the corner point.
    pub fn corner_pixel(&self) -> PixelIndex {
        PixelIndex::new(
            to_i64(self.corner.x.floor()),
            to_i64(self.corner.y.floor()),
        )
    }
}

pub(crate) fn to_i64(v: i128) -> i64 {
    i64::try_from(v).expect("coordinate does not fit in i64")
}

/// Nearest integer; exact half-integers are rejected.
pub fn round_nearest(r: Rational) -> Result<i64, DigitizeError> {
    if r.is_half_integer() {
        return Err(DigitizeError::HalfIntegerTie(r));
    }
    Ok(to_i64((r + Rational::HALF).floor()))
}

/// Closed inequality test at the pixel center, evaluated exactly.
pub fn pixel_in_angle(px: PixelIndex, spec: &AngleSpec) -> bool {
    spec.contains(px.center())
}

fn lerp(p: Point, q: Point, t: Rational) -> Point {
    Point::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)
}

// Parameters in [0, 1] where one coordinate of p + t(q - p) meets k + 1/2.
fn half_crossings(from: Rational, to: Rational, out: &mut Vec<Rational>) {
    if from == to {
        return;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let first = (lo - Rational::HALF).ceil();
    let last = (hi - Rational::HALF).floor();
    let span = to - from;
    for k in first..=last {
        let h = Rational::from_integer(k) + Rational::HALF;
        out.push((h - from) / span);
    }
}

// Rounded positions along one straight piece, in sweep order.
fn sweep_edge(p: Point, q: Point, out: &mut Vec<(i64, i64)>) -> Result<(), DigitizeError> {
    let mut events = vec![Rational::ZERO, Rational::ONE];
    half_crossings(p.x, q.x, &mut events);
    half_crossings(p.y, q.y, &mut events);
    events.sort_unstable();
    events.dedup();
    for &t in &events {
        let z = lerp(p, q, t);
        if z.x.is_half_integer() && z.y.is_half_integer() {
            return Err(DigitizeError::PixelCenterHit { x: z.x, y: z.y });
        }
    }
    for w in events.windows(2) {
        let mid = lerp(p, q, (w[0] + w[1]) * Rational::HALF);
        let pos = (round_nearest(mid.x)?, round_nearest(mid.y)?);
        if out.last() != Some(&pos) {
            out.push(pos);
        }
    }
    Ok(())
}

/// Digitizes the straight segment from `p` to `q`.
///
/// The path starts at `round p`, ends at `round q`, and gains one unit edge
/// each time a coordinate crosses a half-integer.
pub fn digitize_segment(p: Point, q: Point) -> Result<GridPath, DigitizeError> {
    if p == q {
        return Err(DigitizeError::DegenerateSegment);
    }
    let start = (round_nearest(p.x)?, round_nearest(p.y)?);
    let end = (round_nearest(q.x)?, round_nearest(q.y)?);
    let mut vertices = vec![start];
    sweep_edge(p, q, &mut vertices)?;
    debug_assert_eq!(vertices.last(), Some(&end));
    Ok(GridPath { vertices })
}

/// Digitizes the closed polygon through `vertices` (not repeated at the end).
///
/// Vertices may sit on half-integer lines; only pixel centers are rejected.
pub fn digitize_closed_polygon(vertices: &[Point]) -> Result<GridPath, DigitizeError> {
    if vertices.len() < 2 {
        return Err(DigitizeError::DegenerateSegment);
    }
    let mut out = Vec::new();
    for (i, &p) in vertices.iter().enumerate() {
        let q = vertices[(i + 1) % vertices.len()];
        if p != q {
            sweep_edge(p, q, &mut out)?;
        }
    }
    if out.is_empty() {
        return Err(DigitizeError::DegenerateSegment);
    }
    // The sweep wraps around: the last interval and the first meet at vertex 0.
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    let first = out[0];
    out.push(first);
    Ok(GridPath { vertices: out })
}

/// Square window of half-width `window` around the corner pixel.
pub fn window_pixels(center: PixelIndex, window: i64) -> impl Iterator<Item = PixelIndex> {
    (center.n - window..=center.n + window).flat_map(move |n| {
        (center.m - window..=center.m + window).map(move |m| PixelIndex::new(m, n))
    })
}

/// Window pixels whose centers satisfy both inequalities.
pub fn window_members(spec: &AngleSpec, window: i64) -> BTreeSet<PixelIndex> {
    window_pixels(spec.corner_pixel(), window)
        .filter(|px| pixel_in_angle(*px, spec))
        .collect()
}

// Keeps the part of a convex polygon where `f >= 0`.
pub(crate) fn clip_half_plane(poly: &[Point], f: impl Fn(Point) -> Rational) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    let mut push = |p: Point| {
        if out.last() != Some(&p) {
            out.push(p);
        }
    };
    for (i, &s) in poly.iter().enumerate() {
        let e = poly[(i + 1) % poly.len()];
        let (fs, fe) = (f(s), f(e));
        let zero = Rational::ZERO;
        if fs >= zero {
            push(s);
        }
        if (fs < zero && fe > zero) || (fs > zero && fe < zero) {
            push(lerp(s, e, fs / (fs - fe)));
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// The angular region clipped to the window frame, as a counterclockwise
/// polygon. The frame runs along the outer pixel edges of the window.
pub fn clipped_region_polygon(spec: &AngleSpec, window: i64) -> Vec<Point> {
    let c = spec.corner_pixel();
    let (x0, x1) = (Rational::from(c.m - window), Rational::from(c.m + window + 1));
    let (y0, y1) = (Rational::from(c.n - window), Rational::from(c.n + window + 1));
    let frame = [
        Point::new(x0, y0),
        Point::new(x1, y0),
        Point::new(x1, y1),
        Point::new(x0, y1),
    ];
    let first = clip_half_plane(&frame, |p| spec.forms_at(p).0);
    clip_half_plane(&first, |p| spec.forms_at(p).1)
}

/// Digitized boundary of the angular region inside the window.
///
/// The two rays are clipped by the window frame and the resulting closed
/// polygon is digitized; the path runs counterclockwise.
pub fn trace_region_boundary(spec: &AngleSpec, window: i64) -> Result<GridPath, DigitizeError> {
    if window < 1 {
        return Err(DigitizeError::InvalidWindow);
    }
    if window_members(spec, window).is_empty() {
        return Err(DigitizeError::EmptyRegion);
    }
    let poly = clipped_region_polygon(spec, window);
    let path = digitize_closed_polygon(&poly)?;
    Ok(remove_spurs(&path))
}

/// Cancels out-and-back excursions (`u -> v -> u`) of a closed path.
///
/// Thin wedges digitize to paths that run along an edge and straight back;
/// such spurs enclose nothing and leave every winding number unchanged.
pub fn remove_spurs(path: &GridPath) -> GridPath {
    let mut stack: Vec<(i64, i64)> = Vec::with_capacity(path.len());
    for &v in &path.vertices {
        if stack.len() >= 2 && stack[stack.len() - 2] == v {
            stack.pop();
        } else if stack.last() != Some(&v) {
            stack.push(v);
        }
    }
    // A spur may straddle the closing vertex.
    while stack.len() >= 3 && stack[1] == stack[stack.len() - 2] {
        stack.pop();
        stack.remove(0);
        if stack.first() != stack.last() {
            let first = stack[0];
            stack.push(first);
        }
    }
    GridPath { vertices: stack }
}
