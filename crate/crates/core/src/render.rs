//! Text and image encodings of pixel sets and of the corner partition.
//!
//! Pixel `(0, 0)` is the bottom-left cell. ASCII and PBM output list rows from
//! the top (largest `n`) down, so the picture reads the right way up.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::digitizer::{clip_half_plane, PixelIndex, Point};
use crate::numerics::Rational;
use crate::partition::Parallelogram;
use crate::shapes::PixelSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("cannot render an empty pixel set as an image")]
    EmptySet,
    #[error("pixel ({0}, {1}) has a negative coordinate; canonicalize first")]
    NegativeCoordinate(i64, i64),
    #[error("format {0} is not supported here")]
    UnsupportedFormat(Format),
    #[error("scale must be at least 1")]
    InvalidScale,
    #[error("malformed PBM: {0}")]
    MalformedPbm(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Ascii,
    Pbm,
    Svg,
    Json,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Ascii => "ascii",
            Format::Pbm => "pbm",
            Format::Svg => "svg",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ascii" | "text" => Ok(Format::Ascii),
            "pbm" => Ok(Format::Pbm),
            "svg" => Ok(Format::Svg),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    /// SVG user units per pixel; the partition square is `100 * scale` wide.
    pub scale: u32,
    pub on: char,
    pub off: char,
    /// Prefix for class labels in partition drawings.
    pub label: String,
}

impl RenderOptions {
    pub fn new(format: Format) -> Self {
        RenderOptions {
            format,
            ..Self::default()
        }
    }
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: Format::Ascii,
            scale: 8,
            on: '#',
            off: '.',
            label: "R".to_string(),
        }
    }
}

// Width and height of the grid from (0, 0) to the largest occupied cell.
fn extent(ps: &PixelSet) -> Result<(i64, i64), RenderError> {
    if let Some(p) = ps.iter().find(|p| p.m < 0 || p.n < 0) {
        return Err(RenderError::NegativeCoordinate(p.m, p.n));
    }
    let max = ps.max_corner().ok_or(RenderError::EmptySet)?;
    Ok((max.m + 1, max.n + 1))
}

pub fn render_pixelset(ps: &PixelSet, opts: &RenderOptions) -> Result<Vec<u8>, RenderError> {
    if opts.scale < 1 {
        return Err(RenderError::InvalidScale);
    }
    let out = match opts.format {
        Format::Ascii => {
            if ps.is_empty() {
                return Ok(Vec::new());
            }
            let (w, h) = extent(ps)?;
            let mut s = String::new();
            for n in (0..h).rev() {
                for m in 0..w {
                    let on = ps.contains(PixelIndex::new(m, n));
                    s.push(if on { opts.on } else { opts.off });
                }
                s.push('\n');
            }
            s
        }
        Format::Pbm => {
            let (w, h) = extent(ps)?;
            let mut s = format!("P1\n{w} {h}\n");
            for n in (0..h).rev() {
                let row: Vec<&str> = (0..w)
                    .map(|m| if ps.contains(PixelIndex::new(m, n)) { "1" } else { "0" })
                    .collect();
                s.push_str(&row.join(" "));
                s.push('\n');
            }
            s
        }
        Format::Svg => {
            let (w, h) = extent(ps)?;
            let k = opts.scale as i64;
            let mut s = svg_header(w * k, h * k);
            for p in ps.iter() {
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{}" width="{k}" height="{k}" fill="black"/>"#,
                    p.m * k,
                    (h - 1 - p.n) * k
                );
            }
            s.push_str("</svg>\n");
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string(ps).expect("pixel sets serialize");
            s.push('\n');
            s
        }
    };
    Ok(out.into_bytes())
}

fn svg_header(width: i64, height: i64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

/// Reads a plain (P1) PBM back into the set of black pixels.
pub fn parse_pbm(bytes: &[u8]) -> Result<PixelSet, RenderError> {
    let bad = |m: &str| RenderError::MalformedPbm(m.to_string());
    let text = std::str::from_utf8(bytes).map_err(|_| bad("not ASCII"))?;
    let cleaned: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut rest = cleaned.trim_start();
    let mut header = Vec::new();
    while header.len() < 3 {
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if end == 0 {
            return Err(bad("truncated header"));
        }
        header.push(&rest[..end]);
        rest = rest[end..].trim_start();
    }
    if header[0] != "P1" {
        return Err(bad("magic number is not P1"));
    }
    let w: i64 = header[1].parse().map_err(|_| bad("width"))?;
    let h: i64 = header[2].parse().map_err(|_| bad("height"))?;
    let bits: Vec<bool> = rest
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(bad("unexpected character in raster")),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() as i64 != w * h {
        return Err(bad("raster size does not match header"));
    }
    Ok(bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| {
            let i = i as i64;
            PixelIndex::new(i % w, h - 1 - i / w)
        })
        .collect())
}

#[derive(Serialize)]
struct CellJson<'a> {
    #[serde(flatten)]
    cell: &'a Parallelogram,
    corners: [Point; 4],
}

const PALETTE: [&str; 8] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33", "#a65628", "#f781bf",
];

fn polygon_area(poly: &[Point]) -> Rational {
    let mut twice = Rational::ZERO;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        twice = twice + (p.x * q.y - q.x * p.y);
    }
    (twice * Rational::HALF).abs()
}

/// Pieces of the cell's integer translates that fall inside the unit square.
pub fn cell_fragments(cell: &Parallelogram) -> Vec<Vec<Point>> {
    let mut out = Vec::new();
    for (m, n) in cell.shifts_meeting_unit_square() {
        let (dm, dn) = (Rational::from(m), Rational::from(n));
        let poly: Vec<Point> = cell
            .corners()
            .iter()
            .map(|c| Point::new(c.x + dm, c.y + dn))
            .collect();
        let poly = clip_half_plane(&poly, |p| p.x);
        let poly = clip_half_plane(&poly, |p| Rational::ONE - p.x);
        let poly = clip_half_plane(&poly, |p| p.y);
        let poly = clip_half_plane(&poly, |p| Rational::ONE - p.y);
        if poly.len() >= 3 && polygon_area(&poly) > Rational::ZERO {
            out.push(poly);
        }
    }
    out
}

pub fn render_partition(cells: &[Parallelogram], opts: &RenderOptions) -> Result<Vec<u8>, RenderError> {
    if opts.scale < 1 {
        return Err(RenderError::InvalidScale);
    }
    match opts.format {
        Format::Json => {
            let list: Vec<CellJson> = cells
                .iter()
                .map(|cell| CellJson { cell, corners: cell.corners() })
                .collect();
            let mut s = serde_json::to_string_pretty(&list).expect("cells serialize");
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Svg => Ok(partition_svg(cells, opts).into_bytes()),
        other => Err(RenderError::UnsupportedFormat(other)),
    }
}

fn partition_svg(cells: &[Parallelogram], opts: &RenderOptions) -> String {
    let side = 100.0 * opts.scale as f64;
    let margin = 4 * opts.scale as i64;
    let total = side as i64 + 2 * margin;
    let sx = |x: Rational| margin as f64 + side * x.to_f64();
    let sy = |y: Rational| margin as f64 + side * (1.0 - y.to_f64());
    let mut s = svg_header(total, total);
    for cell in cells {
        let fill = PALETTE[cell.index as usize % PALETTE.len()];
        let fragments = cell_fragments(cell);
        for frag in &fragments {
            let pts: Vec<String> = frag
                .iter()
                .map(|p| format!("{:.3},{:.3}", sx(p.x), sy(p.y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polygon points="{}" fill="{fill}" fill-opacity="0.35" stroke="black" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
        // One label per class, on its largest fragment.
        if let Some(frag) = fragments.iter().max_by(|p, q| polygon_area(p).cmp(&polygon_area(q))) {
            let k = Rational::new(1, frag.len() as i128);
            let cx = frag.iter().fold(Rational::ZERO, |acc, p| acc + p.x) * k;
            let cy = frag.iter().fold(Rational::ZERO, |acc, p| acc + p.y) * k;
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}" font-size="{}" text-anchor="middle">{}{}</text>"#,
                sx(cx),
                sy(cy),
                4 * opts.scale,
                opts.label,
                cell.index
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{margin}" y="{margin}" width="{0}" height="{0}" fill="none" stroke="black" stroke-width="2"/>"#,
        side as i64
    );
    s.push_str("</svg>\n");
    s
}
