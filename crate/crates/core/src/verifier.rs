//! Counting and uniformity checks for digitized angle shapes.
//!
//! Monte Carlo sampling draws corners as exact dyadic rationals with
//! denominator 2^64 and classifies them exactly. Work is split into fixed-size
//! chunks, each with its own ChaCha stream, so counts depend only on the seed
//! and never on the number of worker threads.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::digitizer::{
    clipped_region_polygon, digitize_closed_polygon, trace_region_boundary, window_members,
    AngleSpec, DigitizeError, Point, Slopes,
};
use crate::numerics::{gcd, Rational};
use crate::partition::partition_unit_square;
use crate::shapes::{
    class_index, enumerate_shapes, integer_region_in_window, params_anchor, region_params,
    ShapeError,
};

/// Quantile used for the chi-square uniformity test.
pub const CHI_SQUARE_QUANTILE: f64 = 0.999;

/// Allowed deviation of a class frequency, in binomial standard deviations.
pub const FREQUENCY_SIGMAS: f64 = 5.0;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassHistogram {
    pub slopes: Slopes,
    pub samples: u64,
    pub counts: Vec<u64>,
    pub chi_square: f64,
    pub seed: u64,
    /// Draws rejected because a pixel center fell exactly on a line.
    pub resampled: u64,
}

impl ClassHistogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.samples as f64)
            .collect()
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// `FREQUENCY_SIGMAS` binomial standard deviations at `p = 1/D`.
    pub fn frequency_tolerance(&self) -> f64 {
        let p = 1.0 / self.counts.len() as f64;
        FREQUENCY_SIGMAS * (p * (1.0 - p) / self.samples as f64).sqrt()
    }

    pub fn frequencies_within_tolerance(&self) -> bool {
        let p = 1.0 / self.counts.len() as f64;
        let tol = self.frequency_tolerance();
        self.frequencies().iter().all(|f| (f - p).abs() <= tol)
    }

    pub fn chi_square_threshold(&self) -> f64 {
        chi_square_threshold(self.degrees_of_freedom())
    }

    pub fn passes(&self) -> bool {
        self.frequencies_within_tolerance() && self.chi_square <= self.chi_square_threshold()
    }
}

impl fmt::Display for ClassHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.slopes.as_array();
        writeln!(f, "slopes {a}/{b} and {c}/{d}: {} classes", self.counts.len())?;
        writeln!(f, "samples {}  seed {}  resampled {}", self.samples, self.seed, self.resampled)?;
        writeln!(f, "{:>6} {:>10} {:>10}", "class", "count", "frequency")?;
        for (j, (&count, freq)) in self.counts.iter().zip(self.frequencies()).enumerate() {
            writeln!(f, "{j:>6} {count:>10} {freq:>10.6}")?;
        }
        let p = 1.0 / self.counts.len() as f64;
        writeln!(f, "expected {p:.6} +/- {:.6}", self.frequency_tolerance())?;
        writeln!(
            f,
            "chi-square {:.4} (dof {}, limit {:.4})",
            self.chi_square,
            self.degrees_of_freedom(),
            self.chi_square_threshold()
        )?;
        write!(f, "{}", if self.passes() { "PASS" } else { "FAIL" })
    }
}

/// 0.999 quantile of the chi-square distribution; zero for no freedom.
pub fn chi_square_threshold(dof: usize) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(CHI_SQUARE_QUANTILE)
}

/// Pearson statistic against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

/// A corner drawn uniformly from the unit square, as exact dyadic rationals.
pub fn random_dyadic_corner<R: Rng>(rng: &mut R) -> Point {
    let den = 1i128 << 64;
    Point::new(
        Rational::new(rng.gen::<u64>() as i128, den),
        Rational::new(rng.gen::<u64>() as i128, den),
    )
}

fn sample_chunk(slopes: &Slopes, seed: u64, chunk: u64, draws: u64) -> (Vec<u64>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut counts = vec![0u64; slopes.class_count() as usize];
    let mut resampled = 0;
    let mut done = 0;
    while done < draws {
        let spec = AngleSpec::new(*slopes, random_dyadic_corner(&mut rng));
        let p = region_params(&spec);
        if p.alpha.is_integer() || p.beta.is_integer() {
            resampled += 1;
            continue;
        }
        counts[class_index(&spec) as usize] += 1;
        done += 1;
    }
    (counts, resampled)
}

/// Classifies `n` random corners and tests the counts against uniformity.
pub fn sample_class_frequencies(slopes: &Slopes, n: u64, seed: u64) -> ClassHistogram {
    let chunks = n.div_ceil(CHUNK);
    let (counts, resampled) = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let draws = CHUNK.min(n - i * CHUNK);
            sample_chunk(slopes, seed, i, draws)
        })
        .reduce(
            || (vec![0u64; slopes.class_count() as usize], 0),
            |(mut acc, r1), (c, r2)| {
                acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
                (acc, r1 + r2)
            },
        );
    ClassHistogram {
        slopes: *slopes,
        samples: n,
        chi_square: chi_square_uniform(&counts),
        counts,
        seed,
        resampled,
    }
}

/// Exact area of each cell of the unit-square partition.
pub fn exact_class_areas(slopes: &Slopes) -> Vec<Rational> {
    partition_unit_square(slopes)
        .iter()
        .map(|c| c.area())
        .collect()
}

/// Whether the digitized region boundary encloses exactly the pixels whose
/// centers lie in the angle, within the window.
pub fn hobby_region_check(spec: &AngleSpec, window: i64) -> Result<bool, DigitizeError> {
    let members = window_members(spec, window);
    let enclosed = match trace_region_boundary(spec, window) {
        Ok(path) => path.enclosed_pixels(),
        Err(DigitizeError::EmptyRegion) => {
            digitize_closed_polygon(&clipped_region_polygon(spec, window))?.enclosed_pixels()
        }
        Err(e) => return Err(e),
    };
    Ok(enclosed == members)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepFailure {
    WindowTooSmall { slopes: Slopes, window: i64 },
    ClassCount { slopes: Slopes, expected: i64, found: i64 },
    CellArea { slopes: Slopes, index: i64, area: Rational },
    /// A sampled corner whose bitmap differs from its class representative.
    Misclassified { slopes: Slopes, corner: Point, index: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub max_entry: i64,
    pub max_classes: i64,
    pub pairs_checked: u64,
    pub skipped_parallel: u64,
    pub skipped_large: u64,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "entries |.| <= {}, 1 <= D <= {}",
            self.max_entry, self.max_classes
        )?;
        writeln!(f, "pairs checked   {}", self.pairs_checked)?;
        writeln!(f, "parallel pairs  {}", self.skipped_parallel)?;
        writeln!(f, "D too large     {}", self.skipped_large)?;
        writeln!(f, "failures        {}", self.failures.len())?;
        for fail in &self.failures {
            writeln!(f, "  {}", serde_json::to_string(fail).unwrap_or_default())?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Every coprime pair `(p, q)` with `|p|, |q| <= max_entry`, signs included.
pub fn coprime_pairs(max_entry: i64) -> Vec<(i64, i64)> {
    let r = -max_entry..=max_entry;
    r.clone()
        .flat_map(|p| r.clone().map(move |q| (p, q)))
        .filter(|&(p, q)| gcd(p, q) == 1)
        .collect()
}

// Corners on a small off-lattice grid; odd numerators over 18 never give
// half-integers.
fn probe_corners() -> impl Iterator<Item = Point> {
    (0..4).flat_map(|i| {
        (0..4).map(move |j| Point::new(Rational::new(4 * i + 1, 18), Rational::new(4 * j + 3, 18)))
    })
}

fn check_pair(slopes: &Slopes) -> Vec<SweepFailure> {
    let expected = slopes.class_count();
    let shapes = match enumerate_shapes(slopes, None) {
        Ok(s) => s,
        Err(ShapeError::WindowTooSmall { window, .. }) => {
            return vec![SweepFailure::WindowTooSmall { slopes: *slopes, window }]
        }
        Err(e) => panic!("unexpected enumeration error: {e}"),
    };
    let mut failures = Vec::new();
    if shapes.len() as i64 != expected {
        failures.push(SweepFailure::ClassCount {
            slopes: *slopes,
            expected,
            found: shapes.len() as i64,
        });
    }
    let unit = Rational::new(1, expected as i128);
    for (index, area) in exact_class_areas(slopes).into_iter().enumerate() {
        if area != unit {
            failures.push(SweepFailure::CellArea { slopes: *slopes, index: index as i64, area });
        }
    }
    let window = shapes[0].window;
    for corner in probe_corners() {
        let spec = AngleSpec::new(*slopes, corner);
        let p = region_params(&spec);
        let anchor = params_anchor(slopes, p.alpha_ceil, p.beta_ceil);
        let bitmap =
            integer_region_in_window(slopes, p.alpha_ceil, p.beta_ceil, anchor, window).canonical();
        let index = class_index(&spec);
        if shapes[index as usize].pixels != bitmap {
            failures.push(SweepFailure::Misclassified { slopes: *slopes, corner, index });
        }
    }
    failures
}

/// Checks the shape count, cell areas and classification of every slope
/// pair with entries bounded by `max_entry` and `1 <= D <= max_classes`.
pub fn theorem_sweep(max_entry: i64, max_classes: i64) -> SweepReport {
    let pairs = coprime_pairs(max_entry);
    let mut candidates = Vec::new();
    let (mut skipped_parallel, mut skipped_large) = (0, 0);
    for &(a, b) in &pairs {
        for &(c, d) in &pairs {
            match Slopes::new(a, b, c, d) {
                Ok(s) if s.class_count() <= max_classes => candidates.push(s),
                Ok(_) => skipped_large += 1,
                Err(_) => skipped_parallel += 1,
            }
        }
    }
    let failures: Vec<SweepFailure> = candidates.par_iter().flat_map(check_pair).collect();
    SweepReport {
        max_entry,
        max_classes,
        pairs_checked: candidates.len() as u64,
        skipped_parallel,
        skipped_large,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_p() -> Slopes {
        Slopes::new(2, 1, -3, 1).unwrap()
    }

    #[test]
    fn small_sample_conserves_count() {
        let h = sample_class_frequencies(&case_p(), 5, 1);
        assert_eq!(h.counts.iter().sum::<u64>(), 5);
        assert_eq!(h.counts.len(), 5);
    }

    #[test]
    fn histogram_is_deterministic() {
        let a = sample_class_frequencies(&case_p(), 200_000, 42);
        let b = sample_class_frequencies(&case_p(), 200_000, 42);
        assert_eq!(a, b);
        let c = sample_class_frequencies(&case_p(), 200_000, 43);
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn independent_of_thread_count() {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let s = Slopes::new(1, 1, -1, 1).unwrap();
        let a = single.install(|| sample_class_frequencies(&s, 300_000, 9));
        let b = many.install(|| sample_class_frequencies(&s, 300_000, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn chi_square_quantiles() {
        // Table values of the 0.999 quantile.
        assert!((chi_square_threshold(1) - 10.828).abs() < 1e-3);
        assert!((chi_square_threshold(4) - 18.467).abs() < 1e-3);
        assert_eq!(chi_square_threshold(0), 0.0);
        assert_eq!(chi_square_uniform(&[10, 10, 10]), 0.0);
        assert!((chi_square_uniform(&[12, 8]) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn exact_areas() {
        assert_eq!(exact_class_areas(&case_p()), vec![Rational::new(1, 5); 5]);
        let right = Slopes::new(1, 1, -1, 1).unwrap();
        assert_eq!(exact_class_areas(&right), vec![Rational::new(1, 2); 2]);
        let total = exact_class_areas(&Slopes::new(3, 2, -1, 4).unwrap())
            .into_iter()
            .fold(Rational::ZERO, |s, a| s + a);
        assert_eq!(total, Rational::ONE);
    }

    #[test]
    fn boundary_check_examples() {
        let corner = Point::new(Rational::new(1, 10), Rational::new(701, 1000));
        assert_eq!(hobby_region_check(&AngleSpec::new(case_p(), corner), 6), Ok(true));
        let center = Point::new(Rational::HALF, Rational::HALF);
        assert!(matches!(
            hobby_region_check(&AngleSpec::new(case_p(), center), 3),
            Err(DigitizeError::PixelCenterHit { .. })
        ));
    }

    #[test]
    fn sweep_small_and_parallel_skip() {
        let report = theorem_sweep(1, 2);
        assert!(report.passed(), "{report}");
        assert!(report.skipped_parallel > 0);
        assert!(Slopes::new(1, 1, 1, 1).is_err());
    }

    #[test]
    fn sweep_contains_both_example_pairs() {
        let report = theorem_sweep(3, 5);
        assert!(report.passed(), "{report}");
        assert!(check_pair(&case_p()).is_empty());
        assert!(check_pair(&Slopes::new(3, -1, -1, 2).unwrap()).is_empty());
    }

    #[test]
    fn display_mentions_verdict() {
        let h = sample_class_frequencies(&case_p(), 1000, 3);
        let text = h.to_string();
        assert!(text.contains("chi-square"));
        assert!(text.ends_with("PASS") || text.ends_with("FAIL"));
    }
}
