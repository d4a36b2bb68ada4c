//! Growth-rate sweeps of the ratio `mixed_norm(block_restrict(T), q) / ||T||`.
//!
//! For each side `n` and seed the runner builds a form from the chosen family,
//! measures the mixed norm of its block restriction and bounds its operator
//! norm, giving a ratio interval `[mixed/upper, mixed/lower]`. A least-squares
//! fit of the log ratio (averaged over seeds) against `log n` estimates the
//! growth exponent, which is compared with the largest subset deficit of the
//! exponents.
//!
//! Boundedness cannot be observed on finitely many sides, so the verdict is a
//! trend call: `growing` when `slope - 2 * stderr > 0.1`, `bounded` when
//! `slope + 2 * stderr <= 0.1`, `inconclusive` otherwise or when fewer than
//! three sides were run. A `bounded` call is also downgraded to
//! `inconclusive` when the exponents predict growth slower than
//! [`DESK_RESOLUTION`], which desk-scale sides cannot separate from zero.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponents::{is_admissible_fast, ExponentTuple};
use crate::opnorm::{exact_real, sandwich, NormEstimate};
use crate::randforms::{hadamard, lift, sample_sign_tensor, KszSpec};
use crate::tensor::{block_restrict, mixed_norm, CoefTensor, Partition};

/// Slope threshold of the trend verdicts.
pub const SLOPE_CUT: f64 = 0.1;

/// Smallest predicted slope a sweep over sides up to ~16 can resolve.
pub const DESK_RESOLUTION: f64 = 0.25;

/// Default number of ascent restarts in sandwich mode.
pub const DEFAULT_RESTARTS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Random signs in all `m` arguments.
    Ksz,
    /// Random signs in the first `base_arity` arguments, lifted to arity `m`.
    KszLifted { base_arity: usize },
    /// Sylvester-Hadamard matrices (Kronecker powers of the Littlewood
    /// matrix), lifted to arity `m`; sides must be powers of two.
    Littlewood,
    /// Leading `n`-sections of a fixed form.
    File(CoefTensor),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ksz => "ksz",
            Family::KszLifted { .. } => "ksz_lifted",
            Family::Littlewood => "littlewood",
            Family::File(_) => "file",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Family::Ksz | Family::KszLifted { .. })
    }

    /// The family member of arity `m` and side `n`.
    pub fn build(&self, m: usize, n: usize, seed: u64) -> Result<CoefTensor> {
        match self {
            Family::Ksz => sample_sign_tensor(&KszSpec::new(m, n, seed)),
            Family::KszLifted { base_arity } => {
                if *base_arity == 0 || *base_arity > m {
                    return Err(Error::Invalid(format!(
                        "lifted base arity {base_arity} must lie in 1..={m}"
                    )));
                }
                lift(&sample_sign_tensor(&KszSpec::new(*base_arity, n, seed))?, m)
            }
            Family::Littlewood => {
                if m < 2 {
                    return Err(Error::Invalid("littlewood family needs arity >= 2".into()));
                }
                lift(&hadamard(n)?, m)
            }
            Family::File(t) => {
                if t.arity() != m {
                    return Err(Error::ArityMismatch {
                        expected: m,
                        actual: t.arity(),
                    });
                }
                t.section(n)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// Sign-vector enumeration; any arity within the vertex budget.
    Exact,
    /// Ascent lower bound with the `n * sigma_max` upper bound; bilinear only.
    Sandwich,
}

impl std::str::FromStr for NormMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NormMode::Exact),
            "sandwich" => Ok(NormMode::Sandwich),
            other => Err(Error::Invalid(format!("unknown norm mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub q: ExponentTuple,
    pub partition: Partition,
    pub family: Family,
    pub n_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    pub norm_mode: NormMode,
    pub restarts: usize,
}

impl ExperimentSpec {
    /// Trivial partition, exact norms.
    pub fn new(
        q: ExponentTuple,
        family: Family,
        n_grid: Vec<usize>,
        seeds: Vec<u64>,
    ) -> Result<Self> {
        let partition = Partition::trivial(q.len())?;
        Ok(ExperimentSpec {
            q,
            partition,
            family,
            n_grid,
            seeds,
            norm_mode: NormMode::Exact,
            restarts: DEFAULT_RESTARTS,
        })
    }

    pub fn arity(&self) -> usize {
        self.partition.total()
    }

    pub fn validate(&self) -> Result<()> {
        if self.partition.len() != self.q.len() {
            return Err(Error::ArityMismatch {
                expected: self.partition.len(),
                actual: self.q.len(),
            });
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::Invalid(
                "n grid must be nonempty and positive".into(),
            ));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("n grid must be strictly increasing".into()));
        }
        if self.family.is_random() && self.seeds.is_empty() {
            return Err(Error::Invalid(
                "random families need at least one seed".into(),
            ));
        }
        if self.norm_mode == NormMode::Sandwich && self.arity() != 2 {
            return Err(Error::Invalid(format!(
                "sandwich norms need arity 2, got {}",
                self.arity()
            )));
        }
        Ok(())
    }

    /// Seeds actually run: all of them for random families, one otherwise.
    fn cell_seeds(&self) -> Vec<u64> {
        if self.family.is_random() {
            self.seeds.clone()
        } else {
            vec![self.seeds.first().copied().unwrap_or(0)]
        }
    }
}

/// One `(n, seed)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub family: &'static str,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub mixed_norm: f64,
    pub norm_lower: f64,
    pub norm_upper: Option<f64>,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

impl Row {
    pub fn ratio_mid(&self) -> f64 {
        0.5 * (self.ratio_lo + self.ratio_hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn from_fit(fit: Option<&SlopeFit>, predicted_slope: f64) -> Verdict {
        let unresolved = predicted_slope > 0.0 && predicted_slope < DESK_RESOLUTION;
        match fit {
            Some(f) if f.slope - 2.0 * f.stderr > SLOPE_CUT => Verdict::Growing,
            Some(f) if f.slope + 2.0 * f.stderr <= SLOPE_CUT && !unresolved => Verdict::Bounded,
            _ => Verdict::Inconclusive,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Ordinary least-squares line through `(x, y)` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub r2: f64,
    pub intercept: f64,
}

/// Least-squares slope with its standard error and `r^2`.
///
/// Needs at least three points with pairwise distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::Invalid(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonFinite("slope fit input"));
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].iter().any(|b| b.0 == a.0) {
            return Err(Error::Invalid(format!("repeated abscissa {}", a.0)));
        }
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (sse / (len - 2.0) / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(SlopeFit {
        slope,
        stderr,
        r2,
        intercept,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    pub family: &'static str,
    pub k: usize,
    pub m: usize,
    pub q: ExponentTuple,
    pub partition: Partition,
    pub norm_mode: NormMode,
    pub rows: Vec<Row>,
    /// `None` with fewer than three distinct sides.
    pub fit: Option<SlopeFit>,
    pub max_deficit: f64,
    /// `max(0, max_deficit)`.
    pub predicted_slope: f64,
    pub verdict: Verdict,
}

impl ScalingResult {
    pub fn fitted_slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn slope_stderr(&self) -> Option<f64> {
        self.fit.map(|f| f.stderr)
    }

    /// `(log n, mean over seeds of log ratio midpoint)` per side.
    pub fn log_points(&self) -> Vec<(f64, f64)> {
        aggregate_log_ratios(&self.rows)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> Summary<'_> {
        Summary {
            family: self.family,
            k: self.k,
            m: self.m,
            q: &self.q,
            partition: &self.partition,
            norm_mode: self.norm_mode,
            n_grid: distinct_sides(&self.rows),
            cells: self.rows.len(),
            slope: self.fit.map(|f| f.slope),
            stderr: self.fit.map(|f| f.stderr),
            r2: self.fit.map(|f| f.r2),
            intercept: self.fit.map(|f| f.intercept),
            max_deficit: self.max_deficit,
            predicted_slope: self.predicted_slope,
            verdict: self.verdict,
        }
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes")
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`.
    pub fn write_files(&self, prefix: impl AsRef<Path>) -> Result<()> {
        let prefix = prefix.as_ref().as_os_str().to_owned();
        let mut csv_path = prefix.clone();
        csv_path.push(".csv");
        let mut json_path = prefix;
        json_path.push(".json");
        self.write_csv(std::fs::File::create(csv_path)?)?;
        std::fs::write(json_path, self.summary_json() + "\n")?;
        Ok(())
    }
}

/// JSON summary of a sweep. The intercept is the fitted log-constant of the
/// ratio, not an estimate of any optimal constant.
#[derive(Serialize)]
pub struct Summary<'a> {
    pub family: &'static str,
    pub k: usize,
    pub m: usize,
    pub q: &'a ExponentTuple,
    pub partition: &'a Partition,
    pub norm_mode: NormMode,
    pub n_grid: Vec<usize>,
    pub cells: usize,
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub r2: Option<f64>,
    pub intercept: Option<f64>,
    pub max_deficit: f64,
    pub predicted_slope: f64,
    pub verdict: Verdict,
}

fn distinct_sides(rows: &[Row]) -> Vec<usize> {
    let mut sides: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sides.dedup();
    sides
}

fn aggregate_log_ratios(rows: &[Row]) -> Vec<(f64, f64)> {
    distinct_sides(rows)
        .into_iter()
        .map(|n| {
            let logs: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.ratio_mid().ln())
                .collect();
            (
                (n as f64).ln(),
                logs.iter().sum::<f64>() / logs.len() as f64,
            )
        })
        .collect()
}

fn cell_norm(spec: &ExperimentSpec, t: &CoefTensor, seed: u64) -> Result<NormEstimate> {
    match spec.norm_mode {
        NormMode::Exact => exact_real(t),
        NormMode::Sandwich => sandwich(t, spec.restarts, seed),
    }
}

fn run_cell(spec: &ExperimentSpec, n: usize, seed: u64) -> Result<Row> {
    let m = spec.arity();
    let t = spec.family.build(m, n, seed)?;
    let restricted = block_restrict(&t, &spec.partition)?;
    let mixed = mixed_norm(&restricted, &spec.q)?;
    let norm = cell_norm(spec, &t, seed)?;
    if norm.lower <= 0.0 {
        return Err(Error::Invalid(format!(
            "form vanishes at n={n}, seed={seed}"
        )));
    }
    let upper = norm.upper;
    Ok(Row {
        family: spec.family.name(),
        k: spec.q.len(),
        m,
        n,
        seed,
        mixed_norm: mixed,
        norm_lower: norm.lower,
        norm_upper: upper,
        ratio_lo: upper.map_or(0.0, |u| mixed / u),
        ratio_hi: mixed / norm.lower,
    })
}

/// Runs every `(n, seed)` cell and fits the growth exponent.
///
/// Cells run in parallel and are collected in `(n, seed)` order, so the
/// result is identical for identical specs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ScalingResult> {
    spec.validate()?;
    let seeds = spec.cell_seeds();
    let cells: Vec<(usize, u64)> = spec
        .n_grid
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(n, seed)| run_cell(spec, n, seed))
        .collect::<Result<Vec<Row>>>()?;

    let points = aggregate_log_ratios(&rows);
    let fit = if points.len() >= 3 {
        Some(fit_slope(&points)?)
    } else {
        None
    };
    let max_deficit = is_admissible_fast(&spec.q).max_deficit;
    let predicted_slope = max_deficit.max(0.0);
    Ok(ScalingResult {
        family: spec.family.name(),
        k: spec.q.len(),
        m: spec.arity(),
        q: spec.q.clone(),
        partition: spec.partition.clone(),
        norm_mode: spec.norm_mode,
        rows,
        fit,
        max_deficit,
        predicted_slope,
        verdict: Verdict::from_fit(fit.as_ref(), predicted_slope),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_points(c: f64, a: f64) -> Vec<(f64, f64)> {
        [4.0f64, 8.0, 12.0, 16.0]
            .iter()
            .map(|&n| (n.ln(), (c * n.powf(a)).ln()))
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let f = fit_slope(&power_points(1.0, 0.5)).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_ratio() {
        let f = fit_slope(&power_points(2.5, 0.0)).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn constant_absorbed_by_intercept() {
        let f = fit_slope(&power_points(3.0, 1.5)).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(fit_slope(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(fit_slope(&[(0.0, 1.0), (0.0, 2.0), (1.0, 2.0)]).is_err());
        assert!(fit_slope(&[(0.0, 1.0), (1.0, f64::NAN), (2.0, 2.0)]).is_err());
    }

    #[test]
    fn verdict_rules() {
        let fit = |slope, stderr| SlopeFit {
            slope,
            stderr,
            r2: 1.0,
            intercept: 0.0,
        };
        assert_eq!(
            Verdict::from_fit(Some(&fit(0.5, 0.05)), 0.5),
            Verdict::Growing
        );
        assert_eq!(
            Verdict::from_fit(Some(&fit(0.02, 0.03)), 0.0),
            Verdict::Bounded
        );
        assert_eq!(
            Verdict::from_fit(Some(&fit(-0.5, 0.1)), 0.0),
            Verdict::Bounded
        );
        assert_eq!(
            Verdict::from_fit(Some(&fit(0.12, 0.05)), 0.0),
            Verdict::Inconclusive
        );
        assert_eq!(Verdict::from_fit(None, 0.0), Verdict::Inconclusive);
        // Small positive deficits cannot be called bounded.
        assert_eq!(
            Verdict::from_fit(Some(&fit(-0.08, 0.04)), 1.0 / 18.0),
            Verdict::Inconclusive
        );
        assert_eq!(
            Verdict::from_fit(Some(&fit(0.3, 0.04)), 1.0 / 18.0),
            Verdict::Growing
        );
    }

    #[test]
    fn spec_validation() {
        let q = ExponentTuple::new(vec![1.0, 1.0]).unwrap();
        let mut spec = ExperimentSpec::new(q, Family::Ksz, vec![4, 8], vec![1]).unwrap();
        assert!(spec.validate().is_ok());
        spec.n_grid = vec![8, 4];
        assert!(spec.validate().is_err());
        spec.n_grid = vec![];
        assert!(spec.validate().is_err());
        spec.n_grid = vec![4];
        spec.seeds.clear();
        assert!(spec.validate().is_err());
        spec.seeds = vec![1];
        spec.partition = Partition::new(vec![2]).unwrap();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn two_sides_is_inconclusive() {
        let q = ExponentTuple::new(vec![1.0, 1.0]).unwrap();
        let spec = ExperimentSpec::new(q, Family::Ksz, vec![3, 4], vec![1, 2]).unwrap();
        let r = run_experiment(&spec).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.fit.is_none());
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!((r.predicted_slope - 0.5).abs() < 1e-15);
    }

    #[test]
    fn littlewood_family_rows() {
        let q = ExponentTuple::new(vec![4.0 / 3.0, 4.0 / 3.0]).unwrap();
        let spec = ExperimentSpec::new(q, Family::Littlewood, vec![1, 2, 4], vec![]).unwrap();
        let r = run_experiment(&spec).unwrap();
        assert_eq!(r.rows.len(), 3);
        let row = &r.rows[1];
        assert_eq!(row.norm_lower, 2.0);
        assert!((row.ratio_hi - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(row.ratio_lo, row.ratio_hi);
    }

    #[test]
    fn csv_columns() {
        let q = ExponentTuple::new(vec![1.0, 1.0]).unwrap();
        let spec = ExperimentSpec::new(q, Family::Ksz, vec![2], vec![7]).unwrap();
        let r = run_experiment(&spec).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "family,k,m,n,seed,mixed_norm,norm_lower,norm_upper,ratio_lo,ratio_hi"
        );
        assert!(lines.next().unwrap().starts_with("ksz,2,2,2,7,4.0,"));
    }
}
