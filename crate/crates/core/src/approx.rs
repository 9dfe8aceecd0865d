//! Metric projection onto finite clouds and sampled checks of the sun
//! condition `y ∈ P_M[(1-λ)y + λx]` for all `λ ≥ 0`.
//!
//! The sun check is falsification-only. A report of
//! [`SunVerdict::HoldsOnGrid`] means no violation was found at the sampled
//! values of `λ`; a [`SunVerdict::Falsified`] report names a concrete `λ`
//! and a strictly nearer competitor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{check_dim, Error, Result};
use crate::space::Space;
use crate::vector::{add, sub};

/// Default relative tie tolerance for nearest points.
pub const TIE_TOL: f64 = 1e-9;
pub const DEFAULT_LAMBDA_MAX: f64 = 16.0;
pub const DEFAULT_LAMBDA_GRID: usize = 256;

/// `P_M x` with its distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionResult {
    pub distance: f64,
    /// Indices of all points within `distance · (1 + tie_tol)`, in cloud order.
    pub nearest: Vec<usize>,
}

impl ProjectionResult {
    pub fn nearest_points<'a>(&'a self, m: &'a PointCloud) -> impl Iterator<Item = &'a [f64]> + 'a {
        self.nearest.iter().map(move |&i| m.point(i))
    }
}

#[inline]
fn within_tie(d: f64, best: f64, tie_tol: f64) -> bool {
    d <= best * (1.0 + tie_tol)
}

/// Nearest points of `m` to `x`.
pub fn project(s: &Space, m: &PointCloud, x: &[f64], tie_tol: f64) -> Result<ProjectionResult> {
    if m.is_empty() {
        return Err(Error::EmptyCloud);
    }
    m.check_space(s)?;
    check_dim(s.dim(), x)?;
    if !(tie_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tie tolerance must be nonnegative, got {tie_tol}")));
    }
    let dists: Vec<f64> = m.points().iter().map(|p| s.distance_unchecked(x, p)).collect();
    let distance = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    let nearest = dists
        .iter()
        .enumerate()
        .filter(|(_, &d)| within_tie(d, distance, tie_tol))
        .map(|(i, _)| i)
        .collect();
    Ok(ProjectionResult { distance, nearest })
}

#[derive(Clone, Debug)]
pub struct SunParams {
    pub lambda_max: f64,
    pub grid_size: usize,
    pub tie_tol: f64,
    /// Require the ray condition for every nearest point (strict protosun)
    /// instead of searching for one.
    pub strict: bool,
}

impl Default for SunParams {
    fn default() -> Self {
        SunParams {
            lambda_max: DEFAULT_LAMBDA_MAX,
            grid_size: DEFAULT_LAMBDA_GRID,
            tie_tol: TIE_TOL,
            strict: false,
        }
    }
}

impl SunParams {
    fn validate(&self) -> Result<()> {
        if !(self.lambda_max >= 1.0) || !self.lambda_max.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda_max must be ≥ 1, got {}", self.lambda_max)));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidParameter(format!("grid_size must be ≥ 2, got {}", self.grid_size)));
        }
        Ok(())
    }

    /// `λ_j = lambda_max · j / (grid_size - 1)`, plus `λ = 1`.
    pub fn lambdas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.grid_size)
            .map(|j| self.lambda_max * j as f64 / (self.grid_size - 1) as f64)
            .collect();
        if !out.contains(&1.0) {
            let at = out.partition_point(|&l| l < 1.0);
            out.insert(at, 1.0);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaCheck {
    pub lambda: f64,
    /// `‖x(λ) - y‖`.
    pub distance_to_candidate: f64,
    /// `d(x(λ), M)`.
    pub distance_to_cloud: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Falsifier {
    pub lambda: f64,
    pub competitor: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SunVerdict {
    HoldsOnGrid,
    Falsified,
}

/// `{x, y, lambda_max, grid, verdict, falsifier}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SunReport {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda_max: f64,
    pub grid: usize,
    pub verdict: SunVerdict,
    pub falsifier: Option<Falsifier>,
    #[serde(skip)]
    pub checks: Vec<LambdaCheck>,
}

impl SunReport {
    pub fn holds(&self) -> bool {
        self.verdict == SunVerdict::HoldsOnGrid
    }
}

/// Checks whether `y` stays a nearest point along the ray from `y` through
/// `x`. `y` must already be a nearest point of `m` to `x`.
pub fn sun_check(s: &Space, m: &PointCloud, x: &[f64], y: &[f64], params: &SunParams) -> Result<SunReport> {
    params.validate()?;
    let proj = project(s, m, x, params.tie_tol)?;
    check_dim(s.dim(), y)?;
    if !proj.nearest_points(m).any(|p| p == y) {
        return Err(Error::NotANearestPoint(y.to_vec()));
    }
    Ok(sun_check_unchecked(s, m, x, y, params))
}

fn sun_check_unchecked(s: &Space, m: &PointCloud, x: &[f64], y: &[f64], params: &SunParams) -> SunReport {
    let dir = sub(x, y);
    let dir_norm = s.norm_unchecked(&dir);
    let mut checks = Vec::new();
    let mut falsifier = None;
    for lambda in params.lambdas() {
        let p = add(y, &dir.iter().map(|d| lambda * d).collect::<Vec<_>>());
        let to_y = s.distance_unchecked(&p, y);
        debug_assert!(
            (to_y - lambda * dir_norm).abs() <= 1e-9 * (1.0 + lambda * dir_norm),
            "ray distance drifted from λ‖x - y‖"
        );
        let (best_idx, best) = m
            .points()
            .iter()
            .enumerate()
            .map(|(i, q)| (i, s.distance_unchecked(&p, q)))
            .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
        let holds = within_tie(to_y, best, params.tie_tol);
        checks.push(LambdaCheck {
            lambda,
            distance_to_candidate: to_y,
            distance_to_cloud: best,
            holds,
        });
        if !holds && falsifier.is_none() {
            falsifier = Some(Falsifier {
                lambda,
                competitor: m.point(best_idx).to_vec(),
            });
        }
    }
    SunReport {
        x: x.to_vec(),
        y: y.to_vec(),
        lambda_max: params.lambda_max,
        grid: params.grid_size,
        verdict: if falsifier.is_some() { SunVerdict::Falsified } else { SunVerdict::HoldsOnGrid },
        falsifier,
        checks,
    }
}

fn reports_for_nearest(s: &Space, m: &PointCloud, x: &[f64], params: &SunParams) -> Result<Vec<SunReport>> {
    params.validate()?;
    let proj = project(s, m, x, params.tie_tol)?;
    if proj.distance == 0.0 {
        return Err(Error::QueryInCloud(x.to_vec()));
    }
    Ok(proj
        .nearest_points(m)
        .map(|y| sun_check_unchecked(s, m, x, y, params))
        .collect())
}

/// Returns the first nearest point whose ray check is not falsified.
pub fn find_luminosity(s: &Space, m: &PointCloud, x: &[f64], params: &SunParams) -> Result<SunReport> {
    params.validate()?;
    let proj = project(s, m, x, params.tie_tol)?;
    if proj.distance == 0.0 {
        return Err(Error::QueryInCloud(x.to_vec()));
    }
    let mut falsified = Vec::new();
    for y in proj.nearest_points(m) {
        let report = sun_check_unchecked(s, m, x, y, params);
        if report.holds() {
            return Ok(report);
        }
        falsified.push(report);
    }
    Err(Error::NoCandidate(falsified))
}

/// Ray checks for every nearest point (strict protosun condition).
pub fn strict_check(s: &Space, m: &PointCloud, x: &[f64], params: &SunParams) -> Result<Vec<SunReport>> {
    reports_for_nearest(s, m, x, params)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum QueryOutcome {
    /// A luminosity point was found (or, in strict mode, every nearest
    /// point passed).
    Holds { reports: Vec<SunReport> },
    Falsified { reports: Vec<SunReport> },
    /// The query lies in the cloud; the condition does not apply.
    InCloud,
}

#[derive(Clone, Debug, Serialize)]
pub struct SunSummary {
    pub queries: Vec<Vec<f64>>,
    pub outcomes: Vec<QueryOutcome>,
    pub falsified_queries: Vec<usize>,
    pub strict: bool,
    /// `"no falsification found"` or `"falsified"`.
    pub verdict: String,
}

impl SunSummary {
    pub fn no_falsification(&self) -> bool {
        self.falsified_queries.is_empty()
    }
}

/// Batch driver over [`find_luminosity`] (or [`strict_check`]).
pub fn is_sun_sampled(s: &Space, m: &PointCloud, queries: &[Vec<f64>], params: &SunParams) -> Result<SunSummary> {
    if queries.is_empty() {
        return Err(Error::InvalidParameter("no queries".into()));
    }
    let mut outcomes = Vec::with_capacity(queries.len());
    let mut falsified_queries = Vec::new();
    for (qi, q) in queries.iter().enumerate() {
        let outcome = if params.strict {
            match strict_check(s, m, q, params) {
                Ok(reports) if reports.iter().all(SunReport::holds) => QueryOutcome::Holds { reports },
                Ok(reports) => QueryOutcome::Falsified { reports },
                Err(Error::QueryInCloud(_)) => QueryOutcome::InCloud,
                Err(e) => return Err(e),
            }
        } else {
            match find_luminosity(s, m, q, params) {
                Ok(report) => QueryOutcome::Holds { reports: vec![report] },
                Err(Error::NoCandidate(reports)) => QueryOutcome::Falsified { reports },
                Err(Error::QueryInCloud(_)) => QueryOutcome::InCloud,
                Err(e) => return Err(e),
            }
        };
        if matches!(outcome, QueryOutcome::Falsified { .. }) {
            falsified_queries.push(qi);
        }
        outcomes.push(outcome);
    }
    let verdict = if falsified_queries.is_empty() {
        "no falsification found"
    } else {
        "falsified"
    };
    Ok(SunSummary {
        queries: queries.to_vec(),
        outcomes,
        falsified_queries,
        strict: params.strict,
        verdict: verdict.into(),
    })
}

/// Uniform queries from the cloud's bounding box, padded by `margin` on
/// every side, keeping only those at distance at least `min_distance` from
/// the cloud. A finite sample of a set says nothing about queries closer
/// than its sampling step, so `min_distance` is usually that step.
pub fn random_queries(
    s: &Space,
    m: &PointCloud,
    count: usize,
    margin: f64,
    min_distance: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    m.check_space(s)?;
    let n = m.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in m.points() {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::InvalidParameter("could not place queries away from the cloud".into()));
        }
        let q: Vec<f64> = (0..n)
            .map(|i| rng.random_range(lo[i] - margin..=hi[i] + margin))
            .collect();
        let d = m.points().iter().map(|p| s.distance_unchecked(&q, p)).fold(f64::INFINITY, f64::min);
        if d >= min_distance && d > 0.0 {
            out.push(q);
        }
    }
    Ok(out)
}
