//! Intervals `⟦x,y⟧`, sampled Banach–Mazur hulls `m(x,y)`, and
//! m-connectedness of finite clouds.
//!
//! The interval between `x` and `y` is the slab polytope
//! `{z : min(f(x), f(y)) ≤ f(z) ≤ max(f(x), f(y))}` over the dual extreme
//! functionals. The hull `m(x,y)` is the intersection of every closed ball
//! containing both points; [`ball_hull_outer`] approximates it from outside
//! by intersecting finitely many such balls. In any normed space the hull
//! contains the interval, and in finite dimension the two coincide, so the
//! sampled hull is an independent oracle for the interval.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{check_dim, Error, Result};
use crate::space::{Ball, Space};
use crate::vector::{dot, midpoint};

/// Absolute slack for slab membership. Boundary points are members.
pub const INTERVAL_TOL: f64 = 1e-10;

/// Half-width of the ball-center sampling box, in units of `‖x - y‖`.
pub const CENTER_BOX_FACTOR: f64 = 4.0;

/// One slab `lo ≤ f(z) ≤ hi` for the representative functional of `pair`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Slab {
    pub pair: usize,
    pub lo: f64,
    pub hi: f64,
}

/// `⟦x,y⟧` as one slab per antipodal pair (the slab of `-f` is the same set).
#[derive(Clone, Debug)]
pub struct SlabPolytope<'a> {
    space: &'a Space,
    slabs: Vec<Slab>,
    tol: f64,
}

impl PartialEq for SlabPolytope<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.slabs == other.slabs
    }
}

/// Builds `⟦x,y⟧`.
pub fn interval<'a>(s: &'a Space, x: &[f64], y: &[f64]) -> Result<SlabPolytope<'a>> {
    check_dim(s.dim(), x)?;
    check_dim(s.dim(), y)?;
    let slabs = s
        .representatives()
        .enumerate()
        .map(|(pair, f)| {
            let (a, b) = (dot(f, x), dot(f, y));
            Slab {
                pair,
                lo: a.min(b),
                hi: a.max(b),
            }
        })
        .collect();
    Ok(SlabPolytope {
        space: s,
        slabs,
        tol: INTERVAL_TOL,
    })
}

/// Membership `z ∈ p` (free-function form of [`SlabPolytope::contains`]).
pub fn interval_contains(p: &SlabPolytope<'_>, z: &[f64]) -> Result<bool> {
    p.contains(z)
}

impl<'a> SlabPolytope<'a> {
    pub fn space(&self) -> &'a Space {
        self.space
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn contains(&self, z: &[f64]) -> Result<bool> {
        check_dim(self.space.dim(), z)?;
        Ok(self.contains_unchecked(z))
    }

    #[inline]
    pub fn contains_unchecked(&self, z: &[f64]) -> bool {
        self.slabs.iter().all(|slab| {
            let v = dot(self.space.representative(slab.pair), z);
            v >= slab.lo - self.tol && v <= slab.hi + self.tol
        })
    }

    /// Largest slab violation `max_f dist(f(z), [lo_f, hi_f])`; zero inside.
    /// Since every `f` has dual norm one this is a lower bound on the
    /// distance from `z` to the interval, exact for `ℓ∞(n)`.
    pub fn excess(&self, z: &[f64]) -> f64 {
        self.slabs.iter().fold(0.0, |m, slab| {
            let v = dot(self.space.representative(slab.pair), z);
            m.max(slab.lo - v).max(v - slab.hi)
        })
    }

    /// Vertices of a two-dimensional interval in counterclockwise order.
    pub fn vertices_2d(&self) -> Option<Vec<[f64; 2]>> {
        if self.space.dim() != 2 {
            return None;
        }
        let mut lines = Vec::with_capacity(2 * self.slabs.len());
        for slab in &self.slabs {
            let f = self.space.representative(slab.pair);
            lines.push((f[0], f[1], slab.lo));
            lines.push((f[0], f[1], slab.hi));
        }
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, b1, c1) = lines[i];
                let (a2, b2, c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-14 {
                    continue;
                }
                let p = [(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det];
                let scale = 1.0 + p[0].abs().max(p[1].abs());
                if self.excess(&p) <= 1e-9 * scale
                    && !pts.iter().any(|q| (q[0] - p[0]).abs() + (q[1] - p[1]).abs() <= 1e-9 * scale)
                {
                    pts.push(p);
                }
            }
        }
        if pts.is_empty() {
            return Some(pts);
        }
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
        pts.sort_by(|p, q| {
            let a = (p[1] - cy).atan2(p[0] - cx);
            let b = (q[1] - cy).atan2(q[0] - cx);
            a.total_cmp(&b)
        });
        Some(pts)
    }
}

/// A rectangular lattice covering the ball `B(mid, ‖x - y‖/2)`, which
/// contains `m(x,y)`. Per axis the lattice passes through `x_i`, and also
/// through `y_i` unless `|y_i - x_i|` is below half the nominal step, so
/// every step stays within a factor two of nominal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullGrid {
    origin: Vec<f64>,
    step: Vec<f64>,
    first: Vec<i64>,
    counts: Vec<usize>,
}

impl HullGrid {
    pub fn for_pair(s: &Space, x: &[f64], y: &[f64], points_per_axis: usize) -> Result<Self> {
        check_dim(s.dim(), x)?;
        check_dim(s.dim(), y)?;
        if points_per_axis < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
        }
        let r = 0.5 * s.distance_unchecked(x, y);
        let bounds = s.unit_ball_axis_bounds();
        let mid = midpoint(x, y);
        let n = s.dim();
        let mut grid = HullGrid {
            origin: x.to_vec(),
            step: vec![1.0; n],
            first: vec![0; n],
            counts: vec![1; n],
        };
        for i in 0..n {
            let half = bounds[i] * r;
            if half <= 0.0 {
                continue;
            }
            let base = 2.0 * half / (points_per_axis - 1) as f64;
            let d = y[i] - x[i];
            // snapping y_i onto the lattice would shrink the step below base/2
            let (step, k_y) = if d.abs() >= 0.5 * base {
                let m = (d.abs() / base).round();
                (d.abs() / m, (m as i64) * d.signum() as i64)
            } else {
                (base, 0)
            };
            let lo = ((mid[i] - half - x[i]) / step).floor() as i64;
            let hi = ((mid[i] + half - x[i]) / step).ceil() as i64;
            let lo = lo.min(0).min(k_y);
            let hi = hi.max(0).max(k_y);
            grid.step[i] = step;
            grid.first[i] = lo;
            grid.counts[i] = (hi - lo + 1) as usize;
        }
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Largest lattice step over the axes that actually vary.
    pub fn resolution(&self) -> f64 {
        self.counts
            .iter()
            .zip(&self.step)
            .filter(|(c, _)| **c > 1)
            .map(|(_, s)| *s)
            .fold(0.0, f64::max)
    }

    /// Writes the coordinates of lattice node `index` into `out`.
    pub fn point_into(&self, mut index: usize, out: &mut [f64]) {
        for i in 0..self.dim() {
            let k = (index % self.counts[i]) as i64 + self.first[i];
            index /= self.counts[i];
            out[i] = self.origin[i] + k as f64 * self.step[i];
        }
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(index, &mut p);
        p
    }

    /// Evaluates `pred` at every node.
    pub fn mask(&self, mut pred: impl FnMut(&[f64]) -> bool) -> Vec<bool> {
        let mut p = vec![0.0; self.dim()];
        (0..self.len())
            .map(|i| {
                self.point_into(i, &mut p);
                pred(&p)
            })
            .collect()
    }

    /// King-move distance (in lattice steps) from every node to the nearest
    /// node of `sources`; `None` when `sources` is empty.
    pub fn step_distances(&self, sources: &[bool]) -> Option<Vec<u32>> {
        let n = self.dim();
        let total = self.len();
        let mut dist = vec![u32::MAX; total];
        let mut queue = VecDeque::new();
        for (i, &s) in sources.iter().enumerate() {
            if s {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        if queue.is_empty() {
            return None;
        }
        let mut strides = vec![1usize; n];
        for i in 1..n {
            strides[i] = strides[i - 1] * self.counts[i - 1];
        }
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let o = (code % 3) as i64 - 1;
                        code /= 3;
                        o
                    })
                    .collect()
            })
            .filter(|o: &Vec<i64>| o.iter().any(|&v| v != 0))
            .collect();
        let mut coord = vec![0i64; n];
        while let Some(cur) = queue.pop_front() {
            let mut rem = cur;
            for i in 0..n {
                coord[i] = (rem % self.counts[i]) as i64;
                rem /= self.counts[i];
            }
            'next: for off in &offsets {
                let mut idx = 0usize;
                for i in 0..n {
                    let c = coord[i] + off[i];
                    if c < 0 || c >= self.counts[i] as i64 {
                        continue 'next;
                    }
                    idx += c as usize * strides[i];
                }
                if dist[idx] == u32::MAX {
                    dist[idx] = dist[cur] + 1;
                    queue.push_back(idx);
                }
            }
        }
        Some(dist)
    }
}

/// Default lattice resolution: 100 points per axis up to dimension 3,
/// coarser above.
pub fn default_grid_points(dim: usize) -> usize {
    match dim {
        0..=3 => 100,
        4 => 24,
        _ => 8,
    }
}

#[derive(Clone, Debug)]
pub struct HullOptions {
    pub grid_points: usize,
    /// Slack for ball membership; should not be below [`INTERVAL_TOL`] so
    /// that interval members always pass (see [`HullApprox::contains`]).
    pub tol: f64,
}

impl HullOptions {
    pub fn for_dim(dim: usize) -> Self {
        HullOptions {
            grid_points: default_grid_points(dim),
            tol: 2.0 * INTERVAL_TOL,
        }
    }
}

/// Outer approximation of `m(x,y)` by finitely many balls containing
/// `{x, y}`.
///
/// All balls of a polyhedral norm are translates and dilates of one
/// polytope, so `⋂ B(c, r_c) = {z : f(z) ≤ b_f ∀ f ∈ F}` with
/// `b_f = min_c (f(c) + r_c)`. Membership uses that bound table;
/// [`HullApprox::contains_by_balls`] checks ball by ball instead.
#[derive(Clone, Debug)]
pub struct HullApprox {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub balls: Vec<Ball>,
    pub seed: u64,
    pub tol: f64,
    /// `b_f` per functional of the space (indexed like `Space::functionals`).
    pub bounds: Vec<f64>,
    pub grid: HullGrid,
    /// Lattice nodes inside every sampled ball.
    pub inside: Vec<bool>,
}

/// Samples `n_balls` balls and builds the outer hull on the default grid.
pub fn ball_hull_outer(s: &Space, x: &[f64], y: &[f64], n_balls: usize, seed: u64) -> Result<HullApprox> {
    ball_hull_outer_with(s, x, y, n_balls, seed, &HullOptions::for_dim(s.dim()))
}

/// Ball centers: `x`, `y`, the midpoint, then uniform draws from the box
/// of half-width `4‖x - y‖` around the midpoint. Each radius is the least
/// one at that center that still covers both points. The first `k` centers
/// for a seed do not depend on `n_balls`, so samples are nested.
pub fn sample_balls(s: &Space, x: &[f64], y: &[f64], n_balls: usize, seed: u64) -> Vec<Ball> {
    let mid = midpoint(x, y);
    let half = CENTER_BOX_FACTOR * s.distance_unchecked(x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut balls = Vec::with_capacity(n_balls);
    let fixed = [x.to_vec(), y.to_vec(), mid.clone()];
    for i in 0..n_balls {
        let c: Vec<f64> = if i < fixed.len() {
            fixed[i].clone()
        } else if half > 0.0 {
            mid.iter().map(|m| m + rng.random_range(-half..=half)).collect()
        } else {
            mid.clone()
        };
        let radius = s.distance_unchecked(&c, x).max(s.distance_unchecked(&c, y));
        balls.push(Ball { center: c, radius });
    }
    balls
}

pub fn ball_hull_outer_with(
    s: &Space,
    x: &[f64],
    y: &[f64],
    n_balls: usize,
    seed: u64,
    opts: &HullOptions,
) -> Result<HullApprox> {
    check_dim(s.dim(), x)?;
    check_dim(s.dim(), y)?;
    if n_balls == 0 {
        return Err(Error::InvalidParameter("n_balls must be at least 1".into()));
    }
    let balls = sample_balls(s, x, y, n_balls, seed);
    let bounds = s
        .functionals()
        .iter()
        .map(|f| {
            balls
                .iter()
                .map(|b| dot(f, &b.center) + b.radius)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let grid = HullGrid::for_pair(s, x, y, opts.grid_points)?;
    let mut hull = HullApprox {
        x: x.to_vec(),
        y: y.to_vec(),
        balls,
        seed,
        tol: opts.tol,
        bounds,
        grid,
        inside: Vec::new(),
    };
    hull.inside = hull.grid.mask(|p| hull.contains_unchecked(s, p));
    Ok(hull)
}

impl HullApprox {
    pub fn n_balls(&self) -> usize {
        self.balls.len()
    }

    /// Membership in the intersection of the sampled balls.
    ///
    /// With the slab tolerance at most `tol`, every interval member passes:
    /// for the functional `f` attaining `‖z - c‖`,
    /// `f(z) - f(c) ≤ max(f(x), f(y)) + INTERVAL_TOL - f(c) ≤ r_c + INTERVAL_TOL`.
    pub fn contains(&self, s: &Space, z: &[f64]) -> Result<bool> {
        check_dim(s.dim(), z)?;
        Ok(self.contains_unchecked(s, z))
    }

    #[inline]
    pub fn contains_unchecked(&self, s: &Space, z: &[f64]) -> bool {
        s.functionals()
            .iter()
            .zip(&self.bounds)
            .all(|(f, b)| dot(f, z) <= b + self.tol)
    }

    /// Membership checked ball by ball.
    pub fn contains_by_balls(&self, s: &Space, z: &[f64]) -> bool {
        self.balls
            .iter()
            .all(|b| s.distance_unchecked(z, &b.center) <= b.radius + self.tol)
    }

    /// `b_f - max(f(x), f(y))` per functional: how far each facet of the
    /// sampled hull sits outside the matching facet of the interval.
    pub fn facet_slack(&self, s: &Space) -> Vec<f64> {
        s.functionals()
            .iter()
            .zip(&self.bounds)
            .map(|(f, b)| b - dot(f, &self.x).max(dot(f, &self.y)))
            .collect()
    }

    pub fn outer_points(&self) -> Vec<Vec<f64>> {
        self.inside
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.grid.point(i))
            .collect()
    }

    /// Compares the lattice sample of this hull with the lattice sample of
    /// `⟦x,y⟧` on the same grid.
    pub fn compare(&self, iv: &SlabPolytope<'_>) -> HullGap {
        let in_interval = self.grid.mask(|p| iv.contains_unchecked(p));
        let inclusion_violations = in_interval
            .iter()
            .zip(&self.inside)
            .filter(|(i, o)| **i && !**o)
            .count();
        let resolution = self.grid.resolution();

        let mut gap_steps = 0u32;
        let mut witness = None;
        if let Some(d) = self.grid.step_distances(&in_interval) {
            for (i, (&o, &di)) in self.inside.iter().zip(&d).enumerate() {
                if o && di > gap_steps {
                    gap_steps = di;
                    witness = Some(i);
                }
            }
        }
        if inclusion_violations > 0 {
            if let Some(d) = self.grid.step_distances(&self.inside) {
                for (i, (&m, &di)) in in_interval.iter().zip(&d).enumerate() {
                    if m && di > gap_steps {
                        gap_steps = di;
                        witness = Some(i);
                    }
                }
            }
        }
        HullGap {
            outer_count: self.inside.iter().filter(|b| **b).count(),
            interval_count: in_interval.iter().filter(|b| **b).count(),
            inclusion_violations,
            gap_steps,
            resolution,
            gap: gap_steps as f64 * resolution,
            witness: witness.map(|i| self.grid.point(i)),
        }
    }
}

/// Lattice comparison of a sampled hull and an interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullGap {
    pub outer_count: usize,
    pub interval_count: usize,
    /// Interval lattice nodes rejected by the sampled hull.
    pub inclusion_violations: usize,
    /// Hausdorff distance between the two lattice sets in king moves.
    pub gap_steps: u32,
    pub resolution: f64,
    /// `gap_steps × resolution`: an upper bound on the coordinatewise
    /// (max-norm) Hausdorff distance between the lattice sets.
    pub gap: f64,
    /// Lattice node realizing the gap.
    pub witness: Option<Vec<f64>>,
}

/// `{pair, contained, gap, witness}` report for one pair.
#[derive(Clone, Debug, Serialize)]
pub struct HullReport {
    pub pair: [Vec<f64>; 2],
    pub contained: bool,
    pub gap: f64,
    pub witness: Option<Vec<f64>>,
    pub gap_steps: u32,
    pub resolution: f64,
    pub n_balls: usize,
    pub seed: u64,
}

impl HullReport {
    pub fn new(hull: &HullApprox, gap: &HullGap) -> Self {
        HullReport {
            pair: [hull.x.clone(), hull.y.clone()],
            contained: gap.inclusion_violations == 0,
            gap: gap.gap,
            witness: gap.witness.clone(),
            gap_steps: gap.gap_steps,
            resolution: gap.resolution,
            n_balls: hull.n_balls(),
            seed: hull.seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeiOptions {
    pub n_balls: usize,
    pub hull: HullOptions,
    /// Allowed gap in lattice steps before a node is reported.
    pub tolerance_steps: u32,
    /// Maximum number of offending nodes kept in the report.
    pub max_violations: usize,
}

impl MeiOptions {
    pub fn for_dim(dim: usize) -> Self {
        MeiOptions {
            n_balls: 10_000,
            hull: HullOptions::for_dim(dim),
            tolerance_steps: 1,
            max_violations: 16,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeiViolation {
    pub pair: [Vec<f64>; 2],
    pub point: Vec<f64>,
    pub gap_steps: u32,
}

/// Sampled comparison of `m(x,y)` and `⟦x,y⟧` over random pairs.
/// A clean report bounds the gap at the lattice resolution; it does not
/// certify equality.
#[derive(Clone, Debug, Serialize)]
pub struct MeiReport {
    pub space: String,
    pub trials: usize,
    pub seed: u64,
    pub n_balls: usize,
    pub max_gap: f64,
    pub max_gap_steps: u32,
    pub max_resolution: f64,
    pub inclusion_violations: usize,
    pub violations: Vec<MeiViolation>,
}

impl MeiReport {
    pub fn holds(&self) -> bool {
        self.inclusion_violations == 0 && self.violations.is_empty()
    }
}

/// Random pairs drawn uniformly from `[-1, 1]^n`.
pub fn mei_check(s: &Space, trials: usize, seed: u64, opts: &MeiOptions) -> Result<MeiReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MeiReport {
        space: s.label(),
        trials,
        seed,
        n_balls: opts.n_balls,
        max_gap: 0.0,
        max_gap_steps: 0,
        max_resolution: 0.0,
        inclusion_violations: 0,
        violations: Vec::new(),
    };
    for _ in 0..trials {
        let x: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let y: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let hull_seed = rng.random::<u64>();
        let hull = ball_hull_outer_with(s, &x, &y, opts.n_balls, hull_seed, &opts.hull)?;
        let iv = interval(s, &x, &y)?;
        let gap = hull.compare(&iv);
        report.max_gap = report.max_gap.max(gap.gap);
        report.max_gap_steps = report.max_gap_steps.max(gap.gap_steps);
        report.max_resolution = report.max_resolution.max(gap.resolution);
        report.inclusion_violations += gap.inclusion_violations;
        if gap.gap_steps > opts.tolerance_steps && report.violations.len() < opts.max_violations {
            report.violations.push(MeiViolation {
                pair: [x.clone(), y.clone()],
                point: gap.witness.clone().unwrap_or_default(),
                gap_steps: gap.gap_steps,
            });
        }
    }
    Ok(report)
}

/// Which set plays the role of `m(x,y)` in the connectedness test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum HullMode {
    /// `⟦x,y⟧`, equal to `m(x,y)` in finite dimension.
    Interval,
    /// The sampled ball intersection, for cross-checking.
    Oracle { n_balls: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct MConnectOptions {
    /// Pairs at distance `≤ resolution` are treated as neighbours at the
    /// sampling scale and need no third point. `None` uses
    /// [`PointCloud::sampling_step`].
    pub resolution: Option<f64>,
    pub hull: HullMode,
}

impl Default for MConnectOptions {
    fn default() -> Self {
        MConnectOptions {
            resolution: None,
            hull: HullMode::Interval,
        }
    }
}

/// Result of the pairwise test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MConnectivity {
    pub connected: bool,
    /// First failing pair, as cloud indices.
    pub witness: Option<(usize, usize)>,
    pub resolution: f64,
    pub pairs_checked: usize,
}

/// A pair together with a third cloud point inside its hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MEdge {
    pub a: usize,
    pub b: usize,
    pub via: usize,
}

/// The full pair relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MGraph {
    pub vertices: usize,
    pub resolution: f64,
    /// Pairs whose hull holds a third point.
    pub edges: Vec<MEdge>,
    /// Pairs without a third point but within the resolution.
    pub adjacent: Vec<(usize, usize)>,
    /// Pairs failing the test.
    pub failing: Vec<(usize, usize)>,
}

fn resolve_resolution(s: &Space, m: &PointCloud, opts: &MConnectOptions) -> Result<f64> {
    match opts.resolution {
        Some(r) if !(r >= 0.0) || !r.is_finite() => Err(Error::InvalidParameter(format!(
            "resolution must be finite and nonnegative, got {r}"
        ))),
        Some(r) => Ok(r),
        None => Ok(m.sampling_step(s)),
    }
}

/// Finds a third point for the pair `(a, b)`, or `None`.
fn third_point(s: &Space, m: &PointCloud, a: usize, b: usize, mode: HullMode) -> Result<Option<usize>> {
    let (x, y) = (m.point(a), m.point(b));
    let others = (0..m.len()).filter(|&k| k != a && k != b);
    match mode {
        HullMode::Interval => {
            let iv = interval(s, x, y)?;
            Ok(others.into_iter().find(|&k| iv.contains_unchecked(m.point(k))))
        }
        HullMode::Oracle { n_balls, seed } => {
            let opts = HullOptions {
                grid_points: 2,
                ..HullOptions::for_dim(s.dim())
            };
            let hull = ball_hull_outer_with(s, x, y, n_balls, seed, &opts)?;
            Ok(others.into_iter().find(|&k| hull.contains_unchecked(s, m.point(k))))
        }
    }
}

fn pair_is_adjacent(s: &Space, m: &PointCloud, a: usize, b: usize, resolution: f64) -> bool {
    s.distance_unchecked(m.point(a), m.point(b)) <= resolution * (1.0 + 1e-9)
}

/// Pairwise test `m({x,y}) ∩ M ≠ {x,y}` over all pairs of the cloud, with
/// pairs closer than the sampling resolution exempt.
pub fn m_connected(s: &Space, m: &PointCloud, opts: &MConnectOptions) -> Result<MConnectivity> {
    m.check_space(s)?;
    m.check_distinct()?;
    let resolution = resolve_resolution(s, m, opts)?;
    let mut checked = 0;
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            checked += 1;
            if third_point(s, m, a, b, opts.hull)?.is_none() && !pair_is_adjacent(s, m, a, b, resolution) {
                return Ok(MConnectivity {
                    connected: false,
                    witness: Some((a, b)),
                    resolution,
                    pairs_checked: checked,
                });
            }
        }
    }
    Ok(MConnectivity {
        connected: true,
        witness: None,
        resolution,
        pairs_checked: checked,
    })
}

pub fn m_connectivity_graph(s: &Space, m: &PointCloud, opts: &MConnectOptions) -> Result<MGraph> {
    m.check_space(s)?;
    m.check_distinct()?;
    let resolution = resolve_resolution(s, m, opts)?;
    let mut graph = MGraph {
        vertices: m.len(),
        resolution,
        edges: Vec::new(),
        adjacent: Vec::new(),
        failing: Vec::new(),
    };
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            match third_point(s, m, a, b, opts.hull)? {
                Some(via) => graph.edges.push(MEdge { a, b, via }),
                None if pair_is_adjacent(s, m, a, b, resolution) => graph.adjacent.push((a, b)),
                None => graph.failing.push((a, b)),
            }
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[&[f64]]) -> PointCloud {
        PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn linf_interval_is_box() {
        let s = Space::linf(2).unwrap();
        let iv = interval(&s, &[0., 0.], &[2., 1.]).unwrap();
        assert_eq!(
            iv.slabs(),
            &[Slab { pair: 0, lo: 0., hi: 2. }, Slab { pair: 1, lo: 0., hi: 1. }]
        );
        assert!(iv.contains(&[1., 0.5]).unwrap());
        assert!(!iv.contains(&[1., 1.2]).unwrap());
        assert!(iv.contains(&[2., 1.]).unwrap());
    }

    #[test]
    fn l1_interval_is_parallelogram() {
        let s = Space::l1(2).unwrap();
        let iv = interval(&s, &[0., 0.], &[2., 0.]).unwrap();
        assert!(iv.contains(&[1., 1.]).unwrap());
        assert!(iv.contains(&[1., -1.]).unwrap());
        assert!(!iv.contains(&[0.5, 0.6]).unwrap());
        let v = iv.vertices_2d().unwrap();
        assert_eq!(v.len(), 4);
        for corner in [[0., 0.], [1., 1.], [2., 0.], [1., -1.]] {
            assert!(v.iter().any(|p| (p[0] - corner[0]).abs() < 1e-12 && (p[1] - corner[1]).abs() < 1e-12));
        }
    }

    #[test]
    fn degenerate_interval_is_point() {
        let s = Space::l1(3).unwrap();
        let x = [0.3, -0.2, 1.0];
        let iv = interval(&s, &x, &x).unwrap();
        assert!(iv.contains(&x).unwrap());
        assert!(!iv.contains(&[0.3, -0.2, 1.001]).unwrap());
    }

    #[test]
    fn interval_dimension_checked() {
        let s = Space::linf(2).unwrap();
        assert!(interval(&s, &[0.], &[1., 1.]).is_err());
        let iv = interval(&s, &[0., 0.], &[1., 1.]).unwrap();
        assert!(iv.contains(&[0.5]).is_err());
    }

    #[test]
    fn grid_passes_through_endpoints() {
        let s = Space::linf(2).unwrap();
        let g = HullGrid::for_pair(&s, &[0., 0.], &[2., 0.], 11).unwrap();
        let pts: Vec<Vec<f64>> = (0..g.len()).map(|i| g.point(i)).collect();
        assert!(pts.iter().any(|p| p == &vec![0., 0.]));
        assert!(pts.iter().any(|p| (p[0] - 2.).abs() < 1e-12 && p[1] == 0.));
    }

    #[test]
    fn step_distance_is_king_metric() {
        let s = Space::linf(2).unwrap();
        let g = HullGrid::for_pair(&s, &[0., 0.], &[4., 4.], 5).unwrap();
        assert_eq!(g.counts(), &[5, 5]);
        let mut src = vec![false; g.len()];
        src[0] = true;
        let d = g.step_distances(&src).unwrap();
        assert_eq!(d[g.len() - 1], 4);
        assert_eq!(d[4], 4);
        assert!(g.step_distances(&vec![false; g.len()]).is_none());
    }

    #[test]
    fn hull_of_a_point_is_the_point() {
        let s = Space::l1(2).unwrap();
        let x = [0.5, -1.0];
        let h = ball_hull_outer(&s, &x, &x, 7, 1).unwrap();
        assert!(h.contains(&s, &x).unwrap());
        assert!(!h.contains(&s, &[0.5, -0.99]).unwrap());
        assert_eq!(h.balls[0].radius, 0.0);
        let gap = h.compare(&interval(&s, &x, &x).unwrap());
        assert_eq!(gap.gap_steps, 0);
        assert_eq!(gap.inclusion_violations, 0);
    }

    #[test]
    fn bound_table_matches_balls() {
        let s = Space::l1(2).unwrap();
        let h = ball_hull_outer_with(&s, &[0., 0.], &[2., 1.], 300, 5, &HullOptions { grid_points: 40, tol: 2e-10 }).unwrap();
        let mut p = [0.0; 2];
        for i in 0..h.grid.len() {
            h.grid.point_into(i, &mut p);
            assert_eq!(h.inside[i], h.contains_by_balls(&s, &p), "{p:?}");
        }
    }

    #[test]
    fn linf_hull_converges_to_box() {
        let s = Space::linf(2).unwrap();
        let (x, y) = ([0., 0.], [2., 1.]);
        let iv = interval(&s, &x, &y).unwrap();
        let opts = HullOptions { grid_points: 401, tol: 2e-10 };
        let h = ball_hull_outer_with(&s, &x, &y, 10_000, 42, &opts).unwrap();
        let gap = h.compare(&iv);
        assert_eq!(gap.inclusion_violations, 0);
        assert!(gap.resolution <= 0.005 + 1e-12);
        assert!(gap.gap <= 1e-2, "{gap:?}");
        assert!(h.facet_slack(&s).iter().all(|v| *v >= -1e-12));
    }

    #[test]
    fn l1_gap_shrinks_with_more_balls() {
        let s = Space::l1(2).unwrap();
        let (x, y) = ([0., 0.], [2., 0.]);
        let iv = interval(&s, &x, &y).unwrap();
        let opts = HullOptions::for_dim(2);
        let gaps: Vec<u32> = [100, 1000, 10_000]
            .iter()
            .map(|&n| ball_hull_outer_with(&s, &x, &y, n, 9, &opts).unwrap().compare(&iv))
            .map(|g| {
                assert_eq!(g.inclusion_violations, 0);
                g.gap_steps
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
        assert!(gaps[2] <= 2, "{gaps:?}");
    }

    #[test]
    fn one_dimensional_hull_is_segment() {
        let s = Space::new(vec![vec![2.0], vec![-2.0]]).unwrap();
        let report = mei_check(&s, 20, 3, &MeiOptions::for_dim(1)).unwrap();
        assert_eq!(report.max_gap_steps, 0);
        assert!(report.holds());
    }

    #[test]
    fn mconnect_collinear_triple() {
        let s = Space::linf(2).unwrap();
        let m = cloud(&[&[0., 0.], &[1., 0.], &[2., 0.]]);
        let r = m_connected(&s, &m, &MConnectOptions::default()).unwrap();
        assert!(r.connected);
        assert_eq!(r.resolution, 1.0);
        let strict = MConnectOptions { resolution: Some(0.0), ..Default::default() };
        let r = m_connected(&s, &m, &strict).unwrap();
        assert_eq!(r.witness, Some((0, 1)));
        let g = m_connectivity_graph(&s, &m, &MConnectOptions::default()).unwrap();
        assert_eq!(g.edges, vec![MEdge { a: 0, b: 2, via: 1 }]);
        assert_eq!(g.adjacent, vec![(0, 1), (1, 2)]);
        assert!(g.failing.is_empty());
    }

    #[test]
    fn mconnect_two_points_fails() {
        let s = Space::linf(2).unwrap();
        let m = cloud(&[&[0., 0.], &[1., 1.]]);
        let r = m_connected(&s, &m, &MConnectOptions::default()).unwrap();
        assert!(!r.connected);
        assert_eq!(r.witness, Some((0, 1)));
        let g = m_connectivity_graph(&s, &m, &MConnectOptions::default()).unwrap();
        assert!(g.edges.is_empty());
    }

    #[test]
    fn mconnect_small_graphs() {
        let s = Space::linf(2).unwrap();
        let one = cloud(&[&[0., 0.]]);
        assert!(m_connected(&s, &one, &MConnectOptions::default()).unwrap().connected);
        let g = m_connectivity_graph(&s, &one, &MConnectOptions::default()).unwrap();
        assert_eq!((g.vertices, g.edges.len()), (1, 0));
    }

    #[test]
    fn mconnect_rejects_duplicates() {
        let s = Space::linf(2).unwrap();
        let m = cloud(&[&[0., 0.], &[1., 0.], &[0., 0.]]);
        assert!(matches!(
            m_connected(&s, &m, &MConnectOptions::default()),
            Err(Error::DuplicatePoints { first: 0, second: 2 })
        ));
    }

    #[test]
    fn oracle_mode_agrees_on_collinear_triple() {
        let s = Space::linf(2).unwrap();
        let m = cloud(&[&[0., 0.], &[1., 0.], &[2., 0.]]);
        let opts = MConnectOptions { resolution: None, hull: HullMode::Oracle { n_balls: 500, seed: 1 } };
        assert!(m_connected(&s, &m, &opts).unwrap().connected);
    }

    #[test]
    fn grid_size_is_bounded_for_nearly_flat_pairs() {
        let s = Space::linf(2).unwrap();
        let g = HullGrid::for_pair(&s, &[0.0, 0.0], &[1.0, 1e-7], 11).unwrap();
        assert!(g.counts().iter().all(|&c| c <= 2 * 11 + 1), "{:?}", g.counts());
        let g = HullGrid::for_pair(&s, &[0.0, 0.0], &[1.0, 0.06], 11).unwrap();
        assert!(g.counts().iter().all(|&c| c <= 2 * 11 + 1), "{:?}", g.counts());
    }
}
