//! The associated norm `|x| = Σ α_i |f_i(x)|`, metric betweenness, discrete
//! geodesics, and monotonicity of polylines.
//!
//! For the finite families handled here the associated norm is equivalent
//! to the original one, and `z` is `|·|`-between `x` and `y` exactly when
//! `z ∈ ⟦x,y⟧`: the additivity defect `|x-z| + |z-y| - |x-y|` is a
//! positive combination of the per-functional defects.

use std::collections::BTreeMap;

use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{check_dim, Error, Result};
use crate::hull::interval;
use crate::space::Space;
use crate::vector::{dot, dot_diff, lerp};

/// Default slack for betweenness tests.
pub const BETWEEN_TOL: f64 = 1e-9;

/// Positive coefficients `(α_i)`, one per antipodal pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weights {
    alphas: Vec<f64>,
    #[serde(skip)]
    sum: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// `α_i ∝ 2^{-i}`, normalized to sum 1.
    Geometric,
    /// `α_i = 1/k`.
    Uniform,
}

/// JSON form: `{"alphas": [...]}` or `{"scheme": "geometric" | "uniform"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Explicit { alphas: Vec<f64> },
    Scheme { scheme: WeightScheme },
}

impl WeightsSpec {
    pub fn resolve(&self, s: &Space) -> Result<Weights> {
        let w = match self {
            WeightsSpec::Explicit { alphas } => Weights::new(alphas.clone())?,
            WeightsSpec::Scheme { scheme } => Weights::from_scheme(*scheme, s.pair_count()),
        };
        w.check(s)?;
        Ok(w)
    }
}

impl Weights {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter("weights must be nonempty".into()));
        }
        for (index, &value) in alphas.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let sum = alphas.iter().sum();
        Ok(Weights { alphas, sum })
    }

    pub fn from_scheme(scheme: WeightScheme, pairs: usize) -> Self {
        match scheme {
            WeightScheme::Geometric => Self::geometric(pairs),
            WeightScheme::Uniform => Self::uniform(pairs),
        }
    }

    pub fn geometric(pairs: usize) -> Self {
        let raw: Vec<f64> = (1..=pairs).map(|i| 0.5f64.powi(i as i32)).collect();
        let total: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|a| a / total).collect()).expect("positive weights")
    }

    pub fn uniform(pairs: usize) -> Self {
        Self::new(vec![1.0 / pairs as f64; pairs]).expect("positive weights")
    }

    /// The default weights for a space (geometric).
    pub fn default_for(s: &Space) -> Self {
        Self::geometric(s.pair_count())
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn min(&self) -> f64 {
        self.alphas.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self, s: &Space) -> Result<()> {
        if self.alphas.len() != s.pair_count() {
            return Err(Error::WeightMismatch {
                expected: s.pair_count(),
                found: self.alphas.len(),
            });
        }
        Ok(())
    }
}

/// `|x| = Σ α_i |f_i(x)|` over one representative per antipodal pair.
pub fn associated_norm(s: &Space, w: &Weights, x: &[f64]) -> Result<f64> {
    w.check(s)?;
    check_dim(s.dim(), x)?;
    Ok(s.representatives()
        .zip(w.alphas())
        .map(|(f, a)| a * dot(f, x).abs())
        .sum())
}

/// `|a - b|`, unchecked.
#[inline]
pub fn associated_distance(s: &Space, w: &Weights, a: &[f64], b: &[f64]) -> f64 {
    s.representatives()
        .zip(w.alphas())
        .map(|(f, al)| al * dot_diff(f, a, b).abs())
        .sum()
}

/// `|x-z| + |z-y| - |x-y|`, nonnegative up to rounding.
pub fn between_defect(s: &Space, w: &Weights, x: &[f64], z: &[f64], y: &[f64]) -> Result<f64> {
    w.check(s)?;
    for v in [x, z, y] {
        check_dim(s.dim(), v)?;
    }
    Ok(associated_distance(s, w, x, z) + associated_distance(s, w, z, y) - associated_distance(s, w, x, y))
}

/// `z` lies `|·|`-between `x` and `y` up to `tol`.
pub fn is_between(s: &Space, w: &Weights, x: &[f64], z: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(between_defect(s, w, x, z, y)? <= tol)
}

/// `|f_i(x) - f_i(y)| = |f_i(x) - f_i(z)| + |f_i(z) - f_i(y)|` for every
/// pair, each to within `tol`.
pub fn additive_per_functional(s: &Space, x: &[f64], z: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    for v in [x, z, y] {
        check_dim(s.dim(), v)?;
    }
    Ok(s.representatives().all(|f| {
        let (fx, fz, fy) = (dot(f, x), dot(f, z), dot(f, y));
        (fx - fz).abs() + (fz - fy).abs() - (fx - fy).abs() <= tol
    }))
}

/// A triple on which the three betweenness predicates disagree.
#[derive(Clone, Debug, Serialize)]
pub struct Disagreement {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub in_interval: bool,
    pub per_functional: bool,
    pub associated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivReport {
    pub space: String,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Triples on which all three predicates held.
    pub positives: usize,
    pub disagreements: usize,
    pub examples: Vec<Disagreement>,
}

/// Draws a random triple `(x, z, y)`. `z` is taken, in turn, on the segment
/// `[x,y]`, uniformly from a box around the pair, as a small perturbation
/// of a segment point, or equal to an endpoint; one draw in twenty uses
/// `x = y`.
pub fn random_triple<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> [Vec<f64>; 3] {
    let draw = |r: &mut R| -> Vec<f64> { (0..dim).map(|_| r.random_range(-1.0..=1.0)).collect() };
    let x = draw(rng);
    let y = if rng.random_range(0..20) == 0 { x.clone() } else { draw(rng) };
    let z = match rng.random_range(0..5) {
        0 => lerp(&x, &y, rng.random_range(0.0..=1.0)),
        1 => x.iter()
            .zip(&y)
            .map(|(a, b)| {
                let (lo, hi) = (a.min(*b), a.max(*b));
                let pad = 0.25 * (hi - lo) + 1e-3;
                rng.random_range(lo - pad..=hi + pad)
            })
            .collect(),
        2 => {
            let t = rng.random_range(0.0..=1.0);
            lerp(&x, &y, t)
                .into_iter()
                .map(|v| v + rng.random_range(-0.1..=0.1))
                .collect()
        }
        3 => x.clone(),
        _ => y.clone(),
    };
    [x, z, y]
}

/// Evaluates `z ∈ ⟦x,y⟧`, per-functional additivity, and associated-norm
/// additivity on random triples and counts disagreements.
pub fn between_equiv_check(s: &Space, w: &Weights, trials: usize, seed: u64) -> Result<EquivReport> {
    w.check(s)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivReport {
        space: s.label(),
        trials,
        seed,
        tol: BETWEEN_TOL,
        positives: 0,
        disagreements: 0,
        examples: Vec::new(),
    };
    for _ in 0..trials {
        let [x, z, y] = random_triple(s.dim(), &mut rng);
        let a = interval(s, &x, &y)?.contains_unchecked(&z);
        let b = additive_per_functional(s, &x, &z, &y, BETWEEN_TOL)?;
        let c = is_between(s, w, &x, &z, &y, BETWEEN_TOL)?;
        if a && b && c {
            report.positives += 1;
        }
        if a != b || b != c {
            report.disagreements += 1;
            if report.examples.len() < 16 {
                report.examples.push(Disagreement {
                    x,
                    z,
                    y,
                    in_interval: a,
                    per_functional: b,
                    associated: c,
                });
            }
        }
    }
    Ok(report)
}

/// Which cloud pairs become edges of the betweenness graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum NeighborRadius {
    /// Every pair.
    Complete,
    /// Pairs with `‖u - v‖ ≤ r`.
    Fixed(f64),
    /// `Fixed` at the cloud's [`PointCloud::sampling_step`].
    Auto,
}

impl NeighborRadius {
    fn resolve(self, s: &Space, m: &PointCloud) -> Result<Option<f64>> {
        match self {
            NeighborRadius::Complete => Ok(None),
            NeighborRadius::Fixed(r) if !(r >= 0.0) => {
                Err(Error::InvalidParameter(format!("neighbour radius must be nonnegative, got {r}")))
            }
            NeighborRadius::Fixed(r) => Ok(Some(r)),
            NeighborRadius::Auto => Ok(Some(m.sampling_step(s))),
        }
    }
}

/// Weighted graph on the cloud; edge `(u, v)` carries `|u - v|`.
#[derive(Clone, Debug)]
pub struct BetweennessGraph {
    graph: UnGraph<(), f64>,
    radius: Option<f64>,
}

impl BetweennessGraph {
    pub fn vertex_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Neighbour radius in the original norm; `None` for the complete graph.
    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.graph
            .edge_indices()
            .map(|e| {
                let (a, b) = self.graph.edge_endpoints(e).expect("edge exists");
                (a.index(), b.index(), self.graph[e])
            })
            .collect()
    }

    /// Shortest path from `a` to `b`: total weight and vertex sequence.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<(f64, Vec<usize>)> {
        let goal = NodeIndex::new(b);
        petgraph::algo::astar(&self.graph, NodeIndex::new(a), |n| n == goal, |e| *e.weight(), |_| 0.0)
            .map(|(cost, path)| (cost, path.into_iter().map(|n| n.index()).collect()))
    }
}

pub fn betweenness_graph(s: &Space, w: &Weights, m: &PointCloud, radius: NeighborRadius) -> Result<BetweennessGraph> {
    w.check(s)?;
    m.check_space(s)?;
    m.check_distinct()?;
    let radius = radius.resolve(s, m)?;
    let mut graph = UnGraph::with_capacity(m.len(), 0);
    for _ in 0..m.len() {
        graph.add_node(());
    }
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let (u, v) = (m.point(i), m.point(j));
            if let Some(r) = radius {
                if s.distance_unchecked(u, v) > r * (1.0 + 1e-9) {
                    continue;
                }
            }
            graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), associated_distance(s, w, u, v));
        }
    }
    Ok(BetweennessGraph { graph, radius })
}

/// Direction of `f ∘ k` along a polyline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Constant,
    Nondecreasing,
    Nonincreasing,
    #[serde(rename = "not-monotone")]
    NotMonotone,
}

impl Monotonicity {
    pub fn is_monotone(self) -> bool {
        self != Monotonicity::NotMonotone
    }
}

/// Per-representative verdicts, keyed by pair index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub verdicts: BTreeMap<usize, Monotonicity>,
    pub monotone: bool,
}

/// Checks each `f(p_0), ..., f(p_m)` for monotonicity. A step against the
/// direction passes if it is at most `tol · (1 + |f(p_m) - f(p_0)|)`.
pub fn check_monotone(s: &Space, points: &[Vec<f64>], tol: f64) -> Result<MonotoneReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("path must be nonempty".into()));
    }
    for p in points {
        check_dim(s.dim(), p)?;
    }
    let mut verdicts = BTreeMap::new();
    for (i, f) in s.representatives().enumerate() {
        let values: Vec<f64> = points.iter().map(|p| dot(f, p)).collect();
        let slack = tol * (1.0 + (values[values.len() - 1] - values[0]).abs());
        let up = values.windows(2).all(|w| w[1] - w[0] >= -slack);
        let down = values.windows(2).all(|w| w[1] - w[0] <= slack);
        let v = match (up, down) {
            (true, true) => Monotonicity::Constant,
            (true, false) => Monotonicity::Nondecreasing,
            (false, true) => Monotonicity::Nonincreasing,
            (false, false) => Monotonicity::NotMonotone,
        };
        verdicts.insert(i, v);
    }
    let monotone = verdicts.values().all(|v| v.is_monotone());
    Ok(MonotoneReport { verdicts, monotone })
}

/// A polyline through cloud points.
#[derive(Clone, Debug, Serialize)]
pub struct Path {
    pub points: Vec<Vec<f64>>,
    pub indices: Vec<usize>,
    /// `|·|`-length.
    pub length: f64,
    /// `length - |x - y|`.
    pub defect: f64,
    pub monotone: MonotoneReport,
}

#[derive(Clone, Debug)]
pub struct PathOptions {
    /// Additive length slack; `None` means `1e-6 · |x - y|`.
    pub eps: Option<f64>,
    pub radius: NeighborRadius,
    pub monotone_tol: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            eps: None,
            radius: NeighborRadius::Auto,
            monotone_tol: 1e-6,
        }
    }
}

/// Discrete geodesic from `x` to `y` through the cloud: a shortest path in
/// the betweenness graph, accepted when its length is at most
/// `|x - y| + eps`. `NotFound` carries the best length achieved, so a
/// caller can tell a coarse net from a missing connection.
pub fn monotone_path(
    s: &Space,
    w: &Weights,
    m: &PointCloud,
    x: &[f64],
    y: &[f64],
    opts: &PathOptions,
) -> Result<Path> {
    w.check(s)?;
    check_dim(s.dim(), x)?;
    check_dim(s.dim(), y)?;
    let a = m.position(x).ok_or_else(|| Error::EndpointNotInCloud(x.to_vec()))?;
    let b = m.position(y).ok_or_else(|| Error::EndpointNotInCloud(y.to_vec()))?;
    let direct = associated_distance(s, w, x, y);
    let eps = opts.eps.unwrap_or(1e-6 * direct);
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
    }
    let target = direct + eps;
    let (length, indices) = if a == b {
        m.check_distinct()?;
        (0.0, vec![a])
    } else {
        let graph = betweenness_graph(s, w, m, opts.radius)?;
        match graph.shortest_path(a, b) {
            Some((len, idx)) if len <= target => (len, idx),
            Some((len, _)) => return Err(Error::NotFound { achieved: Some(len), target }),
            None => return Err(Error::NotFound { achieved: None, target }),
        }
    };
    let points: Vec<Vec<f64>> = indices.iter().map(|&i| m.point(i).to_vec()).collect();
    let monotone = check_monotone(s, &points, opts.monotone_tol)?;
    Ok(Path {
        points,
        indices,
        length,
        defect: length - direct,
        monotone,
    })
}

/// Tail behaviour of a finite prefix against a proposed limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeqConvergenceReport {
    pub len: usize,
    pub tol: f64,
    /// 1-based index from which `|x_n - x| ≤ tol` for the rest of the prefix.
    pub norm_settle: Option<usize>,
    /// 1-based index from which `max_i |f_i(x_n) - f_i(x)| ≤ tol`.
    pub functional_settle: Option<usize>,
    pub norm_converged: bool,
    pub functionals_converged: bool,
    /// The two verdicts agree.
    pub agree: bool,
    /// The two settle indices coincide.
    pub same_index: bool,
    pub final_norm_tail: f64,
    pub final_functional_tail: f64,
}

/// Compares `|·|`-convergence with convergence of every `f_i` on a finite
/// prefix. A criterion counts as converged when it settles below `tol`
/// no later than the start of the last quarter of the prefix.
pub fn seq_convergence_check(
    s: &Space,
    w: &Weights,
    sequence: &[Vec<f64>],
    limit: &[f64],
    tol: f64,
) -> Result<SeqConvergenceReport> {
    w.check(s)?;
    check_dim(s.dim(), limit)?;
    if sequence.is_empty() {
        return Err(Error::InvalidParameter("sequence must be nonempty".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut norm_dist = Vec::with_capacity(sequence.len());
    let mut func_dist = Vec::with_capacity(sequence.len());
    for x in sequence {
        check_dim(s.dim(), x)?;
        norm_dist.push(associated_distance(s, w, x, limit));
        func_dist.push(s.representatives().fold(0.0f64, |m, f| m.max(dot_diff(f, x, limit).abs())));
    }
    let settle = |d: &[f64]| -> (Option<usize>, f64) {
        let mut tail = 0.0f64;
        let mut first = None;
        for i in (0..d.len()).rev() {
            tail = tail.max(d[i]);
            if tail <= tol {
                first = Some(i + 1);
            }
        }
        (first, d.iter().rev().take((d.len() / 4).max(1)).cloned().fold(0.0, f64::max))
    };
    let (norm_settle, final_norm_tail) = settle(&norm_dist);
    let (functional_settle, final_functional_tail) = settle(&func_dist);
    let n = sequence.len();
    let window = (n / 4).max(1);
    let converged = |s: Option<usize>| s.is_some_and(|i| n + 1 - i >= window);
    let norm_converged = converged(norm_settle);
    let functionals_converged = converged(functional_settle);
    Ok(SeqConvergenceReport {
        len: n,
        tol,
        norm_settle,
        functional_settle,
        norm_converged,
        functionals_converged,
        agree: norm_converged == functionals_converged,
        same_index: norm_settle == functional_settle,
        final_norm_tail,
        final_functional_tail,
    })
}

/// Kind of sequence drawn by [`random_sequence`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// `x_n = L + c ρ^n u_n` with `ρ ∈ [0.5, 0.95]`.
    Geometric,
    /// Arbitrary terms up to some index, then exactly `L`.
    EventuallyConstant,
    /// `‖x_n - L‖ = c ≥ 1` with wandering direction.
    Stagnating,
    /// Converges geometrically to a point at distance `≥ 1` from `L`.
    WrongLimit,
}

/// A random finite sequence with a proposed limit `L ∈ [-1, 1]^n`.
///
/// The four kinds keep the tail either far below `1e-9` or at norm at
/// least 1, so tolerance-based verdicts are not borderline for any
/// tolerance in between.
pub fn random_sequence<R: Rng + ?Sized>(s: &Space, len: usize, rng: &mut R) -> (SequenceKind, Vec<Vec<f64>>, Vec<f64>) {
    let n = s.dim();
    let unit = |r: &mut R| -> Vec<f64> {
        loop {
            let u: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..=1.0)).collect();
            let norm = s.norm_unchecked(&u);
            if norm > 1e-3 {
                return u.into_iter().map(|v| v / norm).collect();
            }
        }
    };
    let limit: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let kind = match rng.random_range(0..4) {
        0 => SequenceKind::Geometric,
        1 => SequenceKind::EventuallyConstant,
        2 => SequenceKind::Stagnating,
        _ => SequenceKind::WrongLimit,
    };
    let c = rng.random_range(1.0..=2.0);
    let rho: f64 = rng.random_range(0.5..=0.95);
    let cut = rng.random_range(1..=len.div_ceil(2).max(1));
    let offset: Vec<f64> = unit(rng).into_iter().map(|v| c * v).collect();
    let seq = (1..=len)
        .map(|k| {
            let u = unit(rng);
            let (centre, radius) = match kind {
                SequenceKind::Geometric => (limit.clone(), c * rho.powi(k as i32)),
                SequenceKind::EventuallyConstant if k < cut => (limit.clone(), c),
                SequenceKind::EventuallyConstant => (limit.clone(), 0.0),
                SequenceKind::Stagnating => (limit.clone(), c),
                SequenceKind::WrongLimit => {
                    (limit.iter().zip(&offset).map(|(a, b)| a + b).collect(), rho.powi(k as i32))
                }
            };
            centre.iter().zip(&u).map(|(a, b)| a + radius * b).collect()
        })
        .collect();
    (kind, seq, limit)
}

/// Verdict agreement of [`seq_convergence_check`] over random sequences.
#[derive(Clone, Debug, Serialize)]
pub struct SeqSuiteReport {
    pub space: String,
    pub sequences: usize,
    pub len: usize,
    pub tolerances: Vec<f64>,
    pub seed: u64,
    pub checks: usize,
    pub disagreements: usize,
    pub converged: usize,
}

pub fn seq_convergence_suite(
    s: &Space,
    w: &Weights,
    sequences: usize,
    len: usize,
    tolerances: &[f64],
    seed: u64,
) -> Result<SeqSuiteReport> {
    if sequences == 0 || len == 0 || tolerances.is_empty() {
        return Err(Error::InvalidParameter("sequence suite needs sequences, a length and tolerances".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SeqSuiteReport {
        space: s.label(),
        sequences,
        len,
        tolerances: tolerances.to_vec(),
        seed,
        checks: 0,
        disagreements: 0,
        converged: 0,
    };
    for _ in 0..sequences {
        let (_, seq, limit) = random_sequence(s, len, &mut rng);
        for &tol in tolerances {
            let r = seq_convergence_check(s, w, &seq, &limit, tol)?;
            report.checks += 1;
            report.disagreements += usize::from(!r.agree);
            report.converged += usize::from(r.norm_converged);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[&[f64]]) -> PointCloud {
        PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn associated_norm_examples() {
        let linf = Space::linf(2).unwrap();
        let ones = Weights::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(associated_norm(&linf, &ones, &[3., -4.]).unwrap(), 7.0);
        assert_eq!(associated_norm(&linf, &Weights::default_for(&linf), &[0., 0.]).unwrap(), 0.0);
        let l1 = Space::l1(2).unwrap();
        let w = Weights::new(vec![0.5, 0.25]).unwrap();
        assert_eq!(associated_norm(&l1, &w, &[2., 0.]).unwrap(), 1.5);
        assert!(matches!(
            associated_norm(&l1, &Weights::uniform(3), &[1., 1.]),
            Err(Error::WeightMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn weight_schemes() {
        let g = Weights::geometric(3);
        assert!((g.sum() - 1.0).abs() < 1e-15);
        assert!((g.alphas()[0] - 4.0 / 7.0).abs() < 1e-15);
        assert_eq!(Weights::uniform(4).alphas(), &[0.25; 4]);
        assert!(matches!(Weights::new(vec![1.0, 0.0]), Err(Error::InvalidWeight { index: 1, .. })));
        let spec: WeightsSpec = serde_json::from_str(r#"{"scheme": "uniform"}"#).unwrap();
        assert_eq!(spec.resolve(&Space::linf(2).unwrap()).unwrap(), Weights::uniform(2));
        let spec: WeightsSpec = serde_json::from_str(r#"{"alphas": [0.5, 0.25]}"#).unwrap();
        assert_eq!(spec.resolve(&Space::l1(2).unwrap()).unwrap().alphas(), &[0.5, 0.25]);
        assert!(spec.resolve(&Space::linf(3).unwrap()).is_err());
    }

    #[test]
    fn betweenness_examples() {
        let s = Space::linf(2).unwrap();
        let w = Weights::new(vec![1.0, 1.0]).unwrap();
        assert!(is_between(&s, &w, &[0., 0.], &[1., 0.5], &[2., 1.], BETWEEN_TOL).unwrap());
        assert!(!is_between(&s, &w, &[0., 0.], &[0., 5.], &[2., 1.], BETWEEN_TOL).unwrap());
        assert_eq!(between_defect(&s, &w, &[0., 0.], &[0., 5.], &[2., 1.]).unwrap(), 8.0);
        assert!(is_between(&s, &w, &[0.3, 0.1], &[0.3, 0.1], &[-2., 7.], BETWEEN_TOL).unwrap());
        assert!(is_between(&s, &w, &[0., 0.], &[1., 1.], &[2., 1.], 0.0).is_err());
    }

    #[test]
    fn graph_examples() {
        let s = Space::linf(2).unwrap();
        let w = Weights::new(vec![1.0, 1.0]).unwrap();
        let line = cloud(&[&[0., 0.], &[1., 0.], &[2., 0.]]);
        let g = betweenness_graph(&s, &w, &line, NeighborRadius::Complete).unwrap();
        let mut weights: Vec<f64> = g.edges().iter().map(|e| e.2).collect();
        weights.sort_by(f64::total_cmp);
        assert_eq!(weights, vec![1., 1., 2.]);

        let square = cloud(&[&[0., 0.], &[1., 0.], &[1., 1.], &[0., 1.]]);
        let g = betweenness_graph(&s, &w, &square, NeighborRadius::Complete).unwrap();
        let mut weights: Vec<f64> = g.edges().iter().map(|e| e.2).collect();
        weights.sort_by(f64::total_cmp);
        assert_eq!(weights, vec![1., 1., 1., 1., 2., 2.]);

        let single = cloud(&[&[0., 0.]]);
        let g = betweenness_graph(&s, &w, &single, NeighborRadius::Auto).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));

        let g = betweenness_graph(&s, &w, &line, NeighborRadius::Auto).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn path_through_middle() {
        let s = Space::linf(2).unwrap();
        let w = Weights::new(vec![1.0, 1.0]).unwrap();
        let line = cloud(&[&[0., 0.], &[1., 0.], &[2., 0.]]);
        for radius in [NeighborRadius::Complete, NeighborRadius::Auto] {
            let opts = PathOptions { radius, ..Default::default() };
            let p = monotone_path(&s, &w, &line, &[0., 0.], &[2., 0.], &opts).unwrap();
            assert_eq!(p.length, 2.0);
            assert!(p.monotone.monotone);
            if radius == NeighborRadius::Auto {
                assert_eq!(p.indices, vec![0, 1, 2]);
            }
        }
        let p = monotone_path(&s, &w, &line, &[1., 0.], &[1., 0.], &PathOptions::default()).unwrap();
        assert_eq!((p.length, p.indices.len()), (0.0, 1));
    }

    #[test]
    fn path_direct_edge_in_complete_graph() {
        let s = Space::linf(2).unwrap();
        let w = Weights::new(vec![1.0, 1.0]).unwrap();
        let m = cloud(&[&[0., 0.], &[1., 1.], &[2., 0.]]);
        let opts = PathOptions { eps: Some(1e-9), radius: NeighborRadius::Complete, ..Default::default() };
        let p = monotone_path(&s, &w, &m, &[0., 0.], &[2., 0.], &opts).unwrap();
        assert_eq!(p.indices, vec![0, 2]);
        assert_eq!(p.length, 2.0);
    }

    #[test]
    fn path_errors() {
        let s = Space::linf(2).unwrap();
        let w = Weights::default_for(&s);
        let two = cloud(&[&[0., 0.], &[1., 1.]]);
        assert!(matches!(
            monotone_path(&s, &w, &two, &[0., 0.], &[1., 1.], &PathOptions::default()),
            Err(Error::NotFound { achieved: None, .. })
        ));
        assert!(matches!(
            monotone_path(&s, &w, &two, &[0., 0.], &[5., 5.], &PathOptions::default()),
            Err(Error::EndpointNotInCloud(_))
        ));
        let detour = cloud(&[&[0., 0.], &[1., 1.], &[2., 0.]]);
        let opts = PathOptions { radius: NeighborRadius::Fixed(1.0), ..Default::default() };
        match monotone_path(&s, &w, &detour, &[0., 0.], &[2., 0.], &opts) {
            Err(Error::NotFound { achieved: Some(len), target }) => assert!(len > target),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn monotone_examples() {
        let linf = Space::linf(2).unwrap();
        let pts = |v: &[[f64; 2]]| v.iter().map(|p| p.to_vec()).collect::<Vec<_>>();
        let straight = pts(&[[0., 0.], [1., 0.], [2., 0.]]);
        let r = check_monotone(&linf, &straight, 1e-9).unwrap();
        assert!(r.monotone);
        assert_eq!(r.verdicts[&0], Monotonicity::Nondecreasing);
        assert_eq!(r.verdicts[&1], Monotonicity::Constant);

        let tent = pts(&[[0., 0.], [1., 1.], [2., 0.]]);
        let r = check_monotone(&linf, &tent, 1e-9).unwrap();
        assert!(!r.monotone);
        assert_eq!(r.verdicts[&1], Monotonicity::NotMonotone);

        let l1 = Space::l1(2).unwrap();
        let r = check_monotone(&l1, &tent, 1e-9).unwrap();
        assert!(r.monotone);
        assert_eq!(r.verdicts[&0], Monotonicity::Nondecreasing);
        assert_eq!(r.verdicts[&1], Monotonicity::Nondecreasing);

        assert!(check_monotone(&l1, &[], 1e-9).is_err());
    }

    #[test]
    fn convergence_examples() {
        let s = Space::linf(2).unwrap();
        let w = Weights::default_for(&s);
        let zero = [0.0, 0.0];
        let seq: Vec<Vec<f64>> = (1..=10_000)
            .map(|n| {
                let n = n as f64;
                vec![1.0 / n, if n as u64 % 2 == 0 { 1.0 } else { -1.0 } / n]
            })
            .collect();
        let r = seq_convergence_check(&s, &w, &seq, &zero, 1e-3).unwrap();
        assert!(r.norm_converged && r.functionals_converged && r.agree);

        let constant = vec![vec![0.5, 0.25]; 10];
        let r = seq_convergence_check(&s, &w, &constant, &[0.5, 0.25], 1e-6).unwrap();
        assert_eq!((r.norm_settle, r.functional_settle), (Some(1), Some(1)));
        assert!(r.norm_converged && r.same_index);

        let stuck: Vec<Vec<f64>> = (1..=1000).map(|n| vec![1.0, 1.0 / n as f64]).collect();
        let r = seq_convergence_check(&s, &w, &stuck, &zero, 1e-3).unwrap();
        assert!(!r.norm_converged && !r.functionals_converged && r.agree);
        assert!(r.final_functional_tail >= 1.0);
        assert!(r.final_norm_tail >= w.alphas()[0]);
    }

    #[test]
    fn equivalence_on_builtins() {
        for s in [Space::linf(3).unwrap(), Space::l1(2).unwrap()] {
            let w = Weights::default_for(&s);
            let r = between_equiv_check(&s, &w, 10_000, 1).unwrap();
            assert_eq!(r.disagreements, 0, "{r:?}");
            assert!(r.positives > 1000);
        }
    }

    #[test]
    fn random_sequences_agree() {
        for s in [Space::linf(3).unwrap(), Space::l1(4).unwrap()] {
            let w = Weights::default_for(&s);
            let r = seq_convergence_suite(&s, &w, 40, 400, &[1e-3, 1e-6], 3).unwrap();
            assert_eq!(r.disagreements, 0, "{r:?}");
            assert!(r.converged > 0 && r.converged < r.checks);
        }
    }
}
