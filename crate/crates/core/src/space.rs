//! Polyhedral normed spaces given by a finite symmetric family of dual
//! functionals.
//!
//! A [`Space`] stores the functionals `F = (f_1, ..., f_k)` of the dual unit
//! sphere that are extreme in the dual ball. The norm is the James-boundary
//! maximum `‖x‖ = max_{f ∈ F} f(x)`. Since `F = -F`, every functional has an
//! antipode; one member of each antipodal pair is fixed as the pair's
//! *representative*, and all per-pair computations (intervals, the associated
//! norm, embeddings) run over the representatives only.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vector::{canonical_bits, dot, dot_diff, negated};

/// Default cap on the number of functionals a builtin may allocate.
pub const DEFAULT_FUNCTIONAL_BUDGET: usize = 1 << 20;

/// Default absolute slack for closed-ball membership.
pub const BALL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpaceDoc {
    dim: usize,
    functionals: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// A finite-dimensional normed space with a polyhedral norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceDoc", into = "SpaceDoc")]
pub struct Space {
    dim: usize,
    functionals: Vec<Vec<f64>>,
    name: Option<String>,
    /// Index (into `functionals`) of each antipodal pair's representative.
    reps: Vec<usize>,
    antipode: Vec<usize>,
}

impl TryFrom<SpaceDoc> for Space {
    type Error = Error;

    fn try_from(doc: SpaceDoc) -> Result<Self> {
        if let Some(f) = doc.functionals.first() {
            if f.len() != doc.dim {
                return Err(Error::DimensionMismatch {
                    expected: doc.dim,
                    found: f.len(),
                });
            }
        }
        let mut s = Space::new(doc.functionals)?;
        s.name = doc.name;
        Ok(s)
    }
}

impl From<Space> for SpaceDoc {
    fn from(s: Space) -> Self {
        SpaceDoc {
            dim: s.dim,
            functionals: s.functionals,
            name: s.name,
        }
    }
}

fn lex_positive(f: &[f64]) -> bool {
    f.iter().find(|x| **x != 0.0).is_some_and(|x| *x > 0.0)
}

impl Space {
    /// Validates a functional family and builds the space.
    ///
    /// The family must be nonempty, of uniform dimension, free of duplicates
    /// and zero vectors, closed under negation, and must span the whole
    /// space. For a symmetric family the last condition is equivalent to
    /// `max_f f(x) > 0` for every `x ≠ 0`: if all `f(x) ≤ 0` then also all
    /// `-f(x) ≤ 0`, so `x` is orthogonal to the family.
    pub fn new(functionals: Vec<Vec<f64>>) -> Result<Self> {
        let dim = functionals.first().ok_or(Error::EmptyFamily)?.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut index: HashMap<Vec<u64>, usize> = HashMap::with_capacity(functionals.len());
        for (i, f) in functionals.iter().enumerate() {
            check_dim(dim, f)?;
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
            if f.iter().all(|x| *x == 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "functional #{i} is the zero vector"
                )));
            }
            if let Some(&first) = index.get(&canonical_bits(f)) {
                return Err(Error::DuplicateFunctional { first, second: i });
            }
            index.insert(canonical_bits(f), i);
        }

        let mut antipode = vec![0; functionals.len()];
        for (i, f) in functionals.iter().enumerate() {
            match index.get(&canonical_bits(&negated(f))) {
                Some(&j) => antipode[i] = j,
                None => return Err(Error::NotSymmetric { index: i }),
            }
        }

        let mut reps = Vec::with_capacity(functionals.len() / 2);
        for (i, f) in functionals.iter().enumerate() {
            if lex_positive(f) {
                reps.push((i.min(antipode[i]), i));
            }
        }
        reps.sort_unstable();
        let reps: Vec<usize> = reps.into_iter().map(|(_, i)| i).collect();

        let rank = rank_of(dim, reps.iter().map(|&i| functionals[i].as_slice()));
        if rank < dim {
            return Err(Error::Degenerate { rank, dim });
        }

        Ok(Space {
            dim,
            functionals,
            name: None,
            reps,
            antipode,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(crate::cloud::json_error)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// A builtin name such as `linf2` or `l1(3)`, or else a JSON file.
    pub fn resolve(source: &str) -> Result<Self> {
        match parse_builtin(source) {
            Ok((kind, n)) => builtin(kind, n, DEFAULT_FUNCTIONAL_BUDGET),
            Err(_) => Self::load(std::path::Path::new(source)),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// `ℓ∞(n)`: the coordinate functionals `±e_i`.
    pub fn linf(n: usize) -> Result<Self> {
        builtin(Builtin::Linf, n, DEFAULT_FUNCTIONAL_BUDGET)
    }

    /// `ℓ¹(n)`: all `2^n` sign vectors.
    pub fn l1(n: usize) -> Result<Self> {
        builtin(Builtin::L1, n, DEFAULT_FUNCTIONAL_BUDGET)
    }

    /// A random polyhedral space whose `pairs` representative functionals
    /// are drawn uniformly from the Euclidean unit sphere. Points of a
    /// strictly convex sphere are in convex position, so every functional
    /// is an extreme point of the dual ball.
    pub fn random<R: Rng + ?Sized>(dim: usize, pairs: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 || pairs < dim {
            return Err(Error::InvalidParameter(format!(
                "random space needs dim ≥ 1 and pairs ≥ dim (got dim {dim}, pairs {pairs})"
            )));
        }
        if dim == 1 && pairs > 1 {
            return Err(Error::InvalidParameter(
                "a one-dimensional space has exactly one antipodal pair of unit functionals".into(),
            ));
        }
        loop {
            let mut functionals = Vec::with_capacity(2 * pairs);
            for _ in 0..pairs {
                let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                let len = dot(&g, &g).sqrt();
                if len < 1e-6 {
                    continue;
                }
                let f: Vec<f64> = g.iter().map(|x| x / len).collect();
                functionals.push(negated(&f));
                functionals.push(f);
            }
            if functionals.len() != 2 * pairs {
                continue;
            }
            if let Ok(s) = Space::new(functionals) {
                return Ok(s.with_name(format!("random{dim}x{pairs}")));
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Display label: the name if set, else a summary.
    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("polyhedral({}; {} functionals)", self.dim, self.functionals.len()))
    }

    pub fn functionals(&self) -> &[Vec<f64>] {
        &self.functionals
    }

    pub fn antipode(&self, index: usize) -> usize {
        self.antipode[index]
    }

    /// Number of antipodal pairs.
    pub fn pair_count(&self) -> usize {
        self.reps.len()
    }

    /// Indices (into [`Space::functionals`]) of the pair representatives,
    /// in construction order.
    pub fn representative_indices(&self) -> &[usize] {
        &self.reps
    }

    /// Representative functionals, in construction order.
    pub fn representatives(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.reps.iter().map(move |&i| self.functionals[i].as_slice())
    }

    pub fn representative(&self, pair: usize) -> &[f64] {
        &self.functionals[self.reps[pair]]
    }

    /// `‖x‖ = max_{f ∈ F} f(x)`.
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x)?;
        Ok(self.norm_unchecked(x))
    }

    /// Norm without the dimension check. `-f(x)` is exactly `-(f(x))` in
    /// floating point, so the maximum over representatives of `|f(x)|`
    /// equals the maximum over the whole family.
    #[inline]
    pub fn norm_unchecked(&self, x: &[f64]) -> f64 {
        self.representatives()
            .fold(0.0, |m, f| m.max(dot(f, x).abs()))
    }

    /// `‖a - b‖`.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dim(self.dim, a)?;
        check_dim(self.dim, b)?;
        Ok(self.distance_unchecked(a, b))
    }

    #[inline]
    pub fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        self.representatives()
            .fold(0.0, |m, f| m.max(dot_diff(f, a, b).abs()))
    }

    /// Values `f_i(x)` of the representatives.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x)?;
        Ok(self.representatives().map(|f| dot(f, x)).collect())
    }

    /// Upper bounds `b_i ≥ max{|x_i| : ‖x‖ ≤ 1}` per coordinate axis.
    ///
    /// For any `n` independent representatives `G`, `|g(x)| ≤ ‖x‖` for each
    /// row, so `x = G⁻¹ (G x)` gives `|x_i| ≤ Σ_j |(G⁻¹)_ij| ‖x‖`. The bound
    /// is minimized over all `n`-subsets when there are few of them and over
    /// a greedy basis otherwise. It is tight for `ℓ∞(n)` and `ℓ¹(n)`.
    pub fn unit_ball_axis_bounds(&self) -> Vec<f64> {
        const MAX_SUBSETS: u128 = 4096;
        let n = self.dim;
        let k = self.pair_count();
        let mut best = vec![f64::INFINITY; n];
        let mut consider = |subset: &[usize]| {
            let m = DMatrix::from_fn(n, n, |r, c| self.representative(subset[r])[c]);
            if let Some(inv) = m.try_inverse() {
                for (i, b) in best.iter_mut().enumerate() {
                    let row: f64 = (0..n).map(|j| inv[(i, j)].abs()).sum();
                    if row.is_finite() {
                        *b = b.min(row);
                    }
                }
            }
        };
        if binomial(k, n) <= MAX_SUBSETS {
            let mut subset: Vec<usize> = (0..n).collect();
            loop {
                consider(&subset);
                if !next_combination(&mut subset, k) {
                    break;
                }
            }
        } else {
            let mut basis = Vec::with_capacity(n);
            for p in 0..k {
                basis.push(p);
                if rank_of(n, basis.iter().map(|&i| self.representative(i))) < basis.len() {
                    basis.pop();
                }
                if basis.len() == n {
                    break;
                }
            }
            consider(&basis);
        }
        best
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Validated constructor (free-function form of [`Space::new`]).
pub fn make_space(functionals: Vec<Vec<f64>>) -> Result<Space> {
    Space::new(functionals)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Linf,
    L1,
}

impl Builtin {
    pub fn as_str(self) -> &'static str {
        match self {
            Builtin::Linf => "linf",
            Builtin::L1 => "l1",
        }
    }
}

/// Builds `ℓ∞(n)` or `ℓ¹(n)`, refusing families larger than `budget`.
///
/// Functional order: `ℓ∞(n)` lists `e_1, -e_1, e_2, -e_2, ...`; `ℓ¹(n)`
/// lists the sign vectors with first entry `+1` in binary order (last
/// coordinate flipping fastest), followed by their negations.
pub fn builtin(kind: Builtin, n: usize, budget: usize) -> Result<Space> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let functionals = match kind {
        Builtin::Linf => {
            let needed = 2 * n as u128;
            if needed > budget as u128 {
                return Err(Error::TooLarge {
                    name: kind.as_str().into(),
                    dim: n,
                    needed,
                    budget,
                });
            }
            let mut fs = Vec::with_capacity(2 * n);
            for i in 0..n {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                fs.push(e.clone());
                e[i] = -1.0;
                fs.push(e);
            }
            fs
        }
        Builtin::L1 => {
            let needed = if n >= 127 { u128::MAX } else { 1u128 << n };
            if needed > budget as u128 {
                return Err(Error::TooLarge {
                    name: kind.as_str().into(),
                    dim: n,
                    needed,
                    budget,
                });
            }
            let half = 1usize << (n - 1);
            let mut positive = Vec::with_capacity(half);
            for mask in 0..half {
                let mut f = vec![1.0; n];
                for (j, fj) in f.iter_mut().enumerate().skip(1) {
                    if mask >> (n - 1 - j) & 1 == 1 {
                        *fj = -1.0;
                    }
                }
                positive.push(f);
            }
            let negatives: Vec<Vec<f64>> = positive.iter().map(|f| negated(f)).collect();
            positive.into_iter().chain(negatives).collect()
        }
    };
    Ok(Space::new(functionals)?.with_name(format!("{}({n})", kind.as_str())))
}

/// Parses builtin names such as `linf2`, `l1_3`, `linf(4)` or `l1:2`.
pub fn parse_builtin(spec: &str) -> Result<(Builtin, usize)> {
    let lower = spec.trim().to_ascii_lowercase();
    let (kind, rest) = if let Some(rest) = lower.strip_prefix("linf") {
        (Builtin::Linf, rest)
    } else if let Some(rest) = lower.strip_prefix("l1") {
        (Builtin::L1, rest)
    } else {
        return Err(Error::UnknownBuiltin(spec.into()));
    };
    let digits = rest.trim_matches(|c: char| matches!(c, '_' | ':' | '(' | ')' | '-'));
    let n = digits
        .parse::<usize>()
        .map_err(|_| Error::UnknownBuiltin(spec.into()))?;
    Ok((kind, n))
}

/// A closed ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be finite and nonnegative, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    /// `‖x - center‖ ≤ radius + tol`.
    pub fn contains(&self, s: &Space, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(s.dim(), &self.center)?;
        check_dim(s.dim(), x)?;
        Ok(s.distance_unchecked(x, &self.center) <= self.radius + tol)
    }
}

/// Membership in a closed ball with the default tolerance.
pub fn ball_contains(b: &Ball, s: &Space, x: &[f64]) -> Result<bool> {
    b.contains(s, x, BALL_TOL)
}

fn rank_of<'a>(dim: usize, rows: impl Iterator<Item = &'a [f64]>) -> usize {
    let rows: Vec<&[f64]> = rows.collect();
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = top * 1e-12 * rows.len().max(dim) as f64;
    sv.iter().filter(|&&s| s > cutoff).count()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
