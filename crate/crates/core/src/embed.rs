//! Coordinate embeddings `s_A(x) = (f(x))_{f ∈ A}` into `ℓ∞(|A|)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{check_dim, Error, Result};
use crate::space::Space;
use crate::vector::{canonical_bits, dot, max_abs};

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EmbeddingDoc {
    source: Space,
    indices: Vec<usize>,
}

/// A map `X → ℓ∞(|A|)` evaluating a selection `A` of representative
/// functionals (indices into [`Space::representatives`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingDoc", into = "EmbeddingDoc")]
pub struct Embedding {
    source: Space,
    selected: Vec<usize>,
    target: Space,
}

impl TryFrom<EmbeddingDoc> for Embedding {
    type Error = Error;
    fn try_from(doc: EmbeddingDoc) -> Result<Self> {
        Embedding::new(doc.source, doc.indices)
    }
}

impl From<Embedding> for EmbeddingDoc {
    fn from(e: Embedding) -> Self {
        EmbeddingDoc {
            source: e.source,
            indices: e.selected,
        }
    }
}

impl Embedding {
    pub fn new(source: Space, selected: Vec<usize>) -> Result<Self> {
        if selected.is_empty() {
            return Err(Error::InvalidParameter("embedding needs at least one functional".into()));
        }
        let mut seen = vec![false; source.pair_count()];
        for &i in &selected {
            match seen.get_mut(i) {
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "functional index {i} out of range (space has {} pairs)",
                        source.pair_count()
                    )))
                }
                Some(true) => return Err(Error::InvalidParameter(format!("functional index {i} repeated"))),
                Some(s) => *s = true,
            }
        }
        let target = Space::linf(selected.len())?;
        Ok(Embedding {
            source,
            selected,
            target,
        })
    }

    /// Every representative, in construction order.
    pub fn full(source: Space) -> Result<Self> {
        let all = (0..source.pair_count()).collect();
        Self::new(source, all)
    }

    /// The first `k` functionals of `order`.
    pub fn prefix(source: Space, order: &[usize], k: usize) -> Result<Self> {
        Self::new(source, order[..k.min(order.len())].to_vec())
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn is_full(&self) -> bool {
        self.selected.len() == self.source.pair_count()
    }

    pub fn embed_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.source.dim(), x)?;
        Ok(self.embed_unchecked(x))
    }

    pub fn embed_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.selected
            .iter()
            .map(|&i| dot(self.source.representative(i), x))
            .collect()
    }

    /// Embeds a cloud, collapsing coincident images onto the first
    /// preimage.
    pub fn embed_cloud(&self, m: &PointCloud) -> Result<EmbeddedCloud> {
        m.check_space(&self.source)?;
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut preimage = Vec::new();
        let mut multiplicity = Vec::new();
        let mut image_of = Vec::with_capacity(m.len());
        let mut seen = std::collections::HashMap::new();
        for (i, p) in m.points().iter().enumerate() {
            let q = self.embed_unchecked(p);
            let key = canonical_bits(&q);
            let slot = *seen.entry(key).or_insert_with(|| {
                points.push(q);
                preimage.push(i);
                multiplicity.push(0usize);
                points.len() - 1
            });
            multiplicity[slot] += 1;
            image_of.push(slot);
        }
        Ok(EmbeddedCloud {
            cloud: PointCloud::new(points)?,
            preimage,
            multiplicity,
            image_of,
        })
    }
}

/// Image of a cloud with collision bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddedCloud {
    pub cloud: PointCloud,
    /// First source index mapped to each image point.
    pub preimage: Vec<usize>,
    pub multiplicity: Vec<usize>,
    /// Image index of every source point.
    pub image_of: Vec<usize>,
}

impl EmbeddedCloud {
    pub fn collisions(&self) -> usize {
        self.multiplicity.iter().map(|m| m - 1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormConvergenceReport {
    pub order: Vec<usize>,
    /// `‖s_{A_k}(x)‖_∞` for `k = 1..=|F|/2`.
    pub values: Vec<f64>,
    pub norm: f64,
    pub nondecreasing: bool,
    /// The full prefix reproduces `‖x‖` exactly.
    pub reaches_norm: bool,
}

/// `‖s_{A_k}(x)‖_∞` along the nested prefixes of `order`.
pub fn norm_convergence(s: &Space, x: &[f64], order: &[usize]) -> Result<NormConvergenceReport> {
    check_dim(s.dim(), x)?;
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidParameter("x must be nonzero".into()));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..s.pair_count()).collect::<Vec<_>>() {
        return Err(Error::InvalidParameter(
            "order must be a permutation of the representative indices".into(),
        ));
    }
    let mut values = Vec::with_capacity(order.len());
    let mut running = 0.0f64;
    for &i in order {
        running = running.max(dot(s.representative(i), x).abs());
        values.push(running);
    }
    let norm = s.norm_unchecked(x);
    debug_assert_eq!(max_abs(&Embedding::full(s.clone())?.embed_unchecked(x)), norm);
    Ok(NormConvergenceReport {
        order: order.to_vec(),
        nondecreasing: values.windows(2).all(|w| w[0] <= w[1]),
        reaches_norm: *values.last().expect("nonempty") == norm,
        values,
        norm,
    })
}

/// The canonical order followed by `orderings - 1` seeded shuffles.
pub fn norm_convergence_check(s: &Space, orderings: usize, x: &[f64], seed: u64) -> Result<Vec<NormConvergenceReport>> {
    if orderings == 0 {
        return Err(Error::InvalidParameter("orderings must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..s.pair_count()).collect();
    let mut out = Vec::with_capacity(orderings);
    for k in 0..orderings {
        if k > 0 {
            order.shuffle(&mut rng);
        }
        out.push(norm_convergence(s, x, &order)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_linf() {
        let e = Embedding::full(Space::linf(3).unwrap()).unwrap();
        assert_eq!(e.embed_point(&[1., -2., 3.]).unwrap(), vec![1., -2., 3.]);
        assert_eq!(e.embed_point(&[0., 0., 0.]).unwrap(), vec![0., 0., 0.]);
        assert!(e.embed_point(&[1., 2.]).is_err());
    }

    #[test]
    fn l1_full_family() {
        let e = Embedding::full(Space::l1(2).unwrap()).unwrap();
        assert_eq!(e.embed_point(&[2., 0.]).unwrap(), vec![2., 2.]);
        let m = PointCloud::new(vec![vec![0., 0.], vec![1., 1.], vec![2., 0.]]).unwrap();
        let img = e.embed_cloud(&m).unwrap();
        assert_eq!(img.cloud.points(), &[vec![0., 0.], vec![2., 0.], vec![2., 2.]]);
        assert_eq!(img.collisions(), 0);
    }

    #[test]
    fn single_pair_collapses() {
        let e = Embedding::new(Space::linf(2).unwrap(), vec![0]).unwrap();
        let m = PointCloud::new(vec![vec![0., 0.], vec![0., 1.], vec![1., 0.]]).unwrap();
        let img = e.embed_cloud(&m).unwrap();
        assert_eq!(img.cloud.len(), 2);
        assert_eq!(img.multiplicity, vec![2, 1]);
        assert_eq!(img.preimage, vec![0, 2]);
        assert_eq!(img.image_of, vec![0, 0, 1]);
        assert_eq!(e.target().dim(), 1);
    }

    #[test]
    fn selection_validated() {
        let s = Space::linf(2).unwrap();
        assert!(Embedding::new(s.clone(), vec![]).is_err());
        assert!(Embedding::new(s.clone(), vec![2]).is_err());
        assert!(Embedding::new(s, vec![1, 1]).is_err());
    }

    #[test]
    fn prefix_norms() {
        let s = Space::linf(3).unwrap();
        let r = norm_convergence(&s, &[1., 2., 3.], &[2, 1, 0]).unwrap();
        assert_eq!(r.values, vec![3., 3., 3.]);
        assert!(r.nondecreasing && r.reaches_norm);

        let l1 = Space::l1(2).unwrap();
        let r = norm_convergence(&l1, &[2., 0.], &[0, 1]).unwrap();
        assert_eq!(r.values, vec![2., 2.]);
        assert!(norm_convergence(&l1, &[0., 0.], &[0, 1]).is_err());
        assert!(norm_convergence(&l1, &[1., 0.], &[0]).is_err());

        let reports = norm_convergence_check(&Space::l1(4).unwrap(), 5, &[0.3, -1.2, 0.7, 2.0], 9).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(reports.iter().all(|r| r.nondecreasing && r.reaches_norm));
    }

    #[test]
    fn json_form() {
        let e: Embedding = serde_json::from_str(
            r#"{"source": {"dim": 2, "functionals": [[1,1],[-1,-1],[1,-1],[-1,1]]}, "indices": [1]}"#,
        )
        .unwrap();
        assert_eq!(e.embed_point(&[2., 0.]).unwrap(), vec![2.]);
    }
}
