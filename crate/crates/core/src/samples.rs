//! Lattice samples of simple sets, used as test clouds.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Number of intervals of length at most `h` covering `[0, len]`.
fn segments(len: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    Ok(((len / h) - 1e-12).ceil().max(1.0) as usize)
}

/// All tuples `(i_1, ..., i_n)` with `0 ≤ i_k ≤ counts[k]`, last index fastest.
fn lattice(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in counts {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=c).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Grid of the box `[lo, hi]` with spacing at most `h` on every axis.
pub fn box_net(lo: &[f64], hi: &[f64], h: f64) -> Result<PointCloud> {
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(Error::InvalidParameter("box corners must have equal, nonzero dimension".into()));
    }
    let counts = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| if b > a { segments(b - a, h) } else { Ok(0) })
        .collect::<Result<Vec<_>>>()?;
    let points = lattice(&counts)
        .into_iter()
        .map(|idx| {
            idx.iter()
                .enumerate()
                .map(|(k, &i)| if counts[k] == 0 { lo[k] } else { lo[k] + (hi[k] - lo[k]) * i as f64 / counts[k] as f64 })
                .collect()
        })
        .collect();
    PointCloud::new(points)
}

/// A planar staircase from `(0,0)` to `(1,1)` with `stairs` right-then-up
/// steps, sampled with spacing at most `h`.
pub fn staircase_net(stairs: usize, h: f64) -> Result<PointCloud> {
    if stairs == 0 {
        return Err(Error::InvalidParameter("staircase needs at least one step".into()));
    }
    let per = segments(1.0 / stairs as f64, h)?;
    let total = stairs * per;
    // walk on the integer lattice of mesh 1/total, then rescale
    let (mut i, mut j) = (0usize, 0usize);
    let mut points = vec![vec![0.0, 0.0]];
    for _ in 0..stairs {
        for _ in 0..per {
            i += 1;
            points.push(vec![i as f64 / total as f64, j as f64 / total as f64]);
        }
        for _ in 0..per {
            j += 1;
            points.push(vec![i as f64 / total as f64, j as f64 / total as f64]);
        }
    }
    PointCloud::new(points)
}

/// The sheets `{x_1 = 1}` and `{x_1 = 2}` of `ℓ∞(q)`, with the remaining
/// coordinates on a grid of `[0, 1]^{q-1}` of spacing at most `h`.
pub fn two_sheet_grid(q: usize, h: f64) -> Result<PointCloud> {
    if q < 2 {
        return Err(Error::InvalidParameter("two-sheet grid needs dimension at least 2".into()));
    }
    let c = segments(1.0, h)?;
    let rest = lattice(&vec![c; q - 1]);
    let points = [1.0, 2.0]
        .iter()
        .flat_map(|&x1| {
            rest.iter().map(move |idx| {
                std::iter::once(x1)
                    .chain(idx.iter().map(|&i| i as f64 / c as f64))
                    .collect()
            })
        })
        .collect();
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn box_net_spacing() {
        let m = box_net(&[0., 0.], &[1., 0.5], 0.05).unwrap();
        assert_eq!(m.len(), 21 * 11);
        assert!((m.sampling_step(&Space::linf(2).unwrap()) - 0.05).abs() < 1e-12);
        assert_eq!(box_net(&[0., 1.], &[1., 1.], 0.5).unwrap().len(), 3);
        assert!(box_net(&[0.], &[1.], 0.0).is_err());
    }

    #[test]
    fn staircase_shape() {
        let m = staircase_net(4, 0.05).unwrap();
        assert_eq!(m.len(), 1 + 2 * 4 * 5);
        assert_eq!(m.point(0), &[0., 0.]);
        assert_eq!(m.point(m.len() - 1), &[1., 1.]);
        m.check_distinct().unwrap();
    }

    #[test]
    fn two_sheets() {
        let m = two_sheet_grid(3, 0.5).unwrap();
        assert_eq!(m.len(), 2 * 9);
        assert!(m.points().iter().all(|p| p[0] == 1.0 || p[0] == 2.0));
        m.check_distinct().unwrap();
    }
}
