use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use sunlab_core::hull::{mei_check, HullOptions, MeiOptions, MeiReport};
use sunlab_core::metric::{
    associated_distance, between_equiv_check, monotone_path, seq_convergence_suite, EquivReport, PathOptions,
    SeqSuiteReport,
};
use sunlab_core::samples::{box_net, staircase_net, two_sheet_grid};
use sunlab_core::{Error, PointCloud, Space, Weights};

use crate::args::VerifyArgs;
use crate::commands::{load_space, load_weights, Outcome};

/// The builtin spaces plus a few seeded random ones.
pub fn default_spaces(seed: u64, random: usize) -> Result<Vec<Space>> {
    let mut spaces = Vec::new();
    for n in 2..=4 {
        spaces.push(Space::linf(n)?);
    }
    for n in 2..=4 {
        spaces.push(Space::l1(n)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for i in 0..random {
        let dim = rng.random_range(2..=3);
        let pairs = dim + rng.random_range(0..=3);
        spaces.push(Space::random(dim, pairs, &mut rng)?.with_name(format!("random{i}({dim},{pairs})")));
    }
    Ok(spaces)
}

fn hull_options(dim: usize) -> MeiOptions {
    MeiOptions {
        n_balls: 1000,
        hull: HullOptions {
            grid_points: match dim {
                0..=2 => 24,
                3 => 12,
                _ => 6,
            },
            ..HullOptions::for_dim(dim)
        },
        // only inclusion is a pass/fail criterion here; the gap is reported
        tolerance_steps: u32::MAX,
        max_violations: 0,
    }
}

/// Outcome of a batch of discrete geodesic searches on one net.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PathBatch {
    pub net: String,
    pub points: usize,
    pub pairs: usize,
    pub found: usize,
    pub within_defect: usize,
    pub monotone: usize,
    pub not_found: usize,
}

impl PathBatch {
    fn all_good(&self) -> bool {
        self.found == self.pairs && self.within_defect == self.pairs && self.monotone == self.pairs
    }
}

/// Runs `monotone_path` between the given index pairs with the default
/// options (sampling-step radius, `eps = 1e-6 |x - y|`, tolerance `1e-6`).
pub fn path_batch(s: &Space, w: &Weights, net: &str, m: &PointCloud, pairs: &[(usize, usize)]) -> Result<PathBatch> {
    let mut b = PathBatch {
        net: net.into(),
        points: m.len(),
        ..Default::default()
    };
    for &(i, j) in pairs {
        b.pairs += 1;
        let (x, y) = (m.point(i), m.point(j));
        match monotone_path(s, w, m, x, y, &PathOptions::default()) {
            Ok(p) => {
                b.found += 1;
                b.within_defect += usize::from(p.defect <= 1e-6 * associated_distance(s, w, x, y));
                b.monotone += usize::from(p.monotone.monotone);
            }
            Err(Error::NotFound { .. }) => b.not_found += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(b)
}

fn random_pairs(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    (0..count)
        .map(|_| {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            (i, j)
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct PathSuite {
    pub box_net: PathBatch,
    pub staircase: PathBatch,
    pub within_sheet: PathBatch,
    pub across_sheets: PathBatch,
}

impl PathSuite {
    pub fn passed(&self) -> bool {
        self.box_net.all_good()
            && self.staircase.all_good()
            && self.within_sheet.all_good()
            && self.across_sheets.not_found == self.across_sheets.pairs
    }
}

/// Discrete geodesics in `ℓ∞(2)` on nets of step 0.05.
pub fn path_suite(pairs: usize, seed: u64) -> Result<PathSuite> {
    let s = Space::linf(2)?;
    let w = Weights::default_for(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let boxed = box_net(&[0.0, 0.0], &[1.0, 1.0], 0.05)?;
    let box_pairs = random_pairs(boxed.len(), pairs, &mut rng);

    let stairs = staircase_net(4, 0.05)?;
    let mut stair_pairs = vec![(0, stairs.len() - 1)];
    stair_pairs.extend(random_pairs(stairs.len(), pairs.saturating_sub(1), &mut rng));

    let sheets = two_sheet_grid(2, 0.05)?;
    let half = sheets.len() / 2;
    let mut within = Vec::new();
    let mut across = Vec::new();
    for _ in 0..pairs {
        let (i, j) = (rng.random_range(0..half), rng.random_range(0..half));
        let j = if i == j { (j + 1) % half } else { j };
        within.push(if rng.random_bool(0.5) { (i, j) } else { (half + i, half + j) });
        across.push((i, half + j));
    }
    Ok(PathSuite {
        box_net: path_batch(&s, &w, "box [0,1]^2, h = 0.05", &boxed, &box_pairs)?,
        staircase: path_batch(&s, &w, "staircase, 4 steps, h = 0.05", &stairs, &stair_pairs)?,
        within_sheet: path_batch(&s, &w, "two sheets, same sheet", &sheets, &within)?,
        across_sheets: path_batch(&s, &w, "two sheets, across", &sheets, &across)?,
    })
}

pub fn cmd_verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    if a.trials == 0 {
        anyhow::bail!("--trials must be at least 1");
    }
    let spaces = match &a.space {
        Some(src) => vec![load_space(src)?],
        None => default_spaces(seed, 4)?,
    };
    let mut equivalence: Vec<EquivReport> = Vec::new();
    let mut hulls: Vec<MeiReport> = Vec::new();
    let mut sequences: Vec<SeqSuiteReport> = Vec::new();
    for (i, s) in spaces.iter().enumerate() {
        let w = load_weights(&a.weights, s)?;
        let sub = seed.wrapping_add(1000 * i as u64);
        equivalence.push(between_equiv_check(s, &w, a.trials, sub)?);
        hulls.push(mei_check(s, (a.trials / 200).max(2), sub + 1, &hull_options(s.dim()))?);
        sequences.push(seq_convergence_suite(s, &w, (a.trials / 50).max(4), 1000, &[1e-3, 1e-6], sub + 2)?);
    }
    let paths = path_suite((a.trials / 100).max(3), seed.wrapping_add(7))?;

    let disagreements: usize = equivalence.iter().map(|r| r.disagreements).sum();
    let inclusion: usize = hulls.iter().map(|r| r.inclusion_violations).sum();
    let seq_disagreements: usize = sequences.iter().map(|r| r.disagreements).sum();
    let passed = disagreements == 0 && inclusion == 0 && seq_disagreements == 0 && paths.passed();
    let summary = vec![
        format!("betweenness equivalence: {disagreements} disagreements over {} spaces", spaces.len()),
        format!("hull inclusion: {inclusion} violations"),
        format!("sequence convergence: {seq_disagreements} verdict disagreements"),
        format!("monotone paths: {}", if paths.passed() { "ok" } else { "FAILED" }),
        format!("verify: {}", if passed { "passed" } else { "FAILED" }),
    ];
    Ok(Outcome {
        result: json!({
            "spaces": spaces.iter().map(|s| s.label()).collect::<Vec<_>>(),
            "equivalence": equivalence,
            "hull_inclusion": hulls,
            "sequences": sequences,
            "paths": paths,
            "passed": passed,
        }),
        falsified: !passed,
        summary,
        figure: None,
    })
}
