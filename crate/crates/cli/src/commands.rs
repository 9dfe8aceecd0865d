use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use sunlab_core::approx::{is_sun_sampled, project, random_queries, QueryOutcome, SunParams};
use sunlab_core::hull::{
    ball_hull_outer_with, default_grid_points, interval, m_connected, m_connectivity_graph, HullMode, HullOptions,
    HullReport, MConnectOptions,
};
use sunlab_core::metric::{monotone_path, NeighborRadius, PathOptions, WeightsSpec};
use sunlab_core::{Embedding, Error, PointCloud, Space, Weights};

use crate::args::{
    EmbedArgs, HullArgs, HullChoice, IntervalArgs, MconnectArgs, PathArgs, ProjectArgs, Radius, SunArgs,
};
use crate::svg::{Figure, BLACK, BLUE, GREEN, GREY, RED};

/// What a command hands back to the driver.
pub struct Outcome {
    pub result: Value,
    pub falsified: bool,
    pub summary: Vec<String>,
    /// Present only for planar inputs.
    pub figure: Option<Figure>,
}

pub fn load_space(source: &str) -> Result<Space> {
    Space::resolve(source).with_context(|| format!("loading space {source:?}"))
}

pub fn load_cloud(path: &Path) -> Result<PointCloud> {
    PointCloud::load(path).with_context(|| format!("loading cloud {}", path.display()))
}

/// `geometric`, `uniform`, a comma list of coefficients, or a JSON file.
pub fn load_weights(spec: &str, s: &Space) -> Result<Weights> {
    let w = match spec {
        "geometric" => Weights::geometric(s.pair_count()),
        "uniform" => Weights::uniform(s.pair_count()),
        _ if spec.split(',').all(|t| t.trim().parse::<f64>().is_ok()) => {
            Weights::new(spec.split(',').map(|t| t.trim().parse().expect("checked")).collect())?
        }
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading weights {path:?}"))?;
            let parsed: WeightsSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            parsed.resolve(s)?
        }
    };
    w.check(s)?;
    Ok(w)
}

fn planar(s: &Space) -> Option<Figure> {
    (s.dim() == 2).then(Figure::default)
}

fn cloud_dots(fig: &mut Figure, m: &PointCloud) {
    for p in m.points() {
        fig.dot(p, 2.5, GREY);
    }
}

fn interval_polygon(fig: &mut Figure, s: &Space, x: &[f64], y: &[f64], color: &'static str) -> Result<()> {
    if let Some(v) = interval(s, x, y)?.vertices_2d() {
        fig.polygon(v, color);
    }
    Ok(())
}

pub fn cmd_interval(a: &IntervalArgs) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let iv = interval(&s, &a.x.0, &a.y.0)?.with_tolerance(a.tol);
    let contains = a.z.as_ref().map(|z| iv.contains(&z.0)).transpose()?;
    let slabs: Vec<Value> = iv
        .slabs()
        .iter()
        .map(|sl| json!({"pair": sl.pair, "functional": s.representative(sl.pair), "lo": sl.lo, "hi": sl.hi}))
        .collect();
    let vertices = if s.dim() == 2 { iv.vertices_2d() } else { None };
    let mut summary = vec![format!("interval in {}: {} slabs", s.label(), slabs.len())];
    if let Some(c) = contains {
        summary.push(format!("z in interval: {c}"));
    }
    let mut figure = planar(&s);
    if let Some(fig) = figure.as_mut() {
        if let Some(v) = &vertices {
            fig.polygon(v.clone(), BLUE);
        }
        fig.dot(&a.x.0, 4.0, BLACK);
        fig.dot(&a.y.0, 4.0, BLACK);
        if let (Some(z), Some(c)) = (&a.z, contains) {
            fig.dot(&z.0, 4.0, if c { GREEN } else { RED });
        }
    }
    Ok(Outcome {
        result: json!({"space": s.label(), "slabs": slabs, "contains": contains, "vertices": vertices}),
        falsified: false,
        summary,
        figure,
    })
}

pub fn cmd_hull(a: &HullArgs, seed: u64) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let (x, y) = (&a.x.0, &a.y.0);
    let opts = HullOptions {
        grid_points: a.grid.unwrap_or_else(|| default_grid_points(s.dim())),
        tol: a.tol,
    };
    let hull = ball_hull_outer_with(&s, x, y, a.balls, seed, &opts)?;
    let iv = interval(&s, x, y)?;
    let gap = hull.compare(&iv);
    let report = HullReport::new(&hull, &gap);
    let summary = vec![
        format!("interval contained in sampled hull: {}", report.contained),
        format!("gap: {} lattice steps ({})", gap.gap_steps, gap.gap),
    ];
    let mut figure = planar(&s);
    if let Some(fig) = figure.as_mut() {
        for p in hull.outer_points() {
            fig.dot(&p, 1.0, GREY);
        }
        interval_polygon(fig, &s, x, y, BLUE)?;
        fig.dot(x, 4.0, BLACK);
        fig.dot(y, 4.0, BLACK);
        if let Some(w) = &gap.witness {
            fig.dot(w, 3.0, RED);
        }
    }
    Ok(Outcome {
        result: json!({
            "space": s.label(),
            "report": report,
            "outer_count": gap.outer_count,
            "interval_count": gap.interval_count,
            "inclusion_violations": gap.inclusion_violations,
            "facet_slack": hull.facet_slack(&s),
        }),
        falsified: !report.contained,
        summary,
        figure,
    })
}

pub fn cmd_mconnect(a: &MconnectArgs, seed: u64) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let m = load_cloud(&a.cloud)?;
    let hull = match a.hull {
        HullChoice::Interval => HullMode::Interval,
        HullChoice::Oracle => HullMode::Oracle { n_balls: a.balls, seed },
    };
    let opts = MConnectOptions {
        resolution: a.resolution,
        hull,
    };
    let r = m_connected(&s, &m, &opts)?;
    let graph = if a.graph { Some(m_connectivity_graph(&s, &m, &opts)?) } else { None };
    let witness = r
        .witness
        .map(|(i, j)| json!({"pair": [i, j], "points": [m.point(i), m.point(j)]}));
    let mut summary = vec![format!("m-connected: {}", r.connected)];
    if let Some((i, j)) = r.witness {
        summary.push(format!("witness pair: {i}, {j}"));
    }
    let mut figure = planar(&s);
    if let Some(fig) = figure.as_mut() {
        if let Some(g) = &graph {
            for e in &g.edges {
                fig.line(m.point(e.a), m.point(e.b), GREY, 0.5);
            }
        }
        cloud_dots(fig, &m);
        if let Some((i, j)) = r.witness {
            interval_polygon(fig, &s, m.point(i), m.point(j), RED)?;
            fig.dot(m.point(i), 4.0, RED);
            fig.dot(m.point(j), 4.0, RED);
        }
    }
    Ok(Outcome {
        result: json!({
            "space": s.label(),
            "points": m.len(),
            "m_connected": r.connected,
            "witness": witness,
            "resolution": r.resolution,
            "pairs_checked": r.pairs_checked,
            "graph": graph,
        }),
        falsified: !r.connected,
        summary,
        figure,
    })
}

fn neighbor_radius(r: Radius) -> NeighborRadius {
    match r {
        Radius::Auto => NeighborRadius::Auto,
        Radius::Complete => NeighborRadius::Complete,
        Radius::Fixed(v) => NeighborRadius::Fixed(v),
    }
}

/// Whether each step moves every representative in its net direction,
/// up to `tol · (1 + |net|)`.
fn segment_ok(s: &Space, points: &[Vec<f64>], tol: f64) -> Vec<bool> {
    let (first, last) = (&points[0], &points[points.len() - 1]);
    points
        .windows(2)
        .map(|w| {
            s.representatives().all(|f| {
                let dot = |p: &[f64]| f.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
                let net = dot(last) - dot(first);
                let step = dot(&w[1]) - dot(&w[0]);
                let slack = tol * (1.0 + net.abs());
                if net > 0.0 {
                    step >= -slack
                } else if net < 0.0 {
                    step <= slack
                } else {
                    step.abs() <= slack
                }
            })
        })
        .collect()
}

pub fn cmd_path(a: &PathArgs) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let m = load_cloud(&a.cloud)?;
    let w = load_weights(&a.weights, &s)?;
    for (name, i) in [("--from", a.from), ("--to", a.to)] {
        if i >= m.len() {
            bail!("{name} {i} is out of range for a cloud of {} points", m.len());
        }
    }
    let opts = PathOptions {
        eps: a.eps,
        radius: neighbor_radius(a.radius),
        monotone_tol: a.tol,
    };
    let (x, y) = (m.point(a.from), m.point(a.to));
    let mut figure = planar(&s);
    if let Some(fig) = figure.as_mut() {
        interval_polygon(fig, &s, x, y, BLUE)?;
        cloud_dots(fig, &m);
    }
    match monotone_path(&s, &w, &m, x, y, &opts) {
        Ok(path) => {
            let monotone = path.monotone.monotone;
            if let Some(fig) = figure.as_mut() {
                for (seg, ok) in path.points.windows(2).zip(segment_ok(&s, &path.points, a.tol)) {
                    fig.line(&seg[0], &seg[1], if ok { GREEN } else { RED }, 2.0);
                }
                for (i, v) in &path.monotone.verdicts {
                    let f = s.representative(*i);
                    let color = if v.is_monotone() { GREEN } else { RED };
                    fig.label(format!("f{i} = {f:?}: {}", serde_json::to_value(v)?.as_str().unwrap_or("")), color);
                }
                fig.dot(x, 4.0, BLACK);
                fig.dot(y, 4.0, BLACK);
            }
            Ok(Outcome {
                summary: vec![
                    format!("path found: {} points, length defect {}", path.points.len(), path.defect),
                    format!("monotone: {monotone}"),
                ],
                result: json!({"space": s.label(), "found": true, "path": path}),
                falsified: !monotone,
                figure,
            })
        }
        Err(Error::NotFound { achieved, target }) => {
            if let Some(fig) = figure.as_mut() {
                fig.dot(x, 4.0, RED);
                fig.dot(y, 4.0, RED);
            }
            Ok(Outcome {
                summary: vec![match achieved {
                    Some(len) => format!("no admissible path: best length {len} exceeds {target}"),
                    None => "no admissible path: endpoints are not connected".into(),
                }],
                result: json!({"space": s.label(), "found": false, "achieved": achieved, "target": target}),
                falsified: true,
                figure,
            })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_project(a: &ProjectArgs) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let m = load_cloud(&a.cloud)?;
    let r = project(&s, &m, &a.x.0, a.tol)?;
    let nearest: Vec<&[f64]> = r.nearest_points(&m).collect();
    let mut figure = planar(&s);
    if let Some(fig) = figure.as_mut() {
        cloud_dots(fig, &m);
        for p in &nearest {
            fig.line(&a.x.0, p, GREEN, 1.5);
            fig.dot(p, 4.0, GREEN);
        }
        fig.dot(&a.x.0, 4.0, BLACK);
    }
    Ok(Outcome {
        summary: vec![format!("distance {}, {} nearest point(s)", r.distance, r.nearest.len())],
        result: json!({"space": s.label(), "distance": r.distance, "nearest": r.nearest, "nearest_points": nearest}),
        falsified: false,
        figure,
    })
}

pub fn cmd_sun(a: &SunArgs, seed: u64) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let m = load_cloud(&a.cloud)?;
    let params = SunParams {
        lambda_max: a.lambda_max,
        grid_size: a.grid,
        tie_tol: a.tol,
        strict: a.strict,
    };
    let queries = match &a.x {
        Some(x) => vec![x.0.clone()],
        None => random_queries(&s, &m, a.trials, a.margin, m.sampling_step(&s), seed)?,
    };
    let summary = is_sun_sampled(&s, &m, &queries, &params)?;
    let mut figure = planar(&s);
    if let Some(fig) = figure.as_mut() {
        cloud_dots(fig, &m);
        for (q, outcome) in summary.queries.iter().zip(&summary.outcomes) {
            match outcome {
                QueryOutcome::Holds { .. } => fig.dot(q, 2.0, GREEN),
                QueryOutcome::InCloud => fig.dot(q, 2.0, BLUE),
                QueryOutcome::Falsified { reports } => {
                    fig.dot(q, 3.0, RED);
                    for r in reports {
                        if let Some(f) = &r.falsifier {
                            let far: Vec<f64> = r.y.iter().zip(&r.x).map(|(y, x)| y + f.lambda * (x - y)).collect();
                            fig.line(&r.y, &far, RED, 1.0);
                            fig.dot(&f.competitor, 3.0, RED);
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome {
        summary: vec![format!(
            "sun check: {} ({} queries, {} falsified)",
            summary.verdict,
            summary.queries.len(),
            summary.falsified_queries.len()
        )],
        falsified: !summary.no_falsification(),
        result: json!({"space": s.label(), "lambda_max": a.lambda_max, "grid": a.grid, "summary": summary}),
        figure,
    })
}

pub fn cmd_embed(a: &EmbedArgs) -> Result<Outcome> {
    let s = load_space(&a.space)?;
    let m = load_cloud(&a.cloud)?;
    let e = match &a.indices {
        Some(ix) => Embedding::new(s.clone(), ix.0.clone())?,
        None => Embedding::full(s.clone())?,
    };
    let img = e.embed_cloud(&m)?;
    let images: Vec<Vec<f64>> = m.points().iter().map(|p| e.embed_unchecked(p)).collect();
    let target = e.target();

    let mut pairs = 0usize;
    let mut contraction_violations = 0usize;
    let mut max_ratio = 0.0f64;
    let mut max_isometry_error = 0.0f64;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let d = s.distance_unchecked(m.point(i), m.point(j));
            let di = target.distance_unchecked(&images[i], &images[j]);
            pairs += 1;
            if di > d + a.tol * (1.0 + d) {
                contraction_violations += 1;
            }
            if d > 0.0 {
                max_ratio = max_ratio.max(di / d);
            }
            max_isometry_error = max_isometry_error.max((d - di).abs());
        }
    }
    let mut triples = 0usize;
    let mut transport_violations = 0usize;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let src = interval(&s, m.point(i), m.point(j))?;
            let dst = interval(target, &images[i], &images[j])?;
            for k in (0..m.len()).filter(|&k| k != i && k != j) {
                if src.contains_unchecked(m.point(k)) {
                    triples += 1;
                    if !dst.contains_unchecked(&images[k]) {
                        transport_violations += 1;
                    }
                }
            }
        }
    }
    let mut figure = (target.dim() == 2).then(Figure::default);
    if let Some(fig) = figure.as_mut() {
        for p in img.cloud.points() {
            fig.dot(p, 2.5, BLUE);
        }
    }
    let falsified = contraction_violations > 0 || transport_violations > 0;
    Ok(Outcome {
        summary: vec![
            format!("embedded {} points into {} ({} collisions)", m.len(), target.label(), img.collisions()),
            format!("contraction violations: {contraction_violations}, transport violations: {transport_violations}"),
        ],
        result: json!({
            "space": s.label(),
            "target": target.label(),
            "selected": e.selected(),
            "image": img,
            "contraction": {"pairs": pairs, "violations": contraction_violations, "max_ratio": max_ratio},
            "isometry_error": if e.is_full() { Some(max_isometry_error) } else { None },
            "transport": {"triples": triples, "violations": transport_violations},
        }),
        falsified,
        figure,
    })
}
