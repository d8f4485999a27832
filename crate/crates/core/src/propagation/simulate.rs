//! Radio maps from the tracer.
//!
//! Work is split into the tracer's tasks (line of sight, one reflection
//! subtree per first facet, one edge each). Every task accumulates dense
//! per-receiver voltages; the partial sums are then added in task order, so
//! the map does not depend on how tasks were scheduled.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::propagation::config::PropagationConfig;
use crate::propagation::field::{path_field_vector, power_from_voltage, receive_voltage};
use crate::propagation::trace::{path_key, Node, Plane, Task, Tracer};
use crate::radiomap::{MapSource, RadioMap};
use crate::scene::{scene_hash, ReceiverGrid, Scene};
use crate::Vec3;

/// Slack on beam footprints, metres.
const FOOTPRINT_MARGIN: f64 = 1e-6;

struct TaskSums {
    voltage: Vec<Complex64>,
    /// Contributions of paths touching a facet boundary, deduplicated later.
    boundary: Vec<(usize, Vec<i64>, Complex64)>,
    paths: usize,
}

/// Receivers of `grid` inside the beam, as `(row, first, last)` column ranges.
fn footprint(planes: &[Plane], grid: &ReceiverGrid, out: &mut Vec<(usize, usize, usize)>) {
    out.clear();
    let h = grid.height;
    for j in 0..grid.ny {
        let y = grid.origin.y + j as f64 * grid.spacing_y;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for &(m, c) in planes {
            let r = c - m.y * y - m.z * h;
            if m.x.abs() < 1e-12 {
                if r > FOOTPRINT_MARGIN {
                    lo = f64::INFINITY;
                    break;
                }
            } else if m.x > 0.0 {
                lo = lo.max((r - FOOTPRINT_MARGIN) / m.x);
            } else {
                hi = hi.min((r - FOOTPRINT_MARGIN) / m.x);
            }
        }
        if lo > hi {
            continue;
        }
        let a = ((lo - grid.origin.x) / grid.spacing_x).ceil().max(0.0);
        let b = ((hi - grid.origin.x) / grid.spacing_x).floor();
        let last = grid.nx as f64 - 1.0;
        if a > last || b < 0.0 || a > b {
            continue;
        }
        out.push((j, a as usize, b.min(last) as usize));
    }
}

/// Whether a diffraction node can produce any path at grid height `h`.
fn edge_node_feasible(tracer: &Tracer<'_>, node: &Node<'_>, h: f64) -> bool {
    let Node::Diffraction { edge, pre, post } = node else {
        return true;
    };
    let w = &tracer.geo.edges[*edge].wedge;
    if w.edge.x.abs() > 1e-12 || w.edge.y.abs() > 1e-12 {
        return true;
    }
    let Some(s) = pre.images.last() else {
        return true;
    };
    let mut r = Vec3::new(0.0, 0.0, h);
    for &f in post.iter().rev() {
        let fc = &tracer.geo.facets[f];
        r = r.mirror(fc.normal, fc.offset);
    }
    let top = w.origin.z;
    let bottom = top - w.length;
    !((s.z >= top && r.z >= top) || (s.z <= bottom && r.z <= bottom))
}

fn run_task(tracer: &Tracer<'_>, task: Task, grid: &ReceiverGrid, rx: &[Vec3]) -> Result<TaskSums> {
    let mut sums = TaskSums {
        voltage: vec![Complex64::new(0.0, 0.0); rx.len()],
        boundary: Vec::new(),
        paths: 0,
    };
    let mut err = None;
    let mut ranges = Vec::new();
    let nx = grid.nx;
    let pattern = grid.pattern;
    tracer.run_task(task, &mut |node: Node<'_>| {
        if err.is_some() {
            return;
        }
        let each = |k: usize, sums: &mut TaskSums| -> Result<()> {
            if let Some(c) = tracer.validate(&node, rx[k]) {
                let e = path_field_vector(tracer, &c.path)?;
                let v = c.path.vertices();
                let arrival = (v[v.len() - 1] - v[v.len() - 2]).normalize();
                let volts = receive_voltage(&e, arrival, pattern);
                sums.paths += 1;
                if c.on_boundary {
                    sums.boundary.push((k, path_key(&c.path), volts));
                } else {
                    sums.voltage[k] += volts;
                }
            }
            Ok(())
        };
        let res = match &node {
            Node::Reflection { beam, .. } => {
                footprint(beam, grid, &mut ranges);
                ranges
                    .iter()
                    .try_for_each(|&(j, a, b)| (a..=b).try_for_each(|i| each(j * nx + i, &mut sums)))
            }
            Node::Diffraction { .. } if !edge_node_feasible(tracer, &node, grid.height) => Ok(()),
            _ => (0..rx.len()).try_for_each(|k| each(k, &mut sums)),
        };
        if let Err(e) = res {
            err = Some(e);
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(sums),
    }
}

/// Coherent receiver voltages over `grid` plus the number of paths found.
pub(crate) fn grid_voltages(
    tracer: &Tracer<'_>,
    grid: &ReceiverGrid,
    workers: Option<usize>,
) -> Result<(Vec<Complex64>, usize)> {
    let rx: Vec<Vec3> = grid.points().collect();
    for &p in &rx {
        tracer.check_receiver(p)?;
    }
    let tasks = tracer.tasks();
    let work = || -> Vec<Result<TaskSums>> {
        tasks.par_iter().map(|&t| run_task(tracer, t, grid, &rx)).collect()
    };
    let parts = match workers {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(work),
    };
    let mut total = vec![Complex64::new(0.0, 0.0); rx.len()];
    let mut seen: Vec<HashSet<Vec<i64>>> = vec![HashSet::new(); rx.len()];
    let mut paths = 0;
    for part in parts {
        let part = part?;
        for (t, v) in total.iter_mut().zip(&part.voltage) {
            *t += v;
        }
        paths += part.paths;
        for (k, key, v) in part.boundary {
            if seen[k].insert(key) {
                total[k] += v;
            } else {
                paths -= 1;
            }
        }
    }
    Ok((total, paths))
}

/// Traced received-power map of grid `grid_index` of `scene`.
pub fn simulate_radio_map(scene: &Scene, grid_index: usize, config: &PropagationConfig) -> Result<RadioMap> {
    simulate_radio_map_with_workers(scene, grid_index, config, None)
}

/// [`simulate_radio_map`] on a dedicated pool of `workers` threads (`None`
/// uses the global pool). The result is identical for every worker count.
pub fn simulate_radio_map_with_workers(
    scene: &Scene,
    grid_index: usize,
    config: &PropagationConfig,
    workers: Option<usize>,
) -> Result<RadioMap> {
    let grid = scene.grid(grid_index)?.clone();
    let tracer = Tracer::new(scene, config)?;
    let (v, _) = grid_voltages(&tracer, &grid, workers)?;
    let power = v
        .iter()
        .map(|&x| power_from_voltage(x, scene.frequency_ghz, config.power_floor_dbm))
        .collect();
    RadioMap::new(
        grid,
        power,
        scene.frequency_ghz,
        MapSource::Traced { config: config.clone() },
        scene_hash(scene),
    )
}
