//! Deterministic force-directed placement.
//!
//! Forces follow the Fruchterman–Reingold scheme with ideal edge length
//! `K = 1`: springs attract with magnitude `d²/K`, every node pair repels with
//! magnitude `K³/d²`. Both derive from the energy
//! `E = Σ_edges d³/(3K) + Σ_pairs K³/d`, so a step along the force is a
//! descent direction; a step that would still raise `E` is halved until it
//! does not.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SchemaGraph;

pub const DEFAULT_ITERATIONS: usize = 300;

const K: f64 = 1.0;
const JITTER: f64 = 0.05 * K;
const MIN_DISTANCE: f64 = 1e-9;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub positions: BTreeMap<String, Point>,
    pub iterations: usize,
    pub seed: u64,
}

/// Places every node of `g`. The output depends only on the graph, `seed` and
/// `iterations`; the centroid of the result is the origin.
pub fn layout(g: &SchemaGraph, seed: u64, iterations: usize) -> LayoutResult {
    layout_traced(g, seed, iterations).0
}

/// Like [`layout`], also returning the energy before the first iteration and
/// after each one (`iterations + 1` values).
pub fn layout_traced(g: &SchemaGraph, seed: u64, iterations: usize) -> (LayoutResult, Vec<f64>) {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| g.nodes()[a].id.cmp(&g.nodes()[b].id));
    let mut slot = vec![0; order.len()];
    for (s, &i) in order.iter().enumerate() {
        slot[i] = s;
    }
    let edges: Vec<(usize, usize)> = g.edge_ends().iter().map(|&(a, b)| (slot[a], slot[b])).collect();

    let mut pos = initial_placement(order.len(), seed);
    let mut trace = Vec::with_capacity(iterations + 1);
    let mut energy_now = energy(&pos, &edges);
    trace.push(energy_now);

    let t0 = 0.1 * (order.len() as f64).sqrt().max(1.0) * K;
    let mut candidate = pos.clone();
    for it in 0..iterations {
        let temperature = t0 * (1.0 - it as f64 / iterations as f64);
        let mut step = forces(&pos, &edges);
        for d in &mut step {
            let len = d.0.hypot(d.1);
            if len > temperature {
                let s = temperature / len;
                *d = (d.0 * s, d.1 * s);
            }
        }
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            for ((c, p), d) in candidate.iter_mut().zip(&pos).zip(&step) {
                *c = (p.0 + scale * d.0, p.1 + scale * d.1);
            }
            let e = energy(&candidate, &edges);
            if e <= energy_now {
                energy_now = e;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if accepted {
            std::mem::swap(&mut pos, &mut candidate);
        }
        trace.push(energy_now);
    }

    recenter(&mut pos);
    let positions = order
        .iter()
        .zip(&pos)
        .map(|(&i, &(x, y))| (g.nodes()[i].id.clone(), Point { x, y }))
        .collect();
    (
        LayoutResult {
            positions,
            iterations,
            seed,
        },
        trace,
    )
}

/// Energy of `result` under the layout's force model. Nodes missing from the
/// result are ignored.
pub fn layout_energy(g: &SchemaGraph, result: &LayoutResult) -> f64 {
    let mut slot = vec![None; g.node_count()];
    let mut pos = Vec::new();
    for (i, node) in g.nodes().iter().enumerate() {
        if let Some(p) = result.positions.get(&node.id) {
            slot[i] = Some(pos.len());
            pos.push((p.x, p.y));
        }
    }
    let edges: Vec<(usize, usize)> = g
        .edge_ends()
        .iter()
        .filter_map(|&(a, b)| Some((slot[a]?, slot[b]?)))
        .collect();
    energy(&pos, &edges)
}

/// Circle of circumference `n·K` in id order, plus seeded jitter, centered.
fn initial_placement(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = n as f64 * K / std::f64::consts::TAU;
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / n as f64;
            let jx = rng.gen_range(-JITTER..=JITTER);
            let jy = rng.gen_range(-JITTER..=JITTER);
            (radius * angle.cos() + jx, radius * angle.sin() + jy)
        })
        .collect();
    recenter(&mut pos);
    pos
}

fn recenter(pos: &mut [(f64, f64)]) {
    if pos.is_empty() {
        return;
    }
    let n = pos.len() as f64;
    let cx = pos.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = pos.iter().map(|p| p.1).sum::<f64>() / n;
    for p in pos {
        p.0 -= cx;
        p.1 -= cy;
    }
}

fn energy(pos: &[(f64, f64)], edges: &[(usize, usize)]) -> f64 {
    let mut e = 0.0;
    for &(a, b) in edges {
        let d = dist(pos[a], pos[b]);
        e += d * d * d / (3.0 * K);
    }
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            e += K * K * K / dist(pos[i], pos[j]).max(MIN_DISTANCE);
        }
    }
    e
}

fn forces(pos: &[(f64, f64)], edges: &[(usize, usize)]) -> Vec<(f64, f64)> {
    let mut f = vec![(0.0, 0.0); pos.len()];
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            let (dx, dy, d) = delta(pos, i, j);
            let s = K * K * K / (d * d * d);
            f[i].0 += s * dx;
            f[i].1 += s * dy;
            f[j].0 -= s * dx;
            f[j].1 -= s * dy;
        }
    }
    for &(a, b) in edges {
        let (dx, dy, d) = delta(pos, a, b);
        let s = d / K;
        f[a].0 -= s * dx;
        f[a].1 -= s * dy;
        f[b].0 += s * dx;
        f[b].1 += s * dy;
    }
    f
}

/// `p_i - p_j` and its length; coincident nodes get a fixed unit offset.
fn delta(pos: &[(f64, f64)], i: usize, j: usize) -> (f64, f64, f64) {
    let dx = pos[i].0 - pos[j].0;
    let dy = pos[i].1 - pos[j].1;
    let d = dx.hypot(dy);
    if d < MIN_DISTANCE {
        (MIN_DISTANCE, 0.0, MIN_DISTANCE)
    } else {
        (dx, dy, d)
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}
