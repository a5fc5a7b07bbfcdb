//! Polar meshes of image domains and graph geodesics on them.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HmapError, Result};
use crate::grid::GridSpec;
use crate::map::HarmonicMap;

/// Images closer than this are treated as the same point.
pub const COLLISION_EPS: f64 = 1e-12;

/// Largest ring/spoke offset of a mesh edge, in scaled steps.
const STENCIL_REACH: i64 = 5;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive `(d_ring, d_spoke)` offsets with both entries at most
/// [`STENCIL_REACH`] in modulus: 80 directions.
fn stencil() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for dj in -STENCIL_REACH..=STENCIL_REACH {
        for dk in -STENCIL_REACH..=STENCIL_REACH {
            if (dj, dk) != (0, 0) && gcd(dj, dk) == 1 {
                out.push((dj, dk));
            }
        }
    }
    out
}

/// Ring and spoke step multipliers that bring the cells of ring `j` close to
/// square, rounding the long side up. The cell aspect `r_j dtheta / dr`
/// equals `j dtheta`.
fn cell_scale(j: usize, na: usize) -> (i64, i64) {
    let aspect = j as f64 * 2.0 * PI / na as f64;
    if aspect < 1.0 {
        let cap = (na as i64 / (2 * STENCIL_REACH)).max(1);
        (1, ((1.0 / aspect).round() as i64).clamp(1, cap))
    } else {
        (aspect.ceil() as i64, 1)
    }
}

/// Image of the polar grid `r_j = r_max j / n_radial`, `j = 1..=n_radial`,
/// plus the centre. Each vertex of ring `j` is joined along the 80-direction
/// stencil, both with unit steps and with the steps scaled by [`cell_scale`].
/// Edges are undirected and weighted by image-space distances.
/// Adjacency is stored in compressed rows.
#[derive(Debug, Clone)]
pub struct ImageMesh {
    pub resolution: GridSpec,
    pub points: Vec<Complex64>,
    pub images: Vec<Complex64>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl ImageMesh {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Vertex index of ring `j` (`0` is the centre) and spoke `k`.
    pub fn vertex(&self, ring: usize, spoke: usize) -> usize {
        if ring == 0 {
            0
        } else {
            1 + (ring - 1) * self.resolution.n_angular + spoke % self.resolution.n_angular
        }
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.resolution.n_radial;
        (0..self.resolution.n_angular).map(move |k| self.vertex(n, k))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&t, &w)| (t as usize, w))
    }
}

/// Builds the image mesh of `f` at the given resolution.
pub fn build_image_mesh(f: &HarmonicMap, resolution: &GridSpec) -> Result<ImageMesh> {
    resolution.validate()?;
    let (nr, na) = (resolution.n_radial, resolution.n_angular);
    let mut points = Vec::with_capacity(nr * na + 1);
    points.push(Complex64::new(0.0, 0.0));
    for j in 1..=nr {
        let r = resolution.r_max * j as f64 / nr as f64;
        for k in 0..na {
            points.push(Complex64::from_polar(r, resolution.angle(k)));
        }
    }
    let images: Vec<Complex64> = points.par_iter().map(|&z| f.evaluate_unchecked(z)).collect();
    if let Some(i) = images.iter().position(|w| !w.is_finite()) {
        return Err(HmapError::Domain(points[i]));
    }
    check_collisions(&points, &images)?;

    let st = stencil();
    let index = |j: i64, k: i64| -> usize { 1 + (j as usize - 1) * na + k.rem_euclid(na as i64) as usize };
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); points.len()];
    let mut join = |u: usize, v: usize| {
        if u != v {
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
    };
    for k in 0..na as i64 {
        join(0, index(1, k));
    }
    for j in 1..=nr as i64 {
        let (sj, sk) = cell_scale(j as usize, na);
        for k in 0..na as i64 {
            let v = index(j, k);
            let scaled = st.iter().map(|&(dj, dk)| (dj * sj, dk * sk));
            for (dj, dk) in st.iter().copied().chain(scaled) {
                let jj = j + dj;
                if jj < 1 || jj > nr as i64 {
                    continue;
                }
                join(v, index(jj, k + dk));
            }
        }
    }
    let mut offsets = Vec::with_capacity(points.len() + 1);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    offsets.push(0);
    for (v, list) in adj.iter_mut().enumerate() {
        list.sort_unstable();
        list.dedup();
        for &t in list.iter() {
            targets.push(t);
            weights.push((images[t as usize] - images[v]).norm());
        }
        offsets.push(targets.len());
    }
    Ok(ImageMesh {
        resolution: *resolution,
        points,
        images,
        offsets,
        targets,
        weights,
    })
}

fn check_collisions(points: &[Complex64], images: &[Complex64]) -> Result<()> {
    let key = |w: Complex64| ((w.re / COLLISION_EPS).floor() as i64, (w.im / COLLISION_EPS).floor() as i64);
    let mut seen: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &w) in images.iter().enumerate() {
        let (kx, ky) = key(w);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = seen.get(&(kx + dx, ky + dy)) {
                    if let Some(&j) = list.iter().find(|&&j| (images[j] - w).norm() <= COLLISION_EPS) {
                        return Err(HmapError::InjectivityFailure(points[j], points[i]));
                    }
                }
            }
        }
        seen.entry((kx, ky)).or_default().push(i);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest paths; stops early once `target` is settled.
/// Returns distances (infinite when unreached) and predecessors.
pub fn dijkstra(mesh: &ImageMesh, source: usize, target: Option<usize>) -> (Vec<f64>, Vec<u32>) {
    let n = mesh.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Dist(0.0), source)));
    while let Some(Reverse((Dist(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if Some(v) == target {
            break;
        }
        for (t, w) in mesh.neighbors(v) {
            let nd = d + w;
            if nd < dist[t] {
                dist[t] = nd;
                prev[t] = v as u32;
                heap.push(Reverse((Dist(nd), t)));
            }
        }
    }
    (dist, prev)
}

/// Shortest-path length between vertices `i` and `j` of the mesh.
pub fn geodesic_length(mesh: &ImageMesh, i: usize, j: usize) -> Result<f64> {
    if i >= mesh.len() || j >= mesh.len() {
        return Err(HmapError::Parameter(format!("vertex out of range: {i}, {j}")));
    }
    if i == j {
        return Ok(0.0);
    }
    let (dist, _) = dijkstra(mesh, i, Some(j));
    if dist[j].is_finite() {
        Ok(dist[j])
    } else {
        Err(HmapError::Disconnected(i, j))
    }
}

fn path_to(prev: &[u32], source: usize, target: usize) -> Vec<usize> {
    let mut path = vec![target];
    let mut v = target;
    while v != source {
        v = prev[v] as usize;
        path.push(v);
    }
    path.reverse();
    path
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityEstimate {
    #[serde(rename = "M_hat")]
    pub m_hat: f64,
    /// Image points realizing `M_hat`.
    pub witness: (Complex64, Complex64),
    pub witness_preimages: (Complex64, Complex64),
    /// Mesh vertices of the shortest path between the witnesses.
    pub path: Vec<usize>,
    pub resolution: GridSpec,
    pub seed: u64,
    pub sources: usize,
    pub pairs_evaluated: usize,
}

/// Number of evenly spaced boundary sources.
const BOUNDARY_SOURCES: usize = 32;

/// Largest ratio of graph geodesic to chord over sampled vertex pairs.
///
/// Every `n_angular / 32`-th boundary vertex is a source paired with all
/// mesh vertices; `n_pairs` further pairs with random endpoints are drawn
/// from a ChaCha stream seeded with `seed`.
pub fn linear_connectivity_estimate(f: &HarmonicMap, resolution: &GridSpec, n_pairs: usize, seed: u64) -> Result<ConnectivityEstimate> {
    let mesh = build_image_mesh(f, resolution)?;
    connectivity_on_mesh(&mesh, n_pairs, seed)
}

pub fn connectivity_on_mesh(mesh: &ImageMesh, n_pairs: usize, seed: u64) -> Result<ConnectivityEstimate> {
    let na = mesh.resolution.n_angular;
    let stride = (na / BOUNDARY_SOURCES).max(1);
    let boundary: Vec<usize> = mesh.boundary_vertices().step_by(stride).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random: Vec<(usize, usize)> = (0..n_pairs)
        .map(|_| (rng.random_range(0..mesh.len()), rng.random_range(0..mesh.len())))
        .filter(|(a, b)| a != b)
        .collect();

    // (ratio, source, target)
    let ratio = |s: usize, t: usize, d: f64| -> f64 {
        let chord = (mesh.images[s] - mesh.images[t]).norm();
        if chord > 0.0 {
            d / chord
        } else {
            1.0
        }
    };
    let pick = |a: (f64, usize, usize), b: (f64, usize, usize)| -> (f64, usize, usize) {
        match a.0.total_cmp(&b.0) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal if (a.1, a.2) <= (b.1, b.2) => a,
            Ordering::Equal => b,
        }
    };
    let from_boundary = boundary
        .par_iter()
        .map(|&s| {
            let (dist, _) = dijkstra(mesh, s, None);
            if let Some(t) = dist.iter().position(|d| !d.is_finite()) {
                return Err(HmapError::Disconnected(s, t));
            }
            Ok(dist
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != s)
                .map(|(t, &d)| (ratio(s, t, d), s, t))
                .fold((f64::NEG_INFINITY, s, s), pick))
        })
        .collect::<Result<Vec<_>>>()?;
    let from_random = random
        .par_iter()
        .map(|&(s, t)| Ok((ratio(s, t, geodesic_length(mesh, s, t)?), s, t)))
        .collect::<Result<Vec<_>>>()?;
    let (m_hat, s, t) = from_boundary
        .into_iter()
        .chain(from_random)
        .fold((1.0, 0, 0), pick);
    let path = if s == t {
        vec![s]
    } else {
        let (_, prev) = dijkstra(mesh, s, Some(t));
        path_to(&prev, s, t)
    };
    Ok(ConnectivityEstimate {
        m_hat,
        witness: (mesh.images[s], mesh.images[t]),
        witness_preimages: (mesh.points[s], mesh.points[t]),
        path,
        resolution: mesh.resolution,
        seed,
        sources: boundary.len() + random.len(),
        pairs_evaluated: boundary.len() * (mesh.len() - 1) + random.len(),
    })
}
