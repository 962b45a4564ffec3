//! Triangulation of a convex domain with tagged boundary vertices.
//!
//! Boundary vertices come from an arclength-uniform boundary sample; interior
//! vertices from a triangular lattice of pitch `h` kept at least `h/2` away
//! from the curve. Domains symmetric under both coordinate reflections are
//! triangulated in the first quadrant and mirrored, so the mesh itself is
//! exactly symmetric.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::error::MeshError;
use crate::geometry::{Domain, Vec2};

pub const MIN_ANGLE_DEG: f64 = 20.0;
const INTERIOR_MARGIN: f64 = 0.5;
const SMOOTHING_SWEEPS: usize = 6;
const SMOOTHING_BAND: f64 = 2.0;
const MIN_BOUNDARY_VERTICES: usize = 24;
/// Boundary vertex spacing relative to the lattice pitch.
const BOUNDARY_SPACING: f64 = 0.6;

/// Position of a boundary vertex along the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTag {
    /// Curve parameter.
    pub t: f64,
    /// Arclength from `t = 0`.
    pub s: f64,
    /// Unit outward normal of the curve.
    pub normal: Vec2,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vec2>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary vertices ordered counterclockwise by arclength.
    pub boundary_vertex_ids: Vec<usize>,
    pub h: f64,
    tags: Vec<Option<BoundaryTag>>,
    adj_start: Vec<usize>,
    adj: Vec<usize>,
    locator: Locator,
}

impl Mesh {
    /// Assemble a mesh from raw parts. Orients triangles counterclockwise and
    /// builds adjacency and the point locator.
    pub fn from_parts(
        vertices: Vec<Vec2>,
        mut triangles: Vec<[usize; 3]>,
        tags: Vec<Option<BoundaryTag>>,
        h: f64,
    ) -> Self {
        for tri in &mut triangles {
            if signed_area(&vertices, *tri) < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mut boundary_vertex_ids: Vec<usize> =
            (0..vertices.len()).filter(|&v| tags[v].is_some()).collect();
        boundary_vertex_ids.sort_by(|&a, &b| {
            let (sa, sb) = (tags[a].map(|t| t.s), tags[b].map(|t| t.s));
            sa.partial_cmp(&sb).unwrap_or(std::cmp::Ordering::Equal)
        });

        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for tri in &triangles {
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        nbrs[tri[i]].push(tri[j]);
                    }
                }
            }
        }
        let mut adj_start = Vec::with_capacity(vertices.len() + 1);
        let mut adj = Vec::new();
        adj_start.push(0);
        for list in &mut nbrs {
            list.sort_unstable();
            list.dedup();
            adj.extend_from_slice(list);
            adj_start.push(adj.len());
        }
        let locator = Locator::new(&vertices, &triangles, h);
        Mesh {
            vertices,
            triangles,
            boundary_vertex_ids,
            h,
            tags,
            adj_start,
            adj,
            locator,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.tags[v].is_some()
    }

    pub fn boundary_tag(&self, v: usize) -> Option<BoundaryTag> {
        self.tags.get(v).copied().flatten()
    }

    pub fn interior_vertex_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| self.tags[v].is_none())
    }

    pub fn vertex_neighbors(&self, v: usize) -> Result<&[usize], MeshError> {
        if v >= self.vertices.len() {
            return Err(MeshError::UnknownVertex(v));
        }
        Ok(&self.adj[self.adj_start[v]..self.adj_start[v + 1]])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Lumped mass (one third of the incident triangle areas) per vertex.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            let a = self.triangle_area(t) / 3.0;
            for &v in tri {
                m[v] += a;
            }
        }
        m
    }

    /// Unique undirected edges `(lo, hi)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Number of triangles sharing each edge.
    pub fn edge_multiplicity(&self) -> HashMap<(usize, usize), usize> {
        let mut m = HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        m
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    pub fn min_angle_deg(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&t| min_angle(&self.vertices, t))
            .fold(f64::INFINITY, f64::min)
            .to_degrees()
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: Vec2) -> Option<(usize, [f64; 3])> {
        self.locator.locate(&self.vertices, &self.triangles, p)
    }

    /// P1 interpolation of nodal `values` at `p`.
    pub fn interpolate(&self, values: &[f64], p: Vec2) -> Option<f64> {
        let (t, bary) = self.locate(p)?;
        let tri = self.triangles[t];
        Some((0..3).map(|i| bary[i] * values[tri[i]]).sum())
    }

    /// Writes `mesh_vertices.csv` and `mesh_triangles.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(dir.join("mesh_vertices.csv"))?);
        writeln!(w, "id,x,y,is_boundary,arclength")?;
        for (i, p) in self.vertices.iter().enumerate() {
            match self.tags[i] {
                Some(tag) => writeln!(w, "{i},{:?},{:?},1,{:?}", p.x, p.y, tag.s)?,
                None => writeln!(w, "{i},{:?},{:?},0,", p.x, p.y)?,
            }
        }
        w.flush()?;
        let mut w = BufWriter::new(File::create(dir.join("mesh_triangles.csv"))?);
        writeln!(w, "v0,v1,v2")?;
        for t in &self.triangles {
            writeln!(w, "{},{},{}", t[0], t[1], t[2])?;
        }
        w.flush()
    }
}

pub(crate) fn signed_area(v: &[Vec2], t: [usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn min_angle(v: &[Vec2], t: [usize; 3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..3 {
        let a = v[t[i]];
        let b = v[t[(i + 1) % 3]];
        let c = v[t[(i + 2) % 3]];
        let (u, w) = (b - a, c - a);
        let cos = u.dot(&w) / (u.norm() * w.norm());
        m = m.min(cos.clamp(-1.0, 1.0).acos());
    }
    m
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug, Clone)]
struct Locator {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    fn new(vertices: &[Vec2], triangles: &[[usize; 3]], h: f64) -> Self {
        let mut lo = Vec2::repeat(f64::INFINITY);
        let mut hi = Vec2::repeat(f64::NEG_INFINITY);
        for p in vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let cell = h.max(1e-12);
        let nx = (((hi.x - lo.x) / cell).ceil() as usize).max(1);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (ti, t) in triangles.iter().enumerate() {
            let mut blo = Vec2::repeat(f64::INFINITY);
            let mut bhi = Vec2::repeat(f64::NEG_INFINITY);
            for &v in t {
                blo = blo.inf(&vertices[v]);
                bhi = bhi.sup(&vertices[v]);
            }
            let (i0, j0) = Self::cell_of(lo, cell, nx, ny, blo);
            let (i1, j1) = Self::cell_of(lo, cell, nx, ny, bhi);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(ti);
                }
            }
        }
        Locator {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn cell_of(lo: Vec2, cell: f64, nx: usize, ny: usize, p: Vec2) -> (usize, usize) {
        let i = ((p.x - lo.x) / cell).floor().max(0.0) as usize;
        let j = ((p.y - lo.y) / cell).floor().max(0.0) as usize;
        (i.min(nx - 1), j.min(ny - 1))
    }

    fn locate(
        &self,
        vertices: &[Vec2],
        triangles: &[[usize; 3]],
        p: Vec2,
    ) -> Option<(usize, [f64; 3])> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return None;
        }
        let (i, j) = Self::cell_of(self.origin, self.cell, self.nx, self.ny, p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.nx + i] {
            let bary = barycentric(vertices, triangles[t], p);
            let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= -1e-12 && best.is_none_or(|b| worst > b.2) {
                best = Some((t, bary, worst));
            }
        }
        best.map(|(t, b, _)| (t, b))
    }
}

fn barycentric(v: &[Vec2], t: [usize; 3], p: Vec2) -> [f64; 3] {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    let l1 = ((b.x - p.x) * (c.y - p.y) - (c.x - p.x) * (b.y - p.y)) / det;
    let l2 = ((c.x - p.x) * (a.y - p.y) - (a.x - p.x) * (c.y - p.y)) / det;
    [l1, l2, 1.0 - l1 - l2]
}

/// Triangulates `domain` with target edge length `h`.
pub fn triangulate(domain: &Domain, h: f64) -> Result<Mesh, MeshError> {
    let inradius = domain.inradius();
    if !(h.is_finite() && h > 0.0 && h < inradius) {
        return Err(MeshError::InvalidMeshSize { h, inradius });
    }
    let mut last = f64::NAN;
    for jitter in [false, true] {
        let mesh = build(domain, h, jitter);
        let angle = mesh.min_angle_deg();
        if angle >= MIN_ANGLE_DEG {
            return Ok(mesh);
        }
        last = angle;
    }
    Err(MeshError::MeshQualityFailure {
        min_angle_deg: last,
        threshold_deg: MIN_ANGLE_DEG,
    })
}

struct PointSet {
    points: Vec<Vec2>,
    tags: Vec<Option<BoundaryTag>>,
    /// Per point: may move in x / may move in y during smoothing.
    free: Vec<(bool, bool)>,
}

fn build(domain: &Domain, h: f64, jitter: bool) -> Mesh {
    let symmetric = domain.spec().is_biaxially_symmetric();
    let perimeter = domain.perimeter();
    let mut n_boundary =
        ((perimeter / (BOUNDARY_SPACING * h)).round() as usize).max(MIN_BOUNDARY_VERTICES);
    if symmetric {
        n_boundary = n_boundary.div_ceil(4) * 4;
    }
    let center = if symmetric {
        Vec2::zeros()
    } else {
        domain.centroid()
    };
    let boundary = domain.boundary_sample(n_boundary);

    let mut set = PointSet {
        points: Vec::new(),
        tags: Vec::new(),
        free: Vec::new(),
    };
    let quarter = n_boundary / 4;
    for (k, b) in boundary.iter().enumerate() {
        if symmetric && k > quarter {
            break;
        }
        let mut p = b.position;
        let mut normal = b.outward_normal;
        if symmetric && k == 0 {
            p.y = 0.0;
            normal = Vec2::new(1.0, 0.0);
        }
        if symmetric && k == quarter {
            p.x = 0.0;
            normal = Vec2::new(0.0, 1.0);
        }
        set.points.push(p);
        set.tags.push(Some(BoundaryTag {
            t: b.t,
            s: b.s,
            normal,
        }));
        set.free.push((false, false));
    }

    let dy = h * 3f64.sqrt() / 2.0;
    let extent = domain.diameter();
    let rows = (extent / dy).ceil() as i64 + 1;
    let cols = (extent / h).ceil() as i64 + 1;
    let mut rng = SplitMix(0x9e37_79b9_7f4a_7c15);
    for j in -rows..=rows {
        if symmetric && j < 0 {
            continue;
        }
        let shift = if j.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        // odd rows have no column on the y axis; a seam point there keeps
        // the mirrored triangles free of obtuse angles
        let seam = (symmetric && shift > 0.0).then_some(0.0);
        for x in seam
            .into_iter()
            .chain((-cols..=cols).map(|i| (i as f64 + shift) * h))
        {
            if symmetric && x < 0.0 {
                continue;
            }
            let y = j as f64 * dy;
            let on_x_axis = symmetric && j == 0;
            let on_y_axis = symmetric && x == 0.0;
            let mut p = center + Vec2::new(x, y);
            if jitter {
                if !on_y_axis {
                    p.x += 0.15 * h * rng.symmetric_unit();
                }
                if !on_x_axis {
                    p.y += 0.15 * h * rng.symmetric_unit();
                }
                if symmetric && (p.x < 0.0 || p.y < 0.0) {
                    continue;
                }
            }
            if !domain.contains(p) {
                continue;
            }
            let dist = domain.distance_to_boundary(p);
            if dist <= INTERIOR_MARGIN * h {
                continue;
            }
            // only the layer next to the boundary is smoothed
            let near = dist < SMOOTHING_BAND * h;
            set.points.push(p);
            set.tags.push(None);
            set.free.push((near && !on_y_axis, near && !on_x_axis));
        }
    }

    let mut triangles = delaunay(&set.points);
    triangles.retain(|&t| {
        let c = (set.points[t[0]] + set.points[t[1]] + set.points[t[2]]) / 3.0;
        domain.contains(c) && signed_area(&set.points, t).abs() > 1e-14 * h * h
    });
    smooth(&mut set, &triangles);

    if symmetric {
        mirror_quadrant(&set, &triangles, perimeter, h)
    } else {
        Mesh::from_parts(set.points, triangles, set.tags, h)
    }
}

fn delaunay(points: &[Vec2]) -> Vec<[usize; 3]> {
    let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    let mut handle_to_id: HashMap<usize, usize> = HashMap::new();
    for (id, p) in points.iter().enumerate() {
        if let Ok(handle) = dt.insert(Point2::new(p.x, p.y)) {
            handle_to_id.entry(handle.index()).or_insert(id);
        }
    }
    dt.inner_faces()
        .map(|f| f.vertices().map(|v| handle_to_id[&v.fix().index()]))
        .collect()
}

/// Laplacian smoothing of interior points; a move is rejected if it would
/// invert an incident triangle or shrink the smallest incident angle.
fn smooth(set: &mut PointSet, triangles: &[[usize; 3]]) {
    let n = set.points.len();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ti, t) in triangles.iter().enumerate() {
        for i in 0..3 {
            incident[t[i]].push(ti);
            nbrs[t[i]].push(t[(i + 1) % 3]);
            nbrs[t[i]].push(t[(i + 2) % 3]);
        }
    }
    for list in &mut nbrs {
        list.sort_unstable();
        list.dedup();
    }
    for _ in 0..SMOOTHING_SWEEPS {
        for v in 0..n {
            let (fx, fy) = set.free[v];
            if set.tags[v].is_some() || (!fx && !fy) || nbrs[v].is_empty() {
                continue;
            }
            let avg = nbrs[v].iter().map(|&u| set.points[u]).sum::<Vec2>() / nbrs[v].len() as f64;
            let old = set.points[v];
            let quality = |pts: &[Vec2]| {
                incident[v]
                    .iter()
                    .map(|&t| {
                        if signed_area(pts, triangles[t]) <= 0.0 {
                            f64::NEG_INFINITY
                        } else {
                            min_angle(pts, triangles[t])
                        }
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            let before = quality(&set.points);
            let mut p = old;
            if fx {
                p.x = avg.x;
            }
            if fy {
                p.y = avg.y;
            }
            set.points[v] = p;
            if quality(&set.points) < before {
                set.points[v] = old;
            }
        }
    }
}

fn mirror_quadrant(set: &PointSet, triangles: &[[usize; 3]], perimeter: f64, h: f64) -> Mesh {
    use std::f64::consts::{PI, TAU};
    let mut vertices = Vec::new();
    let mut tags = Vec::new();
    // (sx, sy) reflections in counterclockwise quadrant order
    let mirrors = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let mut maps: Vec<Vec<usize>> = Vec::new();
    for (q, &(sx, sy)) in mirrors.iter().enumerate() {
        let mut map = vec![usize::MAX; set.points.len()];
        for (i, p) in set.points.iter().enumerate() {
            // points on a mirror axis are shared with the previous copy
            let shared = if q == 0 {
                None
            } else {
                let prev_axis_x = (q == 1 || q == 3) && p.x == 0.0;
                let prev_axis_y = q == 2 && p.y == 0.0;
                let first_axis = q == 3 && p.y == 0.0;
                if first_axis {
                    Some(maps[0][i])
                } else if prev_axis_x || prev_axis_y {
                    Some(maps[q - 1][i])
                } else {
                    None
                }
            };
            map[i] = match shared {
                Some(id) => id,
                None => {
                    vertices.push(Vec2::new(sx * p.x, sy * p.y));
                    tags.push(set.tags[i].map(|tag| {
                        let normal = Vec2::new(sx * tag.normal.x, sy * tag.normal.y);
                        let (t, s) = match q {
                            0 => (tag.t, tag.s),
                            1 => (PI - tag.t, 0.5 * perimeter - tag.s),
                            2 => (PI + tag.t, 0.5 * perimeter + tag.s),
                            _ => (TAU - tag.t, perimeter - tag.s),
                        };
                        BoundaryTag { t, s, normal }
                    }));
                    vertices.len() - 1
                }
            };
        }
        maps.push(map);
    }
    let mut tris = Vec::with_capacity(4 * triangles.len());
    for map in &maps {
        for t in triangles {
            tris.push([map[t[0]], map[t[1]], map[t[2]]]);
        }
    }
    Mesh::from_parts(vertices, tris, tags, h)
}

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn symmetric_unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use std::f64::consts::PI;

    fn disk() -> Domain {
        Domain::new(DomainSpec::unit_disk()).unwrap()
    }

    fn check_invariants(domain: &Domain, mesh: &Mesh) {
        for t in 0..mesh.triangles.len() {
            assert!(mesh.triangle_area(t) > 0.0);
        }
        let diam = domain.diameter();
        for v in 0..mesh.n_vertices() {
            let p = mesh.vertices[v];
            match mesh.boundary_tag(v) {
                Some(tag) => {
                    assert!(
                        (domain.position(tag.t) - p).norm() < 1e-10 * diam,
                        "vertex {v}"
                    );
                }
                None => assert!(domain.contains(p)),
            }
        }
        let mult = mesh.edge_multiplicity();
        for (&(a, b), &m) in &mult {
            let boundary_edge = mesh.is_boundary(a) && mesh.is_boundary(b) && m == 1;
            assert!(m == 2 || boundary_edge, "edge ({a},{b}) shared by {m}");
        }
        let n_boundary_edges = mult.values().filter(|&&m| m == 1).count();
        assert_eq!(n_boundary_edges, mesh.boundary_vertex_ids.len());
        assert!(mesh.min_angle_deg() >= MIN_ANGLE_DEG);
        let s: Vec<f64> = mesh
            .boundary_vertex_ids
            .iter()
            .map(|&v| mesh.boundary_tag(v).unwrap().s)
            .collect();
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn disk_area_coarse_and_fine() {
        let d = disk();
        let coarse = triangulate(&d, 0.5).unwrap();
        assert!((coarse.total_area() - PI).abs() < 0.05);
        check_invariants(&d, &coarse);
        let fine = triangulate(&d, 0.05).unwrap();
        assert!((fine.total_area() - PI).abs() < 5e-4);
        check_invariants(&d, &fine);
    }

    #[test]
    fn ellipse_is_a_topological_disk() {
        let d = Domain::new(DomainSpec::Ellipse { a: 2.0, b: 1.0 }).unwrap();
        let mesh = triangulate(&d, 0.1).unwrap();
        assert_eq!(mesh.euler_characteristic(), 1);
        check_invariants(&d, &mesh);
    }

    #[test]
    fn asymmetric_domain_uses_full_delaunay() {
        let d = Domain::new(DomainSpec::Fourier {
            r0: 1.0,
            harmonics: vec![(1, 0.05, 0.02), (3, 0.02, 0.0)],
        })
        .unwrap();
        let mesh = triangulate(&d, 0.08).unwrap();
        assert_eq!(mesh.euler_characteristic(), 1);
        check_invariants(&d, &mesh);
    }

    #[test]
    fn area_converges_at_second_order() {
        let d = disk();
        let hs = [0.2, 0.1, 0.05];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| (triangulate(&d, h).unwrap().total_area() - PI).abs())
            .collect();
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (h, e) in hs.iter().zip(&errs) {
            let (x, y) = (h.ln(), e.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let order = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
        assert!(order >= 1.8, "order {order}, errors {errs:?}");
    }

    #[test]
    fn neighbors_are_symmetric_with_lattice_degree() {
        let d = disk();
        let mesh = triangulate(&d, 0.1).unwrap();
        for v in 0..mesh.n_vertices() {
            for &u in mesh.vertex_neighbors(v).unwrap() {
                assert!(mesh.vertex_neighbors(u).unwrap().contains(&v));
            }
            if mesh.is_boundary(v) {
                assert!(mesh.vertex_neighbors(v).unwrap().len() >= 2);
            }
        }
        // an off-axis lattice vertex deep inside keeps the triangular-lattice degree
        let target = Vec2::new(0.25, 0.25 * 3f64.sqrt());
        let deep = (0..mesh.n_vertices())
            .min_by(|&a, &b| {
                let da = (mesh.vertices[a] - target).norm();
                let db = (mesh.vertices[b] - target).norm();
                da.total_cmp(&db)
            })
            .unwrap();
        assert!((mesh.vertices[deep] - target).norm() < 1e-12);
        assert_eq!(mesh.vertex_neighbors(deep).unwrap().len(), 6);
        assert!(matches!(
            mesh.vertex_neighbors(mesh.n_vertices()),
            Err(MeshError::UnknownVertex(_))
        ));
    }

    #[test]
    fn symmetric_meshes_are_exactly_mirrored() {
        let d = Domain::new(DomainSpec::Ellipse { a: 2.0, b: 1.0 }).unwrap();
        let mesh = triangulate(&d, 0.1).unwrap();
        let mut keys: Vec<(i64, i64)> = mesh
            .vertices
            .iter()
            .map(|p| ((p.x * 1e12).round() as i64, (p.y * 1e12).round() as i64))
            .collect();
        keys.sort_unstable();
        for p in &mesh.vertices {
            for (sx, sy) in [(-1.0, 1.0), (1.0, -1.0)] {
                let k = (
                    (sx * p.x * 1e12).round() as i64,
                    (sy * p.y * 1e12).round() as i64,
                );
                assert!(keys.binary_search(&k).is_ok());
            }
        }
    }

    #[test]
    fn rejects_bad_h_and_interpolates_linears() {
        let d = disk();
        assert!(matches!(
            triangulate(&d, 0.0),
            Err(MeshError::InvalidMeshSize { .. })
        ));
        assert!(triangulate(&d, 1.5).is_err());
        let mesh = triangulate(&d, 0.2).unwrap();
        let f: Vec<f64> = mesh
            .vertices
            .iter()
            .map(|p| 2.0 * p.x - p.y + 0.5)
            .collect();
        let q = Vec2::new(0.31, -0.27);
        assert!((mesh.interpolate(&f, q).unwrap() - (2.0 * 0.31 + 0.27 + 0.5)).abs() < 1e-12);
        assert!(mesh.interpolate(&f, Vec2::new(1.5, 0.0)).is_none());
    }
}
