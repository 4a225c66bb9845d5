use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::scenario::{Model, Scenario};
use super::GeometryError;

/// Default vertex budget for a single mesh.
pub const MAX_VERTICES: usize = 2_000_000;

/// Closed-form fields sampled at one vertex. `bweight` and `kappa` are only
/// present on boundary vertices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexField {
    pub q: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub bweight: Option<f64>,
    pub kappa: Option<f64>,
}

/// Intrinsic triangulation of a model surface. Vertex coordinates are only
/// used to measure distances; every metric quantity downstream comes from
/// `edge_length`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannianMesh {
    pub scenario: String,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// Ordered closed loops of boundary edges.
    pub boundary_loops: Vec<Vec<[usize; 2]>>,
    /// Undirected edges `[i, j]` with `i < j`, sorted.
    pub edges: Vec<[usize; 2]>,
    pub edge_length: Vec<f64>,
    pub field: Vec<VertexField>,
    pub level: u32,
    pub h: f64,
}

impl RiemannianMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn edge_length(&self, i: usize, j: usize) -> Option<f64> {
        let key = if i < j { [i, j] } else { [j, i] };
        self.edges
            .binary_search(&key)
            .ok()
            .map(|e| self.edge_length[e])
    }

    /// Lengths `[l0, l1, l2]` with `lk` the edge opposite corner `k`.
    pub fn triangle_lengths(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let len = |i, j| self.edge_length(i, j).expect("triangle edge missing from edge list");
        [len(b, c), len(c, a), len(a, b)]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        heron(self.triangle_lengths(t))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn on_boundary(&self, v: usize) -> bool {
        self.field[v].bweight.is_some()
    }

    /// Boundary vertices in loop order.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        self.boundary_loops
            .iter()
            .flat_map(|l| l.iter().map(|e| e[0]))
            .collect()
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic() - self.boundary_loops.len() as i64) / 2
    }

    /// Checks the triangulation invariants: strict triangle inequality,
    /// manifold edges, closed disjoint boundary loops, and (optionally) the
    /// expected loop count and Euler characteristic.
    pub fn validate(
        &self,
        expected_loops: Option<usize>,
        expected_euler: Option<i64>,
    ) -> Result<(), GeometryError> {
        let err = |m: String| Err(GeometryError::MeshInvariant(m));
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_lengths(t);
            if !(a < b + c && b < c + a && c < a + b) {
                return err(format!("triangle {t} violates the triangle inequality"));
            }
        }
        let mut uses = vec![0u32; self.edges.len()];
        for tri in &self.triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                let key = if i < j { [i, j] } else { [j, i] };
                match self.edges.binary_search(&key) {
                    Ok(e) => uses[e] += 1,
                    Err(_) => return err(format!("edge {key:?} missing from edge list")),
                }
            }
        }
        let mut boundary_edges = 0;
        for (e, &u) in uses.iter().enumerate() {
            match u {
                1 => boundary_edges += 1,
                2 => {}
                _ => return err(format!("edge {:?} used by {u} triangles", self.edges[e])),
            }
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut loop_edges = 0;
        for lp in &self.boundary_loops {
            for (k, e) in lp.iter().enumerate() {
                let next = lp[(k + 1) % lp.len()];
                if e[1] != next[0] {
                    return err("boundary loop is not closed".into());
                }
                if seen[e[0]] {
                    return err(format!("boundary vertex {} visited twice", e[0]));
                }
                seen[e[0]] = true;
                let key = if e[0] < e[1] { [e[0], e[1]] } else { [e[1], e[0]] };
                match self.edges.binary_search(&key) {
                    Ok(i) if uses[i] == 1 => {}
                    _ => return err(format!("loop edge {e:?} is not a boundary edge")),
                }
            }
            loop_edges += lp.len();
        }
        if loop_edges != boundary_edges {
            return err("boundary loops do not cover every boundary edge".into());
        }
        if let Some(n) = expected_loops {
            if n != self.boundary_loops.len() {
                return err(format!(
                    "{} boundary loops, expected {n}",
                    self.boundary_loops.len()
                ));
            }
        }
        if let Some(chi) = expected_euler {
            if chi != self.euler_characteristic() {
                return err(format!(
                    "Euler characteristic {}, expected {chi}",
                    self.euler_characteristic()
                ));
            }
        }
        Ok(())
    }
}

/// Area of a Euclidean triangle from its edge lengths (Kahan's stable form).
pub(crate) fn heron(l: [f64; 3]) -> f64 {
    let mut s = l;
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

/// Number of vertices `mesh` would produce, without building anything.
pub fn vertex_estimate(model: &Model, level: u32) -> Option<usize> {
    let p = |base: usize, e: u32| base.checked_mul(1usize.checked_shl(e)?);
    match *model {
        Model::Sphere { .. } => Some(10 * p(1, 2 * level)? + 2),
        Model::Cap { .. } => {
            let n = cap_divisions(level)?;
            Some(2 * n * n + 2 * n + 1)
        }
        Model::FlatTorus { .. } => {
            let n = p(4, level)?;
            n.checked_mul(n)
        }
        Model::FlatDisk { .. } => {
            let n = disk_rings(level)?;
            Some(1 + 3 * n * (n + 1))
        }
        Model::FlatBall { .. } | Model::SphereRegion { .. } => None,
    }
}

/// Triangulates the scenario's model surface at refinement `level`; every
/// level quarters the triangles and roughly halves `h`.
pub fn mesh(scenario: &Scenario, level: u32) -> Result<RiemannianMesh, GeometryError> {
    let estimate = vertex_estimate(&scenario.model, level)
        .ok_or_else(|| GeometryError::QuadratureOnly(scenario.name.clone()))?;
    if estimate > MAX_VERTICES || level > 30 {
        return Err(GeometryError::LevelTooLarge {
            level,
            vertices: estimate,
            cap: MAX_VERTICES,
        });
    }
    let (vertices, triangles, metric) = match scenario.model {
        Model::Sphere { radius } => {
            let (v, t) = icosphere(level);
            (scale(v, radius), t, Metric::Sphere(radius))
        }
        Model::Cap { radius, angle } => {
            let (v, t) = upper_hemisphere(cap_divisions(level).expect("checked by estimate"));
            let v = v.into_iter().map(|x| squeeze_polar(x, angle / FRAC_PI_2)).collect();
            (scale(v, radius), t, Metric::Sphere(radius))
        }
        Model::FlatTorus { side } => {
            let (v, t) = torus_grid(4 << level, side);
            (v, t, Metric::Torus(side))
        }
        Model::FlatDisk { radius } => {
            let (v, t) = ring_disk(disk_rings(level).expect("checked by estimate"), radius);
            (v, t, Metric::Plane)
        }
        Model::FlatBall { .. } | Model::SphereRegion { .. } => unreachable!(),
    };
    debug_assert_eq!(vertices.len(), estimate);

    let edges = collect_edges(&triangles);
    let edge_length: Vec<f64> = edges
        .iter()
        .map(|&[i, j]| metric.distance(vertices[i], vertices[j]))
        .collect();
    let boundary_loops = boundary_loops(&triangles, vertices.len());

    let interior = VertexField {
        q: scenario.potential(),
        k: scenario.k_intrinsic,
        bweight: None,
        kappa: None,
    };
    let mut field = vec![interior; vertices.len()];
    for lp in &boundary_loops {
        for e in lp {
            field[e[0]].bweight = Some(scenario.boundary_weight());
            field[e[0]].kappa = Some(scenario.kappa_boundary.unwrap_or(0.0));
        }
    }
    let h = edge_length.iter().copied().fold(0.0, f64::max);
    let mesh = RiemannianMesh {
        scenario: scenario.name.clone(),
        vertices,
        triangles,
        boundary_loops,
        edges,
        edge_length,
        field,
        level,
        h,
    };
    mesh.validate(Some(scenario.boundary_components), scenario.exact_euler)?;
    Ok(mesh)
}

enum Metric {
    Sphere(f64),
    Torus(f64),
    Plane,
}

impl Metric {
    fn distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        match *self {
            Metric::Sphere(r) => {
                let (ua, ub) = (normalize(a), normalize(b));
                let cross = [
                    ua[1] * ub[2] - ua[2] * ub[1],
                    ua[2] * ub[0] - ua[0] * ub[2],
                    ua[0] * ub[1] - ua[1] * ub[0],
                ];
                r * norm(cross).atan2(dot(ua, ub))
            }
            Metric::Torus(side) => {
                let wrap = |d: f64| {
                    let d = d.abs() % side;
                    d.min(side - d)
                };
                wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
            }
            Metric::Plane => norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]]),
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

fn scale(v: Vec<[f64; 3]>, r: f64) -> Vec<[f64; 3]> {
    v.into_iter().map(|x| [x[0] * r, x[1] * r, x[2] * r]).collect()
}

/// Splits every triangle of a unit-sphere mesh into four, placing new
/// vertices at geodesic edge midpoints.
fn subdivide(vertices: &mut Vec<[f64; 3]>, faces: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |i: usize, j: usize, vertices: &mut Vec<[f64; 3]>| {
        let key = (i.min(j), i.max(j));
        *cache.entry(key).or_insert_with(|| {
            let (a, b) = (vertices[i], vertices[j]);
            vertices.push(normalize([a[0] + b[0], a[1] + b[1], a[2] + b[2]]));
            vertices.len() - 1
        })
    };
    let mut out = Vec::with_capacity(4 * faces.len());
    for &[a, b, c] in faces {
        let ab = midpoint(a, b, vertices);
        let bc = midpoint(b, c, vertices);
        let ca = midpoint(c, a, vertices);
        out.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
    }
    out
}

fn icosphere(level: u32) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut vertices: Vec<[f64; 3]> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        faces = subdivide(&mut vertices, &faces);
    }
    (vertices, faces)
}

/// Upper half of the octahedron with each face split into an `n × n`
/// barycentric lattice, projected radially onto the unit sphere.
fn upper_hemisphere(n: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let pole = [0i64, 0, 1];
    let equator = [[1i64, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]];
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut vertices = Vec::with_capacity(2 * n * n + 2 * n + 1);
    let mut triangles = Vec::with_capacity(4 * n * n);
    let ni = n as i64;
    for s in 0..4 {
        let (b, c) = (equator[s], equator[(s + 1) % 4]);
        // Lattice points are integer combinations of the corners, which
        // makes points on shared face edges coincide exactly.
        let mut at = |i: i64, j: i64| -> usize {
            let w = ni - i - j;
            let key = [0, 1, 2].map(|d| w * pole[d] + i * b[d] + j * c[d]);
            *index.entry(key).or_insert_with(|| {
                vertices.push(normalize(key.map(|x| x as f64)));
                vertices.len() - 1
            })
        };
        for i in 0..ni {
            for j in 0..ni - i {
                let (p0, p1, p2) = (at(i, j), at(i + 1, j), at(i, j + 1));
                triangles.push([p0, p1, p2]);
                if i + j + 2 <= ni {
                    let p3 = at(i + 1, j + 1);
                    triangles.push([p1, p3, p2]);
                }
            }
        }
    }
    (vertices, triangles)
}

/// Rescales the polar angle about the north pole by `factor`; smooth at the
/// pole since it is linear in geodesic normal coordinates.
fn squeeze_polar(v: [f64; 3], factor: f64) -> [f64; 3] {
    let rho = v[0].hypot(v[1]);
    let theta = rho.atan2(v[2]) * factor;
    if rho == 0.0 {
        return [0.0, 0.0, 1.0];
    }
    let (s, c) = theta.sin_cos();
    [s * v[0] / rho, s * v[1] / rho, c]
}

fn torus_grid(n: usize, side: f64) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let step = side / n as f64;
    let idx = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut vertices = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            vertices.push([i as f64 * step, j as f64 * step, 0.0]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    (vertices, triangles)
}

/// Lattice divisions per octant edge of a cap: `3·2^ℓ`.
fn cap_divisions(level: u32) -> Option<usize> {
    3usize.checked_mul(1usize.checked_shl(level)?)
}

/// Ring count of the disk at `level`: one ring at level 0, then `3·2^(ℓ−1)`.
/// Going straight from one ring to two would shrink `h` by only 0.62.
fn disk_rings(level: u32) -> Option<usize> {
    if level == 0 {
        Some(1)
    } else {
        3usize.checked_mul(1usize.checked_shl(level - 1)?)
    }
}

/// Concentric rings at radii `k/n`, ring `k` carrying `6k` vertices, joined
/// sector by sector.
fn ring_disk(n: usize, radius: f64) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let ring_start = |k: usize| if k == 0 { 0 } else { 1 + 3 * k * (k - 1) };
    let at = |k: usize, s: usize, p: usize| {
        if k == 0 {
            0
        } else {
            ring_start(k) + (s * k + p) % (6 * k)
        }
    };
    let mut vertices = vec![[0.0, 0.0, 0.0]];
    for k in 1..=n {
        let r = radius * k as f64 / n as f64;
        for m in 0..6 * k {
            let t = 2.0 * PI * m as f64 / (6 * k) as f64;
            vertices.push([r * t.cos(), r * t.sin(), 0.0]);
        }
    }
    let mut triangles = Vec::with_capacity(6 * n * n);
    for k in 1..=n {
        for s in 0..6 {
            for p in 0..k {
                triangles.push([at(k - 1, s, p), at(k, s, p), at(k, s, p + 1)]);
                if p + 1 < k {
                    triangles.push([at(k - 1, s, p), at(k, s, p + 1), at(k - 1, s, p + 1)]);
                }
            }
        }
    }
    (vertices, triangles)
}

fn collect_edges(triangles: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut edges: Vec<[usize; 2]> = triangles
        .iter()
        .flat_map(|t| {
            (0..3).map(move |k| {
                let (i, j) = (t[k], t[(k + 1) % 3]);
                [i.min(j), i.max(j)]
            })
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

fn boundary_loops(triangles: &[[usize; 3]], nv: usize) -> Vec<Vec<[usize; 2]>> {
    let mut count: BTreeMap<[usize; 2], u32> = BTreeMap::new();
    for t in triangles {
        for k in 0..3 {
            let (i, j) = (t[k], t[(k + 1) % 3]);
            *count.entry([i.min(j), i.max(j)]).or_default() += 1;
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (&[i, j], &c) in &count {
        if c == 1 {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let mut visited = vec![false; nv];
    let mut loops = Vec::new();
    for start in 0..nv {
        if visited[start] || adj[start].is_empty() {
            continue;
        }
        let mut lp = Vec::new();
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            visited[cur] = true;
            let next = match adj[cur].iter().copied().find(|&x| x != prev) {
                Some(x) => x,
                None => break,
            };
            lp.push([cur, next]);
            prev = cur;
            cur = next;
            if cur == start {
                break;
            }
        }
        loops.push(lp);
    }
    loops
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_scenario, GalleryId};

    fn gallery_mesh(id: GalleryId, level: u32) -> RiemannianMesh {
        let s = make_scenario(id.name(), &id.default_params()).unwrap();
        mesh(&s, level).unwrap()
    }

    #[test]
    fn heron_matches_coordinates() {
        assert!((heron([3.0, 4.0, 5.0]) - 6.0).abs() < 1e-14);
        assert!((heron([1.0, 1.0, 2f64.sqrt()]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn topology_of_every_triangulated_scenario() {
        for id in GalleryId::ALL.into_iter().filter(|g| !g.is_quadrature_only()) {
            for level in 0..4 {
                let m = gallery_mesh(id, level);
                let s = make_scenario(id.name(), &id.default_params()).unwrap();
                assert_eq!(Some(m.euler_characteristic()), s.exact_euler, "{id} level {level}");
                assert_eq!(m.boundary_loops.len(), s.boundary_components);
                assert_eq!(m.genus(), s.genus as i64);
                assert_eq!(Some(m.num_vertices()), vertex_estimate(&s.model, level));
            }
        }
    }

    #[test]
    fn disk_level_zero_is_a_hexagon_fan() {
        let m = gallery_mesh(GalleryId::FlatDiskB3, 0);
        assert_eq!(m.num_vertices(), 7);
        assert_eq!(m.triangles.len(), 6);
        assert_eq!(m.boundary_loops.len(), 1);
        assert_eq!(m.boundary_loops[0].len(), 6);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn torus_grid_is_uniform() {
        let m = gallery_mesh(GalleryId::CliffordTorus, 1);
        let side = std::f64::consts::SQRT_2 * PI;
        let step = side / 8.0;
        assert_eq!(m.num_vertices(), 64);
        for &l in &m.edge_length {
            assert!((l - step).abs() < 1e-12 || (l - step * 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(m.is_closed());
    }

    #[test]
    fn h_roughly_halves_per_level() {
        for id in GalleryId::ALL.into_iter().filter(|g| !g.is_quadrature_only()) {
            let hs: Vec<f64> = (0..6).map(|l| gallery_mesh(id, l).h).collect();
            for w in hs.windows(2) {
                assert!(w[1] <= 0.6 * w[0], "{id}: {:?}", hs);
            }
        }
    }

    #[test]
    fn cap_boundary_sits_on_the_cap_circle() {
        let m = gallery_mesh(GalleryId::SphericalCapB3, 2);
        let rho = 1.0f64;
        let circle = rho * (1.0 / rho).atan().sin();
        for v in m.boundary_vertices() {
            let p = m.vertices[v];
            assert!((p[0].hypot(p[1]) - circle).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gallery_mesh(GalleryId::HemisphereS3plus, 3);
        let b = gallery_mesh(GalleryId::HemisphereS3plus, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn refuses_oversized_and_quadrature_only() {
        let s = make_scenario("equatorial_sphere_s3", &Default::default()).unwrap();
        assert!(matches!(mesh(&s, 9), Err(GeometryError::LevelTooLarge { .. })));
        let s = make_scenario("equatorial_b3_in_b4", &Default::default()).unwrap();
        assert!(matches!(mesh(&s, 1), Err(GeometryError::QuadratureOnly(_))));
    }
}
