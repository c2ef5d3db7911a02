//! Conforming triangulations of polygonal domains with labelled boundary
//! components, preset domains, uniform refinement and the lumped boundary
//! measure.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Point<T> = [T; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Interior,
    Boundary,
}

/// Boundary edge, oriented so that the domain lies to its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub component: usize,
}

/// Exact geometry a boundary component approximates. Refinement projects new
/// boundary midpoints onto circles; polygonal components stay straight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCurve<T> {
    Polygonal,
    Circle { center: Point<T>, radius: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Square,
    Disk,
    Annulus,
    Lshape,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Square, Preset::Disk, Preset::Annulus, Preset::Lshape];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Square => "square",
            Preset::Disk => "disk",
            Preset::Annulus => "annulus",
            Preset::Lshape => "lshape",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square" => Ok(Preset::Square),
            "disk" => Ok(Preset::Disk),
            "annulus" => Ok(Preset::Annulus),
            "lshape" | "l-shape" => Ok(Preset::Lshape),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

/// Inner radius of the annulus preset; the outer radius is 1.
pub const ANNULUS_INNER_RADIUS: f64 = 0.5;

/// Validated conforming triangulation. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    vertices: Vec<Point<T>>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    boundary_edge_triangle: Vec<usize>,
    node_class: Vec<NodeClass>,
    component_count: usize,
    omega_connected: bool,
    curves: Vec<BoundaryCurve<T>>,
}

fn signed_area<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) * T::lit(0.5)
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl<T: Scalar> Mesh<T> {
    /// Builds a mesh and checks every structural invariant, rejecting on the
    /// first violation with the offending triangle or edge index.
    pub fn new(
        vertices: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        Self::with_curves(vertices, triangles, boundary_edges, Vec::new())
    }

    /// As [`Mesh::new`], attaching the curve each boundary component
    /// approximates (missing entries default to polygonal).
    pub fn with_curves(
        vertices: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        mut boundary_edges: Vec<BoundaryEdge>,
        mut curves: Vec<BoundaryCurve<T>>,
    ) -> Result<Self> {
        let nv = vertices.len();
        let invalid = |msg: String| Err(Error::InvalidMesh(msg));

        if triangles.is_empty() {
            return invalid("mesh has no triangles".into());
        }
        for (i, p) in vertices.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return invalid(format!("vertex {i} has non-finite coordinates"));
            }
        }

        let mut referenced = vec![false; nv];
        let mut edges: BTreeMap<(usize, usize), Vec<(usize, [usize; 2])>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return invalid(format!("triangle {t} references vertex {v}, but only {nv} vertices exist"));
                }
                referenced[v] = true;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return invalid(format!("triangle {t} has repeated vertices {tri:?}"));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > T::zero()) {
                return invalid(format!("triangle {t} has non-positive signed area {area}"));
            }
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let entry = edges.entry(edge_key(a, b)).or_default();
                entry.push((t, [a, b]));
                if entry.len() > 2 {
                    return invalid(format!("edge ({a}, {b}) of triangle {t} is shared by more than two triangles"));
                }
                if entry.len() == 2 && entry[0].1 == entry[1].1 {
                    return invalid(format!(
                        "triangles {} and {t} traverse edge ({a}, {b}) in the same direction",
                        entry[0].0
                    ));
                }
            }
        }
        if let Some(v) = referenced.iter().position(|r| !r) {
            return invalid(format!("vertex {v} is not used by any triangle"));
        }

        let mut listed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut boundary_edge_triangle = Vec::with_capacity(boundary_edges.len());
        for (k, edge) in boundary_edges.iter_mut().enumerate() {
            let [a, b] = edge.nodes;
            if a >= nv || b >= nv || a == b {
                return invalid(format!("boundary edge {k} ({a}, {b}) has invalid vertex indices"));
            }
            let key = edge_key(a, b);
            if let Some(prev) = listed.insert(key, k) {
                return invalid(format!("boundary edge {k} ({a}, {b}) duplicates boundary edge {prev}"));
            }
            match edges.get(&key) {
                Some(owners) if owners.len() == 1 => {
                    edge.nodes = owners[0].1;
                    boundary_edge_triangle.push(owners[0].0);
                }
                Some(owners) => {
                    return invalid(format!(
                        "boundary edge {k} ({a}, {b}) is an edge of {} triangles, expected exactly one",
                        owners.len()
                    ))
                }
                None => return invalid(format!("boundary edge {k} ({a}, {b}) is not an edge of any triangle")),
            }
        }
        for (key, owners) in &edges {
            if owners.len() == 1 && !listed.contains_key(key) {
                return invalid(format!(
                    "edge ({}, {}) of triangle {} lies on a single triangle but is not listed as a boundary edge",
                    key.0, key.1, owners[0].0
                ));
            }
        }

        // boundary edges must form closed simple cycles
        let mut outgoing: Vec<Option<usize>> = vec![None; nv];
        let mut incoming = vec![0usize; nv];
        for (k, e) in boundary_edges.iter().enumerate() {
            let [a, b] = e.nodes;
            if outgoing[a].is_some() {
                return invalid(format!(
                    "boundary edge {k} leaves vertex {a}, which already starts another boundary edge (boundary is not a simple cycle)"
                ));
            }
            outgoing[a] = Some(k);
            incoming[b] += 1;
        }
        for (k, e) in boundary_edges.iter().enumerate() {
            let [a, b] = e.nodes;
            if incoming[b] != 1 || outgoing[b].is_none() || incoming[a] != 1 {
                return invalid(format!(
                    "boundary edge {k} ({a}, {b}) does not continue into a closed simple boundary cycle"
                ));
            }
        }
        let mut visited = vec![false; boundary_edges.len()];
        let mut cycle_ids: Vec<usize> = Vec::new();
        for start in 0..boundary_edges.len() {
            if visited[start] {
                continue;
            }
            let id = boundary_edges[start].component;
            let mut k = start;
            while !visited[k] {
                visited[k] = true;
                if boundary_edges[k].component != id {
                    return invalid(format!(
                        "boundary edge {k} has component id {} but its cycle is labelled {id}",
                        boundary_edges[k].component
                    ));
                }
                k = outgoing[boundary_edges[k].nodes[1]].expect("checked above");
            }
            if cycle_ids.contains(&id) {
                return invalid(format!(
                    "boundary edge {start} starts a second cycle labelled with component id {id}"
                ));
            }
            cycle_ids.push(id);
        }
        let component_count = cycle_ids.len();
        if let Some(k) = boundary_edges.iter().position(|e| e.component >= component_count) {
            return invalid(format!(
                "boundary edge {k} has component id {}, expected ids 0..{component_count}",
                boundary_edges[k].component
            ));
        }

        let mut node_class = vec![NodeClass::Interior; nv];
        for e in &boundary_edges {
            node_class[e.nodes[0]] = NodeClass::Boundary;
            node_class[e.nodes[1]] = NodeClass::Boundary;
        }

        let mut uf = UnionFind::new(triangles.len());
        for owners in edges.values() {
            if owners.len() == 2 {
                uf.union(owners[0].0, owners[1].0);
            }
        }
        let root = uf.find(0);
        let omega_connected = (0..triangles.len()).all(|t| uf.find(t) == root);

        curves.resize(component_count, BoundaryCurve::Polygonal);

        Ok(Self {
            vertices,
            triangles,
            boundary_edges,
            boundary_edge_triangle,
            node_class,
            component_count,
            omega_connected,
            curves,
        })
    }

    /// Derives boundary edges from a triangle soup. `label` maps an edge
    /// midpoint to its component id.
    fn from_triangles(
        vertices: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        label: impl Fn(Point<T>) -> usize,
        curves: Vec<BoundaryCurve<T>>,
    ) -> Result<Self> {
        let mut count: BTreeMap<(usize, usize), ([usize; 2], usize)> = BTreeMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                count.entry(edge_key(a, b)).or_insert(([a, b], 0)).1 += 1;
            }
        }
        let half = T::lit(0.5);
        let boundary_edges = count
            .values()
            .filter(|(_, c)| *c == 1)
            .map(|&([a, b], _)| {
                let (pa, pb) = (vertices[a], vertices[b]);
                let mid = [(pa[0] + pb[0]) * half, (pa[1] + pb[1]) * half];
                BoundaryEdge { nodes: [a, b], component: label(mid) }
            })
            .collect();
        Self::with_curves(vertices, triangles, boundary_edges, curves)
    }

    pub fn preset(preset: Preset, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidMesh("preset resolution must be at least 1".into()));
        }
        match preset {
            Preset::Square => Self::square(resolution),
            Preset::Disk => Self::disk(resolution),
            Preset::Annulus => Self::annulus(resolution),
            Preset::Lshape => Self::lshape(resolution),
        }
    }

    /// Unit square split into `n × n` cells, each cut along its rising diagonal.
    fn square(n: usize) -> Result<Self> {
        Self::grid(n, |_, _| true)
    }

    /// `[0,1]²` without the open upper-right quarter.
    fn lshape(n: usize) -> Result<Self> {
        Self::grid(2 * n, |i, j| i < n || j < n)
    }

    fn grid(n: usize, keep: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let h = T::one() / T::from_count(n);
        let mut index = vec![usize::MAX; (n + 1) * (n + 1)];
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut id = |i: usize, j: usize, vertices: &mut Vec<Point<T>>| {
            let slot = &mut index[j * (n + 1) + i];
            if *slot == usize::MAX {
                *slot = vertices.len();
                vertices.push([T::from_count(i) * h, T::from_count(j) * h]);
            }
            *slot
        };
        for j in 0..n {
            for i in 0..n {
                if !keep(i, j) {
                    continue;
                }
                let v00 = id(i, j, &mut vertices);
                let v10 = id(i + 1, j, &mut vertices);
                let v11 = id(i + 1, j + 1, &mut vertices);
                let v01 = id(i, j + 1, &mut vertices);
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Self::from_triangles(vertices, triangles, |_| 0, Vec::new())
    }

    /// Unit disk from concentric rings; ring `k` carries `4k` vertices and the
    /// boundary polygon has `4n` segments.
    fn disk(n: usize) -> Result<Self> {
        let mut vertices = vec![[T::zero(), T::zero()]];
        let mut rings: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..=n {
            let radius = T::from_count(k) / T::from_count(n);
            rings.push(push_ring(&mut vertices, 4 * k, radius, T::zero(), radius == T::one()));
        }
        let mut triangles = Vec::new();
        for k in 1..=n {
            zip_rings(&vertices, &rings[k - 1], &rings[k], &mut triangles);
        }
        let curves = vec![BoundaryCurve::Circle { center: [T::zero(); 2], radius: T::one() }];
        Self::from_triangles(vertices, triangles, |_| 0, curves)
    }

    /// Annulus between radii 1/2 and 1 with `4n` segments on each circle.
    /// Component 0 is the outer circle, component 1 the inner one.
    fn annulus(n: usize) -> Result<Self> {
        let inner = T::lit(ANNULUS_INNER_RADIUS);
        let width = T::one() - inner;
        let segments = 4 * n;
        let spacing = T::TAU() * (inner + T::one()) * T::lit(0.5) / T::from_count(segments);
        let layers = (width / spacing).round().to_usize().unwrap_or(1).max(1);
        let half_step = T::PI() / T::from_count(segments);
        let mut vertices = Vec::new();
        let mut rings = Vec::new();
        for l in 0..=layers {
            let radius = inner + width * T::from_count(l) / T::from_count(layers);
            let offset = if l % 2 == 1 { half_step } else { T::zero() };
            let on_circle = l == 0 || l == layers;
            rings.push(push_ring(&mut vertices, segments, radius, offset, on_circle));
        }
        let mut triangles = Vec::new();
        for l in 1..=layers {
            zip_rings(&vertices, &rings[l - 1], &rings[l], &mut triangles);
        }
        let threshold = (inner + T::one()) * T::lit(0.5) * half_step.cos();
        let curves = vec![
            BoundaryCurve::Circle { center: [T::zero(); 2], radius: T::one() },
            BoundaryCurve::Circle { center: [T::zero(); 2], radius: inner },
        ];
        Self::from_triangles(
            vertices,
            triangles,
            |m| usize::from(m[0].hypot(m[1]) < threshold),
            curves,
        )
    }

    /// Uniform midpoint refinement: every triangle splits into four similar
    /// children. Boundary midpoints on circular components are projected onto
    /// the circle.
    pub fn refine(&self) -> Self {
        let half = T::lit(0.5);
        let mut vertices = self.vertices.clone();
        let mut boundary_curve: BTreeMap<(usize, usize), BoundaryCurve<T>> = BTreeMap::new();
        for e in &self.boundary_edges {
            boundary_curve.insert(edge_key(e.nodes[0], e.nodes[1]), self.curves[e.component]);
        }
        let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point<T>>| -> usize {
            let key = edge_key(a, b);
            *midpoints.entry(key).or_insert_with(|| {
                let (pa, pb) = (vertices[a], vertices[b]);
                let mut m = [(pa[0] + pb[0]) * half, (pa[1] + pb[1]) * half];
                if let Some(BoundaryCurve::Circle { center, radius }) = boundary_curve.get(&key) {
                    let (dx, dy) = (m[0] - center[0], m[1] - center[1]);
                    let r = dx.hypot(dy);
                    m = [center[0] + dx * *radius / r, center[1] + dy * *radius / r];
                }
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let [a, b] = e.nodes;
            let m = midpoint(a, b, &mut vertices);
            boundary_edges.push(BoundaryEdge { nodes: [a, m], component: e.component });
            boundary_edges.push(BoundaryEdge { nodes: [m, b], component: e.component });
        }
        Self::with_curves(vertices, triangles, boundary_edges, self.curves.clone())
            .expect("uniform refinement of a valid mesh is valid")
    }

    /// Refines `levels` times.
    pub fn refined(&self, levels: usize) -> Self {
        (0..levels).fold(self.clone(), |m, _| m.refine())
    }

    /// Places `other` beside `self` as a second, disjoint piece of Ω. Its
    /// boundary components are renumbered after those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(other.triangles.iter().map(|t| t.map(|v| v + offset)));
        let mut edges = self.boundary_edges.clone();
        edges.extend(other.boundary_edges.iter().map(|e| BoundaryEdge {
            nodes: e.nodes.map(|v| v + offset),
            component: e.component + self.component_count,
        }));
        let mut curves = self.curves.clone();
        curves.extend_from_slice(&other.curves);
        Self::with_curves(vertices, triangles, edges, curves)
    }

    pub fn translated(&self, shift: Point<T>) -> Self {
        let mut out = self.clone();
        for p in &mut out.vertices {
            p[0] += shift[0];
            p[1] += shift[1];
        }
        for curve in &mut out.curves {
            if let BoundaryCurve::Circle { center, .. } = curve {
                center[0] += shift[0];
                center[1] += shift[1];
            }
        }
        out
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Index of the unique triangle containing boundary edge `k`.
    pub fn boundary_edge_triangle(&self, k: usize) -> usize {
        self.boundary_edge_triangle[k]
    }

    pub fn node_class(&self) -> &[NodeClass] {
        &self.node_class
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn omega_connected(&self) -> bool {
        self.omega_connected
    }

    pub fn curves(&self) -> &[BoundaryCurve<T>] {
        &self.curves
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        self.nodes_of(NodeClass::Interior)
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        self.nodes_of(NodeClass::Boundary)
    }

    fn nodes_of(&self, class: NodeClass) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.node_class[v] == class).collect()
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, k: usize) -> T {
        let [a, b] = self.boundary_edges[k].nodes;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        (pb[0] - pa[0]).hypot(pb[1] - pa[1])
    }

    /// Unit outward normal of boundary edge `k`.
    pub fn outward_normal(&self, k: usize) -> Point<T> {
        let [a, b] = self.boundary_edges[k].nodes;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let len = self.edge_length(k);
        [(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len]
    }

    pub fn boundary_length(&self) -> T {
        (0..self.boundary_edges.len()).map(|k| self.edge_length(k)).sum()
    }

    /// Polygonal arc length of each boundary component.
    pub fn component_perimeters(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.component_count];
        for (k, e) in self.boundary_edges.iter().enumerate() {
            out[e.component] += self.edge_length(k);
        }
        out
    }

    /// Sorted interior angles of triangle `t`.
    pub fn triangle_angles(&self, t: usize) -> [T; 3] {
        let tri = self.triangles[t];
        let mut angles = [T::zero(); 3];
        for k in 0..3 {
            let p = self.vertices[tri[k]];
            let q = self.vertices[tri[(k + 1) % 3]];
            let r = self.vertices[tri[(k + 2) % 3]];
            let (ux, uy) = (q[0] - p[0], q[1] - p[1]);
            let (vx, vy) = (r[0] - p[0], r[1] - p[1]);
            angles[k] = (ux * vy - uy * vx).atan2(ux * vx + uy * vy);
        }
        angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
        angles
    }

    /// Gradients of the three P1 hat functions on triangle `t`, in the
    /// triangle's vertex order.
    pub fn hat_gradients(&self, t: usize) -> [Point<T>; 3] {
        let tri = self.triangles[t];
        let area2 = self.triangle_area(t) * T::lit(2.0);
        let mut g = [[T::zero(); 2]; 3];
        for k in 0..3 {
            let q = self.vertices[tri[(k + 1) % 3]];
            let r = self.vertices[tri[(k + 2) % 3]];
            g[k] = [(q[1] - r[1]) / area2, (r[0] - q[0]) / area2];
        }
        g
    }

    pub fn cast<U: Scalar>(&self) -> Mesh<U> {
        let conv = |p: Point<T>| [U::lit(p[0].as_f64()), U::lit(p[1].as_f64())];
        Mesh {
            vertices: self.vertices.iter().map(|&p| conv(p)).collect(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
            boundary_edge_triangle: self.boundary_edge_triangle.clone(),
            node_class: self.node_class.clone(),
            component_count: self.component_count,
            omega_connected: self.omega_connected,
            curves: self
                .curves
                .iter()
                .map(|c| match *c {
                    BoundaryCurve::Polygonal => BoundaryCurve::Polygonal,
                    BoundaryCurve::Circle { center, radius } => {
                        BoundaryCurve::Circle { center: conv(center), radius: U::lit(radius.as_f64()) }
                    }
                })
                .collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(s)?;
        file.into_mesh()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = MeshFile {
            vertices: self.vertices.iter().map(|p| [p[0].as_f64(), p[1].as_f64()]).collect(),
            triangles: self.triangles.clone(),
            boundary_edges: self
                .boundary_edges
                .iter()
                .map(|e| [e.nodes[0], e.nodes[1], e.component])
                .collect(),
        };
        serde_json::to_string(&file).expect("mesh serialization cannot fail")
    }
}

/// Mesh JSON file layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<[usize; 3]>,
}

impl MeshFile {
    pub fn into_mesh<T: Scalar>(self) -> Result<Mesh<T>> {
        let vertices = self.vertices.iter().map(|p| [T::lit(p[0]), T::lit(p[1])]).collect();
        let edges = self
            .boundary_edges
            .iter()
            .map(|e| BoundaryEdge { nodes: [e[0], e[1]], component: e[2] })
            .collect();
        Mesh::new(vertices, self.triangles, edges)
    }
}

fn push_ring<T: Scalar>(
    vertices: &mut Vec<Point<T>>,
    count: usize,
    radius: T,
    offset: T,
    on_circle: bool,
) -> Vec<usize> {
    (0..count)
        .map(|j| {
            let theta = offset + T::TAU() * T::from_count(j) / T::from_count(count);
            let (s, c) = theta.sin_cos();
            let p = if on_circle {
                // keep circle vertices exactly at the nominal radius
                let r = radius / c.hypot(s);
                [r * c, r * s]
            } else {
                [radius * c, radius * s]
            };
            vertices.push(p);
            vertices.len() - 1
        })
        .collect()
}

/// Triangulates the strip between two closed concentric rings, advancing
/// along whichever ring gives the shorter diagonal.
fn zip_rings<T: Scalar>(
    vertices: &[Point<T>],
    inner: &[usize],
    outer: &[usize],
    triangles: &mut Vec<[usize; 3]>,
) {
    let mut push = |a: usize, b: usize, c: usize| {
        if signed_area(vertices[a], vertices[b], vertices[c]) > T::zero() {
            triangles.push([a, b, c]);
        } else {
            triangles.push([a, c, b]);
        }
    };
    if inner.len() == 1 {
        for j in 0..outer.len() {
            push(inner[0], outer[j], outer[(j + 1) % outer.len()]);
        }
        return;
    }
    let (ni, no) = (inner.len(), outer.len());
    let (mut i, mut j) = (0, 0);
    let dist = |a: usize, b: usize| {
        let (p, q) = (vertices[a], vertices[b]);
        (p[0] - q[0]).hypot(p[1] - q[1])
    };
    while i < ni || j < no {
        // take the shorter new diagonal when both rings can advance
        let advance_outer = j < no
            && (i == ni
                || dist(inner[i % ni], outer[(j + 1) % no]) < dist(inner[(i + 1) % ni], outer[j % no]));
        if advance_outer {
            push(inner[i % ni], outer[j], outer[(j + 1) % no]);
            j += 1;
        } else {
            push(inner[i], outer[j % no], inner[(i + 1) % ni]);
            i += 1;
        }
    }
}

/// Lumped boundary measure: every boundary node carries half the summed
/// lengths of its incident boundary edges.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMeasure<T> {
    nodes: Vec<usize>,
    weights: Vec<T>,
    components: Vec<usize>,
}

impl<T: Scalar> BoundaryMeasure<T> {
    pub fn new(mesh: &Mesh<T>) -> Self {
        let nodes = mesh.boundary_nodes();
        let mut position = vec![usize::MAX; mesh.vertex_count()];
        for (i, &v) in nodes.iter().enumerate() {
            position[v] = i;
        }
        let mut weights = vec![T::zero(); nodes.len()];
        let mut components = vec![0; nodes.len()];
        let half = T::lit(0.5);
        for (k, e) in mesh.boundary_edges().iter().enumerate() {
            let len = mesh.edge_length(k);
            for &v in &e.nodes {
                weights[position[v]] += half * len;
                components[position[v]] = e.component;
            }
        }
        Self { nodes, weights, components }
    }

    /// Boundary vertex indices in ascending order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Component id of each boundary node, aligned with [`Self::nodes`].
    pub fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn total(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn component_totals(&self, count: usize) -> Vec<T> {
        let mut out = vec![T::zero(); count];
        for (&c, &w) in self.components.iter().zip(&self.weights) {
            out[c] += w;
        }
        out
    }
}

pub fn preset_domain<T: Scalar>(name: &str, resolution: usize) -> Result<Mesh<T>> {
    Mesh::preset(name.parse()?, resolution)
}

pub fn boundary_measure<T: Scalar>(mesh: &Mesh<T>) -> BoundaryMeasure<T> {
    BoundaryMeasure::new(mesh)
}
