//! Fixed simplicial background mesh on an axis-aligned box.
//!
//! The mesh is a deterministic structured triangulation: each grid cell is
//! split either along one diagonal (two triangles) or by its centroid (four
//! triangles). Element and facet ids are dense integers in generation order;
//! all downstream determinism relies on this. The mesh is immutable after
//! construction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box2 {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Box2 {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Self {
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    /// Square box `[-half, half]²`.
    pub fn centered_square(half: f64) -> Self {
        Self::new(-half, half, -half, half)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// How each grid cell is triangulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitPattern {
    /// Two triangles along the lower-left to upper-right diagonal.
    Diagonal,
    /// Four triangles meeting in the cell centroid.
    CrissCross,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshError {
    EmptyDomain,
    BoundaryFacet(usize),
    InvalidFacet(usize),
    InvalidElement(usize),
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::EmptyDomain => write!(f, "empty domain"),
            MeshError::BoundaryFacet(id) => write!(f, "facet {id} is a boundary facet"),
            MeshError::InvalidFacet(id) => write!(f, "no facet with id {id}"),
            MeshError::InvalidElement(id) => write!(f, "no element with id {id}"),
        }
    }
}

/// Mesh edge shared by one (boundary) or two (interior) elements.
#[derive(Clone, Copy, Debug)]
pub struct Facet {
    /// Vertex ids, sorted ascending.
    pub verts: [usize; 2],
    /// Adjacent element with the lower id.
    pub first: usize,
    /// Second adjacent element, `None` on the boundary.
    pub second: Option<usize>,
}

impl Facet {
    pub fn is_interior(&self) -> bool {
        self.second.is_some()
    }
}

/// Affine map from the reference simplex {(0,0),(1,0),(0,1)} to a physical
/// element. The inverse is defined on all of ℝ², which is what permits
/// polynomial extension onto neighbouring elements.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap {
    pub origin: [f64; 2],
    /// Columns are the edge vectors v1−v0 and v2−v0.
    pub jac: [[f64; 2]; 2],
    pub inv_jac: [[f64; 2]; 2],
    pub det: f64,
}

impl AffineMap {
    #[inline]
    pub fn apply(&self, xr: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * xr[0] + self.jac[0][1] * xr[1],
            self.origin[1] + self.jac[1][0] * xr[0] + self.jac[1][1] * xr[1],
        ]
    }

    #[inline]
    pub fn apply_inverse(&self, x: [f64; 2]) -> [f64; 2] {
        let dx = x[0] - self.origin[0];
        let dy = x[1] - self.origin[1];
        [
            self.inv_jac[0][0] * dx + self.inv_jac[0][1] * dy,
            self.inv_jac[1][0] * dx + self.inv_jac[1][1] * dy,
        ]
    }

    /// Push a reference gradient to a physical one: g ↦ J⁻ᵀ g.
    #[inline]
    pub fn push_gradient(&self, gr: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jac[0][0] * gr[0] + self.inv_jac[1][0] * gr[1],
            self.inv_jac[0][1] * gr[0] + self.inv_jac[1][1] * gr[1],
        ]
    }
}

#[derive(Clone, Copy, Debug)]
struct GridInfo {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
    nx: usize,
    ny: usize,
    split: SplitPattern,
}

/// Immutable simplicial background mesh.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    elements: Vec<[usize; 3]>,
    facets: Vec<Facet>,
    interior_facets: Vec<usize>,
    h_max: f64,
    bbox: Box2,
    grid: GridInfo,
}

impl Mesh {
    /// Build a structured triangulation of `domain` with cell size at most
    /// `target_h` per axis.
    pub fn structured(domain: Box2, target_h: f64, split: SplitPattern) -> Result<Mesh, MeshError> {
        if !(domain.width() > 0.0) || !(domain.height() > 0.0) || !(target_h > 0.0) {
            return Err(MeshError::EmptyDomain);
        }
        let nx = math::floor(domain.width() / target_h - 1e-12) as usize + 1;
        let ny = math::floor(domain.height() / target_h - 1e-12) as usize + 1;
        let sx = domain.width() / nx as f64;
        let sy = domain.height() / ny as f64;

        let n_grid = (nx + 1) * (ny + 1);
        let mut vertices = Vec::with_capacity(match split {
            SplitPattern::Diagonal => n_grid,
            SplitPattern::CrissCross => n_grid + nx * ny,
        });
        for j in 0..=ny {
            for i in 0..=nx {
                // use exact endpoints so the hull is bit-reproducible
                let x = if i == nx {
                    domain.xmax
                } else {
                    domain.xmin + i as f64 * sx
                };
                let y = if j == ny {
                    domain.ymax
                } else {
                    domain.ymin + j as f64 * sy
                };
                vertices.push([x, y]);
            }
        }
        let gv = |i: usize, j: usize| j * (nx + 1) + i;

        let mut elements = Vec::new();
        match split {
            SplitPattern::Diagonal => {
                for j in 0..ny {
                    for i in 0..nx {
                        let (a, b, c, d) = (gv(i, j), gv(i + 1, j), gv(i + 1, j + 1), gv(i, j + 1));
                        elements.push([a, b, c]);
                        elements.push([a, c, d]);
                    }
                }
            }
            SplitPattern::CrissCross => {
                for j in 0..ny {
                    for i in 0..nx {
                        let m = vertices.len();
                        let [ax, ay] = vertices[gv(i, j)];
                        let [cx, cy] = vertices[gv(i + 1, j + 1)];
                        vertices.push([0.5 * (ax + cx), 0.5 * (ay + cy)]);
                        let (a, b, c, d) = (gv(i, j), gv(i + 1, j), gv(i + 1, j + 1), gv(i, j + 1));
                        elements.push([a, b, m]);
                        elements.push([b, c, m]);
                        elements.push([c, d, m]);
                        elements.push([d, a, m]);
                    }
                }
            }
        }

        Self::from_raw(vertices, elements, domain, GridInfo {
            x0: domain.xmin,
            y0: domain.ymin,
            sx,
            sy,
            nx,
            ny,
            split,
        })
    }

    fn from_raw(
        vertices: Vec<[f64; 2]>,
        mut elements: Vec<[usize; 3]>,
        bbox: Box2,
        grid: GridInfo,
    ) -> Result<Mesh, MeshError> {
        // canonical orientation: positive signed area
        for (e, tri) in elements.iter_mut().enumerate() {
            let a = signed_area(&vertices, tri);
            if a == 0.0 {
                return Err(MeshError::InvalidElement(e));
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut edge_map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, tri) in elements.iter().enumerate() {
            for k in 0..3 {
                let (p, q) = (tri[k], tri[(k + 1) % 3]);
                let key = (p.min(q), p.max(q));
                edge_map.entry(key).or_default().push(e);
            }
        }
        let mut facets = Vec::with_capacity(edge_map.len());
        let mut interior_facets = Vec::new();
        for (&(v0, v1), elems) in &edge_map {
            debug_assert!(elems.len() <= 2, "edge shared by more than two elements");
            let f = Facet {
                verts: [v0, v1],
                first: elems[0],
                second: elems.get(1).copied(),
            };
            if f.is_interior() {
                interior_facets.push(facets.len());
            }
            facets.push(f);
        }

        let mut h_max: f64 = 0.0;
        for tri in &elements {
            for k in 0..3 {
                let [ax, ay] = vertices[tri[k]];
                let [bx, by] = vertices[tri[(k + 1) % 3]];
                h_max = h_max.max(math::hypot(bx - ax, by - ay));
            }
        }

        Ok(Mesh {
            vertices,
            elements,
            facets,
            interior_facets,
            h_max,
            bbox,
            grid,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertex(&self, v: usize) -> [f64; 2] {
        self.vertices[v]
    }

    pub fn element(&self, e: usize) -> [usize; 3] {
        self.elements[e]
    }

    pub fn facet(&self, f: usize) -> &Facet {
        &self.facets[f]
    }

    /// Ids of interior facets, ascending.
    pub fn interior_facets(&self) -> &[usize] {
        &self.interior_facets
    }

    /// Facet id of the edge between two vertices. Facets are stored sorted by
    /// vertex pair, so this is a binary search.
    pub fn find_facet(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.facets.binary_search_by(|f| f.verts.cmp(&key)).ok()
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn bbox(&self) -> Box2 {
        self.bbox
    }

    /// Longest edge of one element.
    pub fn element_diameter(&self, e: usize) -> f64 {
        let tri = self.elements[e];
        let mut d: f64 = 0.0;
        for k in 0..3 {
            let [ax, ay] = self.vertices[tri[k]];
            let [bx, by] = self.vertices[tri[(k + 1) % 3]];
            d = d.max(math::hypot(bx - ax, by - ay));
        }
        d
    }

    pub fn element_area(&self, e: usize) -> f64 {
        signed_area(&self.vertices, &self.elements[e])
    }

    pub fn element_map(&self, e: usize) -> AffineMap {
        let [v0, v1, v2] = self.elements[e];
        let o = self.vertices[v0];
        let a = self.vertices[v1];
        let b = self.vertices[v2];
        let jac = [[a[0] - o[0], b[0] - o[0]], [a[1] - o[1], b[1] - o[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_jac = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        AffineMap {
            origin: o,
            jac,
            inv_jac,
            det,
        }
    }

    /// The two elements sharing interior facet `f`, lower id first.
    pub fn facet_patch(&self, f: usize) -> Result<(usize, usize), MeshError> {
        let facet = self.facets.get(f).ok_or(MeshError::InvalidFacet(f))?;
        match facet.second {
            Some(second) => Ok((facet.first, second)),
            None => Err(MeshError::BoundaryFacet(f)),
        }
    }

    /// Locate the element containing a point; returns `(element, reference
    /// coordinates)`. Points outside the box give `None`.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 2])> {
        let g = &self.grid;
        let tol = 1e-10 * self.h_max;
        if p[0] < self.bbox.xmin - tol
            || p[0] > self.bbox.xmax + tol
            || p[1] < self.bbox.ymin - tol
            || p[1] > self.bbox.ymax + tol
        {
            return None;
        }
        let ci = (math::floor((p[0] - g.x0) / g.sx) as isize).clamp(0, g.nx as isize - 1) as usize;
        let cj = (math::floor((p[1] - g.y0) / g.sy) as isize).clamp(0, g.ny as isize - 1) as usize;
        let per_cell = match g.split {
            SplitPattern::Diagonal => 2,
            SplitPattern::CrissCross => 4,
        };
        let mut best: Option<(usize, [f64; 2], f64)> = None;
        for dj in -1isize..=1 {
            for di in -1isize..=1 {
                let (i, j) = (ci as isize + di, cj as isize + dj);
                if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
                    continue;
                }
                let cell = j as usize * g.nx + i as usize;
                for t in 0..per_cell {
                    let e = cell * per_cell + t;
                    let xr = self.element_map(e).apply_inverse(p);
                    let m = xr[0].min(xr[1]).min(1.0 - xr[0] - xr[1]);
                    if best.map_or(true, |(_, _, bm)| m > bm) {
                        best = Some((e, xr, m));
                    }
                    if m >= 0.0 {
                        return Some((e, xr));
                    }
                }
            }
        }
        match best {
            Some((e, xr, m)) if m > -1e-12 => Some((e, xr)),
            _ => None,
        }
    }

    /// Plain-text OFF-style dump: counts header, vertex lines, element lines.
    pub fn to_off(&self) -> String {
        let mut s = String::new();
        s.push_str("OFF\n");
        s.push_str(&format!(
            "{} {} {}\n",
            self.n_vertices(),
            self.n_elements(),
            self.n_facets()
        ));
        for v in &self.vertices {
            s.push_str(&format!("{:.17e} {:.17e} 0\n", v[0], v[1]));
        }
        for t in &self.elements {
            s.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
        }
        s
    }
}

fn signed_area(vertices: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let a = vertices[tri[0]];
    let b = vertices[tri[1]];
    let c = vertices[tri[2]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}
