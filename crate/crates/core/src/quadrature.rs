//! Quadrature on cut regions.
//!
//! Straight elementwise cuts admit an exact decomposition of the negative
//! region into a few sub-simplices; standard simplex Gauss rules are mapped
//! onto those. Space-time rules tensorize Gauss points in time with spatial
//! cut rules per time point; the slab is first split at the times where a
//! vertex value of the level set changes sign, so that within each time
//! sub-interval the cut varies smoothly.

use alloc::vec;
use alloc::vec::Vec;

use crate::levelset::{snap3, SlabLevelSet};
use crate::math;
use crate::mesh::Mesh;

/// Area below which a reference sub-simplex is dropped (relative to the
/// reference element area 1/2).
const DEGENERATE_REL_AREA: f64 = 1e-14;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.5], vec![1.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration on P_n with the usual Chebyshev initial guess
        let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map [-1,1] -> [0,1]; store in ascending order
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Quadrature on the reference triangle {(0,0),(1,0),(0,1)}.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Duffy-type rule exact for polynomials of total degree ≤ `degree`. All
/// weights are positive.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    let m = (degree + 3) / 2; // 2m-1 >= degree+1, the +1 from the Duffy factor
    let (gn, gw) = gauss_legendre_01(m);
    let mut points = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for (i, &u) in gn.iter().enumerate() {
        for (j, &v) in gn.iter().enumerate() {
            points.push([u * (1.0 - v), v]);
            weights.push(gw[i] * gw[j] * (1.0 - v));
        }
    }
    TriangleRule { points, weights }
}

/// Region represented by a [`CutRule`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionTag {
    /// Negative part of a cut element.
    Neg,
    /// Entire element (no cut).
    Full,
}

/// Quadrature points and weights restricted to a cut region. Spatial rules
/// carry the evaluation time in the third coordinate; space-time rule
/// weights include the temporal measure.
#[derive(Clone, Debug)]
pub struct CutRule {
    /// `(x, y, t)` per point.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub region: RegionTag,
}

impl CutRule {
    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            weights: Vec::new(),
            region: RegionTag::Neg,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Sub-simplex decomposition of the negative and positive regions of a cut
/// triangle, in reference coordinates.
#[derive(Clone, Debug, Default)]
pub struct CutDecomposition {
    pub neg: Vec<[[f64; 2]; 3]>,
    pub pos: Vec<[[f64; 2]; 3]>,
    /// Endpoints of the zero line inside the element, if cut.
    pub interface: Option<[[f64; 2]; 2]>,
}

const REF_CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

fn tri_area(t: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]))
}

fn push_oriented(list: &mut Vec<[[f64; 2]; 3]>, mut t: [[f64; 2]; 3]) {
    let a = tri_area(&t);
    if a.abs() < DEGENERATE_REL_AREA * 0.5 {
        return;
    }
    if a < 0.0 {
        t.swap(1, 2);
    }
    list.push(t);
}

/// Split the reference triangle by the sign of the linear interpolant of
/// `vertex_values`; zero counts as negative. The two lists tile the element.
pub fn decompose_cut_triangle(vertex_values: [f64; 3]) -> CutDecomposition {
    let vals = snap3(vertex_values);
    let n_neg = vals.iter().filter(|&&v| v <= 0.0).count();
    let mut out = CutDecomposition::default();
    match n_neg {
        3 => out.neg.push(REF_CORNERS),
        0 => out.pos.push(REF_CORNERS),
        _ => {
            // cyclically order so the lone-signed vertex comes first
            let lone_is_pos = n_neg == 2;
            let lone = (0..3)
                .find(|&i| (vals[i] > 0.0) == lone_is_pos)
                .expect("mixed signs");
            let (a, b, c) = (lone, (lone + 1) % 3, (lone + 2) % 3);
            let cross = |i: usize, j: usize| -> [f64; 2] {
                let s = vals[i] / (vals[i] - vals[j]);
                [
                    REF_CORNERS[i][0] + s * (REF_CORNERS[j][0] - REF_CORNERS[i][0]),
                    REF_CORNERS[i][1] + s * (REF_CORNERS[j][1] - REF_CORNERS[i][1]),
                ]
            };
            let p_ab = cross(a, b);
            let p_ac = cross(a, c);
            let lone_tri = [REF_CORNERS[a], p_ab, p_ac];
            let quad1 = [p_ab, REF_CORNERS[b], REF_CORNERS[c]];
            let quad2 = [p_ab, REF_CORNERS[c], p_ac];
            if lone_is_pos {
                push_oriented(&mut out.pos, lone_tri);
                push_oriented(&mut out.neg, quad1);
                push_oriented(&mut out.neg, quad2);
            } else {
                push_oriented(&mut out.neg, lone_tri);
                push_oriented(&mut out.pos, quad1);
                push_oriented(&mut out.pos, quad2);
            }
            out.interface = Some([p_ab, p_ac]);
        }
    }
    out
}

fn map_subtriangle_rule(
    mesh: &Mesh,
    e: usize,
    sub: &[[f64; 2]; 3],
    rule: &TriangleRule,
    t: f64,
    out: &mut CutRule,
) {
    let amap = mesh.element_map(e);
    let scale = 2.0 * tri_area(sub) * amap.det.abs();
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        let xr = [
            sub[0][0] + p[0] * (sub[1][0] - sub[0][0]) + p[1] * (sub[2][0] - sub[0][0]),
            sub[0][1] + p[0] * (sub[1][1] - sub[0][1]) + p[1] * (sub[2][1] - sub[0][1]),
        ];
        let x = amap.apply(xr);
        out.points.push([x[0], x[1], t]);
        out.weights.push(w * scale);
    }
}

/// Rule integrating polynomials of degree ≤ `order` over
/// {φ^lin(·,t) < 0} ∩ T_e. Uncut negative elements get the full-element rule;
/// fully positive elements get an empty rule.
pub fn spatial_cut_rule(
    mesh: &Mesh,
    e: usize,
    ls: &SlabLevelSet,
    t: f64,
    order: usize,
) -> CutRule {
    let rule = triangle_rule(order);
    spatial_cut_rule_with(mesh, e, ls, t, &rule)
}

/// As [`spatial_cut_rule`] but reusing a prebuilt reference rule.
pub fn spatial_cut_rule_with(
    mesh: &Mesh,
    e: usize,
    ls: &SlabLevelSet,
    t: f64,
    rule: &TriangleRule,
) -> CutRule {
    let vals = snap3(ls.element_values(mesh, e, t));
    let n_neg = vals.iter().filter(|&&v| v <= 0.0).count();
    let mut out = CutRule::empty();
    match n_neg {
        0 => out,
        3 => {
            out.region = RegionTag::Full;
            map_subtriangle_rule(mesh, e, &REF_CORNERS, rule, t, &mut out);
            out
        }
        _ => {
            let dec = decompose_cut_triangle(vals);
            for sub in &dec.neg {
                map_subtriangle_rule(mesh, e, sub, rule, t, &mut out);
            }
            out
        }
    }
}

/// Fixed-time rule at a slab endpoint, used for jump and initial-condition
/// terms. Built from shared endpoint samples, so adjacent slabs produce
/// bit-identical rules.
pub fn fixed_time_interface_rule(
    mesh: &Mesh,
    e: usize,
    ls: &SlabLevelSet,
    t_n: f64,
    order: usize,
) -> CutRule {
    debug_assert!(
        t_n == ls.t_start || t_n == ls.t_end,
        "fixed-time rule requested away from slab endpoints"
    );
    spatial_cut_rule(mesh, e, ls, t_n, order)
}

/// Physical endpoints of the zero-line segment inside element `e` at time
/// `t`, if the element is cut.
pub fn interface_segment(
    mesh: &Mesh,
    e: usize,
    ls: &SlabLevelSet,
    t: f64,
) -> Option<[[f64; 2]; 2]> {
    let vals = snap3(ls.element_values(mesh, e, t));
    let dec = decompose_cut_triangle(vals);
    dec.interface.map(|seg| {
        let amap = mesh.element_map(e);
        [amap.apply(seg[0]), amap.apply(seg[1])]
    })
}

/// Collect the topology-change times of element `e` inside the slab: times
/// where some vertex value of φ^lin crosses zero.
fn element_break_times(mesh: &Mesh, e: usize, ls: &SlabLevelSet, scratch: &mut Vec<f64>) -> Vec<f64> {
    let tri = mesh.element(e);
    let mut breaks = vec![ls.t_start];
    for &v in &tri {
        ls.vertex_roots(v, scratch);
        breaks.extend_from_slice(scratch);
    }
    breaks.push(ls.t_end);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = 1e-12 * (ls.t_end - ls.t_start);
    breaks.dedup_by(|a, b| (*a - *b).abs() < tol);
    breaks
}

/// Space-time rule on Q^lin ∩ (T_e × I_n): Gauss–Legendre in time tensorized
/// with spatial cut rules per time point, applied on each sub-interval
/// between cut-topology changes. Exact for separable integrands
/// p(x)·s(t), deg p ≤ `spatial_order`, deg s ≤ 2·`n_time_points`−1, when the
/// cut topology is time-independent.
pub fn spacetime_rule(
    mesh: &Mesh,
    e: usize,
    ls: &SlabLevelSet,
    spatial_order: usize,
    n_time_points: usize,
) -> CutRule {
    assert!(n_time_points >= 1);
    let tri_rule = triangle_rule(spatial_order);
    let (gn, gw) = gauss_legendre_01(n_time_points);
    let mut scratch = Vec::new();
    let breaks = element_break_times(mesh, e, ls, &mut scratch);

    // uncut fast path: single sub-interval and constant sign pattern
    if breaks.len() == 2 {
        let va = snap3(ls.element_values(mesh, e, ls.t_start));
        let vb = snap3(ls.element_values(mesh, e, ls.t_end));
        let all_neg =
            va.iter().all(|&v| v <= 0.0) && vb.iter().all(|&v| v <= 0.0);
        let all_pos = va.iter().all(|&v| v > 0.0) && vb.iter().all(|&v| v > 0.0);
        if all_pos {
            return CutRule::empty();
        }
        if all_neg {
            let mut out = CutRule::empty();
            out.region = RegionTag::Full;
            let dt = ls.t_end - ls.t_start;
            for (q, &g) in gn.iter().enumerate() {
                let t = ls.t_start + dt * g;
                let before = out.weights.len();
                map_subtriangle_rule(mesh, e, &REF_CORNERS, &tri_rule, t, &mut out);
                for w in &mut out.weights[before..] {
                    *w *= gw[q] * dt;
                }
            }
            return out;
        }
    }

    let mut out = CutRule::empty();
    for win in breaks.windows(2) {
        let (c, d) = (win[0], win[1]);
        let len = d - c;
        if len <= 0.0 {
            continue;
        }
        for (q, &g) in gn.iter().enumerate() {
            let t = c + len * g;
            let srule = spatial_cut_rule_with(mesh, e, ls, t, &tri_rule);
            for (p, &w) in srule.points.iter().zip(&srule.weights) {
                out.points.push(*p);
                out.weights.push(w * gw[q] * len);
            }
        }
    }
    out
}

/// Full tensor rule on the prism T_e × [ta, tb], ignoring any cut. Used for
/// extended-domain norms and diagnostics.
pub fn prism_rule(
    mesh: &Mesh,
    e: usize,
    ta: f64,
    tb: f64,
    spatial_order: usize,
    n_time_points: usize,
) -> CutRule {
    let tri_rule = triangle_rule(spatial_order);
    let (gn, gw) = gauss_legendre_01(n_time_points);
    let mut out = CutRule::empty();
    out.region = RegionTag::Full;
    let dt = tb - ta;
    for (q, &g) in gn.iter().enumerate() {
        let t = ta + dt * g;
        let before = out.weights.len();
        map_subtriangle_rule(mesh, e, &REF_CORNERS, &tri_rule, t, &mut out);
        for w in &mut out.weights[before..] {
            *w *= gw[q] * dt;
        }
    }
    out
}
