//! Two-dimensional slices `α PR + β B + (1 - α - β) 𝟙` of the polytope.
//!
//! `B` is either a non-local vertex other than PR and anti-PR (family 1) or
//! a local vertex on the canonical CHSH facet (family 2). A slice is scanned
//! over the full weight triangle `α, β >= 0, α + β <= 1`.

use rayon::prelude::*;

use crate::boxes::{mix, Correlators, NsBox, Vertex, VertexKind, VALIDATION_TOL};
use crate::contour::{chain, march_triangle, Point, Polyline};
use crate::criteria::{
    self, chsh_max, classify_with, Classification, Verdict, LOCAL_BOUND, TSIRELSON_BOUND,
};
use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: usize = 512;

/// Points per analytic curve piece.
pub const CURVE_SAMPLES: usize = 512;

/// Rays used to locate where a boundary meets the triangle.
const COARSE_RAYS: usize = 1024;

/// Samples along each ray before bisecting the first sign change.
const RAY_SAMPLES: usize = 48;

const BISECTION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceSpec {
    vertex: Vertex,
    resolution: usize,
    /// Maximise the IC condition over symmetry images instead of using the
    /// canonical orientation.
    pub ic_symmetries: bool,
}

impl SliceSpec {
    pub fn new(vertex: Vertex, resolution: usize) -> Result<SliceSpec> {
        check_vertex(&vertex)?;
        if resolution < 2 {
            return Err(Error::DegenerateGrid(format!(
                "resolution {resolution} is below 2"
            )));
        }
        Ok(SliceSpec {
            vertex,
            resolution,
            ic_symmetries: false,
        })
    }

    /// The slices behind the three figures: `PR_2`, `PR_4` and `P_L^{0000}`.
    pub fn figure(number: u8, resolution: usize) -> Result<SliceSpec> {
        let vertex = match number {
            1 => Vertex::Nonlocal {
                mu: false,
                nu: true,
                sigma: false,
            },
            2 => Vertex::Nonlocal {
                mu: true,
                nu: true,
                sigma: true,
            },
            3 => Vertex::Local {
                mu: false,
                nu: false,
                sigma: false,
                tau: false,
            },
            other => return Err(Error::InvalidBits(format!("figure {other}"))),
        };
        SliceSpec::new(vertex, resolution)
    }

    pub fn with_ic_symmetries(mut self, on: bool) -> SliceSpec {
        self.ic_symmetries = on;
        self
    }

    pub fn vertex(&self) -> Vertex {
        self.vertex
    }

    pub fn family(&self) -> VertexKind {
        self.vertex.kind()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Grid spacing in `α` and `β`.
    pub fn step(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    /// The explicit mixture at `(α, β)`.
    pub fn box_at(&self, alpha: f64, beta: f64) -> Result<NsBox> {
        check_simplex(alpha, beta)?;
        mix(
            &[alpha, beta, 1.0 - alpha - beta],
            &[NsBox::pr(), self.vertex.to_box(), NsBox::white_noise()],
        )
    }

    /// Correlators at `(α, β)` from the closed-form family expressions.
    pub fn correlators_at(&self, alpha: f64, beta: f64) -> Result<Correlators> {
        match self.vertex {
            Vertex::Nonlocal { mu, nu, sigma } => family1_correlators(mu, nu, sigma, alpha, beta),
            Vertex::Local { mu, nu, sigma, tau } => {
                family2_correlators(mu, nu, sigma, tau, alpha, beta)
            }
        }
    }
}

fn check_vertex(vertex: &Vertex) -> Result<()> {
    match *vertex {
        Vertex::Nonlocal { mu, nu, .. } if !mu && !nu => {
            Err(Error::ColinearVertex(vertex.to_string()))
        }
        Vertex::Local { mu, nu, sigma, tau } if (mu && sigma) ^ nu ^ tau => {
            Err(Error::NotOnFacet(vertex.to_string()))
        }
        _ => Ok(()),
    }
}

fn check_simplex(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha >= -VALIDATION_TOL
        && beta >= -VALIDATION_TOL
        && alpha + beta <= 1.0 + VALIDATION_TOL)
    {
        return Err(Error::OutOfSimplex { alpha, beta });
    }
    Ok(())
}

#[inline]
fn sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Family 1: `C_xy = α (-1)^{xy} + β (-1)^{xy ⊕ μx ⊕ νy ⊕ σ}`, zero marginals.
pub fn family1_correlators(
    mu: bool,
    nu: bool,
    sigma: bool,
    alpha: f64,
    beta: f64,
) -> Result<Correlators> {
    check_vertex(&Vertex::Nonlocal { mu, nu, sigma })?;
    check_simplex(alpha, beta)?;
    let mut cf = Correlators::default();
    for x in 0..2 {
        for y in 0..2 {
            let (xb, yb) = (x == 1, y == 1);
            let pr = sign(xb && yb);
            let b = sign((xb && yb) ^ (mu && xb) ^ (nu && yb) ^ sigma);
            cf.cxy[x][y] = alpha * pr + beta * b;
        }
    }
    Ok(cf)
}

/// Family 2: `C_xy = α (-1)^{xy} + β (-1)^{a_x ⊕ b_y}` with marginals
/// `β (-1)^{a_x}` and `β (-1)^{b_y}`, where `a_x = μx ⊕ ν` and `b_y = σy ⊕ τ`.
pub fn family2_correlators(
    mu: bool,
    nu: bool,
    sigma: bool,
    tau: bool,
    alpha: f64,
    beta: f64,
) -> Result<Correlators> {
    check_vertex(&Vertex::Local { mu, nu, sigma, tau })?;
    check_simplex(alpha, beta)?;
    let mut cf = Correlators::default();
    for x in 0..2 {
        let ax = (mu && x == 1) ^ nu;
        cf.cx[x] = beta * sign(ax);
        for y in 0..2 {
            let by = (sigma && y == 1) ^ tau;
            cf.cxy[x][y] = alpha * sign(x == 1 && y == 1) + beta * sign(ax ^ by);
        }
    }
    for y in 0..2 {
        cf.cy[y] = beta * sign((sigma && y == 1) ^ tau);
    }
    Ok(cf)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePoint {
    pub alpha: f64,
    pub beta: f64,
    pub cf: Correlators,
    pub classification: Classification,
}

/// A classified triangular grid, stored row by row in `β` with `α`
/// increasing inside each row.
#[derive(Clone, Debug)]
pub struct SliceScan {
    pub spec: SliceSpec,
    pub points: Vec<SlicePoint>,
}

fn row_start(resolution: usize, j: usize) -> usize {
    // Rows have resolution, resolution - 1, ... nodes.
    j * resolution - j * (j.saturating_sub(1)) / 2
}

impl SliceScan {
    pub fn resolution(&self) -> usize {
        self.spec.resolution
    }

    /// Node `(i, j)` at `α = i h`, `β = j h`.
    pub fn get(&self, i: usize, j: usize) -> Option<&SlicePoint> {
        let last = self.spec.resolution - 1;
        if i + j > last {
            return None;
        }
        self.points.get(row_start(self.spec.resolution, j) + i)
    }
}

/// Grid indices `(i, j)` in scan order.
pub fn grid_nodes(resolution: usize) -> Vec<(usize, usize)> {
    let last = resolution - 1;
    (0..resolution)
        .flat_map(|j| (0..=last - j).map(move |i| (i, j)))
        .collect()
}

/// Classifies every node of the slice grid. Runs on the current rayon pool;
/// output order does not depend on scheduling.
pub fn scan(spec: &SliceSpec) -> Result<SliceScan> {
    let h = spec.step();
    let points = grid_nodes(spec.resolution)
        .into_par_iter()
        .map(|(i, j)| {
            let (alpha, beta) = (i as f64 * h, j as f64 * h);
            let bx = spec.box_at(alpha, beta)?;
            let cf = bx.correlators()?;
            let classification = classify_with(&bx, spec.ic_symmetries)?;
            Ok(SlicePoint {
                alpha,
                beta,
                cf,
                classification,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceScan {
        spec: *spec,
        points,
    })
}

/// Two groups of verdicts whose common border is extracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictPair {
    pub first: Vec<Verdict>,
    pub second: Vec<Verdict>,
}

impl VerdictPair {
    pub fn new(first: Verdict, second: Verdict) -> VerdictPair {
        VerdictPair {
            first: vec![first],
            second: vec![second],
        }
    }

    /// `verdict` against every other verdict.
    pub fn against_rest(verdict: Verdict) -> VerdictPair {
        let rest = [
            Verdict::Local,
            Verdict::QuantumConsistent,
            Verdict::PostquantumIcOk,
            Verdict::IcViolating,
        ]
        .into_iter()
        .filter(|v| *v != verdict)
        .collect();
        VerdictPair {
            first: rest,
            second: vec![verdict],
        }
    }
}

/// Contour between the two verdict groups.
pub fn boundary_extract(scan: &SliceScan, pair: &VerdictPair) -> Result<Vec<Polyline>> {
    boundary_by(scan, |p| {
        let v = p.classification.verdict;
        if pair.second.contains(&v) {
            Some(true)
        } else if pair.first.contains(&v) {
            Some(false)
        } else {
            None
        }
    })
}

/// Contour between nodes labelled `true` and `false`; `None` nodes are
/// excluded from both sides.
pub fn boundary_by<F>(scan: &SliceScan, label: F) -> Result<Vec<Polyline>>
where
    F: Fn(&SlicePoint) -> Option<bool>,
{
    let res = scan.spec.resolution;
    if res < 2 {
        return Err(Error::DegenerateGrid(format!("resolution {res}")));
    }
    let expected = res * (res + 1) / 2;
    if scan.points.len() != expected {
        return Err(Error::DegenerateGrid(format!(
            "{} points for a grid of {expected}",
            scan.points.len()
        )));
    }
    let segments = march_triangle(res - 1, |i, j| scan.get(i, j).and_then(&label));
    Ok(chain(&segments, scan.spec.step()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub points: Vec<Point>,
}

/// Distance from the origin (white noise) to the triangle edge along `θ`.
fn ray_extent(theta: f64) -> f64 {
    1.0 / (theta.cos() + theta.sin())
}

/// First radius along `θ` where `margin` turns negative, if it does inside
/// the triangle.
fn first_crossing<F>(theta: f64, margin: &F) -> Option<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let (c, s) = (theta.cos(), theta.sin());
    let at = |r: f64| margin(r * c, r * s);
    let extent = ray_extent(theta);
    let mut prev = 0.0;
    for k in 1..=RAY_SAMPLES {
        let r = extent * k as f64 / RAY_SAMPLES as f64;
        if at(r) < 0.0 {
            let (mut lo, mut hi) = (prev, r);
            while hi - lo > BISECTION_TOL {
                let midpoint = 0.5 * (lo + hi);
                if at(midpoint) < 0.0 {
                    hi = midpoint;
                } else {
                    lo = midpoint;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = r;
    }
    None
}

/// Samples a boundary given by `radius(θ)` over every angular range where
/// it lies inside the triangle.
fn ray_curve<F>(name: &str, radius: F) -> Vec<Curve>
where
    F: Fn(f64) -> Option<f64>,
{
    let half_pi = std::f64::consts::FRAC_PI_2;
    let thetas: Vec<f64> = (0..=COARSE_RAYS)
        .map(|k| half_pi * k as f64 / COARSE_RAYS as f64)
        .collect();
    let hits: Vec<bool> = thetas.iter().map(|&t| radius(t).is_some()).collect();

    // Narrow a hit/miss transition between two angles.
    let refine = |miss: f64, hit: f64| {
        let (mut miss, mut hit) = (miss, hit);
        while (hit - miss).abs() > BISECTION_TOL {
            let mid = 0.5 * (miss + hit);
            if radius(mid).is_some() {
                hit = mid;
            } else {
                miss = mid;
            }
        }
        hit
    };

    let mut pieces = Vec::new();
    let mut k = 0;
    while k < thetas.len() {
        if !hits[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < thetas.len() && hits[k + 1] {
            k += 1;
        }
        let lo = if start == 0 {
            thetas[0]
        } else {
            refine(thetas[start - 1], thetas[start])
        };
        let hi = if k + 1 == thetas.len() {
            thetas[k]
        } else {
            refine(thetas[k + 1], thetas[k])
        };
        let points: Vec<Point> = (0..CURVE_SAMPLES)
            .filter_map(|s| {
                let t = lo + (hi - lo) * s as f64 / (CURVE_SAMPLES - 1) as f64;
                radius(t).map(|r| (r * t.cos(), r * t.sin()))
            })
            .collect();
        pieces.push(points);
        k += 1;
    }
    pieces
        .into_iter()
        .enumerate()
        .map(|(idx, points)| Curve {
            name: if idx == 0 {
                name.to_string()
            } else {
                format!("{name}_{}", idx + 1)
            },
            points,
        })
        .collect()
}

/// Boundary curves of the slice: the CHSH local bound, Tsirelson's bound,
/// the TLM and NPA boundaries (bisection along rays from white noise) and
/// the IC boundary (closed form, since the IC quantity is a quadratic form
/// in `(α, β)`).
pub fn analytic_curves(spec: &SliceSpec) -> Vec<Curve> {
    let cf_at = |a: f64, b: f64| spec.correlators_at(a.max(0.0), b.max(0.0)).ok();
    let chsh =
        |bound: f64| move |a: f64, b: f64| cf_at(a, b).map_or(f64::NAN, |cf| bound - chsh_max(&cf));
    let tlm = |a: f64, b: f64| cf_at(a, b).map_or(f64::NAN, |cf| criteria::tlm(&cf).margin);
    let npa = |a: f64, b: f64| {
        cf_at(a, b)
            .and_then(|cf| criteria::npa(&cf).ok())
            .map_or(f64::NAN, |r| r.margin)
    };
    let ic_radius = |theta: f64| {
        // q is a quadratic form in (α, β): evaluate on the triangle edge and
        // rescale to unit radius.
        let edge = ray_extent(theta);
        let cf = cf_at(edge * theta.cos(), edge * theta.sin())?;
        let q = if spec.ic_symmetries {
            criteria::ic_quadratic_symmetric(&cf)
        } else {
            criteria::ic_quadratic(&cf)
        } / (edge * edge);
        if q <= 0.0 {
            return None;
        }
        let r = 1.0 / q.sqrt();
        (r <= edge * (1.0 + 1e-12)).then_some(r)
    };

    let mut curves = Vec::new();
    curves.extend(ray_curve("chsh_local", |t| {
        first_crossing(t, &chsh(LOCAL_BOUND))
    }));
    curves.extend(ray_curve("chsh_tsirelson", |t| {
        first_crossing(t, &chsh(TSIRELSON_BOUND))
    }));
    curves.extend(ray_curve("tlm", |t| first_crossing(t, &tlm)));
    curves.extend(ray_curve("npa", |t| first_crossing(t, &npa)));
    curves.extend(ray_curve("ic", ic_radius));
    curves
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn family1_pr2_example() {
        let cf = family1_correlators(false, true, false, 0.5, 0.3).unwrap();
        let want = Correlators::unbiased(0.8, 0.2, 0.8, -0.2);
        assert!(cf.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn family1_beta_zero_is_isotropic() {
        for m in 2..8usize {
            let (mu, nu, sigma) = (m & 4 != 0, m & 2 != 0, m & 1 != 0);
            let cf = family1_correlators(mu, nu, sigma, 0.37, 0.0).unwrap();
            assert_eq!(cf, Correlators::unbiased(0.37, 0.37, 0.37, -0.37));
        }
    }

    #[test]
    fn family1_pr4_sums() {
        for alpha in [0.1, 0.33, 0.6] {
            let cf = family1_correlators(true, true, true, alpha, 0.2).unwrap();
            let c = cf.cxy;
            assert!((c[0][0] + c[1][0] - 2.0 * alpha).abs() < 1e-15);
            assert!((c[0][1] - c[1][1] - 2.0 * alpha).abs() < 1e-15);
        }
    }

    #[test]
    fn family2_examples() {
        let cf = family2_correlators(false, false, false, false, 0.4, 0.5).unwrap();
        let want = Correlators {
            cxy: [[0.9, 0.9], [0.9, 0.1]],
            cx: [0.5; 2],
            cy: [0.5; 2],
        };
        assert!(cf.max_abs_diff(&want) < 1e-15);
        let iso = family2_correlators(false, false, false, false, 0.3, 0.0).unwrap();
        assert_eq!(iso, Correlators::unbiased(0.3, 0.3, 0.3, -0.3));
        let line = family2_correlators(false, false, false, false, 0.0, 0.6).unwrap();
        assert_eq!(line.cxy, [[0.6; 2]; 2]);
        assert_eq!(line.cx, [0.6; 2]);
        assert_eq!(line.cy, [0.6; 2]);
    }

    #[test]
    fn slice_errors() {
        assert!(matches!(
            family1_correlators(false, false, true, 0.1, 0.1),
            Err(Error::ColinearVertex(_))
        ));
        assert!(matches!(
            family1_correlators(false, true, false, 0.7, 0.4),
            Err(Error::OutOfSimplex { .. })
        ));
        assert!(matches!(
            family2_correlators(false, true, false, false, 0.1, 0.1),
            Err(Error::NotOnFacet(_))
        ));
        assert!(matches!(
            family2_correlators(false, false, false, false, -0.1, 0.1),
            Err(Error::OutOfSimplex { .. })
        ));
        assert!(SliceSpec::figure(1, 1).is_err());
    }

    #[test]
    fn facet_vertices_count() {
        let on_facet = Vertex::all()
            .into_iter()
            .filter(|v| v.kind() == VertexKind::Local && check_vertex(v).is_ok())
            .count();
        assert_eq!(on_facet, 8);
    }

    #[test]
    fn grid_layout() {
        let spec = SliceSpec::figure(1, 5).unwrap();
        let scan = scan(&spec).unwrap();
        assert_eq!(scan.points.len(), 15);
        for (i, j) in grid_nodes(5) {
            let p = scan.get(i, j).unwrap();
            assert_eq!(p.alpha, i as f64 * 0.25);
            assert_eq!(p.beta, j as f64 * 0.25);
        }
        assert!(scan.get(3, 2).is_none());
    }

    #[test]
    fn single_verdict_grid_has_empty_boundary() {
        let spec = SliceSpec::figure(1, 8).unwrap();
        let mut s = scan(&spec).unwrap();
        for p in &mut s.points {
            p.classification.verdict = Verdict::Local;
        }
        let lines = boundary_extract(
            &s,
            &VerdictPair::new(Verdict::QuantumConsistent, Verdict::IcViolating),
        )
        .unwrap();
        assert!(lines.is_empty());
        s.points.pop();
        assert!(matches!(
            boundary_extract(&s, &VerdictPair::against_rest(Verdict::IcViolating)),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn pr2_curves_are_the_circle() {
        let spec = SliceSpec::figure(1, 64).unwrap();
        let curves = analytic_curves(&spec);
        for name in ["ic", "tlm", "npa"] {
            let c = curves.iter().find(|c| c.name == name).unwrap();
            assert!(c.points.len() >= 256);
            for &(a, b) in &c.points {
                assert!((a.hypot(b) - FRAC_1_SQRT_2).abs() < 1e-9, "{name} {a} {b}");
            }
        }
    }

    #[test]
    fn pr4_ic_curve_is_vertical() {
        let spec = SliceSpec::figure(2, 64).unwrap();
        let curves = analytic_curves(&spec);
        let ic: Vec<&Curve> = curves.iter().filter(|c| c.name.starts_with("ic")).collect();
        assert_eq!(ic.len(), 1);
        assert!(ic[0].points.len() >= 256);
        for &(a, _) in &ic[0].points {
            assert!((a - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn family2_ic_outside_npa() {
        let spec = SliceSpec::figure(3, 64).unwrap();
        let curves = analytic_curves(&spec);
        let ic = curves.iter().find(|c| c.name == "ic").unwrap();
        for &(a, b) in &ic.points {
            assert!(((a + b).powi(2) + a * a - 1.0).abs() < 1e-12);
        }
        let npa = curves.iter().find(|c| c.name == "npa").unwrap();
        // Compare radii along a shared direction in the interior.
        let theta = 0.7f64;
        let radius_at = |pts: &[Point]| {
            pts.iter()
                .min_by(|p, q| {
                    let dp = (p.1.atan2(p.0) - theta).abs();
                    let dq = (q.1.atan2(q.0) - theta).abs();
                    dp.partial_cmp(&dq).unwrap()
                })
                .map(|p| p.0.hypot(p.1))
                .unwrap()
        };
        assert!(radius_at(&ic.points) > radius_at(&npa.points) + 0.01);
    }
}
