//! Perron-Frobenius vectors, eigen-equations up to morphisms and the two
//! exactly solvable benchmark models.
//!
//! The half-strip equation for side `a` reads `φ_a(B_a(y₁)…B_a(y_p)) = λ^p·A_a(y₁)…A_a(y_p)`
//! where `B_a` is the one-face strip operator of [`strip_operators`]. The corner
//! equation for a corner `(a,b)` (sides in counter-clockwise order) removes the
//! corner face: with `e_a`, `e_b` its edges on sides `a`, `b`, `k` the edge
//! opposite to `e_b` and `r` the edge opposite to `e_a`,
//!
//! ```text
//! Σ_{e_a, e_b, k} W(face) · A_a(e_a) · K(k)[U · A_b(e_b)] = σ_b · λ · A_a(r) · U
//! ```
//!
//! for every value of `r`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{partition_tensor, FaceWeight, Offsets};
use crate::linalg::{dot, norm2, Matrix};
use crate::math::{self, powi};
use crate::rope::{strip_operators, Corner, RopeRep, Side};
use crate::tensor::{decode, Limits, StateSpaces};

/// Dominant eigenvalue with positive left and right eigenvectors,
/// `‖v_right‖₂ = 1` and `⟨v_left, v_right⟩ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfPair {
    pub lambda: f64,
    pub v_left: Vec<f64>,
    pub v_right: Vec<f64>,
}

const MAX_ITER: usize = 100_000;
const TOL: f64 = 1e-13;

fn is_irreducible(a: &Matrix) -> bool {
    let n = a.rows();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let edge = if forward { a[(i, j)] } else { a[(j, i)] };
                if edge > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Power iteration from the uniform vector; `None` when it does not settle.
fn power_iteration(a: &Matrix) -> Option<(f64, Vec<f64>)> {
    let n = a.rows();
    let mut v = vec![1.0 / math::sqrt(n as f64); n];
    let mut prev = f64::NAN;
    for _ in 0..MAX_ITER {
        let av = a.matvec(&v);
        let nrm = norm2(&av);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return None;
        }
        let rq = dot(&v, &av);
        let next: Vec<f64> = av.iter().map(|x| x / nrm).collect();
        let shift = next.iter().zip(&v).map(|(a, b)| math::abs(a - b)).fold(0.0, f64::max);
        v = next;
        if math::rel_diff(rq, prev) <= TOL && shift <= 1e-12 {
            let lambda = dot(&v, &a.matvec(&v));
            return Some((lambda, v));
        }
        prev = rq;
    }
    None
}

fn dominant(a: &Matrix) -> Result<(f64, Vec<f64>)> {
    if let Some(r) = power_iteration(a) {
        return Ok(r);
    }
    // periodic patterns oscillate; shifting the diagonal breaks the tie
    for eps in [1e-9 * a.max_abs(), a.max_abs()] {
        let shifted = a.add(&Matrix::identity(a.rows()).scale(eps));
        if let Some((l, v)) = power_iteration(&shifted) {
            return Ok((l - eps, v));
        }
    }
    Err(Error::NoConvergence(MAX_ITER))
}

/// Perron-Frobenius eigen-elements of a non-negative irreducible matrix.
pub fn pf_eigen(a: &Matrix) -> Result<PfPair> {
    if !a.is_square() || a.rows() == 0 || !a.is_nonnegative() {
        return Err(Error::NotNonNegativeSquare);
    }
    if !is_irreducible(a) || a.max_abs() == 0.0 {
        return Err(Error::Reducible);
    }
    let (lambda, v_right) = dominant(a)?;
    let (_, left) = dominant(&a.transpose())?;
    let c = dot(&left, &v_right);
    let v_left = left.iter().map(|x| x / c).collect();
    Ok(PfPair { lambda, v_left, v_right })
}

/// Modulus of the second eigenvalue by deflating the Perron-Frobenius pair.
pub fn second_eigenvalue(a: &Matrix, pf: &PfPair) -> f64 {
    let n = a.rows();
    if n == 1 {
        return 0.0;
    }
    let proj = Matrix::from_fn(n, n, |i, j| pf.lambda * pf.v_right[i] * pf.v_left[j]);
    let b = a.sub(&proj);
    let b2 = b.mul(&b);
    // deterministic, generic start vector
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * i as f64 - 0.11 * (i * i) as f64).collect();
    let scale = norm2(&v);
    v.iter_mut().for_each(|x| *x /= scale);
    let mut est = 0.0;
    for _ in 0..10_000 {
        let w = b2.matvec(&v);
        let nrm = norm2(&w);
        if nrm <= 1e-300 {
            return 0.0;
        }
        let next = math::sqrt(nrm);
        v = w.iter().map(|x| x / nrm).collect();
        if math::rel_diff(next, est) <= 1e-12 {
            return next;
        }
        est = next;
    }
    est
}

/// Dense linear map between matrix spaces acting on row-major entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    in_shape: (usize, usize),
    out_shape: (usize, usize),
    matrix: Matrix,
}

impl LinearMap {
    /// `matrix` has `out.0·out.1` rows and `inp.0·inp.1` columns.
    pub fn new(inp: (usize, usize), out: (usize, usize), matrix: Matrix) -> Result<Self> {
        if matrix.rows() != out.0 * out.1 || matrix.cols() != inp.0 * inp.1 {
            return Err(Error::DimensionMismatch(alloc::format!(
                "linear map from {}x{} to {}x{} needs a {}x{} matrix, got {}x{}",
                inp.0,
                inp.1,
                out.0,
                out.1,
                out.0 * out.1,
                inp.0 * inp.1,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { in_shape: inp, out_shape: out, matrix })
    }

    pub fn scaled_identity(shape: (usize, usize), c: f64) -> Self {
        let n = shape.0 * shape.1;
        Self { in_shape: shape, out_shape: shape, matrix: Matrix::identity(n).scale(c) }
    }

    pub fn in_shape(&self) -> (usize, usize) {
        self.in_shape
    }

    pub fn out_shape(&self) -> (usize, usize) {
        self.out_shape
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        if (m.rows(), m.cols()) != self.in_shape {
            return Err(Error::DimensionMismatch(alloc::format!(
                "map expects a {}x{} matrix, got {}x{}",
                self.in_shape.0,
                self.in_shape.1,
                m.rows(),
                m.cols()
            )));
        }
        Matrix::from_vec(self.out_shape.0, self.out_shape.1, self.matrix.matvec(m.as_slice()))
    }
}

/// Morphism sending strip operators on `(S^n·d)`-dimensional spaces back to the side space.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfStripMorphism {
    pub side: Side,
    pub map: LinearMap,
}

impl HalfStripMorphism {
    /// `φ(C)[α,β] = Σ_{i,j} u(i)·C[(i,α),(j,β)]·v(j)` on a side space of dimension `d`.
    pub fn from_projectors(side: Side, u: &[f64], v: &[f64], d: usize) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch("projector lengths differ".into()));
        }
        let n = u.len() * d;
        let matrix = Matrix::from_fn(d * d, n * n, |out, inp| {
            let (a, b) = (out / d, out % d);
            let (r, c) = (inp / n, inp % n);
            let (i, ra) = (r / d, r % d);
            let (j, cb) = (c / d, c % d);
            if ra == a && cb == b {
                u[i] * v[j]
            } else {
                0.0
            }
        });
        Ok(Self { side, map: LinearMap::new((n, n), (d, d), matrix)? })
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        self.map.apply(m)
    }
}

/// Family `K(k)` of maps on a corner space, indexed by the consumed edge state.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerMorphism {
    pub corner: Corner,
    pub k: Vec<LinearMap>,
}

impl CornerMorphism {
    /// `K(k) = c(k)·Id` on `rows×cols` corner matrices.
    pub fn scalar(corner: Corner, shape: (usize, usize), c: &[f64]) -> Self {
        Self { corner, k: c.iter().map(|&ci| LinearMap::scaled_identity(shape, ci)).collect() }
    }
}

/// Edge roles of the corner face: positions in `(x, y, w, z)` of `e_a`, `e_b`,
/// the consumed edge `k` and the remaining edge `r`.
fn corner_roles(corner: Corner) -> [usize; 4] {
    match corner {
        Corner::WS => [2, 0, 1, 3],
        Corner::SE => [0, 3, 2, 1],
        Corner::EN => [3, 1, 0, 2],
        Corner::NW => [1, 2, 3, 0],
    }
}

fn edge_states(spaces: StateSpaces, pos: usize) -> usize {
    if pos < 2 {
        spaces.s1()
    } else {
        spaces.s2()
    }
}

/// Residuals of the half-strip equation, one entry per strip length `p = 1..=p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfStripReport {
    pub per_length: Vec<f64>,
}

impl HalfStripReport {
    pub fn max(&self) -> f64 {
        self.per_length.iter().copied().fold(0.0, f64::max)
    }
}

/// Check `φ(B(y₁)…B(y_p)) = λ^p·A(y₁)…A(y_p)` for every sequence with `p ≤ p_max`.
pub fn verify_halfstrip_eigen(
    w: &FaceWeight,
    side: Side,
    ops: &[Matrix],
    phi: &HalfStripMorphism,
    lambda1: f64,
    p_max: usize,
) -> Result<HalfStripReport> {
    let states = side.states(w.spaces());
    if ops.len() != states || ops.is_empty() {
        return Err(Error::DimensionMismatch(alloc::format!("side {} needs {} operators", side.letter(), states)));
    }
    let d = ops[0].rows();
    let b = strip_operators(w.tensor(), side, ops);
    let n = b[0].rows();
    let mut per_length = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let mut worst: f64 = 0.0;
        for code in 0..crate::math::ipow(states, p) {
            let seq = decode(code, p, states);
            let lhs = phi.apply(&Matrix::product(n, seq.iter().map(|&s| &b[s])))?;
            let a = Matrix::product(d, seq.iter().map(|&s| &ops[s]));
            let rhs = a.scale(powi(lambda1, p as u32));
            let scale = rhs.max_abs();
            let res = lhs.sub(&rhs).max_abs();
            worst = worst.max(if scale > 0.0 { res / scale } else { res });
        }
        per_length.push(worst);
    }
    Ok(HalfStripReport { per_length })
}

/// Largest relative residual of the corner equation over the remaining edge.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
pub fn verify_corner_eigen(
    w: &FaceWeight,
    corner: Corner,
    a_first: &[Matrix],
    a_second: &[Matrix],
    u: &Matrix,
    k: &CornerMorphism,
    lambda1: f64,
    sigma: f64,
) -> Result<f64> {
    let spaces = w.spaces();
    let [pa, pb, pk, pr] = corner_roles(corner);
    let (na, nb, nk, nr) = (edge_states(spaces, pa), edge_states(spaces, pb), edge_states(spaces, pk), edge_states(spaces, pr));
    if a_first.len() != na || a_second.len() != nb || k.k.len() != nk {
        return Err(Error::DimensionMismatch("corner data does not match the state spaces".into()));
    }
    let mut lhs_all = Vec::with_capacity(nr);
    let mut rhs_all = Vec::with_capacity(nr);
    for r in 0..nr {
        let mut acc = Matrix::zeros(u.rows(), u.cols());
        for ea in 0..na {
            for eb in 0..nb {
                for kk in 0..nk {
                    let mut e = [0usize; 4];
                    e[pa] = ea;
                    e[pb] = eb;
                    e[pk] = kk;
                    e[pr] = r;
                    let f = w.value(e[0], e[1], e[2], e[3]);
                    if f == 0.0 {
                        continue;
                    }
                    let inner = k.k[kk].apply(&u.try_mul(&a_second[eb])?)?;
                    acc = acc.add(&a_first[ea].try_mul(&inner)?.scale(f));
                }
            }
        }
        lhs_all.push(acc);
        rhs_all.push(a_first[r].try_mul(u)?.scale(sigma * lambda1));
    }
    let scale = rhs_all.iter().map(Matrix::max_abs).fold(0.0, f64::max);
    let res = lhs_all.iter().zip(&rhs_all).map(|(l, r)| l.sub(r).max_abs()).fold(0.0, f64::max);
    Ok(if scale > 0.0 { res / scale } else { res })
}

/// Eigen-structure of a boundary representation: bulk eigenvalue `λ`, side
/// eigenvalues `σ` (order S, N, W, E), corner constant `κ` and morphisms.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    pub lambda: f64,
    pub sigma: [f64; 4],
    pub kappa: f64,
    pub rep: RopeRep,
    /// Order S, N, W, E.
    pub halfstrip: Vec<HalfStripMorphism>,
    /// Order WS, SE, EN, NW.
    pub corners: Vec<CornerMorphism>,
}

impl EigenStructure {
    pub fn sigma(&self, side: Side) -> f64 {
        self.sigma[side_index(side)]
    }

    pub fn halfstrip(&self, side: Side) -> Option<&HalfStripMorphism> {
        self.halfstrip.iter().find(|m| m.side == side)
    }

    pub fn corner(&self, corner: Corner) -> Option<&CornerMorphism> {
        self.corners.iter().find(|m| m.corner == corner)
    }

    /// `κ·λ^{pq}·σ_S^p σ_N^p σ_W^q σ_E^q`.
    pub fn closed_form(&self, p: usize, q: usize) -> f64 {
        let [s, n, w, e] = self.sigma;
        self.kappa * powi(self.lambda, (p * q) as u32) * powi(s * n, p as u32) * powi(w * e, q as u32)
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::S => 0,
        Side::N => 1,
        Side::W => 2,
        Side::E => 3,
    }
}

fn opposite(side: Side) -> Side {
    match side {
        Side::S => Side::N,
        Side::N => Side::S,
        Side::W => Side::E,
        Side::E => Side::W,
    }
}

/// Projector pair `(u, v)` contracted by the half-strip morphism of a side:
/// the transverse sides met first and last when reading that strip.
fn halfstrip_sides(side: Side) -> (Side, Side) {
    match side {
        Side::S => (Side::W, Side::E),
        Side::N => (Side::E, Side::W),
        Side::E => (Side::S, Side::N),
        Side::W => (Side::N, Side::S),
    }
}

fn scalars(rep: &RopeRep, side: Side) -> Vec<f64> {
    rep.side(side).iter().map(|m| m[(0, 0)]).collect()
}

/// Morphisms of a one-dimensional (factorized) representation whose side
/// vectors are dual in pairs (`⟨A_S, A_N⟩ = ⟨A_W, A_E⟩ = 1`).
pub fn factorized_morphisms(rep: &RopeRep) -> Result<(Vec<HalfStripMorphism>, Vec<CornerMorphism>)> {
    let r = rep.rope();
    if (r.d_s, r.d_n, r.d_w, r.d_e) != (1, 1, 1, 1) {
        return Err(Error::DimensionMismatch("factorized morphisms need a one-dimensional representation".into()));
    }
    let halfstrip = Side::ALL
        .iter()
        .map(|&side| {
            let (u, v) = halfstrip_sides(side);
            HalfStripMorphism::from_projectors(side, &scalars(rep, u), &scalars(rep, v), 1)
        })
        .collect::<Result<Vec<_>>>()?;
    let corners = Corner::ALL
        .iter()
        .map(|&c| CornerMorphism::scalar(c, (1, 1), &scalars(rep, opposite(c.sides().1))))
        .collect();
    Ok((halfstrip, corners))
}

/// Run the four half-strip and four corner checks of an eigen-structure.
pub fn verify_all(es: &EigenStructure, w: &FaceWeight, p_max: usize) -> Result<EigenReport> {
    let mut halfstrip = Vec::new();
    for side in Side::ALL {
        let phi = es.halfstrip(side).ok_or_else(|| Error::InvalidArgument(alloc::format!("missing half-strip morphism {}", side.letter())))?;
        halfstrip.push((side, verify_halfstrip_eigen(w, side, es.rep.side(side), phi, es.lambda, p_max)?));
    }
    let mut corners = Vec::new();
    for corner in Corner::ALL {
        let k = es.corner(corner).ok_or_else(|| Error::InvalidArgument(alloc::format!("missing corner morphism {}", corner.compass())))?;
        let (a, b) = corner.sides();
        let res = verify_corner_eigen(w, corner, es.rep.side(a), es.rep.side(b), es.rep.corner(corner), k, es.lambda, es.sigma(b))?;
        corners.push((corner, res));
    }
    Ok(EigenReport { halfstrip, corners })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub halfstrip: Vec<(Side, HalfStripReport)>,
    pub corners: Vec<(Corner, f64)>,
}

impl EigenReport {
    pub fn max(&self) -> f64 {
        let h = self.halfstrip.iter().map(|(_, r)| r.max()).fold(0.0, f64::max);
        self.corners.iter().map(|(_, r)| *r).fold(h, f64::max)
    }
}

/// Largest relative deviation of `Z^bw(p,q)` from the closed form over the grid.
pub fn verify_fullplane_eigen(es: &EigenStructure, w: &FaceWeight, p_max: usize, q_max: usize, limits: &Limits) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in 1..=p_max {
        for q in 1..=q_max {
            let z = partition_tensor(w, p, q, limits)?;
            let g = es.rep.eval_tensor(p, q, limits)?;
            worst = worst.max(math::rel_diff(g.pair_boundary(&z)?, es.closed_form(p, q)));
        }
    }
    Ok(worst)
}

/// `κ = Z^bw(1,1) / (λ·σ_S σ_N σ_W σ_E)`.
pub fn measure_kappa(rep: &RopeRep, w: &FaceWeight, lambda: f64, sigma: [f64; 4], limits: &Limits) -> Result<f64> {
    let z = rep.eval_tensor(1, 1, limits)?.pair_boundary(w.tensor())?;
    Ok(z / (lambda * sigma.iter().product::<f64>()))
}

/// Contract the South-West corner block of `rep.restrict(w, (n1,0,m1,0))`
/// with the dual side vectors and compare with `λ^{n1·m1}·U_WS`.
pub fn verify_corner_block(es: &EigenStructure, w: &FaceWeight, n1: usize, m1: usize, limits: &Limits) -> Result<f64> {
    let restricted = es.rep.restrict(w, Offsets::new(n1, 0, m1, 0), limits)?;
    let v = restricted.corner(Corner::WS);
    let r = es.rep.rope();
    let (dual_s, dual_w) = (scalars(&es.rep, Side::N), scalars(&es.rep, Side::E));
    let s = w.spaces();
    let (nt, ne) = (crate::math::ipow(s.s1(), n1), crate::math::ipow(s.s2(), m1));
    let mut acc = Matrix::zeros(r.d_w, r.d_s);
    for t in 0..nt {
        let ct: f64 = decode(t, n1, s.s1()).iter().map(|&i| dual_s[i]).product();
        for e in 0..ne {
            let ce: f64 = decode(e, m1, s.s2()).iter().map(|&i| dual_w[i]).product();
            for i in 0..r.d_w {
                for j in 0..r.d_s {
                    acc[(i, j)] += ct * ce * v[(t * r.d_w + i, e * r.d_s + j)];
                }
            }
        }
    }
    let target = es.rep.corner(Corner::WS).scale(powi(es.lambda, (n1 * m1) as u32));
    Ok(acc.sub(&target).max_abs() / target.max_abs())
}

/// Horizontal-vertical model `W(x,y,w,z) = A[x][y]·B[w][z]` with its exact eigen-structure.
#[derive(Debug, Clone, PartialEq)]
pub struct HvModel {
    pub weight: FaceWeight,
    pub alpha: PfPair,
    pub beta: PfPair,
    pub es: EigenStructure,
}

pub fn hv_face_weight(a: &Matrix, b: &Matrix) -> Result<FaceWeight> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::NotNonNegativeSquare);
    }
    let spaces = StateSpaces::new(a.rows(), b.rows())?;
    FaceWeight::from_fn(spaces, |x, y, w, z| a[(x, y)] * b[(w, z)])
}

pub fn build_hv_eigenstructure(a: &Matrix, b: &Matrix) -> Result<HvModel> {
    let alpha = pf_eigen(a)?;
    let beta = pf_eigen(b)?;
    let weight = hv_face_weight(a, b)?;
    let rep = RopeRep::from_factorized(weight.spaces(), &alpha.v_left, &alpha.v_right, &beta.v_left, &beta.v_right)?;
    let (halfstrip, corners) = factorized_morphisms(&rep)?;
    let lambda = alpha.lambda * beta.lambda;
    let sigma = [1.0; 4];
    let kappa = measure_kappa(&rep, &weight, lambda, sigma, &Limits::default())?;
    Ok(HvModel { weight, alpha, beta, es: EigenStructure { lambda, sigma, kappa, rep, halfstrip, corners } })
}

/// Oblique model `W(x,y,w,z) = C[x][w]·D[z][y]` with `C: s1×s2`, `D: s2×s1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliqueModel {
    pub weight: FaceWeight,
    pub big_lambda: f64,
    pub s1: f64,
    pub s2: f64,
    pub v_l1: Vec<f64>,
    pub v_r1: Vec<f64>,
    pub v_l2: Vec<f64>,
    pub v_r2: Vec<f64>,
    pub es: EigenStructure,
}

pub fn oblique_face_weight(c: &Matrix, d: &Matrix) -> Result<FaceWeight> {
    if c.rows() != d.cols() || c.cols() != d.rows() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "C must be s1×s2 and D s2×s1, got {}x{} and {}x{}",
            c.rows(),
            c.cols(),
            d.rows(),
            d.cols()
        )));
    }
    let spaces = StateSpaces::new(c.rows(), c.cols())?;
    FaceWeight::from_fn(spaces, |x, y, w, z| c[(x, w)] * d[(z, y)])
}

pub fn build_oblique_eigenstructure(c: &Matrix, d: &Matrix) -> Result<ObliqueModel> {
    let weight = oblique_face_weight(c, d)?;
    let cd = c.mul(d);
    if !is_irreducible(&d.mul(c)) {
        return Err(Error::Reducible);
    }
    let pf = pf_eigen(&cd)?;
    let big_lambda = pf.lambda;
    let dv = d.matvec(&pf.v_right);
    let s1 = norm2(&dv);
    let s2 = big_lambda / s1;
    let v_r2: Vec<f64> = dv.iter().map(|x| x / s1).collect();
    let v_l2: Vec<f64> = c.vecmat(&pf.v_left).iter().map(|x| x / s2).collect();
    let rep = RopeRep::from_factorized(weight.spaces(), &pf.v_left, &pf.v_right, &v_r2, &v_l2)?;
    let (halfstrip, corners) = factorized_morphisms(&rep)?;
    let sigma = [1.0; 4];
    let kappa = measure_kappa(&rep, &weight, big_lambda, sigma, &Limits::default())?;
    Ok(ObliqueModel {
        weight,
        big_lambda,
        s1,
        s2,
        v_l1: pf.v_left,
        v_r1: pf.v_right,
        v_l2,
        v_r2,
        es: EigenStructure { lambda: big_lambda, sigma, kappa, rep, halfstrip, corners },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m2(v: [f64; 4]) -> Matrix {
        Matrix::from_vec(2, 2, v.to_vec()).unwrap()
    }

    fn rmat(r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.gen_range(0.1..2.0))
    }

    fn check_pf(a: &Matrix, pf: &PfPair) {
        let res_r: Vec<f64> = a.matvec(&pf.v_right).iter().zip(&pf.v_right).map(|(x, v)| x - pf.lambda * v).collect();
        let res_l: Vec<f64> = a.vecmat(&pf.v_left).iter().zip(&pf.v_left).map(|(x, v)| x - pf.lambda * v).collect();
        assert!(max_abs(&res_r) <= 1e-10 * pf.lambda);
        assert!(max_abs(&res_l) <= 1e-10 * pf.lambda * max_abs(&pf.v_left));
        assert!((dot(&pf.v_left, &pf.v_right) - 1.0).abs() <= 1e-12);
        assert!((norm2(&pf.v_right) - 1.0).abs() <= 1e-12);
        assert!(pf.v_right.iter().chain(&pf.v_left).all(|&v| v > 0.0));
    }

    #[test]
    fn identity_is_reducible() {
        assert_eq!(pf_eigen(&Matrix::identity(2)), Err(Error::Reducible));
    }

    #[test]
    fn pf_closed_forms() {
        let s = 1.0 / 2f64.sqrt();
        let pf = pf_eigen(&m2([2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!((pf.lambda - 3.0).abs() <= 1e-13);
        assert!((pf.v_right[0] - s).abs() <= 1e-13 && (pf.v_right[1] - s).abs() <= 1e-13);
        let pf = pf_eigen(&m2([1.0; 4])).unwrap();
        assert!((pf.lambda - 2.0).abs() <= 1e-13);
    }

    #[test]
    fn pf_periodic_matrix_uses_shift() {
        let a = Matrix::from_vec(2, 2, vec![0.0, 2.0, 0.5, 0.0]).unwrap();
        let pf = pf_eigen(&a).unwrap();
        assert!((pf.lambda - 1.0).abs() <= 1e-10);
        check_pf(&a, &pf);
    }

    #[test]
    fn pf_rejects_bad_input() {
        assert_eq!(pf_eigen(&m2([1.0, 1.0, 0.0, 1.0])), Err(Error::Reducible));
        assert_eq!(pf_eigen(&m2([1.0, -1.0, 1.0, 1.0])), Err(Error::NotNonNegativeSquare));
        assert_eq!(pf_eigen(&Matrix::zeros(2, 3)), Err(Error::NotNonNegativeSquare));
    }

    #[test]
    fn pf_random_residuals_and_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let a = rmat(n, n, &mut rng);
            let pf = pf_eigen(&a).unwrap();
            check_pf(&a, &pf);
            let pt = pf_eigen(&a.transpose()).unwrap();
            assert!(math::rel_diff(pf.lambda, pt.lambda) <= 1e-12);
            let scale = pt.v_right.iter().zip(&pf.v_left).map(|(a, b)| a / b).collect::<Vec<_>>();
            assert!(scale.iter().all(|&c| math::rel_diff(c, scale[0]) <= 1e-10));
        }
    }

    #[test]
    fn second_eigenvalue_of_symmetric() {
        let a = m2([2.0, 1.0, 1.0, 2.0]);
        let pf = pf_eigen(&a).unwrap();
        assert!((second_eigenvalue(&a, &pf) - 1.0).abs() <= 1e-10);
        let pf1 = pf_eigen(&Matrix::scalar(3.0)).unwrap();
        assert_eq!(second_eigenvalue(&Matrix::scalar(3.0), &pf1), 0.0);
    }

    #[test]
    fn linear_map_checks_shapes() {
        assert!(LinearMap::new((2, 2), (1, 1), Matrix::zeros(1, 3)).is_err());
        let id = LinearMap::scaled_identity((2, 1), 3.0);
        let out = id.apply(&Matrix::column(&[1.0, 2.0])).unwrap();
        assert_eq!(out.as_slice(), &[3.0, 6.0]);
        assert!(id.apply(&Matrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn projector_morphism_contracts_blocks() {
        let phi = HalfStripMorphism::from_projectors(Side::S, &[1.0, 2.0], &[3.0, 5.0], 1).unwrap();
        let c = m2([1.0, 10.0, 100.0, 1000.0]);
        // 1·1·3 + 1·10·5 + 2·100·3 + 2·1000·5
        assert_eq!(phi.apply(&c).unwrap().as_slice(), &[10653.0]);
    }

    #[test]
    fn scalar_model_is_exact() {
        let s = StateSpaces::new(1, 1).unwrap();
        let w = FaceWeight::from_data(s, vec![2.5]).unwrap();
        let ops = vec![Matrix::scalar(1.0)];
        for side in Side::ALL {
            let phi = HalfStripMorphism::from_projectors(side, &[1.0], &[1.0], 1).unwrap();
            assert_eq!(verify_halfstrip_eigen(&w, side, &ops, &phi, 2.5, 3).unwrap().max(), 0.0);
        }
        for c in Corner::ALL {
            let k = CornerMorphism::scalar(c, (1, 1), &[1.0]);
            assert_eq!(verify_corner_eigen(&w, c, &ops, &ops, &Matrix::scalar(1.0), &k, 2.5, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn hv_all_ones() {
        let m = build_hv_eigenstructure(&m2([1.0; 4]), &m2([1.0; 4])).unwrap();
        assert!((m.es.lambda - 4.0).abs() <= 1e-12);
        assert!((m.es.kappa - 1.0).abs() <= 1e-12);
        let g = m.es.rep.eval_tensor(1, 1, &Limits::default()).unwrap();
        assert!(g.data().iter().all(|&v| (v - g.data()[0]).abs() <= 1e-15));
        assert!(verify_all(&m.es, &m.weight, 3).unwrap().max() <= 1e-12);
        assert!(verify_fullplane_eigen(&m.es, &m.weight, 3, 3, &Limits::default()).unwrap() <= 1e-12);
    }

    #[test]
    fn hv_random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = build_hv_eigenstructure(&rmat(2, 2, &mut rng), &rmat(3, 3, &mut rng)).unwrap();
        let report = verify_all(&m.es, &m.weight, 3).unwrap();
        assert!(report.max() <= 1e-10, "{report:?}");
        assert!(verify_fullplane_eigen(&m.es, &m.weight, 2, 3, &Limits::default()).unwrap() <= 1e-10);
        assert!(verify_corner_block(&m.es, &m.weight, 1, 1, &Limits::default()).unwrap() <= 1e-10);
    }

    #[test]
    fn oblique_all_ones() {
        let m = build_oblique_eigenstructure(&m2([1.0; 4]), &m2([1.0; 4])).unwrap();
        assert!((m.big_lambda - 4.0).abs() <= 1e-12);
        assert!(math::rel_diff(m.s1 * m.s2, m.big_lambda) <= 1e-14);
    }

    #[test]
    fn oblique_relations_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (c, d) = (rmat(2, 3, &mut rng), rmat(3, 2, &mut rng));
        let m = build_oblique_eigenstructure(&c, &d).unwrap();
        let dv: Vec<f64> = d.matvec(&m.v_r1).iter().zip(&m.v_r2).map(|(a, b)| a - m.s1 * b).collect();
        assert!(max_abs(&dv) <= 1e-10 * m.s1);
        let cv: Vec<f64> = c.matvec(&m.v_r2).iter().zip(&m.v_r1).map(|(a, b)| a - m.s2 * b).collect();
        assert!(max_abs(&cv) <= 1e-10 * m.s2);
        let vd: Vec<f64> = d.vecmat(&m.v_l2).iter().zip(&m.v_l1).map(|(a, b)| a - m.s1 * b).collect();
        assert!(max_abs(&vd) <= 1e-10 * m.s1 * max_abs(&m.v_l1));
        assert!(verify_all(&m.es, &m.weight, 3).unwrap().max() <= 1e-10);
        assert!(verify_fullplane_eigen(&m.es, &m.weight, 3, 2, &Limits::default()).unwrap() <= 1e-10);
        assert!(verify_corner_block(&m.es, &m.weight, 1, 1, &Limits::default()).unwrap() <= 1e-10);
        assert!(verify_corner_block(&m.es, &m.weight, 2, 1, &Limits::default()).unwrap() <= 1e-10);
    }

    #[test]
    fn random_weight_fails_halfstrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = StateSpaces::new(2, 2).unwrap();
        let w = FaceWeight::from_fn(s, |_, _, _, _| rng.gen_range(0.1..1.0)).unwrap();
        let ops: Vec<Matrix> = (0..2).map(|_| rmat(1, 1, &mut rng)).collect();
        let phi = HalfStripMorphism::from_projectors(Side::S, &[0.4, 0.9], &[0.7, 0.2], 1).unwrap();
        assert!(verify_halfstrip_eigen(&w, Side::S, &ops, &phi, 1.0, 2).unwrap().max() > 1e-6);
    }

    #[test]
    fn oblique_rejects_bad_shapes() {
        assert!(matches!(
            build_oblique_eigenstructure(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
