//! Markov processes on rectangles: face weights, partition functions, exact
//! laws, marginal boundary weights, observables and gauge transforms.
//!
//! Edges of a `p×q` rectangle are numbered with all horizontal edges first,
//! row by row from the bottom (`id = r·p + i` for row `r ∈ 0..=q`, column
//! `i ∈ 0..p`), then all vertical edges column by column from the left
//! (`id = p(q+1) + c·q + j` for column `c ∈ 0..=p`, row `j ∈ 0..q`). A full
//! configuration is flattened with edge 0 most significant.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, ipow};
use crate::tensor::{encode, surface_power, Boundary, GuillotineTensor, Limits, Shape, StateSpaces};

/// Elementary weight `W(x_S, x_N, x_W, x_E)` of one lattice face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceWeight {
    tensor: GuillotineTensor,
}

impl FaceWeight {
    pub fn new(tensor: GuillotineTensor) -> Result<Self> {
        if tensor.shape() != Shape::new(1, 1) {
            let s = tensor.shape();
            return Err(Error::InvalidShape { p: s.p, q: s.q, reason: "face weights have shape (1,1)" });
        }
        if !tensor.is_nonnegative() {
            return Err(Error::NegativeWeight);
        }
        if tensor.data().iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroWeight);
        }
        Ok(Self { tensor })
    }

    /// Flat data indexed `((x·s1 + y)·s2 + w)·s2 + z`.
    pub fn from_data(spaces: StateSpaces, data: Vec<f64>) -> Result<Self> {
        Self::new(GuillotineTensor::from_data(spaces, Shape::new(1, 1), data)?)
    }

    pub fn from_fn(spaces: StateSpaces, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let t = GuillotineTensor::from_fn(spaces, Shape::new(1, 1), &Limits::default(), |b| f(b.x[0], b.y[0], b.w[0], b.z[0]))?;
        Self::new(t)
    }

    pub fn spaces(&self) -> StateSpaces {
        self.tensor.spaces()
    }

    pub fn tensor(&self) -> &GuillotineTensor {
        &self.tensor
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize, w: usize, z: usize) -> f64 {
        let sp = self.tensor.spaces();
        self.tensor.data()[((x * sp.s1() + y) * sp.s2() + w) * sp.s2() + z]
    }
}

/// Widths removed from the West (`n1`), East (`n2`), South (`m1`) and North
/// (`m2`) sides of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Offsets {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
}

impl Offsets {
    pub const fn new(n1: usize, n2: usize, m1: usize, m2: usize) -> Self {
        Self { n1, n2, m1, m2 }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }

    /// Shape of the inner rectangle; it must be non-degenerate.
    pub fn inner(&self, outer: Shape) -> Result<Shape> {
        let Self { n1, n2, m1, m2 } = *self;
        let err = Error::InvalidOffsets { n1, n2, m1, m2, p: outer.p, q: outer.q };
        let p = outer.p.checked_sub(n1 + n2).ok_or(err.clone())?;
        let q = outer.q.checked_sub(m1 + m2).ok_or(err.clone())?;
        if p == 0 || q == 0 {
            return Err(err);
        }
        Ok(Shape::new(p, q))
    }
}

/// Edge bookkeeping for a `p×q` rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectGeometry {
    pub p: usize,
    pub q: usize,
}

impl RectGeometry {
    pub fn new(shape: Shape) -> Self {
        Self { p: shape.p, q: shape.q }
    }

    pub fn edge_count(&self) -> usize {
        self.p * (self.q + 1) + self.q * (self.p + 1)
    }

    pub fn horizontal_count(&self) -> usize {
        self.p * (self.q + 1)
    }

    /// Horizontal edge in row `r` (0 = bottom), column `i`.
    #[inline]
    pub fn h(&self, r: usize, i: usize) -> usize {
        r * self.p + i
    }

    /// Vertical edge in column `c` (0 = left), row `j`.
    #[inline]
    pub fn v(&self, c: usize, j: usize) -> usize {
        self.horizontal_count() + c * self.q + j
    }

    pub fn is_horizontal(&self, e: usize) -> bool {
        e < self.horizontal_count()
    }

    /// Number of states of edge `e`.
    pub fn base(&self, spaces: StateSpaces, e: usize) -> usize {
        if self.is_horizontal(e) {
            spaces.s1()
        } else {
            spaces.s2()
        }
    }

    /// `(S, N, W, E)` edges of face `(i, j)`.
    #[inline]
    pub fn face(&self, i: usize, j: usize) -> [usize; 4] {
        [self.h(j, i), self.h(j + 1, i), self.v(i, j), self.v(i + 1, j)]
    }

    pub fn south(&self) -> Vec<usize> {
        (0..self.p).map(|i| self.h(0, i)).collect()
    }

    pub fn north(&self) -> Vec<usize> {
        (0..self.p).map(|i| self.h(self.q, i)).collect()
    }

    pub fn west(&self) -> Vec<usize> {
        (0..self.q).map(|j| self.v(0, j)).collect()
    }

    pub fn east(&self) -> Vec<usize> {
        (0..self.q).map(|j| self.v(self.p, j)).collect()
    }

    /// Edges not on the boundary, in enumeration order.
    pub fn interior(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for r in 1..self.q {
            out.extend((0..self.p).map(|i| self.h(r, i)));
        }
        for c in 1..self.p {
            out.extend((0..self.q).map(|j| self.v(c, j)));
        }
        out
    }

    /// Edges of the inner rectangle cut out by `offsets`, listed in the inner
    /// rectangle's own enumeration order.
    pub fn inner_edges(&self, offsets: Offsets) -> Result<Vec<usize>> {
        let inner = RectGeometry::new(offsets.inner(Shape::new(self.p, self.q))?);
        let mut out = Vec::with_capacity(inner.edge_count());
        for r in 0..=inner.q {
            out.extend((0..inner.p).map(|i| self.h(r + offsets.m1, i + offsets.n1)));
        }
        for c in 0..=inner.p {
            out.extend((0..inner.q).map(|j| self.v(c + offsets.n1, j + offsets.m1)));
        }
        Ok(out)
    }

    /// Product of face weights over the faces selected by `keep`.
    #[inline]
    pub fn weight(&self, w: &FaceWeight, states: &[usize], keep: impl Fn(usize, usize) -> bool) -> f64 {
        let mut acc = 1.0;
        for j in 0..self.q {
            for i in 0..self.p {
                if keep(i, j) {
                    let [s, n, we, e] = self.face(i, j);
                    acc *= w.value(states[s], states[n], states[we], states[e]);
                    if acc == 0.0 {
                        return 0.0;
                    }
                }
            }
        }
        acc
    }

    /// Flat index of the boundary part of `states` in a `(p,q)` tensor.
    pub fn boundary_index(&self, spaces: StateSpaces, states: &[usize]) -> usize {
        let (s1, s2) = (spaces.s1(), spaces.s2());
        let nx = ipow(s1, self.p);
        let nw = ipow(s2, self.q);
        let x = (0..self.p).fold(0, |a, i| a * s1 + states[self.h(0, i)]);
        let y = (0..self.p).fold(0, |a, i| a * s1 + states[self.h(self.q, i)]);
        let wv = (0..self.q).fold(0, |a, j| a * s2 + states[self.v(0, j)]);
        let z = (0..self.q).fold(0, |a, j| a * s2 + states[self.v(self.p, j)]);
        ((x * nx + y) * nw + wv) * nw + z
    }

    /// Boundary configuration carried by `states`.
    pub fn boundary(&self, states: &[usize]) -> Boundary {
        let pick = |es: Vec<usize>| es.into_iter().map(|e| states[e]).collect();
        Boundary { x: pick(self.south()), y: pick(self.north()), w: pick(self.west()), z: pick(self.east()) }
    }

    /// Visit every assignment of the `free` edges (first listed most
    /// significant), leaving the other entries of `states` untouched.
    pub fn for_each(&self, spaces: StateSpaces, free: &[usize], states: &mut [usize], mut f: impl FnMut(&[usize])) {
        for &e in free {
            states[e] = 0;
        }
        loop {
            f(states);
            let mut k = free.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                let e = free[k];
                states[e] += 1;
                if states[e] < self.base(spaces, e) {
                    break;
                }
                states[e] = 0;
            }
        }
    }

    /// Like `for_each`, also passing the product of the kept face weights.
    /// Each face is multiplied in once its last free edge is set, so a step
    /// of the odometer only redoes the products below the changed digit.
    pub fn for_each_weighted(
        &self,
        w: &FaceWeight,
        free: &[usize],
        states: &mut [usize],
        keep: impl Fn(usize, usize) -> bool,
        mut f: impl FnMut(&[usize], f64),
    ) {
        let spaces = w.spaces();
        let n = free.len();
        let mut depth = vec![0usize; self.edge_count()];
        for (k, &e) in free.iter().enumerate() {
            depth[e] = k + 1;
            states[e] = 0;
        }
        let mut faces: Vec<Vec<[usize; 4]>> = vec![Vec::new(); n + 1];
        for j in 0..self.q {
            for i in 0..self.p {
                if keep(i, j) {
                    let fc = self.face(i, j);
                    faces[fc.iter().map(|&e| depth[e]).max().unwrap_or(0)].push(fc);
                }
            }
        }
        let level = |k: usize, st: &[usize]| -> f64 {
            faces[k].iter().fold(1.0, |acc, &[s, nn, we, e]| acc * w.value(st[s], st[nn], st[we], st[e]))
        };
        let mut prefix = vec![0.0; n + 1];
        prefix[0] = level(0, states);
        let mut from = 1;
        loop {
            for k in from..=n {
                prefix[k] = prefix[k - 1] * level(k, states);
            }
            f(states, prefix[n]);
            let mut k = n;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                let e = free[k];
                states[e] += 1;
                if states[e] < self.base(spaces, e) {
                    break;
                }
                states[e] = 0;
            }
            from = k + 1;
        }
    }

    /// Mixed-radix index of the states of `edges` (first most significant).
    pub fn encode_edges(&self, spaces: StateSpaces, edges: &[usize], states: &[usize]) -> usize {
        edges.iter().fold(0, |a, &e| a * self.base(spaces, e) + states[e])
    }

    /// Number of joint states of `edges`.
    pub fn configurations(&self, spaces: StateSpaces, edges: &[usize]) -> usize {
        edges.iter().map(|&e| self.base(spaces, e)).product()
    }
}

/// Exact joint law of all edge values of a small rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct RectLaw {
    spaces: StateSpaces,
    shape: Shape,
    probs: Vec<f64>,
    z: f64,
}

impl RectLaw {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn spaces(&self) -> StateSpaces {
        self.spaces
    }

    /// Probabilities indexed by the flattened edge configuration.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Normalisation constant `Σ g·ΠW`.
    pub fn partition(&self) -> f64 {
        self.z
    }

    /// Marginal law of `edges`, indexed with the first listed edge most significant.
    pub fn marginal(&self, edges: &[usize]) -> Vec<f64> {
        let geom = RectGeometry::new(self.shape);
        let all: Vec<usize> = (0..geom.edge_count()).collect();
        let mut out = vec![0.0; geom.configurations(self.spaces, edges)];
        let mut states = vec![0; all.len()];
        let mut idx = 0;
        geom.for_each(self.spaces, &all, &mut states, |st| {
            out[geom.encode_edges(self.spaces, edges, st)] += self.probs[idx];
            idx += 1;
        });
        out
    }
}

fn check_boundary_weight(g: &GuillotineTensor, spaces: StateSpaces) -> Result<()> {
    if g.spaces() != spaces {
        let o = g.spaces();
        return Err(Error::SpaceMismatch(spaces.s1(), spaces.s2(), o.s1(), o.s2()));
    }
    if g.shape().is_degenerate() {
        return Err(Error::InvalidShape { p: g.shape().p, q: g.shape().q, reason: "boundary weights need p,q >= 1" });
    }
    if !g.is_nonnegative() {
        return Err(Error::NegativeWeight);
    }
    if g.data().iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroWeight);
    }
    Ok(())
}

/// Partition function `W^{[p,q]}` through the guillotine products.
pub fn partition_tensor(w: &FaceWeight, p: usize, q: usize, limits: &Limits) -> Result<GuillotineTensor> {
    surface_power(w.tensor(), p, q, limits)
}

/// Partition function by summing over every configuration of the rectangle.
pub fn partition_tensor_bruteforce(w: &FaceWeight, p: usize, q: usize, limits: &Limits) -> Result<GuillotineTensor> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidShape { p, q, reason: "partition functions need p,q >= 1" });
    }
    let geom = RectGeometry::new(Shape::new(p, q));
    limits.check_edges(geom.edge_count())?;
    let spaces = w.spaces();
    let mut z = GuillotineTensor::zeros(spaces, Shape::new(p, q), limits)?.into_data();
    let all: Vec<usize> = (0..geom.edge_count()).collect();
    let mut states = vec![0; all.len()];
    geom.for_each_weighted(w, &all, &mut states, |_, _| true, |st, v| {
        if v != 0.0 {
            z[geom.boundary_index(spaces, st)] += v;
        }
    });
    GuillotineTensor::from_data(spaces, Shape::new(p, q), z)
}

/// Exact law `P(c) ∝ g(∂c)·Π_f W(c_f)` on the rectangle of `g`'s shape.
pub fn exact_law(w: &FaceWeight, g: &GuillotineTensor, limits: &Limits) -> Result<RectLaw> {
    let spaces = w.spaces();
    check_boundary_weight(g, spaces)?;
    let geom = RectGeometry::new(g.shape());
    limits.check_edges(geom.edge_count())?;
    let all: Vec<usize> = (0..geom.edge_count()).collect();
    let n = geom.configurations(spaces, &all);
    limits.check_entries(n as u128)?;
    let mut probs = Vec::with_capacity(n);
    let mut states = vec![0; all.len()];
    geom.for_each_weighted(w, &all, &mut states, |_, _| true, |st, v| {
        let b = g.data()[geom.boundary_index(spaces, st)];
        probs.push(if b == 0.0 { 0.0 } else { b * v });
    });
    let z: f64 = probs.iter().sum();
    if !(z > 0.0) {
        return Err(Error::ZeroPartition);
    }
    for v in probs.iter_mut() {
        *v = (*v / z).max(0.0);
    }
    Ok(RectLaw { spaces, shape: g.shape(), probs, z })
}

/// Normalised marginal law of `edges` under `exact_law(w, g)`, accumulated
/// without storing the full joint table.
pub fn edge_marginal(w: &FaceWeight, g: &GuillotineTensor, edges: &[usize], limits: &Limits) -> Result<Vec<f64>> {
    let spaces = w.spaces();
    check_boundary_weight(g, spaces)?;
    let geom = RectGeometry::new(g.shape());
    limits.check_edges(geom.edge_count())?;
    if edges.iter().any(|&e| e >= geom.edge_count()) {
        return Err(Error::InvalidArgument("edge id outside the rectangle".into()));
    }
    let all: Vec<usize> = (0..geom.edge_count()).collect();
    let mut out = vec![0.0; geom.configurations(spaces, edges)];
    let mut states = vec![0; all.len()];
    geom.for_each_weighted(w, &all, &mut states, |_, _| true, |st, v| {
        if v == 0.0 {
            return;
        }
        let b = g.data()[geom.boundary_index(spaces, st)];
        if b != 0.0 {
            out[geom.encode_edges(spaces, edges, st)] += b * v;
        }
    });
    let z: f64 = out.iter().sum();
    if !(z > 0.0) {
        return Err(Error::ZeroPartition);
    }
    out.iter_mut().for_each(|v| *v /= z);
    Ok(out)
}

/// Unnormalised boundary weight induced on the inner rectangle: sums the faces
/// and edges of the annulus against the outer boundary weight.
pub fn marginal_boundary_weight(
    w: &FaceWeight,
    g: &GuillotineTensor,
    offsets: Offsets,
    limits: &Limits,
) -> Result<GuillotineTensor> {
    let spaces = w.spaces();
    check_boundary_weight(g, spaces)?;
    let outer = RectGeometry::new(g.shape());
    let inner_shape = offsets.inner(g.shape())?;
    let inner = RectGeometry::new(inner_shape);
    let inner_edges = outer.inner_edges(offsets)?;
    let hidden: Vec<usize> = inner.interior().iter().map(|&e| inner_edges[e]).collect();
    let free: Vec<usize> = (0..outer.edge_count()).filter(|e| !hidden.contains(e)).collect();
    limits.check_edges(free.len())?;
    let mut out = GuillotineTensor::zeros(spaces, inner_shape, limits)?.into_data();
    let in_inner = |i: usize, j: usize| {
        i >= offsets.n1 && i < offsets.n1 + inner_shape.p && j >= offsets.m1 && j < offsets.m1 + inner_shape.q
    };
    let mut states = vec![0; outer.edge_count()];
    let mut inner_states = vec![0; inner.edge_count()];
    outer.for_each_weighted(w, &free, &mut states, |i, j| !in_inner(i, j), |st, v| {
        if v == 0.0 {
            return;
        }
        let v = v * g.data()[outer.boundary_index(spaces, st)];
        if v == 0.0 {
            return;
        }
        for (slot, &e) in inner_states.iter_mut().zip(&inner_edges) {
            *slot = st[e];
        }
        out[inner.boundary_index(spaces, &inner_states)] += v;
    });
    GuillotineTensor::from_data(spaces, inner_shape, out)
}

/// Law of the interior edges given a boundary configuration; depends on `w` only.
pub fn conditional_interior_law(w: &FaceWeight, shape: Shape, boundary: &Boundary, limits: &Limits) -> Result<Vec<f64>> {
    let spaces = w.spaces();
    let geom = RectGeometry::new(shape);
    if boundary.x.len() != shape.p || boundary.y.len() != shape.p || boundary.w.len() != shape.q || boundary.z.len() != shape.q
    {
        return Err(Error::ShapeMismatch("boundary configuration does not fit the rectangle".into()));
    }
    let interior = geom.interior();
    limits.check_edges(interior.len())?;
    let mut states = vec![0; geom.edge_count()];
    for (es, vals) in [(geom.south(), &boundary.x), (geom.north(), &boundary.y), (geom.west(), &boundary.w), (geom.east(), &boundary.z)] {
        for (e, &s) in es.into_iter().zip(vals.iter()) {
            states[e] = s;
        }
    }
    let mut out = Vec::with_capacity(geom.configurations(spaces, &interior));
    geom.for_each_weighted(w, &interior, &mut states, |_, _| true, |_, v| out.push(v));
    let z: f64 = out.iter().sum();
    if !(z > 0.0) {
        return Err(Error::ZeroPartition);
    }
    out.iter_mut().for_each(|v| *v /= z);
    Ok(out)
}

/// Diagonal observable `h` attached to one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub edge: usize,
    pub h: Vec<f64>,
}

fn check_observables(geom: &RectGeometry, spaces: StateSpaces, obs: &[Observable]) -> Result<()> {
    for (k, o) in obs.iter().enumerate() {
        if o.edge >= geom.edge_count() {
            return Err(Error::InvalidArgument(alloc::format!("observable on unknown edge {}", o.edge)));
        }
        if o.h.len() != geom.base(spaces, o.edge) {
            return Err(Error::DimensionMismatch(alloc::format!("observable on edge {} has {} values", o.edge, o.h.len())));
        }
        if obs[..k].iter().any(|p| p.edge == o.edge) {
            return Err(Error::InvalidArgument(alloc::format!("two observables on edge {}", o.edge)));
        }
    }
    Ok(())
}

/// `E[Π h_e(X_e)]` by enumerating the exact law.
pub fn expectation_by_enumeration(w: &FaceWeight, g: &GuillotineTensor, obs: &[Observable], limits: &Limits) -> Result<f64> {
    let spaces = w.spaces();
    check_boundary_weight(g, spaces)?;
    let geom = RectGeometry::new(g.shape());
    check_observables(&geom, spaces, obs)?;
    limits.check_edges(geom.edge_count())?;
    let all: Vec<usize> = (0..geom.edge_count()).collect();
    let mut states = vec![0; all.len()];
    let (mut num, mut den) = (0.0, 0.0);
    geom.for_each_weighted(w, &all, &mut states, |_, _| true, |st, v| {
        let v = v * g.data()[geom.boundary_index(spaces, st)];
        if v == 0.0 {
            return;
        }
        den += v;
        num += v * obs.iter().map(|o| o.h[st[o.edge]]).product::<f64>();
    });
    if !(den > 0.0) {
        return Err(Error::ZeroPartition);
    }
    Ok(num / den)
}

/// `E[Π h_e(X_e)]` by inserting the diagonal observables into the faces and
/// gluing them with the guillotine products.
pub fn expectation_with_observables(w: &FaceWeight, g: &GuillotineTensor, obs: &[Observable], limits: &Limits) -> Result<f64> {
    let spaces = w.spaces();
    check_boundary_weight(g, spaces)?;
    let shape = g.shape();
    let geom = RectGeometry::new(shape);
    check_observables(&geom, spaces, obs)?;
    let (p, q) = (shape.p, shape.q);
    // each edge is charged to exactly one face: the one above / to the right if present
    let owner = |e: usize| -> (usize, usize, usize) {
        if geom.is_horizontal(e) {
            let (r, i) = (e / p, e % p);
            if r < q {
                (i, r, 0)
            } else {
                (i, q - 1, 1)
            }
        } else {
            let k = e - geom.horizontal_count();
            let (c, j) = (k / q, k % q);
            if c < p {
                (c, j, 2)
            } else {
                (p - 1, j, 3)
            }
        }
    };
    let face = |i: usize, j: usize| -> Result<GuillotineTensor> {
        let here: Vec<(usize, &Observable)> =
            obs.iter().filter_map(|o| {
                let (fi, fj, side) = owner(o.edge);
                (fi == i && fj == j).then_some((side, o))
            }).collect();
        if here.is_empty() {
            return Ok(w.tensor().clone());
        }
        GuillotineTensor::from_fn(spaces, Shape::new(1, 1), limits, |b| {
            let vals = [b.x[0], b.y[0], b.w[0], b.z[0]];
            here.iter().fold(w.value(vals[0], vals[1], vals[2], vals[3]), |acc, (side, o)| acc * o.h[vals[*side]])
        })
    };
    let mut full: Option<GuillotineTensor> = None;
    for j in 0..q {
        let mut row = face(0, j)?;
        for i in 1..p {
            row = row.m_we(&face(i, j)?)?;
        }
        full = Some(match full {
            None => row,
            Some(acc) => acc.m_sn(&row)?,
        });
    }
    let num = g.pair_boundary(&full.expect("q >= 1"))?;
    let den = g.pair_boundary(&partition_tensor(w, p, q, limits)?)?;
    if !(den > 0.0) {
        return Err(Error::ZeroPartition);
    }
    Ok(num / den)
}

/// Gauge-transformed face weight `W·c_h(y)/c_h(x)·c_v(z)/c_v(w)`.
pub fn gauge_transform(w: &FaceWeight, c_h: &[f64], c_v: &[f64]) -> Result<FaceWeight> {
    let spaces = w.spaces();
    check_gauge(spaces, c_h, c_v)?;
    FaceWeight::from_fn(spaces, |x, y, wv, z| w.value(x, y, wv, z) * c_h[y] / c_h[x] * c_v[z] / c_v[wv])
}

/// Boundary weight that, paired with the gauge-transformed face weight,
/// reproduces the original joint law.
pub fn gauge_compensate(g: &GuillotineTensor, c_h: &[f64], c_v: &[f64]) -> Result<GuillotineTensor> {
    check_gauge(g.spaces(), c_h, c_v)?;
    let limits = Limits { max_entries: usize::MAX, max_edges: 0 };
    GuillotineTensor::from_fn(g.spaces(), g.shape(), &limits, |b| {
        let h: f64 = b.x.iter().zip(&b.y).map(|(&x, &y)| c_h[x] / c_h[y]).product();
        let v: f64 = b.w.iter().zip(&b.z).map(|(&w, &z)| c_v[w] / c_v[z]).product();
        g.get(b) * h * v
    })
}

fn check_gauge(spaces: StateSpaces, c_h: &[f64], c_v: &[f64]) -> Result<()> {
    if c_h.len() != spaces.s1() || c_v.len() != spaces.s2() {
        return Err(Error::DimensionMismatch("gauge vectors must have lengths s1 and s2".into()));
    }
    if c_h.iter().chain(c_v).any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(Error::NonPositiveGauge);
    }
    Ok(())
}

/// Encoded `(X, Y, W, Z)` index helper for callers building boundary tensors by hand.
pub fn boundary_tensor_index(spaces: StateSpaces, b: &Boundary) -> usize {
    let nx = ipow(spaces.s1(), b.x.len());
    let nw = ipow(spaces.s2(), b.w.len());
    ((encode(&b.x, spaces.s1()) * nx + encode(&b.y, spaces.s1())) * nw + encode(&b.w, spaces.s2())) * nw
        + encode(&b.z, spaces.s2())
}

/// Relative deviation between two tensors, ignoring entries where `mask` vanishes.
pub fn masked_max_rel_diff(a: &GuillotineTensor, b: &GuillotineTensor, mask: &GuillotineTensor) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .zip(mask.data())
        .filter(|(_, &m)| m != 0.0)
        .map(|((&x, &y), _)| math::rel_diff(x, y))
        .fold(0.0, f64::max)
}
