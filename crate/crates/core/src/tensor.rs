//! Boundary tensor spaces `T_{p,q}` and the guillotine products.
//!
//! A [`GuillotineTensor`] of shape `(p,q)` with `p,q > 0` stores one real number
//! per boundary configuration `(x, y, w, z)` of a `p×q` rectangle: `x` the South
//! side, `y` the North side (both in `S₁^p`, read left to right), `w` the West
//! side and `z` the East side (both in `S₂^q`, read bottom to top). The flat
//! index is `((X·s1^p + Y)·s2^q + W)·s2^q + Z` where each capital letter is the
//! base-`s` number of the corresponding sequence, first edge most significant.
//!
//! Degenerate shapes keep only the diagonal: `(p,0)` stores `s1^p` numbers
//! (South and North sequences coincide), `(0,q)` stores `s2^q` numbers and
//! `(0,0)` is a scalar.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::ipow;

/// Cardinalities of the horizontal-edge (`S₁`) and vertical-edge (`S₂`) state sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateSpaces {
    s1: usize,
    s2: usize,
}

impl StateSpaces {
    pub fn new(s1: usize, s2: usize) -> Result<Self> {
        if s1 == 0 || s2 == 0 {
            return Err(Error::EmptyStateSpace { s1, s2 });
        }
        Ok(Self { s1, s2 })
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> usize {
        self.s2
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch(self.s1, self.s2, other.s1, other.s2));
        }
        Ok(())
    }
}

/// Horizontal size `p` and vertical size `q` of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub p: usize,
    pub q: usize,
}

impl Shape {
    pub const fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn is_degenerate(&self) -> bool {
        self.p == 0 || self.q == 0
    }
}

/// Size limits enforced instead of running out of memory or time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of entries any tensor may hold.
    pub max_entries: usize,
    /// Largest number of edges a brute-force enumeration may range over.
    pub max_edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_entries: 1 << 28, max_edges: 26 }
    }
}

impl Limits {
    pub(crate) fn check_entries(&self, entries: u128) -> Result<()> {
        if entries > self.max_entries as u128 {
            return Err(Error::MemoryCap { entries, cap: self.max_entries });
        }
        Ok(())
    }

    pub(crate) fn check_edges(&self, edges: usize) -> Result<()> {
        if edges > self.max_edges {
            return Err(Error::EnumerationBound { edges, bound: self.max_edges });
        }
        Ok(())
    }
}

/// One boundary configuration. For `(p,0)` shapes `x == y` and `w`, `z` are
/// empty; for `(0,q)` shapes `w == z` and `x`, `y` are empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Boundary {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub w: Vec<usize>,
    pub z: Vec<usize>,
}

/// Base-`base` number of a sequence, first element most significant.
pub fn encode(seq: &[usize], base: usize) -> usize {
    seq.iter().fold(0, |acc, &s| acc * base + s)
}

/// Inverse of [`encode`].
pub fn decode(mut idx: usize, len: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

fn reversed(v: &[usize]) -> Vec<usize> {
    v.iter().rev().copied().collect()
}

/// Generators of the dihedral action on rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dihedral {
    /// Mirror through a vertical axis: West ↔ East, South/North read backwards.
    FlipH,
    /// Mirror through a horizontal axis: South ↔ North, West/East read backwards.
    FlipV,
    /// Mirror through the main diagonal: shape `(p,q)` becomes `(q,p)`.
    TransposeDiag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuillotineTensor {
    spaces: StateSpaces,
    shape: Shape,
    data: Vec<f64>,
}

impl GuillotineTensor {
    /// Number of stored entries for a shape, without overflow.
    pub fn len_for(spaces: StateSpaces, shape: Shape) -> u128 {
        let (s1, s2) = (spaces.s1 as u128, spaces.s2 as u128);
        let pw = |b: u128, e: usize| (0..e).fold(1u128, |a, _| a.saturating_mul(b));
        match (shape.p, shape.q) {
            (0, 0) => 1,
            (p, 0) => pw(s1, p),
            (0, q) => pw(s2, q),
            (p, q) => pw(s1, 2 * p).saturating_mul(pw(s2, 2 * q)),
        }
    }

    pub fn zeros(spaces: StateSpaces, shape: Shape, limits: &Limits) -> Result<Self> {
        let len = Self::len_for(spaces, shape);
        limits.check_entries(len)?;
        Ok(Self { spaces, shape, data: vec![0.0; len as usize] })
    }

    /// The unit of the products on a shape: all-ones diagonal for degenerate
    /// shapes (and the scalar `1`).
    pub fn unit(spaces: StateSpaces, shape: Shape) -> Result<Self> {
        if !shape.is_degenerate() {
            return Err(Error::InvalidShape { p: shape.p, q: shape.q, reason: "units only exist on degenerate shapes" });
        }
        let len = Self::len_for(spaces, shape) as usize;
        Ok(Self { spaces, shape, data: vec![1.0; len] })
    }

    pub fn from_data(spaces: StateSpaces, shape: Shape, data: Vec<f64>) -> Result<Self> {
        let expected = Self::len_for(spaces, shape);
        if expected != data.len() as u128 {
            return Err(Error::DataLength { expected: expected as usize, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tensor entries must be finite".into()));
        }
        Ok(Self { spaces, shape, data })
    }

    /// Tabulate `f` over every boundary configuration of `shape`.
    pub fn from_fn(
        spaces: StateSpaces,
        shape: Shape,
        limits: &Limits,
        mut f: impl FnMut(&Boundary) -> f64,
    ) -> Result<Self> {
        let mut t = Self::zeros(spaces, shape, limits)?;
        for idx in 0..t.data.len() {
            let b = t.boundary_of(idx);
            t.data[idx] = f(&b);
        }
        if t.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("tensor entries must be finite".into()));
        }
        Ok(t)
    }

    pub fn spaces(&self) -> StateSpaces {
        self.spaces
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    /// `s1^p`, the number of South (or North) sequences.
    pub fn horizontal_count(&self) -> usize {
        ipow(self.spaces.s1, self.shape.p)
    }

    /// `s2^q`, the number of West (or East) sequences.
    pub fn vertical_count(&self) -> usize {
        ipow(self.spaces.s2, self.shape.q)
    }

    /// Flat index of a boundary configuration.
    pub fn index_of(&self, b: &Boundary) -> usize {
        let Shape { p, q } = self.shape;
        let (s1, s2) = (self.spaces.s1, self.spaces.s2);
        match (p, q) {
            (0, 0) => 0,
            (_, 0) => encode(&b.x, s1),
            (0, _) => encode(&b.w, s2),
            _ => {
                let (nx, nw) = (self.horizontal_count(), self.vertical_count());
                ((encode(&b.x, s1) * nx + encode(&b.y, s1)) * nw + encode(&b.w, s2)) * nw + encode(&b.z, s2)
            }
        }
    }

    /// Boundary configuration stored at a flat index.
    pub fn boundary_of(&self, idx: usize) -> Boundary {
        let Shape { p, q } = self.shape;
        let (s1, s2) = (self.spaces.s1, self.spaces.s2);
        match (p, q) {
            (0, 0) => Boundary { x: vec![], y: vec![], w: vec![], z: vec![] },
            (_, 0) => {
                let x = decode(idx, p, s1);
                Boundary { y: x.clone(), x, w: vec![], z: vec![] }
            }
            (0, _) => {
                let w = decode(idx, q, s2);
                Boundary { x: vec![], y: vec![], z: w.clone(), w }
            }
            _ => {
                let (nx, nw) = (self.horizontal_count(), self.vertical_count());
                let zi = idx % nw;
                let wi = (idx / nw) % nw;
                let yi = (idx / (nw * nw)) % nx;
                let xi = idx / (nw * nw * nx);
                Boundary { x: decode(xi, p, s1), y: decode(yi, p, s1), w: decode(wi, q, s2), z: decode(zi, q, s2) }
            }
        }
    }

    /// Value at `(X, Y, W, Z)` given as base-`s` numbers, reading degenerate
    /// shapes as diagonal operators.
    pub fn entry(&self, x: usize, y: usize, w: usize, z: usize) -> f64 {
        match (self.shape.p, self.shape.q) {
            (0, 0) => self.data[0],
            (_, 0) => {
                if x == y {
                    self.data[x]
                } else {
                    0.0
                }
            }
            (0, _) => {
                if w == z {
                    self.data[w]
                } else {
                    0.0
                }
            }
            _ => {
                let (nx, nw) = (self.horizontal_count(), self.vertical_count());
                self.data[((x * nx + y) * nw + w) * nw + z]
            }
        }
    }

    pub fn get(&self, b: &Boundary) -> f64 {
        self.data[self.index_of(b)]
    }

    /// Pointwise map, keeping shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { spaces: self.spaces, shape: self.shape, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise linear combination `self + alpha·other` on identical shapes.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        Ok(Self {
            spaces: self.spaces,
            shape: self.shape,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect(),
        })
    }

    fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        self.spaces.ensure_same(&other.spaces)?;
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(alloc::format!(
                "({},{}) vs ({},{})",
                self.shape.p,
                self.shape.q,
                other.shape.p,
                other.shape.q
            )));
        }
        Ok(())
    }

    /// West-East gluing `m_WE`: contracts the East side of `self` with the West
    /// side of `other`.
    pub fn m_we(&self, other: &Self) -> Result<Self> {
        self.spaces.ensure_same(&other.spaces)?;
        let (a, b) = (self.shape, other.shape);
        if a.q != b.q {
            return Err(Error::ShapeMismatch(alloc::format!("m_we needs equal heights, got {} and {}", a.q, b.q)));
        }
        let spaces = self.spaces;
        let shape = Shape::new(a.p + b.p, a.q);
        if shape.q == 0 {
            // concatenation of diagonal sectors
            let data = self.data.iter().flat_map(|&u| other.data.iter().map(move |&v| u * v)).collect();
            return Ok(Self { spaces, shape, data });
        }
        if shape.p == 0 {
            let data = self.data.iter().zip(&other.data).map(|(u, v)| u * v).collect();
            return Ok(Self { spaces, shape, data });
        }
        let nx1 = self.horizontal_count();
        let nx2 = other.horizontal_count();
        let nw = self.vertical_count();
        let nx = nx1 * nx2;
        let mut data = vec![0.0; nx * nx * nw * nw];
        for x1 in 0..nx1 {
            for y1 in 0..nx1 {
                for w in 0..nw {
                    for x2 in 0..nx2 {
                        for y2 in 0..nx2 {
                            let base = (((x1 * nx2 + x2) * nx + (y1 * nx2 + y2)) * nw + w) * nw;
                            for z in 0..nw {
                                let mut acc = 0.0;
                                for u in 0..nw {
                                    acc += self.entry(x1, y1, w, u) * other.entry(x2, y2, u, z);
                                }
                                data[base + z] = acc;
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { spaces, shape, data })
    }

    /// South-North gluing `m_SN`: contracts the North side of `self` with the
    /// South side of `other`.
    pub fn m_sn(&self, other: &Self) -> Result<Self> {
        self.spaces.ensure_same(&other.spaces)?;
        let (a, b) = (self.shape, other.shape);
        if a.p != b.p {
            return Err(Error::ShapeMismatch(alloc::format!("m_sn needs equal widths, got {} and {}", a.p, b.p)));
        }
        let spaces = self.spaces;
        let shape = Shape::new(a.p, a.q + b.q);
        if shape.p == 0 {
            let data = self.data.iter().flat_map(|&u| other.data.iter().map(move |&v| u * v)).collect();
            return Ok(Self { spaces, shape, data });
        }
        if shape.q == 0 {
            let data = self.data.iter().zip(&other.data).map(|(u, v)| u * v).collect();
            return Ok(Self { spaces, shape, data });
        }
        let nx = self.horizontal_count();
        let nw1 = self.vertical_count();
        let nw2 = other.vertical_count();
        let nw = nw1 * nw2;
        let mut data = vec![0.0; nx * nx * nw * nw];
        for x in 0..nx {
            for y in 0..nx {
                for w1 in 0..nw1 {
                    for w2 in 0..nw2 {
                        for z1 in 0..nw1 {
                            for z2 in 0..nw2 {
                                let mut acc = 0.0;
                                for u in 0..nx {
                                    acc += self.entry(x, u, w1, z1) * other.entry(u, y, w2, z2);
                                }
                                data[((x * nx + y) * nw + (w1 * nw2 + w2)) * nw + (z1 * nw2 + z2)] = acc;
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { spaces, shape, data })
    }

    /// Full contraction `Σ_c g(c)·z(c)` of a boundary weight against a tensor of
    /// the same shape.
    pub fn pair_boundary(&self, z: &Self) -> Result<f64> {
        self.ensure_same_shape(z)?;
        Ok(self.data.iter().zip(&z.data).map(|(a, b)| a * b).sum())
    }

    /// Apply one dihedral generator.
    pub fn dihedral(&self, op: Dihedral) -> Result<Self> {
        let Shape { p, q } = self.shape;
        let limits = Limits { max_entries: usize::MAX, max_edges: 0 };
        match op {
            Dihedral::FlipH => Self::from_fn(self.spaces, self.shape, &limits, |b| {
                self.get(&Boundary { x: reversed(&b.x), y: reversed(&b.y), w: b.z.clone(), z: b.w.clone() })
            }),
            Dihedral::FlipV => Self::from_fn(self.spaces, self.shape, &limits, |b| {
                self.get(&Boundary { x: b.y.clone(), y: b.x.clone(), w: reversed(&b.w), z: reversed(&b.z) })
            }),
            Dihedral::TransposeDiag => {
                if self.spaces.s1 != self.spaces.s2 {
                    return Err(Error::TransposeNeedsEqualSpaces);
                }
                Self::from_fn(self.spaces, Shape::new(q, p), &limits, |b| {
                    self.get(&Boundary { x: b.w.clone(), y: b.z.clone(), w: b.x.clone(), z: b.y.clone() })
                })
            }
        }
    }
}

/// Order in which [`surface_power_with_order`] performs the cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutOrder {
    /// Build each row with `m_we`, then stack rows with `m_sn`.
    RowsFirst,
    /// Build each column with `m_sn`, then glue columns with `m_we`.
    ColumnsFirst,
}

/// Surface power `W^{[p,q]}`: `p×q` copies of a `(1,1)` tensor glued together.
pub fn surface_power(w: &GuillotineTensor, p: usize, q: usize, limits: &Limits) -> Result<GuillotineTensor> {
    surface_power_with_order(w, p, q, limits, CutOrder::RowsFirst)
}

pub fn surface_power_with_order(
    w: &GuillotineTensor,
    p: usize,
    q: usize,
    limits: &Limits,
    order: CutOrder,
) -> Result<GuillotineTensor> {
    if w.shape != Shape::new(1, 1) {
        return Err(Error::InvalidShape { p: w.shape.p, q: w.shape.q, reason: "surface powers start from a (1,1) tensor" });
    }
    if p == 0 || q == 0 {
        return Err(Error::InvalidShape { p, q, reason: "surface powers need p >= 1 and q >= 1" });
    }
    limits.check_entries(GuillotineTensor::len_for(w.spaces, Shape::new(p, q)))?;
    let repeat = |unit: &GuillotineTensor, n: usize, glue: fn(&GuillotineTensor, &GuillotineTensor) -> Result<GuillotineTensor>| {
        let mut acc = unit.clone();
        for _ in 1..n {
            acc = glue(&acc, unit)?;
        }
        Ok::<_, Error>(acc)
    };
    match order {
        CutOrder::RowsFirst => {
            let row = repeat(w, p, GuillotineTensor::m_we)?;
            repeat(&row, q, GuillotineTensor::m_sn)
        }
        CutOrder::ColumnsFirst => {
            let col = repeat(w, q, GuillotineTensor::m_sn)?;
            repeat(&col, p, GuillotineTensor::m_we)
        }
    }
}
