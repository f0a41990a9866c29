//! Rectangular operator product environments (ROPEs) and their representations.
//!
//! A [`RopeRep`] evaluates a boundary weight by reading the boundary
//! counter-clockwise from the South-West corner:
//!
//! ```text
//! g(x,y,w,z) = Tr[ U_WS · A_S(x₁)…A_S(x_p) · U_SE · A_E(z₁)…A_E(z_q)
//!                · U_EN · A_N(y_p)…A_N(y₁) · U_NW · A_W(w_q)…A_W(w₁) ]
//! ```
//!
//! Corner matrices therefore have shapes `U_WS: d_W×d_S`, `U_SE: d_S×d_E`,
//! `U_EN: d_E×d_N` and `U_NW: d_N×d_W`. Degenerate shapes drop the empty sides.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{partition_tensor, FaceWeight, Offsets};
use crate::linalg::Matrix;
use crate::math::ipow;
use crate::tensor::{decode, Boundary, GuillotineTensor, Limits, Shape, StateSpaces};

/// Side of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    S,
    N,
    W,
    E,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::S, Side::N, Side::W, Side::E];

    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::S | Side::N)
    }

    pub fn letter(self) -> char {
        match self {
            Side::S => 'S',
            Side::N => 'N',
            Side::W => 'W',
            Side::E => 'E',
        }
    }
}

/// Corner of a rectangle, named by its two sides in counter-clockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    WS,
    SE,
    EN,
    NW,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::WS, Corner::SE, Corner::EN, Corner::NW];

    /// `(incoming, outgoing)` sides in counter-clockwise reading order.
    pub fn sides(self) -> (Side, Side) {
        match self {
            Corner::WS => (Side::W, Side::S),
            Corner::SE => (Side::S, Side::E),
            Corner::EN => (Side::E, Side::N),
            Corner::NW => (Side::N, Side::W),
        }
    }

    /// Compass name (`SW`, `SE`, `NE`, `NW`).
    pub fn compass(self) -> &'static str {
        match self {
            Corner::WS => "SW",
            Corner::SE => "SE",
            Corner::EN => "NE",
            Corner::NW => "NW",
        }
    }
}

/// Dimensions of the four side spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rope {
    pub d_s: usize,
    pub d_n: usize,
    pub d_w: usize,
    pub d_e: usize,
}

impl Rope {
    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::S => self.d_s,
            Side::N => self.d_n,
            Side::W => self.d_w,
            Side::E => self.d_e,
        }
    }
}

/// Raw ingredients of a [`RopeRep`], validated by [`RopeRep::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct RopeParts {
    pub a_s: Vec<Matrix>,
    pub a_n: Vec<Matrix>,
    pub a_w: Vec<Matrix>,
    pub a_e: Vec<Matrix>,
    pub u_ws: Matrix,
    pub u_se: Matrix,
    pub u_en: Matrix,
    pub u_nw: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RopeRep {
    spaces: StateSpaces,
    rope: Rope,
    parts: RopeParts,
}

fn dim_err(msg: alloc::string::String) -> Error {
    Error::DimensionMismatch(msg)
}

impl RopeRep {
    pub fn new(spaces: StateSpaces, parts: RopeParts) -> Result<Self> {
        let side_dim = |name: char, ops: &[Matrix], count: usize| -> Result<usize> {
            if ops.len() != count {
                return Err(dim_err(alloc::format!("A_{name} has {} operators, expected {count}", ops.len())));
            }
            let d = ops[0].rows();
            if d == 0 || ops.iter().any(|m| m.rows() != d || m.cols() != d) {
                return Err(dim_err(alloc::format!("A_{name} operators must be square of a common size >= 1")));
            }
            if ops.iter().any(|m| m.as_slice().iter().any(|v| !v.is_finite())) {
                return Err(Error::InvalidArgument(alloc::format!("A_{name} has non-finite entries")));
            }
            Ok(d)
        };
        let rope = Rope {
            d_s: side_dim('S', &parts.a_s, spaces.s1())?,
            d_n: side_dim('N', &parts.a_n, spaces.s1())?,
            d_w: side_dim('W', &parts.a_w, spaces.s2())?,
            d_e: side_dim('E', &parts.a_e, spaces.s2())?,
        };
        for (name, m, r, c) in [
            ("U_WS", &parts.u_ws, rope.d_w, rope.d_s),
            ("U_SE", &parts.u_se, rope.d_s, rope.d_e),
            ("U_EN", &parts.u_en, rope.d_e, rope.d_n),
            ("U_NW", &parts.u_nw, rope.d_n, rope.d_w),
        ] {
            if m.rows() != r || m.cols() != c {
                return Err(dim_err(alloc::format!("{name} is {}x{}, expected {r}x{c}", m.rows(), m.cols())));
            }
        }
        Ok(Self { spaces, rope, parts })
    }

    pub fn spaces(&self) -> StateSpaces {
        self.spaces
    }

    pub fn rope(&self) -> Rope {
        self.rope
    }

    pub fn parts(&self) -> &RopeParts {
        &self.parts
    }

    pub fn into_parts(self) -> RopeParts {
        self.parts
    }

    /// Operator family of a side.
    pub fn side(&self, side: Side) -> &[Matrix] {
        match side {
            Side::S => &self.parts.a_s,
            Side::N => &self.parts.a_n,
            Side::W => &self.parts.a_w,
            Side::E => &self.parts.a_e,
        }
    }

    pub fn corner(&self, corner: Corner) -> &Matrix {
        match corner {
            Corner::WS => &self.parts.u_ws,
            Corner::SE => &self.parts.u_se,
            Corner::EN => &self.parts.u_en,
            Corner::NW => &self.parts.u_nw,
        }
    }

    fn check_boundary(&self, b: &Boundary) -> Result<()> {
        let ok = |seq: &[usize], s: usize| seq.iter().all(|&v| v < s);
        if b.x.len() != b.y.len() || b.w.len() != b.z.len() {
            return Err(Error::ShapeMismatch("opposite sides of a boundary must have equal lengths".into()));
        }
        if !ok(&b.x, self.spaces.s1()) || !ok(&b.y, self.spaces.s1()) || !ok(&b.w, self.spaces.s2()) || !ok(&b.z, self.spaces.s2())
        {
            return Err(Error::InvalidArgument("boundary state out of range".into()));
        }
        Ok(())
    }

    /// Boundary weight of one configuration.
    pub fn eval(&self, b: &Boundary) -> Result<f64> {
        self.check_boundary(b)?;
        Ok(self.eval_unchecked(b))
    }

    fn eval_unchecked(&self, b: &Boundary) -> f64 {
        let p = &self.parts;
        let mut m = p.u_ws.clone();
        for &x in &b.x {
            m = m.mul(&p.a_s[x]);
        }
        m = m.mul(&p.u_se);
        for &z in &b.z {
            m = m.mul(&p.a_e[z]);
        }
        m = m.mul(&p.u_en);
        for &y in b.y.iter().rev() {
            m = m.mul(&p.a_n[y]);
        }
        m = m.mul(&p.u_nw);
        for &w in b.w.iter().rev() {
            m = m.mul(&p.a_w[w]);
        }
        m.trace()
    }

    /// Tabulate the boundary weight on every configuration of a shape.
    pub fn eval_tensor(&self, p: usize, q: usize, limits: &Limits) -> Result<GuillotineTensor> {
        GuillotineTensor::from_fn(self.spaces, Shape::new(p, q), limits, |b| self.eval_unchecked(b))
    }

    /// One-dimensional representation `A_a(s) = [u_a(s)]` with unit corners.
    pub fn from_factorized(spaces: StateSpaces, u_s: &[f64], u_n: &[f64], u_w: &[f64], u_e: &[f64]) -> Result<Self> {
        for (name, u) in [('S', u_s), ('N', u_n), ('W', u_w), ('E', u_e)] {
            if u.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::NegativeWeight);
            }
            if u.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidArgument(alloc::format!("u_{name} is identically zero")));
            }
        }
        let ops = |u: &[f64]| u.iter().map(|&v| Matrix::scalar(v)).collect();
        Self::new(
            spaces,
            RopeParts {
                a_s: ops(u_s),
                a_n: ops(u_n),
                a_w: ops(u_w),
                a_e: ops(u_e),
                u_ws: Matrix::scalar(1.0),
                u_se: Matrix::scalar(1.0),
                u_en: Matrix::scalar(1.0),
                u_nw: Matrix::scalar(1.0),
            },
        )
    }

    /// Boundary weight of a hidden Markov chain running around the boundary.
    ///
    /// Hidden states live on boundary vertices; each edge carries a transition
    /// weight `T_a(α,β)` and an emission law `ν_a(·|α,β)` from its start vertex
    /// `α` to its end vertex `β`, South and North edges running left to right,
    /// West and East edges bottom to top.
    pub fn from_hidden_markov(spaces: StateSpaces, hidden: usize, sides: [HiddenSide; 4]) -> Result<Self> {
        let [s, n, w, e] = sides;
        let build = |side: HiddenSide, letter: char, states: usize, transpose: bool| -> Result<Vec<Matrix>> {
            side.check(hidden, states, letter)?;
            Ok((0..states)
                .map(|x| {
                    Matrix::from_fn(hidden, hidden, |a, b| {
                        let (from, to) = if transpose { (b, a) } else { (a, b) };
                        side.t[(from, to)] * side.nu[(from * hidden + to) * states + x]
                    })
                })
                .collect())
        };
        Self::new(
            spaces,
            RopeParts {
                a_s: build(s, 'S', spaces.s1(), false)?,
                a_n: build(n, 'N', spaces.s1(), true)?,
                a_w: build(w, 'W', spaces.s2(), true)?,
                a_e: build(e, 'E', spaces.s2(), false)?,
                u_ws: Matrix::identity(hidden),
                u_se: Matrix::identity(hidden),
                u_en: Matrix::identity(hidden),
                u_nw: Matrix::identity(hidden),
            },
        )
    }

    /// Representation of the pointwise product of boundary weights.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        self.spaces.ensure_same(&other.spaces)?;
        let kron = |a: &[Matrix], b: &[Matrix]| a.iter().zip(b).map(|(x, y)| x.kron(y)).collect();
        let (p, o) = (&self.parts, &other.parts);
        Self::new(
            self.spaces,
            RopeParts {
                a_s: kron(&p.a_s, &o.a_s),
                a_n: kron(&p.a_n, &o.a_n),
                a_w: kron(&p.a_w, &o.a_w),
                a_e: kron(&p.a_e, &o.a_e),
                u_ws: p.u_ws.kron(&o.u_ws),
                u_se: p.u_se.kron(&o.u_se),
                u_en: p.u_en.kron(&o.u_en),
                u_nw: p.u_nw.kron(&o.u_nw),
            },
        )
    }

    /// Representation of the sum of boundary weights (block-diagonal).
    pub fn direct_sum(reps: &[Self]) -> Result<Self> {
        let first = reps.first().ok_or_else(|| Error::InvalidArgument("direct sum of no representations".into()))?;
        for r in reps {
            first.spaces.ensure_same(&r.spaces)?;
        }
        let ops = |side: Side, count: usize| -> Vec<Matrix> {
            (0..count)
                .map(|x| {
                    let blocks: Vec<&Matrix> = reps.iter().map(|r| &r.side(side)[x]).collect();
                    Matrix::block_diag(&blocks)
                })
                .collect()
        };
        let corner = |c: Corner| {
            let blocks: Vec<&Matrix> = reps.iter().map(|r| r.corner(c)).collect();
            Matrix::block_diag(&blocks)
        };
        let (s1, s2) = (first.spaces.s1(), first.spaces.s2());
        Self::new(
            first.spaces,
            RopeParts {
                a_s: ops(Side::S, s1),
                a_n: ops(Side::N, s1),
                a_w: ops(Side::W, s2),
                a_e: ops(Side::E, s2),
                u_ws: corner(Corner::WS),
                u_se: corner(Corner::SE),
                u_en: corner(Corner::EN),
                u_nw: corner(Corner::NW),
            },
        )
    }

    /// Representation of the boundary weights induced on inner rectangles.
    ///
    /// Evaluating the result on a `p×q` configuration equals the marginal
    /// boundary weight obtained from `self` on the `(p+n1+n2)×(q+m1+m2)`
    /// rectangle by summing out the annulus. Side spaces grow to
    /// `d'_S = s2^{m1}·d_S`, `d'_N = s2^{m2}·d_N`, `d'_W = s1^{n1}·d_W` and
    /// `d'_E = s1^{n2}·d_E`, the strip index being the most significant.
    pub fn restrict(&self, w: &FaceWeight, offsets: Offsets, limits: &Limits) -> Result<Self> {
        self.spaces.ensure_same(&w.spaces())?;
        if offsets.is_zero() {
            return Ok(self.clone());
        }
        let Offsets { n1, n2, m1, m2 } = offsets;
        let (s1, s2) = (self.spaces.s1(), self.spaces.s2());
        let Rope { d_s, d_n, d_w, d_e } = self.rope;
        let dims = [ipow(s2, m1) * d_s, ipow(s2, m2) * d_n, ipow(s1, n1) * d_w, ipow(s1, n2) * d_e];
        for d in dims {
            limits.check_entries((d as u128) * (d as u128) * (s1.max(s2) as u128))?;
        }
        let block = |p: usize, q: usize| -> Result<GuillotineTensor> {
            if p == 0 || q == 0 {
                GuillotineTensor::unit(self.spaces, Shape::new(p, q))
            } else {
                partition_tensor(w, p, q, limits)
            }
        };
        let p = &self.parts;

        let b_s = strip_operators(&block(1, m1)?, Side::S, &p.a_s);
        let b_n = strip_operators(&block(1, m2)?, Side::N, &p.a_n);
        let b_e = strip_operators(&block(n2, 1)?, Side::E, &p.a_e);
        let b_w = strip_operators(&block(n1, 1)?, Side::W, &p.a_w);

        let prod = |ops: &[Matrix], seq: &[usize], d: usize| Matrix::product(d, seq.iter().map(|&s| &ops[s]));
        let prod_rev = |ops: &[Matrix], seq: &[usize], d: usize| Matrix::product(d, seq.iter().rev().map(|&s| &ops[s]));

        // corner blocks: Z(x, y, w, z) of the corner rectangle against the old corner path
        #[allow(clippy::type_complexity)]
        let corner = |z: &GuillotineTensor,
                      rows: usize,
                      cols: usize,
                      (dr, dc): (usize, usize),
                      path: &dyn Fn(&[usize], &[usize], &[usize], &[usize]) -> Matrix,
                      index: &dyn Fn(usize, usize, usize, usize) -> (usize, usize)|
         -> Matrix {
            let (bp, bq) = (z.shape().p, z.shape().q);
            let (nx, nw) = (ipow(s1, bp), ipow(s2, bq));
            let mut out = Matrix::zeros(rows * dr, cols * dc);
            for x in 0..nx {
                for y in 0..nx {
                    for wv in 0..nw {
                        for zv in 0..nw {
                            let coef = z.entry(x, y, wv, zv);
                            if coef == 0.0 {
                                continue;
                            }
                            let m = path(&decode(x, bp, s1), &decode(y, bp, s1), &decode(wv, bq, s2), &decode(zv, bq, s2));
                            let (r, c) = index(x, y, wv, zv);
                            for i in 0..dr {
                                for j in 0..dc {
                                    out[(r * dr + i, c * dc + j)] += coef * m[(i, j)];
                                }
                            }
                        }
                    }
                }
            }
            out
        };
        let v_ws = corner(
            &block(n1, m1)?,
            ipow(s1, n1),
            ipow(s2, m1),
            (d_w, d_s),
            &|x, _, wv, _| prod_rev(&p.a_w, wv, d_w).mul(&p.u_ws).mul(&prod(&p.a_s, x, d_s)),
            &|_, t, _, e| (t, e),
        );
        let v_se = corner(
            &block(n2, m1)?,
            ipow(s2, m1),
            ipow(s1, n2),
            (d_s, d_e),
            &|x, _, _, z| prod(&p.a_s, x, d_s).mul(&p.u_se).mul(&prod(&p.a_e, z, d_e)),
            &|_, t, wv, _| (wv, t),
        );
        let v_en = corner(
            &block(n2, m2)?,
            ipow(s1, n2),
            ipow(s2, m2),
            (d_e, d_n),
            &|_, y, _, z| prod(&p.a_e, z, d_e).mul(&p.u_en).mul(&prod_rev(&p.a_n, y, d_n)),
            &|b, _, wv, _| (b, wv),
        );
        let v_nw = corner(
            &block(n1, m2)?,
            ipow(s2, m2),
            ipow(s1, n1),
            (d_n, d_w),
            &|_, y, wv, _| prod_rev(&p.a_n, y, d_n).mul(&p.u_nw).mul(&prod_rev(&p.a_w, wv, d_w)),
            &|b, _, _, e| (e, b),
        );
        Self::new(
            self.spaces,
            RopeParts { a_s: b_s, a_n: b_n, a_w: b_w, a_e: b_e, u_ws: v_ws, u_se: v_se, u_en: v_en, u_nw: v_nw },
        )
    }
}

/// Operators obtained by stacking one column (S, N) or row (W, E) of a strip
/// tensor `z` onto the side operators `ops`.
///
/// For the South side `B(x')[(w,α),(z,β)] = Σ_x z(x, x', w, z)·A(x)[α,β]`; the
/// other sides follow the counter-clockwise reading order, so the transverse
/// multi-index is the one met first when walking along the boundary.
pub fn strip_operators(z: &GuillotineTensor, side: Side, ops: &[Matrix]) -> Vec<Matrix> {
    let d = ops[0].rows();
    let n = if side.is_horizontal() { z.vertical_count() } else { z.horizontal_count() };
    let states = ops.len();
    let coef = |inner: usize, outer: usize, r: usize, c: usize| match side {
        Side::S => z.entry(inner, outer, r, c),
        Side::N => z.entry(outer, inner, c, r),
        Side::E => z.entry(r, c, outer, inner),
        Side::W => z.entry(c, r, inner, outer),
    };
    (0..states)
        .map(|outer| {
            let mut out = Matrix::zeros(n * d, n * d);
            for r in 0..n {
                for c in 0..n {
                    for (inner, a) in ops.iter().enumerate() {
                        let k = coef(inner, outer, r, c);
                        if k == 0.0 {
                            continue;
                        }
                        for i in 0..d {
                            for j in 0..d {
                                out[(r * d + i, c * d + j)] += k * a[(i, j)];
                            }
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// Transition weights and emission laws of one side of a hidden boundary chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenSide {
    /// `m×m` non-negative transition weights.
    pub t: Matrix,
    /// `ν(x|α,β)` stored at `(α·m + β)·|S| + x`.
    pub nu: Vec<f64>,
}

impl HiddenSide {
    fn check(&self, hidden: usize, states: usize, side: char) -> Result<()> {
        if self.t.rows() != hidden || self.t.cols() != hidden || self.nu.len() != hidden * hidden * states {
            return Err(dim_err(alloc::format!("hidden side {side} has inconsistent sizes")));
        }
        if !self.t.is_nonnegative() || self.nu.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::NegativeWeight);
        }
        for chunk in self.nu.chunks(states) {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::NonStochastic { side, sum });
            }
        }
        Ok(())
    }
}

impl Side {
    /// Number of edge states along this side.
    pub fn states(self, spaces: StateSpaces) -> usize {
        if self.is_horizontal() {
            spaces.s1()
        } else {
            spaces.s2()
        }
    }
}

/// All-ones matrix family used by tests and builders.
pub fn constant_ops(count: usize, d: usize, v: f64) -> Vec<Matrix> {
    vec![Matrix::from_fn(d, d, |_, _| v); count]
}
