//! Boundary families, Kolmogorov consistency, free energies and correlations
//! along horizontal lines.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::{pf_eigen, second_eigenvalue, EigenStructure};
use crate::error::{Error, Result};
use crate::lattice::{edge_marginal, exact_law, partition_tensor, FaceWeight, Offsets, RectGeometry};
use crate::linalg::{dot, Matrix};
use crate::math::{self, ipow, powi, tv_distance};
use crate::rope::RopeRep;
use crate::tensor::{decode, GuillotineTensor, Limits, Shape, StateSpaces};

/// A rule producing a boundary weight for every rectangle.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryFamily {
    Eigen(EigenStructure),
    Rope(RopeRep),
    /// `g ≡ 1` (free boundary).
    Uniform(StateSpaces),
}

impl BoundaryFamily {
    pub fn weight(&self, p: usize, q: usize, limits: &Limits) -> Result<GuillotineTensor> {
        match self {
            BoundaryFamily::Eigen(es) => es.rep.eval_tensor(p, q, limits),
            BoundaryFamily::Rope(rep) => rep.eval_tensor(p, q, limits),
            BoundaryFamily::Uniform(spaces) => GuillotineTensor::from_fn(*spaces, Shape::new(p, q), limits, |_| 1.0),
        }
    }
}

/// Total-variation distance between the inner-edge marginal of the outer law
/// and the law built directly on the inner rectangle.
pub fn check_consistency(w: &FaceWeight, fam: &BoundaryFamily, outer: Shape, offsets: Offsets, limits: &Limits) -> Result<f64> {
    let inner = offsets.inner(outer)?;
    let geom = RectGeometry::new(outer);
    let g_out = fam.weight(outer.p, outer.q, limits)?;
    let marg = edge_marginal(w, &g_out, &geom.inner_edges(offsets)?, limits)?;
    let g_in = fam.weight(inner.p, inner.q, limits)?;
    let law = exact_law(w, &g_in, limits)?;
    Ok(tv_distance(&marg, law.probabilities()))
}

/// `Z = κ·σ_S^p σ_N^p σ_W^q σ_E^q·λ^{pq}`.
pub fn partition_closed_form(es: &EigenStructure, p: usize, q: usize) -> f64 {
    es.closed_form(p, q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergy {
    pub p: usize,
    pub q: usize,
    /// `(1/pq)·log Z^bw`.
    pub density: f64,
    /// Density after removing side and corner contributions (eigen families only).
    pub bulk: Option<f64>,
}

pub fn free_energy(w: &FaceWeight, fam: &BoundaryFamily, sizes: &[(usize, usize)], limits: &Limits) -> Result<Vec<FreeEnergy>> {
    sizes
        .iter()
        .map(|&(p, q)| {
            let z = fam.weight(p, q, limits)?.pair_boundary(&partition_tensor(w, p, q, limits)?)?;
            if !(z > 0.0) {
                return Err(Error::ZeroPartition);
            }
            let area = (p * q) as f64;
            let bulk = match fam {
                BoundaryFamily::Eigen(es) => {
                    let [s, n, we, e] = es.sigma;
                    Some((math::ln(z) - p as f64 * math::ln(s * n) - q as f64 * math::ln(we * e) - math::ln(es.kappa)) / area)
                }
                _ => None,
            };
            Ok(FreeEnergy { p, q, density: math::ln(z) / area, bulk })
        })
        .collect()
}

/// Matrix-product description of horizontal segment marginals.
///
/// `A_SN(x) = A_S(x) ⊗ A_N(x)ᵀ`, `u_W[(i,l)] = (U_NW·U_WS)[l,i]` and
/// `u_E[(j,k)] = (U_SE·U_EN)[j,k]`, so that the weight of a segment reads
/// `⟨u_W, A_SN(x₁)…A_SN(x_L)·u_E⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationKernel {
    pub u_w: Vec<f64>,
    pub u_e: Vec<f64>,
    pub a_sn: Vec<Matrix>,
    pub c_sn: Matrix,
    /// `κ·σ_S·σ_N` per unit length is applied through these.
    pub kappa: f64,
    pub sigma_sn: f64,
}

pub fn correlation_kernel(es: &EigenStructure) -> CorrelationKernel {
    let p = es.rep.parts();
    let a_sn: Vec<Matrix> = p.a_s.iter().zip(&p.a_n).map(|(s, n)| s.kron(&n.transpose())).collect();
    let d = a_sn[0].rows();
    let c_sn = a_sn.iter().fold(Matrix::zeros(d, d), |acc, m| acc.add(m));
    let west = p.u_nw.mul(&p.u_ws);
    let east = p.u_se.mul(&p.u_en);
    let (d_s, d_n) = (p.u_ws.cols(), p.u_nw.rows());
    let mut u_w = vec![0.0; d_s * d_n];
    let mut u_e = vec![0.0; d_s * d_n];
    for i in 0..d_s {
        for l in 0..d_n {
            u_w[i * d_n + l] = west[(l, i)];
            u_e[i * d_n + l] = east[(i, l)];
        }
    }
    CorrelationKernel { u_w, u_e, a_sn, c_sn, kappa: es.kappa, sigma_sn: es.sigma[0] * es.sigma[1] }
}

impl CorrelationKernel {
    fn normaliser(&self, len: usize) -> f64 {
        self.kappa * powi(self.sigma_sn, len as u32)
    }

    fn pair(&self, m: &Matrix) -> f64 {
        dot(&self.u_w, &m.matvec(&self.u_e))
    }

    fn c_power(&self, n: usize) -> Matrix {
        Matrix::product(self.c_sn.rows(), core::iter::repeat_n(&self.c_sn, n))
    }

    /// Probability of a given sequence on `x.len()` consecutive horizontal edges.
    pub fn segment_probability(&self, x: &[usize]) -> f64 {
        let d = self.c_sn.rows();
        self.pair(&Matrix::product(d, x.iter().map(|&s| &self.a_sn[s]))) / self.normaliser(x.len())
    }

    pub fn one_point(&self, u: usize) -> f64 {
        self.pair(&self.a_sn[u]) / self.normaliser(1)
    }

    /// Joint probability of `u` on the first and `v` on the last of `len` edges.
    pub fn two_point(&self, u: usize, v: usize, len: usize) -> Result<f64> {
        if len < 2 {
            return Err(Error::InvalidArgument("two-point functions need L >= 2".into()));
        }
        let m = self.a_sn[u].mul(&self.c_power(len - 2)).mul(&self.a_sn[v]);
        Ok(self.pair(&m) / self.normaliser(len))
    }

    /// Total mass `⟨u_W, C_SN^L u_E⟩ / (κ σ_S^L σ_N^L)`, equal to one for eigen families.
    pub fn total_mass(&self, len: usize) -> f64 {
        self.pair(&self.c_power(len)) / self.normaliser(len)
    }
}

/// Normalised law of `len` consecutive horizontal edges, first edge most significant.
pub fn marginal_segment_law(kernel: &CorrelationKernel, s1: usize, len: usize, limits: &Limits) -> Result<Vec<f64>> {
    limits.check_edges(len)?;
    let n = ipow(s1, len);
    limits.check_entries(n as u128)?;
    Ok((0..n).map(|code| kernel.segment_probability(&decode(code, len, s1))).collect())
}

/// Decay of correlations along a horizontal line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationLength {
    Finite(f64),
    Infinite,
    /// `C_SN` is a scalar, so there is no second eigenvalue.
    Degenerate,
}

pub fn correlation_length(kernel: &CorrelationKernel) -> Result<(f64, f64, CorrelationLength)> {
    let c = &kernel.c_sn;
    if c.rows() == 1 {
        return Ok((c[(0, 0)], 0.0, CorrelationLength::Degenerate));
    }
    let pf = pf_eigen(c)?;
    let l2 = second_eigenvalue(c, &pf);
    let len = if l2 >= pf.lambda * (1.0 - 1e-10) {
        CorrelationLength::Infinite
    } else if l2 == 0.0 {
        CorrelationLength::Finite(0.0)
    } else {
        CorrelationLength::Finite(-1.0 / math::ln(l2 / pf.lambda))
    };
    Ok((pf.lambda, l2, len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{build_hv_eigenstructure, build_oblique_eigenstructure};
    use crate::rope::RopeParts;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m2(v: [f64; 4]) -> Matrix {
        Matrix::from_vec(2, 2, v.to_vec()).unwrap()
    }

    fn rmat(r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.gen_range(0.1..2.0))
    }

    #[test]
    fn hv_family_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = build_hv_eigenstructure(&rmat(2, 2, &mut rng), &rmat(2, 2, &mut rng)).unwrap();
        let fam = BoundaryFamily::Eigen(m.es.clone());
        let tv = check_consistency(&m.weight, &fam, Shape::new(3, 2), Offsets::new(1, 0, 1, 0), &Limits::default()).unwrap();
        assert!(tv <= 1e-12, "{tv}");
    }

    #[test]
    fn uniform_family_is_not_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = StateSpaces::new(2, 2).unwrap();
        let w = FaceWeight::from_fn(s, |_, _, _, _| rng.gen_range(0.05..1.0)).unwrap();
        let tv = check_consistency(&w, &BoundaryFamily::Uniform(s), Shape::new(3, 2), Offsets::new(1, 0, 0, 0), &Limits::default()).unwrap();
        assert!(tv > 1e-4);
    }

    #[test]
    fn closed_form_matches_pairing() {
        let m = build_hv_eigenstructure(&m2([1.0; 4]), &m2([1.0; 4])).unwrap();
        assert!(math::rel_diff(partition_closed_form(&m.es, 2, 2), 256.0) <= 1e-12);
        let o = build_oblique_eigenstructure(&m2([1.0; 4]), &m2([1.0; 4])).unwrap();
        assert!(math::rel_diff(partition_closed_form(&o.es, 3, 2), 4096.0) <= 1e-12);
    }

    #[test]
    fn free_energy_of_eigen_family() {
        let m = build_hv_eigenstructure(&m2([1.0; 4]), &m2([1.0; 4])).unwrap();
        let l = Limits::default();
        let fe = free_energy(&m.weight, &BoundaryFamily::Eigen(m.es.clone()), &[(1, 1), (2, 3)], &l).unwrap();
        for f in fe {
            assert!((f.bulk.unwrap() - 4f64.ln()).abs() <= 1e-12);
        }
        let uni = free_energy(&m.weight, &BoundaryFamily::Uniform(m.weight.spaces()), &[(2, 2), (3, 3), (4, 4)], &l).unwrap();
        let dev: Vec<f64> = uni.iter().map(|f| (f.density - 4f64.ln()).abs()).collect();
        assert!(dev[0] > dev[1] && dev[1] > dev[2]);
    }

    #[test]
    fn hv_kernel_is_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = build_hv_eigenstructure(&rmat(2, 2, &mut rng), &rmat(2, 2, &mut rng)).unwrap();
        let k = correlation_kernel(&m.es);
        assert_eq!(k.c_sn.rows(), 1);
        assert!((k.c_sn[(0, 0)] - 1.0).abs() <= 1e-12);
        for x in 0..2 {
            assert!(math::rel_diff(k.one_point(x), m.alpha.v_left[x] * m.alpha.v_right[x]) <= 1e-12);
        }
        for len in 2..6 {
            let tp = k.two_point(0, 1, len).unwrap();
            assert!(math::rel_diff(tp, k.one_point(0) * k.one_point(1)) <= 1e-12);
        }
        assert_eq!(correlation_length(&k).unwrap().2, CorrelationLength::Degenerate);
        assert!(k.two_point(0, 0, 1).is_err());
    }

    #[test]
    fn segment_law_nests() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = build_oblique_eigenstructure(&rmat(2, 2, &mut rng), &rmat(2, 2, &mut rng)).unwrap();
        let k = correlation_kernel(&m.es);
        let l = Limits::default();
        let a = marginal_segment_law(&k, 2, 4, &l).unwrap();
        let b = marginal_segment_law(&k, 2, 3, &l).unwrap();
        assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let folded: Vec<f64> = a.chunks(2).map(|c| c[0] + c[1]).collect();
        assert!(tv_distance(&folded, &b) <= 1e-12);
    }

    #[test]
    fn correlation_length_of_a_matrix_kernel() {
        let s = StateSpaces::new(2, 1).unwrap();
        let ops = |a: f64, b: f64| vec![m2([a, b, b, a]), m2([b, a, a, b])];
        let rep = RopeRep::new(
            s,
            RopeParts {
                a_s: ops(0.6, 0.2),
                a_n: ops(0.5, 0.3),
                a_w: vec![Matrix::identity(2)],
                a_e: vec![Matrix::identity(2)],
                u_ws: Matrix::identity(2),
                u_se: Matrix::identity(2),
                u_en: Matrix::identity(2),
                u_nw: Matrix::identity(2),
            },
        )
        .unwrap();
        let es = EigenStructure { lambda: 1.0, sigma: [1.0; 4], kappa: 1.0, rep, halfstrip: vec![], corners: vec![] };
        let k = correlation_kernel(&es);
        assert_eq!(k.c_sn.rows(), 4);
        // circulant blocks: spectrum 2(a+b)(c+d), 2(a-b)(c-d), 0, 0
        let (l1, l2, len) = correlation_length(&k).unwrap();
        assert!((l1 - 1.28).abs() <= 1e-12);
        assert!((l2 - 0.16).abs() <= 1e-10);
        match len {
            CorrelationLength::Finite(xi) => assert!((xi - 1.0 / 8f64.ln()).abs() <= 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
