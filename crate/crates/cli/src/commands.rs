//! Subcommand bodies. Each writes a two-column table and reports whether
//! the quantitative check passed.

use std::io::Write;

use anyhow::{anyhow, ensure, Result};
use guillotine::eigen::{verify_all, verify_fullplane_eigen};
use guillotine::gibbs::{check_consistency, correlation_kernel, correlation_length, marginal_segment_law, BoundaryFamily, CorrelationLength};
use guillotine::lattice::{edge_marginal, partition_tensor, partition_tensor_bruteforce, RectGeometry};
use guillotine::math::{max_rel_diff, rel_diff};
use guillotine::rope::Side;
use guillotine::tensor::decode;
use guillotine::{Limits, Offsets, Shape};

use crate::model::ModelFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

/// Fixed 17-significant-digit formatting.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Table<'a> {
    out: &'a mut dyn Write,
}

impl Table<'_> {
    fn row(&mut self, key: &str, value: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{key:<24} {}", value.as_ref())?;
        Ok(())
    }

    fn num(&mut self, key: &str, x: f64) -> Result<()> {
        self.row(key, num(x))
    }
}

fn family(model: &ModelFile) -> Result<(BoundaryFamily, &'static str)> {
    Ok(match model.rope_rep()? {
        Some(rep) => (BoundaryFamily::Rope(rep), "rope"),
        None => (BoundaryFamily::Uniform(model.spaces()?), "uniform"),
    })
}

fn shape_or_sizes(model: &ModelFile, p: Option<usize>, q: Option<usize>) -> Result<Shape> {
    let sizes = model.sizes();
    let p = p.or(sizes.map(|s| s.p)).ok_or_else(|| anyhow!("missing --p (and no `sizes` in the model)"))?;
    let q = q.or(sizes.map(|s| s.q)).ok_or_else(|| anyhow!("missing --q (and no `sizes` in the model)"))?;
    Ok(Shape::new(p, q))
}

/// `Z^bw(p,q) = ⟨g_{p,q}, Z_{p,q}⟩`, optionally against brute-force enumeration.
pub fn partition(
    model: &ModelFile,
    p: Option<usize>,
    q: Option<usize>,
    bruteforce: bool,
    tol: f64,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<Status> {
    let w = model.face_weight()?;
    let shape = shape_or_sizes(model, p, q)?;
    let (fam, kind) = family(model)?;
    let g = fam.weight(shape.p, shape.q, limits)?;
    let z = g.pair_boundary(&partition_tensor(&w, shape.p, shape.q, limits)?)?;
    let mut t = Table { out };
    t.row("shape", format!("{}x{}", shape.p, shape.q))?;
    t.row("boundary", kind)?;
    t.num("Z_bw", z)?;
    let mut ok = true;
    if let Ok(es) = model.eigen_structure() {
        let cf = es.closed_form(shape.p, shape.q);
        t.num("closed_form", cf)?;
        t.num("closed_form_rel_dev", rel_diff(z, cf))?;
    }
    if bruteforce {
        let zb = g.pair_boundary(&partition_tensor_bruteforce(&w, shape.p, shape.q, limits)?)?;
        let dev = rel_diff(z, zb);
        ok = dev <= tol;
        t.num("Z_bw_bruteforce", zb)?;
        t.num("rel_deviation", dev)?;
        t.row("result", Status::from_ok(ok).label())?;
    }
    Ok(Status::from_ok(ok))
}

pub fn check(
    model: &ModelFile,
    p: Option<usize>,
    q: Option<usize>,
    offsets: Option<Offsets>,
    tol: f64,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<Status> {
    let w = model.face_weight()?;
    let outer = shape_or_sizes(model, p, q)?;
    let offsets = offsets.or(model.offsets()).ok_or_else(|| anyhow!("missing --offsets (and no `offsets` in the model)"))?;
    let inner = offsets.inner(outer)?;
    let (fam, kind) = family(model)?;
    let tv = check_consistency(&w, &fam, outer, offsets, limits)?;
    let status = Status::from_ok(tv <= tol);
    let mut t = Table { out };
    t.row("outer", format!("{}x{}", outer.p, outer.q))?;
    t.row("inner", format!("{}x{}", inner.p, inner.q))?;
    t.row("offsets", format!("{},{},{},{}", offsets.n1, offsets.n2, offsets.m1, offsets.m2))?;
    t.row("boundary", kind)?;
    t.num("tv_distance", tv)?;
    t.num("tolerance", tol)?;
    t.row("result", status.label())?;
    Ok(status)
}

pub fn eigen_verify(
    model: &ModelFile,
    p_max: usize,
    q_max: usize,
    tol: f64,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<Status> {
    let w = model.face_weight()?;
    let es = model.eigen_structure()?;
    let report = verify_all(&es, &w, p_max)?;
    let full = verify_fullplane_eigen(&es, &w, p_max, q_max, limits)?;
    let mut t = Table { out };
    t.num("lambda", es.lambda)?;
    for side in Side::ALL {
        t.num(&format!("sigma_{}", side.letter()), es.sigma(side))?;
    }
    t.num("kappa", es.kappa)?;
    for (side, r) in &report.halfstrip {
        t.num(&format!("halfstrip_{}", side.letter()), r.max())?;
    }
    for (corner, r) in &report.corners {
        t.num(&format!("corner_{}", corner.compass()), *r)?;
    }
    t.row("fullplane_grid", format!("p<={p_max} q<={q_max}"))?;
    t.num("fullplane_deviation", full)?;
    t.num("tolerance", tol)?;
    let status = Status::from_ok(report.max() <= tol && full <= tol);
    t.row("result", status.label())?;
    Ok(status)
}

/// Correlations of `len` consecutive horizontal edges on a line. The
/// brute-force check enumerates the middle row of a `len×2` rectangle.
#[allow(clippy::too_many_arguments)]
pub fn correlate(
    model: &ModelFile,
    len: usize,
    u: usize,
    v: usize,
    bruteforce: bool,
    tol: f64,
    limits: &Limits,
    out: &mut dyn Write,
) -> Result<Status> {
    let es = model.eigen_structure()?;
    let s1 = model.s1;
    ensure!(len >= 1, "segment length must be at least 1");
    ensure!(u < s1 && v < s1, "edge states must be below s1 = {s1}");
    let k = correlation_kernel(&es);
    let mut t = Table { out };
    t.row("length", len.to_string())?;
    t.num("one_point_u", k.one_point(u))?;
    let mut two = None;
    if len >= 2 {
        let tp = k.two_point(u, v, len)?;
        t.num("one_point_v", k.one_point(v))?;
        t.num("two_point", tp)?;
        t.num("product_one_points", k.one_point(u) * k.one_point(v))?;
        two = Some(tp);
    }
    let (l1, l2, xi) = correlation_length(&k)?;
    t.num("c_sn_lambda1", l1)?;
    t.num("c_sn_lambda2", l2)?;
    t.row(
        "correlation_length",
        match xi {
            CorrelationLength::Finite(x) => num(x),
            CorrelationLength::Infinite => "inf".into(),
            CorrelationLength::Degenerate => "n/a (one-dimensional C_SN)".into(),
        },
    )?;
    if !bruteforce {
        return Ok(Status::Pass);
    }
    let w = model.face_weight()?;
    let geom = RectGeometry::new(Shape::new(len, 2));
    let row: Vec<usize> = (0..len).map(|i| geom.h(1, i)).collect();
    let g = es.rep.eval_tensor(len, 2, limits)?;
    let brute = edge_marginal(&w, &g, &row, limits)?;
    let law = marginal_segment_law(&k, s1, len, limits)?;
    let mut dev = max_rel_diff(&law, &brute);
    let pick = |pred: &dyn Fn(&[usize]) -> bool| -> f64 {
        brute.iter().enumerate().filter(|(c, _)| pred(&decode(*c, len, s1))).map(|(_, p)| p).sum()
    };
    let one_b = pick(&|x| x[0] == u);
    t.num("bruteforce_one_point_u", one_b)?;
    dev = dev.max(rel_diff(k.one_point(u), one_b));
    if let Some(tp) = two {
        let two_b = pick(&|x| x[0] == u && x[len - 1] == v);
        t.num("bruteforce_two_point", two_b)?;
        dev = dev.max(rel_diff(tp, two_b));
    }
    t.num("bruteforce_rel_deviation", dev)?;
    let status = Status::from_ok(dev <= tol);
    t.row("result", status.label())?;
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{build, Builtin};

    fn run(f: impl FnOnce(&mut Vec<u8>) -> Result<Status>) -> (Status, String) {
        let mut buf = Vec::new();
        let s = f(&mut buf).unwrap();
        (s, String::from_utf8(buf).unwrap())
    }

    fn value(text: &str, key: &str) -> f64 {
        let line = text.lines().find(|l| l.split_whitespace().next() == Some(key)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    }

    #[test]
    fn hv_ones_partition_is_256() {
        let m = build(Builtin::Hv, "ones2", "ones2", 0).unwrap();
        let (s, text) = run(|o| partition(&m, Some(2), Some(2), true, 1e-8, &Limits::default(), o));
        assert_eq!(s, Status::Pass);
        assert!((value(&text, "Z_bw") - 256.0).abs() < 1e-9);
        assert!(value(&text, "rel_deviation") <= 1e-8);
    }

    #[test]
    fn single_face_uniform_is_weight_sum() {
        let mut m = build(Builtin::Hv, "1,2;3,4", "ones2", 0).unwrap();
        m.rope = None;
        let (_, text) = run(|o| partition(&m, Some(1), Some(1), false, 1e-8, &Limits::default(), o));
        assert_eq!(value(&text, "Z_bw"), m.weight.iter().sum::<f64>());
    }

    #[test]
    fn correlate_length_one_has_no_two_point() {
        let m = build(Builtin::Hv, "ones2", "random2", 3).unwrap();
        let (_, text) = run(|o| correlate(&m, 1, 0, 0, true, 1e-8, &Limits::default(), o));
        assert!(!text.contains("two_point"));
        assert!(value(&text, "bruteforce_rel_deviation") <= 1e-8);
    }
}
