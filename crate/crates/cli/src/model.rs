//! JSON model documents: face weight plus optional ROPE representation,
//! eigen-structure morphisms, eigenvalues, offsets and sizes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use guillotine::eigen::{CornerMorphism, EigenStructure, HalfStripMorphism, LinearMap};
use guillotine::rope::{Corner, RopeParts, Side};
use guillotine::{FaceWeight, Matrix, Offsets, RopeRep, Shape, StateSpaces};
use serde::{Deserialize, Serialize};

/// One value per side, keyed `S`, `N`, `W`, `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sides<T> {
    #[serde(rename = "S")]
    pub s: T,
    #[serde(rename = "N")]
    pub n: T,
    #[serde(rename = "W")]
    pub w: T,
    #[serde(rename = "E")]
    pub e: T,
}

impl<T: Copy> Sides<T> {
    pub fn get(&self, side: Side) -> T {
        match side {
            Side::S => self.s,
            Side::N => self.n,
            Side::W => self.w,
            Side::E => self.e,
        }
    }
}

/// Matrices are written as arrays of rows.
pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RopeSection {
    pub dims: Sides<usize>,
    #[serde(rename = "A_S")]
    pub a_s: Vec<Rows>,
    #[serde(rename = "A_N")]
    pub a_n: Vec<Rows>,
    #[serde(rename = "A_W")]
    pub a_w: Vec<Rows>,
    #[serde(rename = "A_E")]
    pub a_e: Vec<Rows>,
    #[serde(rename = "U_WS")]
    pub u_ws: Rows,
    #[serde(rename = "U_SE")]
    pub u_se: Rows,
    #[serde(rename = "U_EN")]
    pub u_en: Rows,
    #[serde(rename = "U_NW")]
    pub u_nw: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerSection {
    #[serde(rename = "K")]
    pub k: Vec<Rows>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSection {
    /// Dense matrix of each half-strip map, keyed by side letter.
    #[serde(default)]
    pub halfstrip: BTreeMap<String, Rows>,
    /// Keyed `SW`, `SE`, `NE`, `NW`.
    #[serde(default)]
    pub corner: BTreeMap<String, CornerSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSection {
    pub lambda: f64,
    pub sigma: Sides<f64>,
    pub kappa: f64,
}

/// Parsed model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub s1: usize,
    pub s2: usize,
    /// Indexed `((x·s1 + y)·s2 + w)·s2 + z`.
    pub weight: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rope: Option<RopeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphisms: Option<MorphismSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<EigenSection>,
    /// `[n1, n2, m1, m2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<[usize; 4]>,
    /// `[p, q]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<[usize; 2]>,
}

fn rows_of(m: &Matrix) -> Rows {
    m.as_slice().chunks(m.cols().max(1)).map(<[f64]>::to_vec).collect()
}

fn matrix_of(rows: &Rows, shape: (usize, usize), what: &str) -> Result<Matrix> {
    ensure!(
        rows.len() == shape.0 && rows.iter().all(|r| r.len() == shape.1),
        "{what}: expected a {}x{} matrix, got {} rows of lengths {:?}",
        shape.0,
        shape.1,
        rows.len(),
        rows.iter().map(Vec::len).collect::<Vec<_>>()
    );
    Ok(Matrix::from_vec(shape.0, shape.1, rows.concat())?)
}

fn side_matrices(list: &[Rows], count: usize, d: usize, what: &str) -> Result<Vec<Matrix>> {
    ensure!(list.len() == count, "{what}: expected {count} matrices (one per edge state), got {}", list.len());
    list.iter().enumerate().map(|(k, r)| matrix_of(r, (d, d), &format!("{what}[{k}]"))).collect()
}

fn corner_shape(dims: &Sides<usize>, corner: Corner) -> (usize, usize) {
    let (a, b) = corner.sides();
    (dims.get(a), dims.get(b))
}

/// States of the edges crossed by a half-strip of `side`.
fn transverse_states(spaces: StateSpaces, side: Side) -> usize {
    if side.is_horizontal() {
        spaces.s2()
    } else {
        spaces.s1()
    }
}

impl ModelFile {
    /// Parse and validate a JSON document; parse errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text).context("malformed model document")?;
        model.validate()?;
        Ok(model)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialise") + "\n"
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.s1 * self.s1 * self.s2 * self.s2;
        ensure!(
            self.weight.len() == expected,
            "weight has {} entries, expected length {expected} (s1²·s2² with s1={}, s2={})",
            self.weight.len(),
            self.s1,
            self.s2
        );
        ensure!(self.weight.iter().all(|v| v.is_finite() && *v >= 0.0), "weight entries must be finite and non-negative");
        if let Some(m) = &self.morphisms {
            for key in m.halfstrip.keys() {
                ensure!(["S", "N", "W", "E"].contains(&key.as_str()), "unknown half-strip key `{key}` (expected S, N, W, E)");
            }
            for key in m.corner.keys() {
                ensure!(["SW", "SE", "NE", "NW"].contains(&key.as_str()), "unknown corner key `{key}` (expected SW, SE, NE, NW)");
            }
        }
        Ok(())
    }

    pub fn spaces(&self) -> Result<StateSpaces> {
        Ok(StateSpaces::new(self.s1, self.s2)?)
    }

    pub fn face_weight(&self) -> Result<FaceWeight> {
        Ok(FaceWeight::from_data(self.spaces()?, self.weight.clone())?)
    }

    pub fn offsets(&self) -> Option<Offsets> {
        self.offsets.map(|[n1, n2, m1, m2]| Offsets::new(n1, n2, m1, m2))
    }

    pub fn sizes(&self) -> Option<Shape> {
        self.sizes.map(|[p, q]| Shape::new(p, q))
    }

    pub fn rope_rep(&self) -> Result<Option<RopeRep>> {
        let Some(r) = &self.rope else { return Ok(None) };
        let spaces = self.spaces()?;
        let d = r.dims;
        let parts = RopeParts {
            a_s: side_matrices(&r.a_s, spaces.s1(), d.s, "rope.A_S")?,
            a_n: side_matrices(&r.a_n, spaces.s1(), d.n, "rope.A_N")?,
            a_w: side_matrices(&r.a_w, spaces.s2(), d.w, "rope.A_W")?,
            a_e: side_matrices(&r.a_e, spaces.s2(), d.e, "rope.A_E")?,
            u_ws: matrix_of(&r.u_ws, (d.w, d.s), "rope.U_WS")?,
            u_se: matrix_of(&r.u_se, (d.s, d.e), "rope.U_SE")?,
            u_en: matrix_of(&r.u_en, (d.e, d.n), "rope.U_EN")?,
            u_nw: matrix_of(&r.u_nw, (d.n, d.w), "rope.U_NW")?,
        };
        Ok(Some(RopeRep::new(spaces, parts).context("invalid rope section")?))
    }

    /// Full eigen-structure; errors name the first missing section.
    pub fn eigen_structure(&self) -> Result<EigenStructure> {
        let rep = self.rope_rep()?.ok_or_else(|| anyhow!("missing section `rope`"))?;
        let morph = self.morphisms.as_ref().ok_or_else(|| anyhow!("missing section `morphisms`"))?;
        let eig = self.eigen.ok_or_else(|| anyhow!("missing section `eigen`"))?;
        let spaces = self.spaces()?;
        let dims = self.rope.as_ref().map(|r| r.dims).expect("rope parsed above");
        let mut halfstrip = Vec::new();
        for side in Side::ALL {
            let key = side.letter().to_string();
            let rows = morph.halfstrip.get(&key).ok_or_else(|| anyhow!("missing section `morphisms.halfstrip.{key}`"))?;
            let d = dims.get(side);
            let n = transverse_states(spaces, side) * d;
            let m = matrix_of(rows, (d * d, n * n), &format!("morphisms.halfstrip.{key}"))?;
            halfstrip.push(HalfStripMorphism { side, map: LinearMap::new((n, n), (d, d), m)? });
        }
        let mut corners = Vec::new();
        for corner in Corner::ALL {
            let key = corner.compass();
            let sec = morph.corner.get(key).ok_or_else(|| anyhow!("missing section `morphisms.corner.{key}`"))?;
            let shape = corner_shape(&dims, corner);
            let n = shape.0 * shape.1;
            let k = sec
                .k
                .iter()
                .enumerate()
                .map(|(i, rows)| Ok(LinearMap::new(shape, shape, matrix_of(rows, (n, n), &format!("morphisms.corner.{key}.K[{i}]"))?)?))
                .collect::<Result<Vec<_>>>()?;
            corners.push(CornerMorphism { corner, k });
        }
        let s = eig.sigma;
        Ok(EigenStructure { lambda: eig.lambda, sigma: [s.s, s.n, s.w, s.e], kappa: eig.kappa, rep, halfstrip, corners })
    }

    pub fn from_weight(w: &FaceWeight) -> Self {
        let sp = w.spaces();
        Self {
            s1: sp.s1(),
            s2: sp.s2(),
            weight: w.tensor().data().to_vec(),
            rope: None,
            morphisms: None,
            eigen: None,
            offsets: None,
            sizes: None,
        }
    }

    pub fn with_rope(mut self, rep: &RopeRep) -> Self {
        let r = rep.rope();
        let p = rep.parts();
        let list = |ms: &[Matrix]| ms.iter().map(rows_of).collect();
        self.rope = Some(RopeSection {
            dims: Sides { s: r.d_s, n: r.d_n, w: r.d_w, e: r.d_e },
            a_s: list(&p.a_s),
            a_n: list(&p.a_n),
            a_w: list(&p.a_w),
            a_e: list(&p.a_e),
            u_ws: rows_of(&p.u_ws),
            u_se: rows_of(&p.u_se),
            u_en: rows_of(&p.u_en),
            u_nw: rows_of(&p.u_nw),
        });
        self
    }

    pub fn with_eigen(self, es: &EigenStructure) -> Self {
        let mut out = self.with_rope(&es.rep);
        let mut m = MorphismSection::default();
        for h in &es.halfstrip {
            m.halfstrip.insert(h.side.letter().to_string(), rows_of(h.map.matrix()));
        }
        for c in &es.corners {
            m.corner.insert(c.corner.compass().to_string(), CornerSection { k: c.k.iter().map(|k| rows_of(k.matrix())).collect() });
        }
        out.morphisms = Some(m);
        let [s, n, w, e] = es.sigma;
        out.eigen = Some(EigenSection { lambda: es.lambda, sigma: Sides { s, n, w, e }, kappa: es.kappa });
        out
    }
}

/// Parse `n1,n2,m1,m2`.
pub fn parse_offsets(text: &str) -> Result<Offsets> {
    let v: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad offset `{t}`")))
        .collect::<Result<_>>()?;
    let [n1, n2, m1, m2] = v[..] else { bail!("offsets need four values n1,n2,m1,m2, got {}", v.len()) };
    Ok(Offsets::new(n1, n2, m1, m2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use guillotine::eigen::build_hv_eigenstructure;

    fn ones() -> Matrix {
        Matrix::from_fn(2, 2, |_, _| 1.0)
    }

    #[test]
    fn weight_length_error_names_expected_length() {
        let err = ModelFile::from_json(r#"{"s1":2,"s2":2,"weight":[1,2,3]}"#).unwrap_err();
        assert!(format!("{err:#}").contains("expected length 16"), "{err:#}");
    }

    #[test]
    fn syntax_errors_report_line() {
        let err = ModelFile::from_json("{\n\"s1\": 2,\n\"s2\": ,\n}").unwrap_err();
        assert!(format!("{err:#}").contains("line 3"), "{err:#}");
    }

    #[test]
    fn eigen_round_trip_is_bit_identical() {
        let m = build_hv_eigenstructure(&ones(), &Matrix::from_vec(2, 2, vec![0.3, 1.0 / 3.0, 0.7, 2.0]).unwrap()).unwrap();
        let file = ModelFile::from_weight(&m.weight).with_eigen(&m.es);
        let back = ModelFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let es = back.eigen_structure().unwrap();
        assert_eq!(es, m.es);
    }

    #[test]
    fn missing_morphisms_is_named() {
        let m = build_hv_eigenstructure(&ones(), &ones()).unwrap();
        let mut file = ModelFile::from_weight(&m.weight).with_eigen(&m.es);
        file.morphisms = None;
        let err = file.eigen_structure().unwrap_err();
        assert!(err.to_string().contains("morphisms"));
        let mut file = ModelFile::from_weight(&m.weight).with_eigen(&m.es);
        file.morphisms.as_mut().unwrap().corner.remove("NE");
        assert!(file.eigen_structure().unwrap_err().to_string().contains("morphisms.corner.NE"));
    }

    #[test]
    fn offsets_parse() {
        assert_eq!(parse_offsets("1, 0,1,0").unwrap(), Offsets::new(1, 0, 1, 0));
        assert!(parse_offsets("1,2").is_err());
    }
}
