//! Exactly solvable models generated from two small matrices.

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use guillotine::eigen::{build_hv_eigenstructure, build_oblique_eigenstructure};
use guillotine::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::ModelFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// `W = A[x][y]·B[w][z]`
    Hv,
    /// `W = C[x][w]·D[z][y]`
    Oblique,
}

/// Parse a matrix spec: `ones<n>`, `random<n>` (entries in `[0.1, 2)` drawn
/// from `rng`), or literal rows such as `1,2;3,4`.
pub fn parse_matrix(spec: &str, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let size = |rest: &str| -> Result<usize> {
        let n = if rest.is_empty() { 2 } else { rest.parse().with_context(|| format!("bad matrix size in `{spec}`"))? };
        ensure!(n > 0, "matrix size must be positive");
        Ok(n)
    };
    if let Some(rest) = spec.strip_prefix("ones") {
        let n = size(rest)?;
        return Ok(Matrix::from_fn(n, n, |_, _| 1.0));
    }
    if let Some(rest) = spec.strip_prefix("random") {
        let n = size(rest)?;
        return Ok(Matrix::from_fn(n, n, |_, _| rng.gen_range(0.1..2.0)));
    }
    let rows: Vec<Vec<f64>> = spec
        .split(';')
        .map(|r| r.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("bad matrix entry `{t}`"))).collect())
        .collect::<Result<_>>()?;
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        bail!("matrix `{spec}` has rows of different lengths");
    }
    Ok(Matrix::from_vec(rows.len(), cols, rows.concat())?)
}

/// Model document with rope, morphisms and eigenvalues filled in.
pub fn build(kind: Builtin, a: &str, b: &str, seed: u64) -> Result<ModelFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (parse_matrix(a, &mut rng)?, parse_matrix(b, &mut rng)?);
    let (w, es) = match kind {
        Builtin::Hv => {
            let m = build_hv_eigenstructure(&a, &b).context("cannot build the HV model")?;
            (m.weight, m.es)
        }
        Builtin::Oblique => {
            let m = build_oblique_eigenstructure(&a, &b).context("cannot build the oblique model")?;
            (m.weight, m.es)
        }
    };
    Ok(ModelFile::from_weight(&w).with_eigen(&es))
}
