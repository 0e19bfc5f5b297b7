//! Conditions relating a reference Jacobian `J_g` to a re-parametrized
//! `J_ĝ = J_g · B`, and the block assignment induced by `B`.

use crate::certificate::{combine_digests, Certificate, Criterion, Witness};
use crate::error::{Error, Result};
use crate::numeric::{l0_norm, Matrix, SupportMask, Tolerance};
use crate::sparse::BlockSpec;

fn same_shape(a: &Matrix, b: &Matrix, what: &str) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "{what}: {}x{} against {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Holds iff each column support of `J_ĝ` is the union of the supports of
/// the `J_g` columns selected by the support of the matching column of `B`.
/// The factorization `J_ĝ = J_g · B` is validated first.
pub fn check_support_union(jg: &Matrix, jghat: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<Certificate> {
    if b.rows() != b.cols() || b.rows() != jg.cols() {
        return Err(Error::Shape(format!(
            "B must be {0}x{0}, got {1}x{2}",
            jg.cols(),
            b.rows(),
            b.cols()
        )));
    }
    same_shape(jg, jghat, "J_g and J_ĝ differ in shape")?;
    b.inverse(tol)?;
    let product = jg.matmul(b)?;
    let scale = product.max_abs().max(jghat.max_abs());
    let limit = tol.threshold(scale);
    if let Some(i) = (0..product.entries().len()).find(|&i| (product.entries()[i] - jghat.entries()[i]).abs() > limit) {
        return Err(Error::InvalidInput(format!(
            "J_ĝ differs from J_g·B at row {}, column {}",
            i / jg.cols() + 1,
            i % jg.cols() + 1
        )));
    }
    let source = jg.column_supports(tol);
    let found = jghat.column_supports(tol);
    let digest = combine_digests(&[jg.digest(), jghat.digest(), b.digest()]);
    for k in 0..b.cols() {
        let expected = b
            .column_support(k, tol)
            .members()
            .iter()
            .fold(SupportMask::from_bits(jg.rows(), 0), |acc, &i| acc.union(&source[i - 1]));
        if expected != found[k] {
            return Ok(Certificate::new(
                Criterion::SupportUnion,
                false,
                Witness::SupportMismatch {
                    column: k + 1,
                    expected: expected.members().to_vec(),
                    found: found[k].members().to_vec(),
                },
                digest,
            ));
        }
    }
    Ok(Certificate::new(Criterion::SupportUnion, true, Witness::None, digest))
}

/// Holds iff `‖J_ĝ‖₀ ≤ ‖J_g‖₀`. The witness reports both counts.
pub fn check_l0_nonincrease(jg: &Matrix, jghat: &Matrix, tol: &Tolerance) -> Result<Certificate> {
    same_shape(jg, jghat, "J_g and J_ĝ differ in shape")?;
    let (source, target) = (l0_norm(jg, tol), l0_norm(jghat, tol));
    Ok(Certificate::new(
        Criterion::L0NonIncrease,
        target <= source,
        Witness::L0Counts { source, target },
        combine_digests(&[jg.digest(), jghat.digest()]),
    ))
}

/// Reads the block map `σ` off `B`: each block-row of `B` (rows of a source
/// block) must meet exactly one target block-column, and every target block
/// must be hit. `sigma[i]` is the one-based target of source block `i + 1`.
pub fn extract_assignment(
    b: &Matrix,
    src: &BlockSpec,
    tgt: &BlockSpec,
    tol: &Tolerance,
) -> Result<Certificate> {
    if b.rows() != b.cols() {
        return Err(Error::Shape(format!("B must be square, got {}x{}", b.rows(), b.cols())));
    }
    if src.total() != b.rows() || tgt.total() != b.cols() {
        return Err(Error::Shape(format!(
            "blocks {src} / {tgt} do not match a {}x{} matrix",
            b.rows(),
            b.cols()
        )));
    }
    b.inverse(tol)?;
    let thresh = b.threshold(tol);
    let mut sigma = Vec::with_capacity(src.len());
    for i in 0..src.len() {
        let targets: Vec<usize> = (0..tgt.len())
            .filter(|&j| src.range(i).any(|r| tgt.range(j).any(|c| b.get(r, c).abs() > thresh)))
            .collect();
        if targets.len() != 1 {
            return Ok(Certificate::new(
                Criterion::Assignment,
                false,
                Witness::BlockRow {
                    block_row: i + 1,
                    targets: targets.iter().map(|t| t + 1).collect(),
                },
                b.digest(),
            ));
        }
        sigma.push(targets[0] + 1);
    }
    let surjective = (1..=tgt.len()).all(|t| sigma.contains(&t));
    let cert = Certificate::new(Criterion::Assignment, surjective, Witness::Assignment { sigma }, b.digest());
    Ok(if surjective {
        cert
    } else {
        cert.with_note("the block map misses a target block")
    })
}
