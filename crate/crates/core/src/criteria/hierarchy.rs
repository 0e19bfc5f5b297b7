//! Consistency of the criteria with their implication order:
//! `D ⇒ M`, `D ⇒ S`, `D ⇒ H2` and `S ⇒ M` in the sparsest block-respecting
//! basis.

use std::collections::BTreeMap;

use super::{check_type_d, check_type_h, check_type_m};
use crate::certificate::{combine_digests, Certificate, Criterion, Witness};
use crate::error::Result;
use crate::numeric::{Matrix, Tolerance};
use crate::sparse::{sparsity_gap, BlockSpec};
use crate::tensor::DerivTensor;

/// Evaluates every applicable criterion and checks each implication whose
/// premise holds. Violations are findings and make the certificate fail;
/// criteria that cannot be evaluated on this input are listed in the notes.
pub fn hierarchy_audit(
    j: &Matrix,
    blocks: &BlockSpec,
    hessian: Option<&DerivTensor>,
    tol: &Tolerance,
) -> Result<Certificate> {
    let mut outcomes = BTreeMap::new();
    let mut notes = Vec::new();
    let mut record = |name: &str, verdict: Result<bool>, outcomes: &mut BTreeMap<String, bool>| match verdict {
        Ok(v) => {
            outcomes.insert(name.to_string(), v);
        }
        Err(e) => notes.push(format!("{name} not evaluated: {e}")),
    };

    let d = check_type_d(j, blocks, tol)?.holds;
    outcomes.insert("D".to_string(), d);
    record("M", check_type_m(j, blocks, tol).map(|c| c.holds), &mut outcomes);
    let gap = sparsity_gap(j, blocks, tol);
    record("S", gap.as_ref().map(|g| g.independent).map_err(Clone::clone), &mut outcomes);
    if let Ok(g) = &gap {
        if g.independent {
            // re-express J in the sparsest respecting basis, whose vectors come block by block
            let sparse_j = j.matmul(&g.respecting.coefficient_matrix())?;
            record("M in sparsest basis", check_type_m(&sparse_j, blocks, tol).map(|c| c.holds), &mut outcomes);
        }
    }
    if let Some(h) = hessian {
        record("H2", check_type_h(h, blocks, 2, tol).map(|c| c.holds), &mut outcomes);
    }

    let mut violations = Vec::new();
    let get = |k: &str| outcomes.get(k).copied();
    if d {
        for implied in ["M", "S", "H2"] {
            if get(implied) == Some(false) {
                violations.push(format!("D holds but {implied} fails"));
            }
        }
    }
    if get("S") == Some(true) && get("M in sparsest basis") == Some(false) {
        violations.push("S holds but M fails in the sparsest block-respecting basis".to_string());
    }
    let mut digests = vec![j.digest()];
    if let Some(h) = hessian {
        digests.push(h.digest());
    }
    let holds = violations.is_empty();
    let mut cert = Certificate::new(
        Criterion::Hierarchy,
        holds,
        Witness::Hierarchy { outcomes, violations },
        combine_digests(&digests),
    );
    for n in notes {
        cert = cert.with_note(n);
    }
    Ok(cert)
}
