use serde::{Deserialize, Serialize};

use super::{Chain, ExtensionSpec};
use crate::{Error, Result};

/// A point `y` of a reversible system with its inverse orbit
/// `(y, β⁻¹y, β⁻²y, …)`, as far as it exists or was followed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseOrbitRecord<P> {
    pub orbit: Vec<P>,
    /// True when the inverse orbit genuinely ends at the last entry.
    pub terminated: bool,
}

/// The inverse-orbit record of a chain under the extension itself.
pub fn extension_record(c: &Chain) -> InverseOrbitRecord<Chain> {
    let orbit = (0..c.len())
        .map(|k| Chain::new(c.coords[k..].to_vec(), c.terminal))
        .collect();
    InverseOrbitRecord {
        orbit,
        terminated: c.terminal,
    }
}

/// Lifts `Ψ` to the extension: `Ψ̃(y) = (Ψ(y), Ψ(β⁻¹y), Ψ(β⁻²y), …)`.
pub fn lift_semiconjugacy<P, F>(
    psi: F,
    records: &[InverseOrbitRecord<P>],
    spec: &ExtensionSpec,
) -> Result<Vec<(P, Chain)>>
where
    P: Clone,
    F: Fn(&P) -> f64,
{
    let mut out = Vec::with_capacity(records.len());
    for (index, rec) in records.iter().enumerate() {
        let Some(source) = rec.orbit.first() else {
            return Err(Error::InvalidLift {
                index,
                reason: "empty inverse orbit".into(),
            });
        };
        let coords = rec.orbit.iter().map(|p| spec.space().normalize(psi(p))).collect();
        let chain = Chain::new(coords, rec.terminated);
        if let Some(reason) = spec.chain_defect(&chain) {
            return Err(Error::InvalidLift { index, reason });
        }
        out.push((source.clone(), chain));
    }
    Ok(out)
}
