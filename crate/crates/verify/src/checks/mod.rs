use rayon::prelude::*;

use fquad_core::Result;

use crate::{CheckConfig, RosterEntry, Row};

pub mod category;
pub mod complex;
pub mod decomposition;
pub mod kl;
pub mod layers;
pub mod noniso;
pub mod s2;
pub mod simplicity;

/// Runs `f` on every roster object in parallel and concatenates the rows
/// in roster order.
pub(crate) fn per_object<F>(cfg: &CheckConfig, f: F) -> Result<Vec<Row>>
where
    F: Fn(&RosterEntry) -> Result<Vec<Row>> + Sync,
{
    let parts: Vec<Vec<Row>> = cfg.roster.par_iter().map(&f).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub(crate) fn bit(alpha: bool) -> u8 {
    alpha as u8
}
