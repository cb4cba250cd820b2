use fquad_core::functors::exterior::{mu, mu_n_matrix};
use fquad_core::functors::{Functor, Iso, NaturalMap};
use fquad_core::Result;

use super::{bit, per_object};
use crate::{Check, CheckConfig, Outcome, Row};

/// `0 → iso_α → Λ¹⊗iso_α → Λ²⊗iso_α → …` under the wedge maps is exact.
pub struct MuComplex;

impl Check for MuComplex {
    fn name(&self) -> &'static str {
        "check_mu_complex"
    }

    fn summary(&self) -> &'static str {
        "mu_{n+1} mu_n = 0 and rank mu_n = dim ker mu_{n+1}"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        per_object(cfg, |e| {
            let w = &e.space;
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let iso = Iso::line(alpha).dim(w)?;
                let m0 = mu(alpha).at(w)?;
                let mut row = Row::new(&e.name)
                    .with("alpha", bit(alpha))
                    .with("n", "iso")
                    .with("dim_iso", iso)
                    .with("rank_mu", m0.rank());
                row.require("mu_injective", m0.rank() == iso);
                rows.push(row);
                let mut current = mu_n_matrix(alpha, 0, w)?;
                for n in 0..=cfg.n_max {
                    let next = mu_n_matrix(alpha, n + 1, w)?;
                    let rank = current.rank();
                    let kernel = next.cols() - next.rank();
                    let mut row = Row::new(&e.name)
                        .with("alpha", bit(alpha))
                        .with("n", n)
                        .with("rank_mu_n", rank)
                        .with("dim_ker_mu_n1", kernel);
                    row.require("composite_zero", next.mul(&current).is_zero());
                    row.require("exact", rank == kernel);
                    rows.push(row);
                    current = next;
                }
            }
            Ok(rows)
        })
        .map(Outcome::from)
    }
}
