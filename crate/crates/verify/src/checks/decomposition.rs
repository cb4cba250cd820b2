use std::sync::Arc;

use fquad_core::functors::{Functor, Iso, MixGeneral, PFunctor, Tensor};
use fquad_core::{F2Vector, QuadSpace, Result};

use super::{bit, per_object};
use crate::{Check, CheckConfig, Outcome, Row};

/// `P_F ⊗ iso_D` splits as the sum over `η` of the `Mix_{F2,D,η}`.
pub struct Decomposition;

impl Check for Decomposition {
    fn name(&self) -> &'static str {
        "check_decomposition"
    }

    fn summary(&self) -> &'static str {
        "dim P_F(x)iso_D = sum over eta of dim Mix_{F2,D,eta}"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        per_object(cfg, |e| {
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let label = if alpha { "x1" } else { "x0" };
                let t = Tensor::new(Arc::new(PFunctor::new()), Arc::new(Iso::line(alpha)));
                let lhs = t.dim(&e.space)?;
                let mut row = Row::new(&e.name).with("D", label).with("tensor", lhs);
                let mut sum = 0;
                for eta in [0u64, 1] {
                    let mix = MixGeneral::new(1, QuadSpace::line(alpha), F2Vector::from_u64(1, eta), label)?;
                    let d = mix.dim(&e.space)?;
                    row.set(&format!("mix_eta{eta}"), d);
                    sum += d;
                }
                row.set("alpha", bit(alpha));
                row.require("sum_matches", sum == lhs);
                rows.push(row);
            }
            Ok(rows)
        })
        .map(Outcome::from)
    }
}
