use fquad_core::functors::mix::{norm, norm_image, orbit_projection, sigma_functor};
use fquad_core::functors::{Functor, Label, MFunctor, MixAB, NaturalMap};
use fquad_core::Result;

use super::{bit, per_object};
use crate::{Check, CheckConfig, Outcome, Row};

/// `0 → m_{α,1} → Mix_{α,1} → m_{α,1} → 0` through the swap action.
pub struct S2Ses;

impl Check for S2Ses {
    fn name(&self) -> &'static str {
        "check_s2_ses"
    }

    fn summary(&self) -> &'static str {
        "swap acts freely on Mix_{a,1}; 0 -> m -> Mix -> m -> 0 is exact"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        per_object(cfg, |e| {
            let w = &e.space;
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let mix = MixAB::new(alpha, true).on_object(w)?;
                let m = MFunctor::new(alpha).dim(w)?;
                let fixed = mix
                    .labels()
                    .iter()
                    .filter(|l| matches!(l, Label::Pair(a, b) if a == b))
                    .count();
                let n = norm(alpha).at(w)?;
                let p = orbit_projection(alpha).at(w)?;
                let sigma = sigma_functor(alpha, true).subspace(w)?;
                let mut row = Row::new(&e.name)
                    .with("alpha", bit(alpha))
                    .with("dim_mix", mix.dim())
                    .with("dim_m", m)
                    .with("fixed_labels", fixed)
                    .with("rank_norm", n.rank())
                    .with("rank_orbit", p.rank());
                row.require("free_action", fixed == 0);
                row.require("dim_mix_is_twice_m", mix.dim() == 2 * m);
                row.require("norm_injective", n.rank() == m);
                row.require("orbit_surjective", p.rank() == m);
                row.require("composite_zero", p.matrix.mul(&n.matrix).is_zero());
                row.require("exact_middle", n.rank() + p.rank() == mix.dim());
                row.require("invariants_are_norms", *sigma == norm_image(alpha, w)?);
                rows.push(row);
            }
            Ok(rows)
        })
        .map(Outcome::from)
    }
}
