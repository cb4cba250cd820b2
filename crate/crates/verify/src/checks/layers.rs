use fquad_core::functors::filtration::{head_map, i_d, kd_m, kdpf, layer, phi_d, sigma_layer, witness};
use fquad_core::functors::{l_functor, Functor, Iso, MFunctor, NaturalMap};
use fquad_core::Result;

use super::{bit, per_object};
use crate::{Check, CheckConfig, Outcome, Row};

/// The filtration `k_d m_{α,1}` of `m_{α,1}`: each layer maps isomorphically
/// onto `L^{d+1}_α`, and the head `m/k_1 m` is `iso_α`.
pub struct Layers;

impl Check for Layers {
    fn name(&self) -> &'static str {
        "check_layers"
    }

    fn summary(&self) -> &'static str {
        "k_d m / k_{d+1} m = L^{d+1} through Phi_d; m / k_1 m = iso"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        let mut rows = per_object(cfg, |e| {
            let w = &e.space;
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let m = MFunctor::new(alpha).dim(w)?;
                let iso = Iso::line(alpha).dim(w)?;
                let k1 = kd_m(alpha, 1).subspace(w)?;
                let head = head_map(alpha).at(w)?;
                let mut row = Row::new(&e.name)
                    .with("alpha", bit(alpha))
                    .with("d", "head")
                    .with("dim_m", m)
                    .with("dim_k1m", k1.dim())
                    .with("dim_iso", iso)
                    .with("rank_head", head.rank());
                row.require("head_dim", m - k1.dim() == iso);
                row.require("head_onto", head.rank() == iso);
                row.require("head_kernel_is_k1m", head.matrix.kernel_basis() == *k1);
                rows.push(row);

                for d in 0..=cfg.d_max {
                    let upper = kd_m(alpha, d);
                    let lower = kd_m(alpha, d + 1);
                    let (su, sl) = (upper.subspace(w)?, lower.subspace(w)?);
                    let q = layer(upper.clone(), lower, format!("layer:d={d}"));
                    let dl = l_functor(alpha, d + 1).dim(w)?;
                    let lands = i_d(alpha, upper.clone(), kdpf(d)).at(w);
                    let sigma = sigma_layer(alpha, d, upper.clone(), q.clone()).at(w);
                    let mut row = Row::new(&e.name)
                        .with("alpha", bit(alpha))
                        .with("d", d)
                        .with("dim_kdm", su.dim())
                        .with("dim_kd1m", sl.dim())
                        .with("dim_layer", q.dim(w)?)
                        .with("dim_L", dl)
                        .with("layer", format!("{}-{}={}", su.dim(), sl.dim(), dl));
                    row.require("nested", sl.is_subspace_of(&su));
                    row.require("layer_dim_is_L", su.dim() - sl.dim() == dl);
                    row.require("lands_in_kdPF", lands.is_ok());
                    if let Ok(i) = &lands {
                        row.set("rank_i", i.rank());
                        row.require("i_injective", i.rank() == su.dim());
                    }
                    row.require("phi_kills_next_step", sigma.is_ok());
                    if let Ok(s) = &sigma {
                        row.set("rank_sigma", s.rank());
                        row.require("sigma_bijective", s.is_iso() && s.rank() == dl);
                    }
                    rows.push(row);
                }
            }
            Ok(rows)
        })?;

        for &alpha in &cfg.alphas {
            for d in 0..=cfg.d_max {
                let wit = witness(alpha, d)?;
                let kdm = kd_m(alpha, d);
                let coords = kdm.coordinates(&wit.space, &wit.element);
                let mut row = Row::new(format!("H0^{}", d + 1))
                    .with("alpha", bit(alpha))
                    .with("d", d)
                    .with("witness", "pair sums over L")
                    .with("l_dim", wit.l_basis.len());
                row.require("witness_in_kdm", coords.is_ok());
                if let Ok(c) = coords {
                    let image = phi_d(alpha, d, kdm).at(&wit.space)?.matrix.mul_vec(&c);
                    row.require("image_nonzero", !image.is_zero());
                    row.require("image_is_wedge", image == wit.expected);
                }
                rows.push(row);
            }
        }
        Ok(rows.into())
    }
}
