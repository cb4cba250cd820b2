use fquad_core::family::endomorphisms;
use fquad_core::functors::exterior::{k_span, l_span, lambda_iso, nu_k, nu_tilde, sigma_k1};
use fquad_core::functors::{k_functor, l_functor, natural_check, Functor, Iso, NaturalMap};
use fquad_core::{F2Matrix, Result, Subspace};

use super::{bit, per_object};
use crate::{Check, CheckConfig, Outcome, Row};

/// Naturality against endomorphism families is checked up to this
/// dimension; larger objects get dimension and rank checks only.
const NATURALITY_MAX_DIM: usize = 4;

/// `0 → Kⁿ → Λⁿ⊗iso → K^{n+1} → 0`, `0 → L^{n+1} → K^{n+1} → Lⁿ → 0` and
/// `K¹ ≅ iso`.
pub struct KlSes;

impl Check for KlSes {
    fn name(&self) -> &'static str {
        "check_KL_ses"
    }

    fn summary(&self) -> &'static str {
        "dim Lambda^n(x)iso = dim K^n + dim K^{n+1}; dim K^{n+1} = dim L^{n+1} + dim L^n; K^1 = iso"
    }

    fn run(&self, cfg: &CheckConfig) -> Result<Outcome> {
        per_object(cfg, |e| {
            let w = &e.space;
            let family = if w.dim() <= NATURALITY_MAX_DIM {
                Some(endomorphisms(w, cfg.seed, cfg.apex_budget)?.0)
            } else {
                None
            };
            let mut rows = Vec::new();
            for &alpha in &cfg.alphas {
                let iso = Iso::line(alpha).dim(w)?;
                let s = sigma_k1(alpha);
                let sm = s.at(w)?;
                let mut row = Row::new(&e.name)
                    .with("alpha", bit(alpha))
                    .with("n", "K1")
                    .with("dim_K1", sm.source.dim())
                    .with("dim_iso", iso)
                    .with("rank_sigma", sm.rank());
                row.require("sigma_bijective", sm.is_iso() && sm.source.dim() == iso);
                if let Some(f) = &family {
                    let rep = natural_check(&s, f)?;
                    row.set("morphisms", rep.checked);
                    row.require("sigma_natural", rep.ok());
                }
                rows.push(row);

                for n in 1..=cfg.n_max {
                    let lam = lambda_iso(alpha, n).dim(w)?;
                    let kn = k_functor(alpha, n);
                    let kn1 = k_functor(alpha, n + 1);
                    let ln = l_functor(alpha, n);
                    let ln1 = l_functor(alpha, n + 1);
                    let (dk, dk1) = (kn.dim(w)?, kn1.dim(w)?);
                    let (dl, dl1) = (ln.dim(w)?, ln1.dim(w)?);
                    let tilde = nu_tilde(alpha, n);
                    let t = tilde.at(w)?;
                    let kn1_space = kn1.subspace(w)?;
                    let kernel = kernel_in_ambient(&t.matrix, &kn1_space);
                    let nk = nu_k(alpha, n).at(w)?;
                    let nk1 = nu_k(alpha, n + 1).at(w)?;
                    let mut row = Row::new(&e.name)
                        .with("alpha", bit(alpha))
                        .with("n", n)
                        .with("dim_lambda_iso", lam)
                        .with("dim_K_n", dk)
                        .with("dim_K_n1", dk1)
                        .with("dim_L_n", dl)
                        .with("dim_L_n1", dl1)
                        .with("rank_nu_tilde", t.rank());
                    row.require("K_ses", lam == dk + dk1);
                    row.require("L_ses", dk1 == dl1 + dl);
                    row.require("nu_tilde_onto", t.rank() == dl);
                    row.require("ker_nu_tilde_is_L", kernel == *ln1.subspace(w)?);
                    row.require("nu_K_squares_to_zero", nk.matrix.mul(&nk1.matrix).is_zero());
                    row.require("K_routes_agree", *kn.subspace(w)? == k_span(alpha, n, w)?);
                    row.require("L_routes_agree", *ln.subspace(w)? == l_span(alpha, n, w)?);
                    if let Some(f) = &family {
                        let rep = natural_check(&tilde, f)?;
                        row.require("nu_tilde_natural", rep.ok());
                    }
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .map(Outcome::from)
    }
}

/// Kernel of `m` (written in the basis of `sub`) as a subspace of the ambient.
fn kernel_in_ambient(m: &F2Matrix, sub: &Subspace) -> Subspace {
    let k = m.kernel_basis();
    Subspace::span(k.basis().iter().map(|c| sub.combine(c)), sub.ambient_dim())
}
