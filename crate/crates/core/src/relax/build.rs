//! Assembly of the nominal, noise-model and penalized SDPs.

use num::{Signed, Zero};

use super::localizing::{localizing_system, LocalizingSystem};
use super::problem::MomentProblem;
use super::sdp::{
    BlockSpec, Encoding, Formulation, FormulationTag, MomentLayout, SdpInstance, SparseSym,
};
use crate::poly::rational::to_f64;
use crate::poly::Rational;

struct Plan {
    tag: FormulationTag,
    encoding: Encoding,
    /// Trace-penalty weight in the moment objective (cone shift on the Gram side).
    eta: Rational,
    /// ℓ1 weight (equality box radius on the Gram side).
    eps: Rational,
}

fn gram_blocks(ls: &LocalizingSystem) -> Vec<BlockSpec> {
    ls.blocks.iter().map(|b| BlockSpec::dense(b.side())).collect()
}

fn push_coefficient(m: &mut SparseSym, ls: &LocalizingSystem, a: usize, sign: f64) {
    for (l, block) in ls.blocks.iter().enumerate() {
        for (r, c, v) in block.coefficient(a) {
            m.push(l, *r, *c, sign * to_f64(v));
        }
    }
}

/// `f_α + η·trace_α` for every α, exactly.
fn shifted_objective(mp: &MomentProblem, ls: &LocalizingSystem, eta: &Rational) -> Vec<Rational> {
    let tr = ls.trace_coefficients();
    ls.moments
        .iter()
        .zip(tr)
        .map(|(alpha, t)| mp.objective().coeff(alpha) + eta * t)
        .collect()
}

fn assemble(mp: &MomentProblem, plan: Plan) -> SdpInstance {
    let ls = localizing_system(mp);
    let rhs = shifted_objective(mp, &ls, &plan.eta);
    let nm = ls.moments.len();
    let nb = ls.blocks.len();
    let with_box = plan.eps.is_positive();
    let eps = to_f64(&plan.eps);
    let mut blocks = gram_blocks(&ls);
    let mut c = Vec::new();
    let mut constraints = Vec::new();
    let mut constant = SparseSym::new();
    let offset = match plan.encoding {
        Encoding::Moment => {
            // y_α for α ≠ 0, then u_α ≥ |y_α| when penalized.
            push_coefficient(&mut constant, &ls, 0, -1.0);
            for (a, coeff) in rhs.iter().enumerate().skip(1) {
                let mut f = SparseSym::new();
                push_coefficient(&mut f, &ls, a, 1.0);
                if with_box {
                    let k = 2 * (a - 1);
                    f.push(nb, k, k, -1.0);
                    f.push(nb, k + 1, k + 1, 1.0);
                }
                f.normalize();
                constraints.push(f);
                c.push(to_f64(coeff));
            }
            if with_box {
                for a in 1..nm {
                    let k = 2 * (a - 1);
                    let mut f = SparseSym::new();
                    f.push(nb, k, k, 1.0);
                    f.push(nb, k + 1, k + 1, 1.0);
                    constraints.push(f);
                    c.push(eps);
                }
                blocks.push(BlockSpec::diagonal(2 * (nm - 1)));
            }
            // |y₀| = 1 contributes ε.
            to_f64(&(&rhs[0] + &plan.eps))
        }
        Encoding::Gram => {
            // Last block: λ⁺, λ⁻, then (p_α, q_α) pairs when boxed.
            constant.push(nb, 0, 0, 1.0);
            constant.push(nb, 1, 1, -1.0);
            for (a, coeff) in rhs.iter().enumerate() {
                let mut f = SparseSym::new();
                push_coefficient(&mut f, &ls, a, 1.0);
                if a == 0 {
                    f.push(nb, 0, 0, 1.0);
                    f.push(nb, 1, 1, -1.0);
                }
                if with_box {
                    let k = 2 + 2 * a;
                    f.push(nb, k, k, -1.0);
                    f.push(nb, k + 1, k + 1, 1.0);
                }
                f.normalize();
                constraints.push(f);
                c.push(to_f64(coeff));
            }
            if with_box {
                for a in 0..nm {
                    let k = 2 + 2 * a;
                    let mut f = SparseSym::new();
                    f.push(nb, k, k, 1.0);
                    f.push(nb, k + 1, k + 1, 1.0);
                    constraints.push(f);
                    c.push(eps);
                }
            }
            blocks.push(BlockSpec::diagonal(2 + if with_box { 2 * nm } else { 0 }));
            0.0
        }
    };
    constant.normalize();
    SdpInstance {
        formulation: Formulation::new(plan.tag, plan.eps, plan.eta),
        layout: Some(MomentLayout {
            nvars: mp.nvars(),
            order: mp.order(),
            encoding: plan.encoding,
            gram_blocks: nb,
        }),
        blocks,
        c,
        constant,
        constraints,
        offset,
    }
}

/// Moment relaxation (y-side, `y₀ = 1` eliminated) and the SOS relaxation
/// with one equality per α (X-side). Noise radii of `mp` are ignored.
pub fn build_nominal(mp: &MomentProblem) -> (SdpInstance, SdpInstance) {
    let primal = assemble(
        mp,
        Plan {
            tag: FormulationTag::NominalPrimal,
            encoding: Encoding::Moment,
            eta: Rational::zero(),
            eps: Rational::zero(),
        },
    );
    let dual = assemble(
        mp,
        Plan {
            tag: FormulationTag::NominalDual,
            encoding: Encoding::Gram,
            eta: Rational::zero(),
            eps: Rational::zero(),
        },
    );
    (primal, dual)
}

/// `max λ` s.t. `|Σ⟨C^ℓ_α, X_ℓ⟩ + λ1_{α=0} − f_α| ≤ ε`, `X_ℓ ⪰ −ηI`,
/// with `X_ℓ = Z_ℓ − ηI`.
pub fn build_noise_dual(mp: &MomentProblem) -> SdpInstance {
    assemble(
        mp,
        Plan {
            tag: FormulationTag::NoiseDual,
            encoding: Encoding::Gram,
            eta: mp.eta().clone(),
            eps: mp.eps().clone(),
        },
    )
}

/// `min L_y(f) + η Σ_ℓ trace M_{j−d_ℓ}(g_ℓ y) + ε‖y‖₁`, the moment-side
/// counterpart of [`build_noise_dual`].
pub fn build_noise_penalized(mp: &MomentProblem) -> SdpInstance {
    assemble(
        mp,
        Plan {
            tag: FormulationTag::NoisePenalized,
            encoding: Encoding::Moment,
            eta: mp.eta().clone(),
            eps: mp.eps().clone(),
        },
    )
}

/// `min L_y(f) + η Σ_ℓ trace M_{j−d_ℓ}(g_ℓ y)`; `ε` is ignored.
pub fn build_priority_trace(mp: &MomentProblem) -> SdpInstance {
    assemble(
        mp,
        Plan {
            tag: FormulationTag::PriorityTrace,
            encoding: Encoding::Moment,
            eta: mp.eta().clone(),
            eps: Rational::zero(),
        },
    )
}

/// `min L_y(f) + ε‖y‖₁` and its box dual `max λ` s.t. `f̃ − λ ∈ Q_j(g)`,
/// `‖f̃ − f‖_∞ ≤ ε`; `η` is ignored.
pub fn build_priority_psd(mp: &MomentProblem) -> (SdpInstance, SdpInstance) {
    let primal = assemble(
        mp,
        Plan {
            tag: FormulationTag::PriorityPsdPrimal,
            encoding: Encoding::Moment,
            eta: Rational::zero(),
            eps: mp.eps().clone(),
        },
    );
    let dual = assemble(
        mp,
        Plan {
            tag: FormulationTag::PriorityPsdDual,
            encoding: Encoding::Gram,
            eta: Rational::zero(),
            eps: mp.eps().clone(),
        },
    );
    (primal, dual)
}

/// `min cᵀy + ε‖y‖₁ s.t. F(y) ⪰ 0` by splitting `u ≥ ±y` in a new diagonal
/// block. Its X-side reads `|⟨F_i, X⟩ − c_i| ≤ ε`.
pub fn build_canonical_robust(sdp: &SdpInstance, eps: &Rational) -> SdpInstance {
    let m = sdp.num_constraints();
    let mut out = sdp.clone();
    out.formulation = Formulation::new(
        FormulationTag::CanonicalRobust,
        eps.clone(),
        sdp.formulation.eta.clone(),
    );
    if !eps.is_positive() {
        return out;
    }
    let nb = sdp.blocks.len();
    for (i, f) in out.constraints.iter_mut().enumerate() {
        f.push(nb, 2 * i, 2 * i, -1.0);
        f.push(nb, 2 * i + 1, 2 * i + 1, 1.0);
        f.normalize();
    }
    for i in 0..m {
        let mut f = SparseSym::new();
        f.push(nb, 2 * i, 2 * i, 1.0);
        f.push(nb, 2 * i + 1, 2 * i + 1, 1.0);
        out.constraints.push(f);
        out.c.push(to_f64(eps));
    }
    out.blocks.push(BlockSpec::diagonal(2 * m));
    out
}
