//! relax → solve → extract → certify.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use momsos::extract::{
    certify_point, extract_minimizers, rank_one_equivalence_check, CertifyReport,
    ExtractionResult, RankOneReport,
};
use momsos::relax::{
    build_canonical_robust, build_noise_dual, build_noise_penalized, build_nominal,
    build_priority_psd, build_priority_trace, export_sdpa, FormulationTag, MomentProblem,
    MomentSequence, SdpInstance,
};
use momsos::robust::{verify_minimax, GameConfig, GameReport, GameTag};
use momsos::sdpsolve::{achieved_noise_level, solve, SolverConfig, SolverResult, SolverStatus};
use serde_json::json;

use crate::manifest::RunManifest;
use crate::report::{num, Report};

pub fn build_formulation(mp: &MomentProblem, tag: FormulationTag) -> Result<SdpInstance> {
    Ok(match tag {
        FormulationTag::NominalPrimal => build_nominal(mp).0,
        FormulationTag::NominalDual => build_nominal(mp).1,
        FormulationTag::NoiseDual => build_noise_dual(mp),
        FormulationTag::NoisePenalized => build_noise_penalized(mp),
        FormulationTag::PriorityTrace => build_priority_trace(mp),
        FormulationTag::PriorityPsdPrimal => build_priority_psd(mp).0,
        FormulationTag::PriorityPsdDual => build_priority_psd(mp).1,
        FormulationTag::CanonicalRobust => build_canonical_robust(&build_nominal(mp).0, mp.eps()),
        FormulationTag::Generic => bail!("`generic` is an import tag, not a formulation"),
    })
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn problem_record(mp: &MomentProblem) -> serde_json::Value {
    json!({
        "nvars": mp.nvars(),
        "order": mp.order(),
        "objective": mp.objective().to_text(),
        "constraints": mp.constraints().iter().map(|g| g.to_text()).collect::<Vec<_>>(),
        "eps": mp.eps().to_string(),
        "eta": mp.eta().to_string(),
    })
}

fn relax_record(sdp: &SdpInstance) -> serde_json::Value {
    json!({
        "formulation": sdp.formulation.tag.name(),
        "constraints": sdp.num_constraints(),
        "blocks": sdp.block_sizes(),
    })
}

/// Writes the chosen formulation in SDPA format (to `out`, default `relax.dat-s`).
pub fn cmd_relax(manifest: &RunManifest) -> Result<(Report, PathBuf)> {
    let mut m = manifest.clone();
    m.validate()?;
    let t = Instant::now();
    let mp = m.problem().context("relax")?;
    let sdp = build_formulation(&mp, m.tag()?).context("relax")?;
    let path = m.out.clone().unwrap_or_else(|| PathBuf::from("relax.dat-s"));
    export_sdpa(&sdp, &path).context("relax: export")?;
    let mut report = Report::new();
    report.push("manifest", &m);
    let mut rec = relax_record(&sdp);
    rec["problem"] = problem_record(&mp);
    rec["path"] = json!(path.display().to_string());
    rec["elapsed_ms"] = json!(ms(t));
    report.push("relax", rec);
    Ok((report, path))
}

/// Everything a solve run produced, for programmatic callers.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub problem: MomentProblem,
    pub sdp: SdpInstance,
    pub result: SolverResult,
    pub moments: Option<MomentSequence<f64>>,
    /// `⟨F_0, X⟩ + offset`, the SOS-side lower bound.
    pub bound: f64,
    pub extraction: Option<ExtractionResult>,
    pub extraction_error: Option<String>,
    pub certificates: Vec<CertifyReport>,
    pub rank_one: Option<RankOneReport>,
}

/// Solves an already built relaxation and runs extraction and certification.
pub fn solve_problem(
    mp: &MomentProblem,
    sdp: SdpInstance,
    solver: &SolverConfig,
    extraction: &momsos::extract::ExtractionConfig,
    report: &mut Report,
) -> Result<SolveOutcome> {
    let mut rec = relax_record(&sdp);
    rec["problem"] = problem_record(mp);
    report.push("relax", rec);

    let t = Instant::now();
    let result = solve(&sdp, solver).context("solve")?;
    let (eq, cone) = achieved_noise_level(&result);
    let bound = result.dual_value;
    let r = &result.residuals;
    report.push(
        "solve",
        json!({
            "status": result.status.name(),
            "primal_value": num(result.primal_value),
            "dual_value": num(result.dual_value),
            "bound": num(bound),
            "iterations": result.iterations,
            "residuals": {
                "equality": num(r.equality), "lmi": num(r.lmi), "cone": num(r.cone),
                "gap": num(r.gap),
            },
            "achieved_noise": {"eps": num(eq), "eta": num(cone)},
            "elapsed_ms": ms(t),
        }),
    );

    let moments = sdp
        .layout
        .filter(|_| result.y.iter().all(|v| v.is_finite()))
        .map(|l| MomentSequence::new(mp.moment_basis(), l.moments(&result.y)))
        .transpose()?;
    let mut out = SolveOutcome {
        problem: mp.clone(),
        sdp,
        result,
        moments,
        bound,
        extraction: None,
        extraction_error: None,
        certificates: Vec::new(),
        rank_one: None,
    };
    let Some(y) = out.moments.clone() else {
        return Ok(out);
    };
    let t = Instant::now();
    match extract_minimizers(&y, mp, extraction) {
        Ok(ex) => {
            let mut rec = serde_json::to_value(&ex)?;
            rec["trusted"] = json!(ex.trusted());
            rec["rank"] = json!(ex.rank());
            rec["elapsed_ms"] = json!(ms(t));
            report.push("extract", rec);
            for p in &ex.points {
                let c = certify_point(&p.x, mp, bound, extraction)?;
                report.push(
                    "certify",
                    json!({
                        "x": c.x, "objective": num(c.objective), "constraints": c.constraints,
                        "bound": num(c.bound), "gap": num(c.gap),
                        "result": if c.pass { "PASS" } else { "FAIL" },
                    }),
                );
                out.certificates.push(c);
            }
            out.extraction = Some(ex);
        }
        Err(e) => {
            report.push("extract", json!({"error": e.to_string(), "elapsed_ms": ms(t)}));
            out.extraction_error = Some(e.to_string());
        }
    }
    let tag = out.sdp.formulation.tag;
    let priority = matches!(
        tag,
        FormulationTag::PriorityTrace
            | FormulationTag::PriorityPsdPrimal
            | FormulationTag::PriorityPsdDual
    );
    if priority && out.result.status != SolverStatus::Optimal {
        report.push(
            "rank_one",
            json!({"status": "SKIPPED", "reason": "solver did not reach OPTIMAL"}),
        );
    } else if priority {
        let value = out.result.primal_value;
        match rank_one_equivalence_check(&y, mp, tag, value, solver.epsilon_star, extraction) {
            Ok(r) => {
                report.push("rank_one", &r);
                out.rank_one = Some(r);
            }
            Err(e) => report.push("rank_one", json!({"error": e.to_string()})),
        }
    }
    Ok(out)
}

/// relax → solve → extract → certify for one manifest.
pub fn cmd_solve(manifest: &RunManifest) -> Result<(Report, SolveOutcome)> {
    let mut m = manifest.clone();
    m.validate()?;
    let mut report = Report::new();
    report.push("manifest", &m);
    let mp = m.problem().context("relax")?;
    let sdp = build_formulation(&mp, m.tag()?).context("relax")?;
    let out = solve_problem(&mp, sdp, &m.solver, &m.extraction, &mut report)?;
    if let Some(path) = &m.out {
        report.write(path)?;
    }
    Ok((report, out))
}

/// Max-min versus min-max values for one of the robust readings.
pub fn cmd_verify(manifest: &RunManifest, game: GameTag) -> Result<(Report, GameReport)> {
    let mut m = manifest.clone();
    m.validate()?;
    let mut report = Report::new();
    report.push("manifest", &m);
    let mp = m.problem().context("relax")?;
    let cfg = GameConfig {
        solver: m.solver.clone(),
        seed: m.seed,
        ..GameConfig::default()
    };
    let t = Instant::now();
    let g = verify_minimax(&mp, game, &cfg).context("verify")?;
    let mut rec = serde_json::to_value(&g)?;
    rec["result"] = json!(if g.pass { "PASS" } else { "FAIL" });
    rec["elapsed_ms"] = json!(ms(t));
    report.push("game", rec);
    if let Some(path) = &m.out {
        report.write(path)?;
    }
    Ok((report, g))
}
