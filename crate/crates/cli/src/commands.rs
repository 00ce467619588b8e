//! One builder per subcommand. Each runs its analysis once and renders the
//! result three ways: a JSON report payload, prose, and a TSV table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::{json, Value};

use hardyweak::hardy::{
    a12_analysis, build_scenario, ifm_narrative, strong_comparison, weak_value_table, Convention,
    Photon, Polarization,
};
use hardyweak::pointer::{estimate_joint, estimate_single};
use hardyweak::qcore::{
    complex_to_json, density_to_json, operator_to_json, Ket, Operator, SpectralOperator,
};
use hardyweak::stateprep::{
    compare_preps, hardy_target, schmidt_decompose, simulate_correct_prep, simulate_flawed_prep,
    PreparationOutcome, SchmidtForm,
};
use hardyweak::weakval::product_rule_violation;
use hardyweak::weakval::weighted_polarization;
use hardyweak::Result;

use crate::report::{fmt_f64, tsv_row, Report};

/// One subcommand's output in every supported format.
pub struct Rendered {
    pub report: Report,
    pub text: String,
    pub tsv: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    /// Polarization V encodes the overlapping (inner) arm.
    VInner,
    /// Polarization H encodes the overlapping (inner) arm.
    HInner,
}

impl ConventionArg {
    fn convention(self) -> Convention {
        match self {
            ConventionArg::VInner => Convention::VInner,
            ConventionArg::HInner => Convention::HInner,
        }
    }

    fn name(self) -> &'static str {
        self.convention().label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Preparation that leaves a which-path record in the environment.
    Flawed,
    /// Schmidt-form preparation of the pure target state.
    Correct,
    /// Both routes side by side.
    Compare,
}

impl ModeArg {
    fn name(self) -> &'static str {
        match self {
            ModeArg::Flawed => "flawed",
            ModeArg::Correct => "correct",
            ModeArg::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableArg {
    /// |V⟩⟨V| on photon 1.
    Pv1,
    /// |H⟩⟨H| on photon 1.
    Ph1,
    /// |V⟩⟨V| on photon 2.
    Pv2,
    /// |H⟩⟨H| on photon 2.
    Ph2,
    /// γ|V⟩⟨V| + ε|H⟩⟨H| on photon 1.
    A1,
    /// γ|V⟩⟨V| + ε|H⟩⟨H| on photon 2.
    A2,
}

impl ObservableArg {
    fn name(self) -> &'static str {
        match self {
            ObservableArg::Pv1 => "pv1",
            ObservableArg::Ph1 => "ph1",
            ObservableArg::Pv2 => "pv2",
            ObservableArg::Ph2 => "ph2",
            ObservableArg::A1 => "a1",
            ObservableArg::A2 => "a2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    /// ⟨P_V ⊗ P_V⟩_w.
    Vv,
    /// ⟨P_H ⊗ P_H⟩_w.
    Hh,
    /// ⟨P_V ⊗ P_H⟩_w.
    Vh,
    /// ⟨P_H ⊗ P_V⟩_w.
    Hv,
}

impl PairArg {
    fn name(self) -> &'static str {
        match self {
            PairArg::Vv => "vv",
            PairArg::Hh => "hh",
            PairArg::Vh => "vh",
            PairArg::Hv => "hv",
        }
    }

    fn polarizations(self) -> (Polarization, Polarization) {
        match self {
            PairArg::Vv => (Polarization::V, Polarization::V),
            PairArg::Hh => (Polarization::H, Polarization::H),
            PairArg::Vh => (Polarization::V, Polarization::H),
            PairArg::Hv => (Polarization::H, Polarization::V),
        }
    }
}

fn pol_projector(pol: Polarization) -> SpectralOperator {
    SpectralOperator::from_projector(
        &Operator::projector(&Ket::basis_state(2, pol.index())).expect("basis state"),
    )
    .expect("rank-1 projector")
}

fn cplx(z: Complex64) -> String {
    // Negative zero reads as misleading sign noise; normalize it away.
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    format!("{re:+.6} {im:+.6}i")
}

fn joined(schedule: &[f64]) -> String {
    schedule
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn table(convention: ConventionArg) -> Result<Rendered> {
    let s = build_scenario(convention.convention());
    let t = weak_value_table(&s)?;
    let inner = pol_projector(s.inner_polarization()).to_dense();
    let rule = product_rule_violation(&s.ensemble(), &inner, &inner)?;
    let ax = [t.axis[0].letter(), t.axis[1].letter()];

    let payload = json!({
        "axis": ax,
        "convention": t.convention.label(),
        "joint": t.joint,
        "joint_imag_max": t.max_imag_residual,
        "marginals": {
            "photon1": t.marginals_photon1,
            "photon2": t.marginals_photon2,
        },
        "postselection_probability": t.postselection_probability,
        "product_rule": {
            "joint": complex_to_json(rule.joint),
            "product": complex_to_json(rule.product),
            "violation": rule.violation,
        },
        "total": t.total,
    });

    let mut text = format!("weak-value table ({})\n\n", t.convention.label());
    let _ = writeln!(text, "{:<8}{:>12}{:>12}", "joint", ax[0], ax[1]);
    for i in 0..2 {
        let _ = writeln!(
            text,
            "{:<8}{:>12.6}{:>12.6}",
            ax[i], t.joint[i][0], t.joint[i][1]
        );
    }
    let _ = writeln!(
        text,
        "\nmarginals photon 1: {:.6} {:.6}",
        t.marginals_photon1[0], t.marginals_photon1[1]
    );
    let _ = writeln!(
        text,
        "marginals photon 2: {:.6} {:.6}",
        t.marginals_photon2[0], t.marginals_photon2[1]
    );
    let _ = writeln!(text, "total of joint table: {:.6}", t.total);
    let _ = writeln!(
        text,
        "post-selection probability: {:.6}",
        t.postselection_probability
    );
    let _ = writeln!(
        text,
        "product rule on the {0}{0} pair: joint {1}, product of marginals {2}, violation {3:.6}",
        ax[0],
        cplx(rule.joint),
        cplx(rule.product),
        rule.violation
    );

    let mut tsv = tsv_row(&["joint".into(), ax[0].into(), ax[1].into()]);
    for i in 0..2 {
        tsv += &tsv_row(&[
            ax[i].into(),
            fmt_f64(t.joint[i][0]),
            fmt_f64(t.joint[i][1]),
        ]);
    }

    Ok(Rendered {
        report: Report {
            command: "table",
            parameters: BTreeMap::from([("convention", convention.name().to_string())]),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}

fn outcome_json(o: &PreparationOutcome) -> Value {
    json!({
        "coherence_offdiag_max": o.coherence_offdiag_max,
        "fidelity_with_target": o.fidelity_with_target,
        "purity": o.purity,
        "state": density_to_json(&o.state),
    })
}

fn schmidt_json(s: &SchmidtForm) -> Value {
    json!({
        "a": s.a,
        "b": s.b,
        "local_rotation_1": operator_to_json(&s.local_rotation_1),
        "local_rotation_2": operator_to_json(&s.local_rotation_2),
        "phase_convention": s.phase_convention,
    })
}

fn outcome_text(o: &PreparationOutcome) -> String {
    format!(
        "purity {:.6}, fidelity with target {:.6}, largest coherence {:.6}",
        o.purity, o.fidelity_with_target, o.coherence_offdiag_max
    )
}

pub fn prep(mode: ModeArg) -> Result<Rendered> {
    let target = hardy_target();
    let (payload, text, tsv) = match mode {
        ModeArg::Flawed => {
            let o = simulate_flawed_prep(&target)?;
            let payload = json!({"mode": "flawed", "outcome": outcome_json(&o)});
            let text = format!(
                "flawed preparation (which-path record retained)\n\n{}\n",
                outcome_text(&o)
            );
            let tsv = tsv_row(&["field".into(), "value".into()])
                + &tsv_row(&["purity".into(), fmt_f64(o.purity)])
                + &tsv_row(&["fidelity_with_target".into(), fmt_f64(o.fidelity_with_target)])
                + &tsv_row(&[
                    "coherence_offdiag_max".into(),
                    fmt_f64(o.coherence_offdiag_max),
                ]);
            (payload, text, tsv)
        }
        ModeArg::Correct => {
            let o = simulate_correct_prep(&target)?;
            let sf = schmidt_decompose(&target)?;
            let payload = json!({
                "mode": "correct",
                "outcome": outcome_json(&o),
                "schmidt": schmidt_json(&sf),
            });
            let text = format!(
                "correct preparation (Schmidt-form circuit)\n\n{}\nschmidt coefficients: a = {:.6}, b = {:.6}\n",
                outcome_text(&o),
                sf.a,
                sf.b
            );
            let tsv = tsv_row(&["field".into(), "value".into()])
                + &tsv_row(&["purity".into(), fmt_f64(o.purity)])
                + &tsv_row(&["fidelity_with_target".into(), fmt_f64(o.fidelity_with_target)])
                + &tsv_row(&[
                    "coherence_offdiag_max".into(),
                    fmt_f64(o.coherence_offdiag_max),
                ])
                + &tsv_row(&["schmidt_a".into(), fmt_f64(sf.a)])
                + &tsv_row(&["schmidt_b".into(), fmt_f64(sf.b)]);
            (payload, text, tsv)
        }
        ModeArg::Compare => {
            let context = build_scenario(Convention::VInner).ensemble();
            let c = compare_preps(&target, Some(&context))?;
            let ctx = c
                .context_joint_weak_values
                .as_ref()
                .expect("context ensemble supplied");
            let values: Vec<Value> = ctx
                .values
                .iter()
                .map(|row| Value::Array(row.iter().map(|&z| complex_to_json(z)).collect()))
                .collect();
            let payload = json!({
                "context_joint_weak_values": {
                    "axis": ctx.axis,
                    "max_imag_residual": ctx.max_imag_residual,
                    "values": values,
                },
                "correct": outcome_json(&c.correct),
                "flawed": outcome_json(&c.flawed),
                "mode": "compare",
                "schmidt": schmidt_json(&c.schmidt),
            });
            let mut text = String::from("state preparation comparison\n\n");
            let _ = writeln!(
                text,
                "flawed route (which-path record retained):\n  {}",
                outcome_text(&c.flawed)
            );
            let _ = writeln!(
                text,
                "correct route (Schmidt-form circuit):\n  {}",
                outcome_text(&c.correct)
            );
            let _ = writeln!(
                text,
                "\nschmidt coefficients: a = {:.6}, b = {:.6}",
                c.schmidt.a, c.schmidt.b
            );
            let _ = writeln!(
                text,
                "\njoint polarization weak values of the analysis ensemble (axis {}, {}):",
                ctx.axis[0], ctx.axis[1]
            );
            for row in &ctx.values {
                let _ = writeln!(text, "  {}   {}", cplx(row[0]), cplx(row[1]));
            }
            let tsv = tsv_row(&[
                "route".into(),
                "purity".into(),
                "fidelity_with_target".into(),
                "coherence_offdiag_max".into(),
            ]) + &tsv_row(&[
                "flawed".into(),
                fmt_f64(c.flawed.purity),
                fmt_f64(c.flawed.fidelity_with_target),
                fmt_f64(c.flawed.coherence_offdiag_max),
            ]) + &tsv_row(&[
                "correct".into(),
                fmt_f64(c.correct.purity),
                fmt_f64(c.correct.fidelity_with_target),
                fmt_f64(c.correct.coherence_offdiag_max),
            ]);
            (payload, text, tsv)
        }
    };
    Ok(Rendered {
        report: Report {
            command: "prep",
            parameters: BTreeMap::from([("mode", mode.name().to_string())]),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}

pub fn pointer(
    observable: ObservableArg,
    gamma: f64,
    epsilon: f64,
    sigma: f64,
    schedule: &[f64],
) -> Result<Rendered> {
    let s = build_scenario(Convention::VInner);
    let e = s.ensemble();
    let obs = match observable {
        ObservableArg::Pv1 => s.single_projector(Photon::One, Polarization::V),
        ObservableArg::Ph1 => s.single_projector(Photon::One, Polarization::H),
        ObservableArg::Pv2 => s.single_projector(Photon::Two, Polarization::V),
        ObservableArg::Ph2 => s.single_projector(Photon::Two, Polarization::H),
        ObservableArg::A1 => weighted_polarization(gamma, epsilon)?.tensor_identity_right(2),
        ObservableArg::A2 => weighted_polarization(gamma, epsilon)?.tensor_identity_left(2),
    };
    let est = estimate_single(&e, &obs, sigma, schedule)?;

    let samples: Vec<Value> = est
        .samples
        .iter()
        .map(|smp| {
            json!({
                "error": smp.error,
                "estimate": complex_to_json(smp.estimate),
                "g": smp.g,
            })
        })
        .collect();
    let payload = json!({
        "analytic": complex_to_json(est.analytic),
        "epsilon": epsilon,
        "extrapolated": complex_to_json(est.extrapolated),
        "extrapolation_error": est.extrapolation_error(),
        "fitted_order": est.fitted_order,
        "gamma": gamma,
        "observable": observable.name(),
        "samples": samples,
        "sigma": sigma,
    });

    let mut text = format!(
        "pointer estimate: observable {}, sigma {}, couplings {}\n\n",
        observable.name(),
        sigma,
        joined(schedule)
    );
    for smp in &est.samples {
        let _ = writeln!(
            text,
            "g {:>9}: estimate {}, error {:.3e}",
            smp.g,
            cplx(smp.estimate),
            smp.error
        );
    }
    let _ = writeln!(text, "\nanalytic weak value: {}", cplx(est.analytic));
    let _ = writeln!(text, "extrapolated (g to 0): {}", cplx(est.extrapolated));
    let _ = writeln!(
        text,
        "extrapolation error: {:.3e}",
        est.extrapolation_error()
    );
    match est.fitted_order {
        Some(order) => {
            let _ = writeln!(text, "fitted convergence order: {order:.2}");
        }
        None => {
            let _ = writeln!(
                text,
                "fitted convergence order: saturated (errors at the rounding floor)"
            );
        }
    }

    let mut tsv = tsv_row(&[
        "g".into(),
        "estimate_re".into(),
        "estimate_im".into(),
        "error".into(),
    ]);
    for smp in &est.samples {
        tsv += &tsv_row(&[
            fmt_f64(smp.g),
            fmt_f64(smp.estimate.re),
            fmt_f64(smp.estimate.im),
            fmt_f64(smp.error),
        ]);
    }

    Ok(Rendered {
        report: Report {
            command: "pointer",
            parameters: BTreeMap::from([
                ("epsilon", epsilon.to_string()),
                ("g-list", joined(schedule)),
                ("gamma", gamma.to_string()),
                ("observable", observable.name().to_string()),
                ("sigma", sigma.to_string()),
            ]),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}

pub fn joint(pair: PairArg, sigma: f64, schedule: &[f64]) -> Result<Rendered> {
    let s = build_scenario(Convention::VInner);
    let e = s.ensemble();
    let (p1, p2) = pair.polarizations();
    let est = estimate_joint(&e, &pol_projector(p1), &pol_projector(p2), sigma, schedule)?;

    let samples: Vec<Value> = est
        .samples
        .iter()
        .map(|smp| {
            json!({
                "extracted": smp.extracted,
                "g": smp.g,
                "raw_ratio": smp.raw_ratio,
            })
        })
        .collect();
    let payload = json!({
        "analytic": complex_to_json(est.analytic),
        "extracted": est.extracted,
        "extraction_error": est.extraction_error(),
        "marginal_photon1": complex_to_json(est.marginal_1),
        "marginal_photon2": complex_to_json(est.marginal_2),
        "pair": pair.name(),
        "samples": samples,
        "sigma": sigma,
    });

    let mut text = format!(
        "joint weak value from the two-pointer position correlator: pair {}, sigma {}, couplings {}\n\n",
        pair.name(),
        sigma,
        joined(schedule)
    );
    for smp in &est.samples {
        let _ = writeln!(
            text,
            "g {:>9}: correlator/g^2 {:+.6}, extracted {:+.6}",
            smp.g, smp.raw_ratio, smp.extracted
        );
    }
    let _ = writeln!(
        text,
        "\nextracted Re joint weak value (g to 0): {:+.6}",
        est.extracted
    );
    let _ = writeln!(text, "analytic joint weak value: {}", cplx(est.analytic));
    let _ = writeln!(text, "extraction error: {:.3e}", est.extraction_error());
    let _ = writeln!(
        text,
        "marginals used for the subtraction: photon 1 {}, photon 2 {}",
        cplx(est.marginal_1),
        cplx(est.marginal_2)
    );

    let mut tsv = tsv_row(&["g".into(), "raw_ratio".into(), "extracted".into()]);
    for smp in &est.samples {
        tsv += &tsv_row(&[
            fmt_f64(smp.g),
            fmt_f64(smp.raw_ratio),
            fmt_f64(smp.extracted),
        ]);
    }

    Ok(Rendered {
        report: Report {
            command: "joint",
            parameters: BTreeMap::from([
                ("g-list", joined(schedule)),
                ("pair", pair.name().to_string()),
                ("sigma", sigma.to_string()),
            ]),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}

pub fn strong() -> Result<Rendered> {
    let c = strong_comparison(&build_scenario(Convention::VInner))?;
    let ax = [c.axis[0].letter(), c.axis[1].letter()];

    let payload = json!({
        "axis": ax,
        "g": c.g,
        "max_branch_overlap": c.max_branch_overlap,
        "sigma": c.sigma,
        "strong_conditionals": c.strong_conditionals,
        "strong_postselection_probability": c.strong_postselection_probability,
        "weak_joint": c.weak_joint,
        "weak_postselection_probability": c.weak_postselection_probability,
    });

    let mut text = String::from("strong collapse vs weak table\n\n");
    let _ = writeln!(
        text,
        "{:<8}{:>20}{:>14}",
        "cell", "strong conditional", "weak joint"
    );
    for i in 0..2 {
        for j in 0..2 {
            let _ = writeln!(
                text,
                "{:<8}{:>20.6}{:>14.6}",
                format!("{}{}", ax[i], ax[j]),
                c.strong_conditionals[i][j],
                c.weak_joint[i][j]
            );
        }
    }
    let _ = writeln!(
        text,
        "\npost-selection probability: strong {:.6}, weak {:.6}",
        c.strong_postselection_probability, c.weak_postselection_probability
    );
    let _ = writeln!(
        text,
        "couplings: sigma {}, g {} (neglected branch overlaps below {:.3e})",
        c.sigma, c.g, c.max_branch_overlap
    );

    let mut tsv = tsv_row(&[
        "cell".into(),
        "strong_conditional".into(),
        "weak_joint".into(),
    ]);
    for i in 0..2 {
        for j in 0..2 {
            tsv += &tsv_row(&[
                format!("{}{}", ax[i], ax[j]),
                fmt_f64(c.strong_conditionals[i][j]),
                fmt_f64(c.weak_joint[i][j]),
            ]);
        }
    }

    Ok(Rendered {
        report: Report {
            command: "strong",
            parameters: BTreeMap::new(),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}

pub fn a12(gamma: f64, epsilon: f64) -> Result<Rendered> {
    let s = build_scenario(Convention::VInner);
    let r = a12_analysis(&s, gamma, epsilon)?;

    let payload = json!({
        "components_are_identity_multiples": r.components_are_identity_multiples,
        "consistency_residual": r.consistency_residual,
        "decomposition_residual": r.decomposition_residual,
        "epsilon": r.epsilon,
        "gamma": r.gamma,
        "joint_gap": r.joint_gap,
        "joint_inner_value": complex_to_json(r.joint_inner_value),
        "product_of_components": complex_to_json(r.product_of_components),
        "single_values": [
            complex_to_json(r.single_values[0]),
            complex_to_json(r.single_values[1]),
        ],
        "vector_values": [
            complex_to_json(r.vector_values[0]),
            complex_to_json(r.vector_values[1]),
        ],
    });

    let mut text = format!(
        "vector observable built from the four joint projectors, gamma {gamma}, epsilon {epsilon}\n\n"
    );
    let _ = writeln!(
        text,
        "componentwise it factors into single-photon observables; largest residual {:.3e}",
        r.decomposition_residual
    );
    let _ = writeln!(
        text,
        "component 0 (pointer reads photon 2): {}   single-photon value {}",
        cplx(r.vector_values[0]),
        cplx(r.single_values[0])
    );
    let _ = writeln!(
        text,
        "component 1 (pointer reads photon 1): {}   single-photon value {}",
        cplx(r.vector_values[1]),
        cplx(r.single_values[1])
    );
    let _ = writeln!(
        text,
        "largest componentwise disagreement: {:.3e}",
        r.consistency_residual
    );
    let _ = writeln!(
        text,
        "\njoint inner-inner weak value: {}",
        cplx(r.joint_inner_value)
    );
    let _ = writeln!(
        text,
        "product of component values:  {}",
        cplx(r.product_of_components)
    );
    let _ = writeln!(
        text,
        "gap between joint and componentwise product: {:.6}",
        r.joint_gap
    );
    if r.components_are_identity_multiples {
        let _ = writeln!(
            text,
            "weights are equal: both components are identity multiples and carry no polarization information"
        );
    }

    let mut tsv = tsv_row(&[
        "component".into(),
        "vector_re".into(),
        "vector_im".into(),
        "single_re".into(),
        "single_im".into(),
    ]);
    for k in 0..2 {
        tsv += &tsv_row(&[
            k.to_string(),
            fmt_f64(r.vector_values[k].re),
            fmt_f64(r.vector_values[k].im),
            fmt_f64(r.single_values[k].re),
            fmt_f64(r.single_values[k].im),
        ]);
    }

    Ok(Rendered {
        report: Report {
            command: "a12",
            parameters: BTreeMap::from([
                ("epsilon", epsilon.to_string()),
                ("gamma", gamma.to_string()),
            ]),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}

pub fn narrative(convention: ConventionArg) -> Result<Rendered> {
    let s = build_scenario(convention.convention());
    let n = ifm_narrative(&s)?;

    let payload = json!({
        "joint": n.table.joint,
        "postselection_probability": n.postselection_probability,
        "statements": n.statements,
        "strong_conditionals": n.strong_conditionals,
    });

    let mut text = format!(
        "the interaction-free-measurement story, every number computed ({})\n\n",
        convention.name()
    );
    for statement in &n.statements {
        let _ = writeln!(text, "{statement}\n");
    }
    text.pop();

    let mut tsv = tsv_row(&["index".into(), "statement".into()]);
    for (i, statement) in n.statements.iter().enumerate() {
        tsv += &tsv_row(&[i.to_string(), statement.clone()]);
    }

    Ok(Rendered {
        report: Report {
            command: "narrative",
            parameters: BTreeMap::from([("convention", convention.name().to_string())]),
            payload,
            timestamp: None,
        },
        text,
        tsv,
    })
}
