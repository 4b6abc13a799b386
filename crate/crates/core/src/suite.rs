//! Orchestration of the check suites over a parsed structure.
//!
//! Suites run in dependency order: structure predicates, compatibility,
//! the trace identity, the exact-form contraction, the derived-bracket
//! operator identity, the modular hierarchy, and the class-representative
//! relations. Checks whose hypotheses fail are recorded as skipped with
//! the unmet predicate named, unless hypothesis gating is lifted, in which
//! case they run and carry an "unverified hypotheses" note.

use std::time::Instant;

use crate::expr::RatFunc;
use crate::modular::{
    class_representative_checks, hierarchy_consistency, modular_form_residual,
    modular_vf_defining_residual, mu_independence_residual, recursion_residuals,
    relation_residual, xi_residual, xi_via_definition, Hierarchy,
};
use crate::pn::{
    bm_operator_residual_unchecked, cond_dn_derivation, cond_dp_derivation, cond_function_form,
    concomitant_coord, corollary_residual_unchecked, full_compat_report,
    trace_identity_residual_unchecked,
};
use crate::report::{CheckRecord, CheckReport, CheckStatus, ComputedValues, StructureId, Witness};
use crate::rng::{random_alt, random_poly, rng_for};
use crate::structure::Structure;
use crate::tensor::{DiffForm, Multivector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Structure,
    Compat,
    Eq1,
    Eq2,
    Operator,
    Modular,
    Classes,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Compat => "compat",
            Suite::Eq1 => "eq1",
            Suite::Eq2 => "eq2",
            Suite::Operator => "operator",
            Suite::Modular => "modular",
            Suite::Classes => "classes",
        }
    }

    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        match s {
            "structure" => Some(vec![Suite::Structure]),
            "compat" => Some(vec![Suite::Compat]),
            "eq1" => Some(vec![Suite::Eq1]),
            "eq2" => Some(vec![Suite::Eq2]),
            "operator" => Some(vec![Suite::Operator]),
            "modular" => Some(vec![Suite::Modular]),
            "classes" => Some(vec![Suite::Classes]),
            "all" => Some(vec![
                Suite::Structure,
                Suite::Compat,
                Suite::Eq1,
                Suite::Eq2,
                Suite::Operator,
                Suite::Modular,
                Suite::Classes,
            ]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub trials: usize,
    pub seed: u64,
    /// Override of the structure's kmax.
    pub kmax: Option<usize>,
    /// Lift hypothesis gates; gated checks then run with a note.
    pub unchecked_hypotheses: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::parse("all").unwrap(),
            trials: 8,
            seed: 0,
            kmax: None,
            unchecked_hypotheses: false,
        }
    }
}

struct Recorder {
    checks: Vec<CheckRecord>,
    unchecked: bool,
}

impl Recorder {
    /// Run `body` when `gate` holds (or gating is lifted); record status.
    /// `body` returns a pass flag and an optional witness.
    fn run(
        &mut self,
        suite: Suite,
        name: &str,
        gate: Result<(), String>,
        body: impl FnOnce() -> (bool, Option<Witness>),
    ) {
        let start = Instant::now();
        match gate {
            Err(reason) if !self.unchecked => {
                self.checks.push(CheckRecord {
                    name: name.to_string(),
                    suite: suite.name().to_string(),
                    status: CheckStatus::Skipped,
                    witness: None,
                    skip_reason: Some(reason),
                    note: None,
                    elapsed_ms: start.elapsed().as_millis() as u64,
                });
            }
            gate_result => {
                let note = match gate_result {
                    Err(_) => Some("unverified hypotheses".to_string()),
                    Ok(()) => None,
                };
                let (ok, witness) = body();
                self.checks.push(CheckRecord {
                    name: name.to_string(),
                    suite: suite.name().to_string(),
                    status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    witness,
                    skip_reason: None,
                    note,
                    elapsed_ms: start.elapsed().as_millis() as u64,
                });
            }
        }
    }
}

fn form_witness(label: &str, r: &DiffForm) -> Option<Witness> {
    r.first_component().map(|(idx, v)| Witness {
        location: format!("{label} component {idx:?}"),
        expr: v.to_expr_string(),
    })
}

fn mv_witness(label: &str, r: &Multivector) -> Option<Witness> {
    r.first_component().map(|(idx, v)| Witness {
        location: format!("{label} component {idx:?}"),
        expr: v.to_expr_string(),
    })
}

fn scalar_witness(label: &str, r: &RatFunc) -> Option<Witness> {
    if r.is_zero() {
        None
    } else {
        Some(Witness { location: label.to_string(), expr: r.to_expr_string() })
    }
}

/// Run the selected suites over a structure and assemble the report.
pub fn run_structure(s: &Structure, cfg: &SuiteConfig) -> CheckReport {
    let kmax = cfg.kmax.unwrap_or(s.kmax).max(1);
    let trials = cfg.trials.max(1);
    let seed = cfg.seed;
    let p = &s.p;
    let n = &s.n;
    let vol = &s.volume;
    let chart = &s.chart;
    let dim = chart.dim();

    // Predicates computed once and shared by every gate.
    let compat_report = full_compat_report(p, n, trials, seed);
    let admissible = compat_report.admissible;
    let poisson = compat_report.poisson_p;
    let nijenhuis = compat_report.nijenhuis_n;
    let compatible = compat_report.compatible();

    let gate_ok = || Ok(());
    let gate = |preds: &[(&str, bool)]| -> Result<(), String> {
        let missing: Vec<&str> =
            preds.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(missing.join(", "))
        }
    };

    let mut rec = Recorder { checks: Vec::new(), unchecked: cfg.unchecked_hypotheses };

    let hierarchy = if admissible {
        Hierarchy::build(p, n, kmax, vol).ok()
    } else {
        None
    };

    for &suite in &cfg.suites {
        match suite {
            Suite::Structure => {
                rec.run(suite, "admissible", gate_ok(), || {
                    let w = compat_report
                        .witnesses
                        .iter()
                        .find(|(k, _)| k == "admissible")
                        .map(|(_, loc)| Witness { location: loc.clone(), expr: String::new() });
                    (admissible, w)
                });
                rec.run(suite, "poisson", gate_ok(), || {
                    let r = crate::calculus::schouten(p, p);
                    (poisson, mv_witness("[P,P]", &r))
                });
                rec.run(suite, "nijenhuis", gate_ok(), || {
                    let t = crate::calculus::nijenhuis_torsion(n);
                    let w = t.first_nonzero().map(|((i, j, k), v)| Witness {
                        location: format!("T^{i}_({j},{k})"),
                        expr: v.to_expr_string(),
                    });
                    (nijenhuis, w)
                });
            }
            Suite::Compat => {
                rec.run(suite, "concomitant-zero", gate_ok(), || {
                    let conc = concomitant_coord(p, n);
                    let w = conc.first_nonzero().map(|((k, j, m), v)| Witness {
                        location: format!("C^({k},{j})_({m})"),
                        expr: v.to_expr_string(),
                    });
                    (conc.is_zero(), w)
                });
                rec.run(suite, "compatible", gate_ok(), || {
                    let w = compat_report
                        .witnesses
                        .first()
                        .map(|(k, loc)| Witness { location: k.clone(), expr: loc.clone() });
                    (compatible, w)
                });
                let adm_gate = || gate(&[("admissible", admissible)]);
                rec.run(suite, "dn-derivation", adm_gate(), || {
                    match cond_dn_derivation(p, n, trials, seed) {
                        Ok(out) => {
                            let w = out.witness.map(|cw| Witness {
                                location: format!("{:?} {}", cw.inputs, cw.component),
                                expr: cw.residual,
                            });
                            (out.holds, w)
                        }
                        Err(e) => (false, Some(Witness { location: "gate".into(), expr: e.to_string() })),
                    }
                });
                rec.run(suite, "dp-derivation", adm_gate(), || {
                    match cond_dp_derivation(p, n, trials, seed) {
                        Ok(out) => {
                            let w = out.witness.map(|cw| Witness {
                                location: format!("{:?} {}", cw.inputs, cw.component),
                                expr: cw.residual,
                            });
                            (out.holds, w)
                        }
                        Err(e) => (false, Some(Witness { location: "gate".into(), expr: e.to_string() })),
                    }
                });
                rec.run(suite, "function-form", adm_gate(), || {
                    match cond_function_form(p, n, trials, seed) {
                        Ok(out) => {
                            let w = out.witness.map(|cw| Witness {
                                location: format!("{:?} {}", cw.inputs, cw.component),
                                expr: cw.residual,
                            });
                            (out.holds, w)
                        }
                        Err(e) => (false, Some(Witness { location: "gate".into(), expr: e.to_string() })),
                    }
                });
                rec.run(
                    suite,
                    "condition-agreement",
                    gate(&[
                        ("admissible", admissible),
                        ("poisson", poisson),
                        ("nijenhuis", nijenhuis),
                    ]),
                    || match compat_report.conditions_agree() {
                        Some(ok) => (ok, None),
                        None => (false, Some(Witness {
                            location: "conditions not evaluated".into(),
                            expr: String::new(),
                        })),
                    },
                );
            }
            Suite::Eq1 => {
                rec.run(
                    suite,
                    "trace-identity",
                    gate(&[
                        ("admissible", admissible),
                        ("poisson", poisson),
                        ("nijenhuis", nijenhuis),
                    ]),
                    || {
                        let mut rng = rng_for(seed, "suite-eq1");
                        for t in 0..trials {
                            let alpha: DiffForm = random_alt(chart, &mut rng, 1, 2);
                            let r = trace_identity_residual_unchecked(p, n, &alpha);
                            if !r.is_zero() {
                                return (false, scalar_witness(&format!("trial {t}"), &r));
                            }
                        }
                        (true, None)
                    },
                );
            }
            Suite::Eq2 => {
                rec.run(suite, "exact-form-contraction", gate(&[("compatible", compatible)]), || {
                    let mut rng = rng_for(seed, "suite-eq2");
                    for t in 0..trials {
                        let f = random_poly(chart, &mut rng, 2);
                        let r = corollary_residual_unchecked(p, n, &f);
                        if !r.is_zero() {
                            return (
                                false,
                                Some(Witness {
                                    location: format!("trial {t}, f = {}", f.to_expr_string()),
                                    expr: r.to_expr_string(),
                                }),
                            );
                        }
                    }
                    (true, None)
                });
            }
            Suite::Operator => {
                rec.run(
                    suite,
                    "derived-bracket-interior",
                    gate(&[("compatible", compatible)]),
                    || {
                        let mut rng = rng_for(seed, "suite-operator");
                        let per_degree = trials.div_ceil(2).max(2);
                        for deg in 0..=dim {
                            for t in 0..per_degree {
                                let w: DiffForm = random_alt(chart, &mut rng, deg, 2);
                                let r = bm_operator_residual_unchecked(p, n, &w);
                                if !r.is_zero() {
                                    return (
                                        false,
                                        form_witness(&format!("degree {deg} trial {t}"), &r),
                                    );
                                }
                            }
                        }
                        (true, None)
                    },
                );
            }
            Suite::Modular => {
                let compat_gate = || gate(&[("compatible", compatible)]);
                rec.run(suite, "modular-defining", compat_gate(), || {
                    let Some(h) = &hierarchy else {
                        return (false, None);
                    };
                    let mut rng = rng_for(seed, "suite-eq3");
                    let per_k = trials.div_ceil(2).max(2);
                    for (k, q) in h.bivectors.iter().enumerate() {
                        for t in 0..per_k {
                            let f = random_poly(chart, &mut rng, 2);
                            let r = modular_vf_defining_residual(q, vol, &f);
                            if !r.is_zero() {
                                return (false, scalar_witness(&format!("P_{k} trial {t}"), &r));
                            }
                        }
                    }
                    (true, None)
                });
                rec.run(suite, "modular-oneform", compat_gate(), || {
                    let Some(h) = &hierarchy else {
                        return (false, None);
                    };
                    let mut rng = rng_for(seed, "suite-eq4");
                    let per_k = trials.div_ceil(2).max(2);
                    for (k, q) in h.bivectors.iter().enumerate() {
                        for t in 0..per_k {
                            let alpha: DiffForm = random_alt(chart, &mut rng, 1, 2);
                            let r = modular_form_residual(q, vol, &alpha);
                            if !r.is_zero() {
                                return (false, scalar_witness(&format!("P_{k} trial {t}"), &r));
                            }
                        }
                    }
                    (true, None)
                });
                rec.run(suite, "mu-independence", compat_gate(), || {
                    let factor = {
                        let x1 = RatFunc::coord(chart, 1).expect("dim >= 1");
                        RatFunc::one(chart).add(&x1.mul(&x1))
                    };
                    let vol2 = match vol.scaled(&factor) {
                        Ok(v) => v,
                        Err(e) => {
                            return (false, Some(Witness {
                                location: "second density".into(),
                                expr: e.to_string(),
                            }))
                        }
                    };
                    for k in 1..=kmax {
                        match mu_independence_residual(p, n, k, vol, &vol2) {
                            Ok(r) if r.is_zero() => {}
                            Ok(r) => return (false, mv_witness(&format!("k = {k}"), &r)),
                            Err(e) => {
                                return (false, Some(Witness {
                                    location: format!("k = {k}"),
                                    expr: e.to_string(),
                                }))
                            }
                        }
                    }
                    (true, None)
                });
                rec.run(suite, "fundamental-relation", compat_gate(), || {
                    for k in 1..=kmax {
                        match relation_residual(p, n, k, vol) {
                            Ok(r) if r.is_zero() => {}
                            Ok(r) => return (false, mv_witness(&format!("k = {k}"), &r)),
                            Err(e) => {
                                return (false, Some(Witness {
                                    location: format!("k = {k}"),
                                    expr: e.to_string(),
                                }))
                            }
                        }
                    }
                    (true, None)
                });
                let recursion = if compatible || cfg.unchecked_hypotheses {
                    recursion_residuals(p, n, kmax, vol).ok()
                } else {
                    None
                };
                rec.run(suite, "modular-recursion", compat_gate(), || match &recursion {
                    Some(r) => match r.step.iter().position(|v| !v.is_zero()) {
                        None => (true, None),
                        Some(i) => (false, mv_witness(&format!("k = {}", i + 2), &r.step[i])),
                    },
                    None => (false, None),
                });
                rec.run(suite, "modular-power-recursion", compat_gate(), || match &recursion {
                    Some(r) => match r.power.iter().position(|v| !v.is_zero()) {
                        None => (true, None),
                        Some(i) => (false, mv_witness(&format!("k = {}", i + 1), &r.power[i])),
                    },
                    None => (false, None),
                });
                rec.run(suite, "modular-composite-relation", compat_gate(), || match &recursion {
                    Some(r) => match r.composite.iter().position(|v| !v.is_zero()) {
                        None => (true, None),
                        Some(i) => (false, mv_witness(&format!("k = {}", i + 1), &r.composite[i])),
                    },
                    None => (false, None),
                });
                rec.run(suite, "cocycle", compat_gate(), || {
                    let Some(h) = &hierarchy else {
                        return (false, None);
                    };
                    for k in 1..=kmax {
                        let r = crate::calculus::schouten(&h.bivectors[k], &h.pn_modular[k - 1]);
                        if !r.is_zero() {
                            return (false, mv_witness(&format!("k = {k}"), &r));
                        }
                    }
                    (true, None)
                });
                rec.run(suite, "hierarchy-consistency", compat_gate(), || {
                    match hierarchy_consistency(p, n, kmax, vol) {
                        Err(e) => {
                            (false, Some(Witness { location: "gate".into(), expr: e.to_string() }))
                        }
                        Ok(checks) => {
                            for (k, r) in checks.poisson.iter().enumerate() {
                                if !r.is_zero() {
                                    return (false, mv_witness(&format!("[P_{k}, P_{k}]"), r));
                                }
                            }
                            for ((j, k), r) in &checks.commuting {
                                if !r.is_zero() {
                                    return (false, mv_witness(&format!("[P_{j}, P_{k}]"), r));
                                }
                            }
                            for ((l, j, k), r) in &checks.involution {
                                if !r.is_zero() {
                                    return (
                                        false,
                                        scalar_witness(&format!("{{I_{j}, I_{k}}}_(P_{l})"), r),
                                    );
                                }
                            }
                            (true, None)
                        }
                    }
                });
                let nij_gate = || gate(&[("nijenhuis", nijenhuis)]);
                rec.run(suite, "deformed-modular-form", nij_gate(), || {
                    let r = xi_residual(n, vol);
                    (r.is_zero(), form_witness("xi - d Tr N", &r))
                });
                rec.run(suite, "deformed-modular-form-density", nij_gate(), || {
                    let factor = {
                        let x1 = RatFunc::coord(chart, 1).expect("dim >= 1");
                        RatFunc::one(chart).add(&x1.mul(&x1))
                    };
                    let vol2 = match vol.scaled(&factor) {
                        Ok(v) => v,
                        Err(e) => {
                            return (false, Some(Witness {
                                location: "second density".into(),
                                expr: e.to_string(),
                            }))
                        }
                    };
                    let r = xi_via_definition(n, vol).sub(&xi_via_definition(n, &vol2));
                    (r.is_zero(), form_witness("density difference", &r))
                });
            }
            Suite::Classes => {
                rec.run(suite, "class-relations", gate(&[("compatible", compatible)]), || {
                    match class_representative_checks(p, n, kmax, vol) {
                        Err(e) => {
                            (false, Some(Witness { location: "gate".into(), expr: e.to_string() }))
                        }
                        Ok(checks) => {
                            if !checks.morphism_sum.is_zero() {
                                return (false, mv_witness("morphism-sum", &checks.morphism_sum));
                            }
                            if !checks.transpose.is_zero() {
                                return (false, mv_witness("transpose", &checks.transpose));
                            }
                            for (i, r) in checks.trace_power.iter().enumerate() {
                                if !r.is_zero() {
                                    return (
                                        false,
                                        form_witness(&format!("trace-power k = {}", i + 2), r),
                                    );
                                }
                            }
                            for (i, r) in checks.modular_power.iter().enumerate() {
                                if !r.is_zero() {
                                    return (
                                        false,
                                        mv_witness(&format!("modular-power k = {}", i + 1), r),
                                    );
                                }
                            }
                            for (i, r) in checks.top_power.iter().enumerate() {
                                if !r.is_zero() {
                                    return (
                                        false,
                                        mv_witness(&format!("top-power k = {}", i + 1), r),
                                    );
                                }
                            }
                            for (i, r) in checks.telescoping.iter().enumerate() {
                                if !r.is_zero() {
                                    return (
                                        false,
                                        mv_witness(&format!("telescoping k = {}", i + 1), r),
                                    );
                                }
                            }
                            (true, None)
                        }
                    }
                });
            }
        }
    }

    // Computed invariants.
    let mut computed = ComputedValues::default();
    for k in 1..=kmax {
        let nk = n.power(k);
        let tr = nk.trace();
        computed.trace_powers.push(tr.to_expr_string());
        computed
            .fundamental_functions
            .push(tr.scale(&crate::expr::Rational::new(1.into(), (k as i64).into())).to_expr_string());
    }
    if let Some(h) = &hierarchy {
        for x in &h.pn_modular {
            computed.modular_fields.push(x.tuple_string());
        }
    }
    computed.xi_form = Some(xi_via_definition(n, vol).tuple_string());

    let mut report = CheckReport {
        structure: StructureId { name: s.name.clone(), hash: s.hash.clone() },
        checks: rec.checks,
        computed,
        summary: Default::default(),
    };
    report.recompute_summary();
    report
}
