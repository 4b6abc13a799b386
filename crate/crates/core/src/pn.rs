//! Admissibility and compatibility of a pair (P, N).
//!
//! A pair is *admissible* when NP is skew-symmetric (equivalently NP = PN
//! under the index conventions of [`crate::tensor`]), and *compatible* when
//! in addition the concomitant C(P, N) vanishes identically. The
//! concomitant is computed by two independent routes: the coordinate
//! formula
//!
//! ```text
//! C^{kj}_m = P^{lj} d_l N^k_m + P^{kl} d_l N^j_m - N^l_m d_l P^{kj}
//!          + N^j_l d_m P^{kl} - P^{lj} d_m N^k_l
//! ```
//!
//! and the bracket definition
//!
//! ```text
//! C(P,N)(a, b) = [a, b]_{NP} - ([N*a, b]_P + [a, N*b]_P - N*[a, b]_P)
//! ```
//!
//! paired against the coordinate components by `C(a,b)_m = C^{kj}_m a_j b_k`
//! (see `docs/conventions.md` for the calibration of this pairing).
//!
//! Three further identities of the pair are exposed as exact residuals: the
//! trace identity (which holds on every admissible Poisson-Nijenhuis pair,
//! compatible or not), its contraction on exact 1-forms, and the statement
//! that the derived-bracket operator acts as the interior product of
//! `1/2 P d Tr N` on compatible pairs.

use std::sync::Arc;

use thiserror::Error;

use crate::calculus::{
    derived_bracket_op, d_n_apply, ext_d, int_biv, int_vec, koszul_bracket, lie_deriv_form,
    nijenhuis_torsion, schouten,
};
use crate::calculus::schouten::{deformed_schouten, d_p};
use crate::chart::{same_chart, Chart};
use crate::expr::RatFunc;
use crate::rng::{random_poly, rng_for};
use crate::tensor::{bivector_sharp, pairing, DiffForm, EndoField, Multivector};

#[derive(Debug, Error, PartialEq)]
pub enum PnError {
    #[error("the pair (P, N) is not admissible: NP is not skew-symmetric")]
    NotAdmissible,
    #[error("the pair (P, N) is not compatible")]
    NotCompatible,
    #[error("precondition failed: {0}")]
    PreconditionFailed(&'static str),
    #[error("values live on different charts")]
    ChartMismatch,
}

/// True iff the Schouten square [P, P] vanishes identically.
pub fn is_poisson(p: &Multivector) -> bool {
    schouten(p, p).is_zero()
}

/// True iff the Nijenhuis torsion of N vanishes identically.
pub fn is_nijenhuis(n: &EndoField) -> bool {
    nijenhuis_torsion(n).is_zero()
}

/// True iff NP is skew-symmetric (equivalently NP = PN).
pub fn is_admissible(p: &Multivector, n: &EndoField) -> bool {
    n.compose_bivector(p).is_skew()
}

/// NP as a bivector; errors when the pair is not admissible.
pub fn np_bivector(p: &Multivector, n: &EndoField) -> Result<Multivector, PnError> {
    n.compose_bivector(p).into_bivector().map_err(|_| PnError::NotAdmissible)
}

/// The concomitant C(P, N): two upper indices (k, j), one lower (m).
#[derive(Debug, Clone)]
pub struct Concomitant {
    chart: Arc<Chart>,
    // lexicographically ordered nonzero components (k, j, m)
    comps: Vec<((usize, usize, usize), RatFunc)>,
}

impl Concomitant {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, k: usize, j: usize, m: usize) -> RatFunc {
        for ((ck, cj, cm), v) in &self.comps {
            if *ck == k && *cj == j && *cm == m {
                return v.clone();
            }
        }
        RatFunc::zero(&self.chart)
    }

    /// Lexicographically first nonzero component, for failure witnesses.
    pub fn first_nonzero(&self) -> Option<((usize, usize, usize), &RatFunc)> {
        self.comps.first().map(|(k, v)| (*k, v))
    }

    /// Partial trace `T^j = sum_k C^{kj}_k`, as a dense vector over j.
    pub fn partial_trace(&self) -> Vec<RatFunc> {
        let n = self.chart.dim();
        let mut out = vec![RatFunc::zero(&self.chart); n];
        for ((k, j, m), v) in &self.comps {
            if k == m {
                out[j - 1] = out[j - 1].add(v);
            }
        }
        out
    }

    /// Contraction with a pair of 1-forms under the calibrated pairing
    /// `C(a, b)_m = sum_{k,j} C^{kj}_m a_j b_k`.
    pub fn pair(&self, alpha: &DiffForm, beta: &DiffForm) -> DiffForm {
        let ac = alpha.vector_components();
        let bc = beta.vector_components();
        let n = self.chart.dim();
        let mut comps = vec![RatFunc::zero(&self.chart); n];
        for ((k, j, m), v) in &self.comps {
            let w = v.mul(&ac[j - 1]).mul(&bc[k - 1]);
            if !w.is_zero() {
                comps[m - 1] = comps[m - 1].add(&w);
            }
        }
        DiffForm::from_vector(&self.chart, comps)
    }
}

/// The concomitant from its coordinate formula (five terms, summed over l).
pub fn concomitant_coord(p: &Multivector, n: &EndoField) -> Concomitant {
    assert!(same_chart(p.chart(), n.chart()), "chart mismatch");
    let chart = p.chart().clone();
    let dim = chart.dim();
    let mut comps = Vec::new();
    for k in 1..=dim {
        for j in 1..=dim {
            for m in 1..=dim {
                let mut acc = RatFunc::zero(&chart);
                for l in 1..=dim {
                    let plj = p.get(&[l as u8, j as u8]);
                    if !plj.is_zero() {
                        acc = acc.add(&plj.mul(&n.get(k, m).partial(l).expect("in range")));
                        acc = acc.sub(&plj.mul(&n.get(k, l).partial(m).expect("in range")));
                    }
                    let pkl = p.get(&[k as u8, l as u8]);
                    if !pkl.is_zero() {
                        acc = acc.add(&pkl.mul(&n.get(j, m).partial(l).expect("in range")));
                        acc = acc.add(&n.get(j, l).mul(&pkl.partial(m).expect("in range")));
                    }
                    let nlm = n.get(l, m);
                    if !nlm.is_zero() {
                        acc = acc.sub(&nlm.mul(
                            &p.get(&[k as u8, j as u8]).partial(l).expect("in range"),
                        ));
                    }
                }
                if !acc.is_zero() {
                    comps.push(((k, j, m), acc));
                }
            }
        }
    }
    Concomitant { chart, comps }
}

/// The concomitant evaluated on a pair of 1-forms from its bracket
/// definition. Requires admissibility so that `[ , ]_{NP}` is a Koszul
/// bracket of an honest bivector.
pub fn concomitant_abstract(
    p: &Multivector,
    n: &EndoField,
    alpha: &DiffForm,
    beta: &DiffForm,
) -> Result<DiffForm, PnError> {
    let np = np_bivector(p, n)?;
    let na = n.transpose_apply(alpha);
    let nb = n.transpose_apply(beta);
    let out = koszul_bracket(&np, alpha, beta)
        .sub(&koszul_bracket(p, &na, beta))
        .sub(&koszul_bracket(p, alpha, &nb))
        .add(&n.transpose_apply(&koszul_bracket(p, alpha, beta)));
    Ok(out)
}

/// Compatibility: admissible and identically vanishing concomitant.
pub fn is_compatible(p: &Multivector, n: &EndoField) -> bool {
    is_admissible(p, n) && concomitant_coord(p, n).is_zero()
}

/// Outcome of a randomized condition check.
#[derive(Debug, Clone)]
pub struct CondOutcome {
    pub holds: bool,
    /// For failures: the witness inputs and the first nonzero residual
    /// component, as canonical expression strings.
    pub witness: Option<CondWitness>,
}

#[derive(Debug, Clone)]
pub struct CondWitness {
    pub inputs: Vec<(String, String)>,
    pub component: String,
    pub residual: String,
}

fn residual_witness(inputs: Vec<(String, String)>, r: &DiffForm) -> Option<CondWitness> {
    r.first_component().map(|(idx, v)| CondWitness {
        inputs,
        component: format!("component {:?}", idx),
        residual: v.to_expr_string(),
    })
}

/// Function-level instance of "d_N is a derivation of the Koszul bracket":
/// for random polynomial pairs (f, g) the residual
///
/// ```text
/// d {f,g}_{NP} - [d_N f, dg]_P - [df, d_N g]_P + d_N {f,g}_P
/// ```
///
/// must vanish identically. Equivalent to `C(P,N)(df, dg) = 0`; computed
/// through the Koszul/Lie-derivative route rather than the coordinate
/// formula.
pub fn cond_dn_derivation(
    p: &Multivector,
    n: &EndoField,
    trials: usize,
    seed: u64,
) -> Result<CondOutcome, PnError> {
    let np = np_bivector(p, n)?;
    let chart = p.chart().clone();
    let mut rng = rng_for(seed, "cond-dn-derivation");
    for _ in 0..trials {
        let f = random_poly(&chart, &mut rng, 2);
        let g = random_poly(&chart, &mut rng, 2);
        let df = ext_d(&DiffForm::scalar(f.clone()));
        let dg = ext_d(&DiffForm::scalar(g.clone()));
        let fg_np = crate::calculus::bivector_eval(&np, &df, &dg);
        let fg_p = crate::calculus::bivector_eval(p, &df, &dg);
        let dnf = n.transpose_apply(&df);
        let dng = n.transpose_apply(&dg);
        let residual = ext_d(&DiffForm::scalar(fg_np))
            .sub(&koszul_bracket(p, &dnf, &dg))
            .sub(&koszul_bracket(p, &df, &dng))
            .add(&n.transpose_apply(&ext_d(&DiffForm::scalar(fg_p))));
        if !residual.is_zero() {
            let inputs = vec![
                ("f".to_string(), f.to_expr_string()),
                ("g".to_string(), g.to_expr_string()),
            ];
            return Ok(CondOutcome { holds: false, witness: residual_witness(inputs, &residual) });
        }
    }
    Ok(CondOutcome { holds: true, witness: None })
}

/// "d_P = [P, .] is a derivation of the deformed bracket": for random
/// polynomial vector fields X, Y the residual
///
/// ```text
/// d_P [X,Y]_N - [d_P X, Y]_N - [X, d_P Y]_N
/// ```
///
/// must vanish identically (the deformed-Schouten extension handles the
/// bivector arguments d_P X and d_P Y).
pub fn cond_dp_derivation(
    p: &Multivector,
    n: &EndoField,
    trials: usize,
    seed: u64,
) -> Result<CondOutcome, PnError> {
    if !is_admissible(p, n) {
        return Err(PnError::NotAdmissible);
    }
    let chart = p.chart().clone();
    let mut rng = rng_for(seed, "cond-dp-derivation");
    for _ in 0..trials {
        let x: Multivector = crate::rng::random_alt(&chart, &mut rng, 1, 1);
        let y: Multivector = crate::rng::random_alt(&chart, &mut rng, 1, 1);
        let xy_n = deformed_schouten(n, &x, &y);
        let residual = d_p(p, &xy_n)
            .sub(&deformed_schouten(n, &d_p(p, &x), &y))
            .sub(&deformed_schouten(n, &x, &d_p(p, &y)));
        if !residual.is_zero() {
            let inputs = vec![
                ("X".to_string(), x.tuple_string()),
                ("Y".to_string(), y.tuple_string()),
            ];
            let witness = residual.first_component().map(|(idx, v)| CondWitness {
                inputs,
                component: format!("component {:?}", idx),
                residual: v.to_expr_string(),
            });
            return Ok(CondOutcome { holds: false, witness });
        }
    }
    Ok(CondOutcome { holds: true, witness: None })
}

/// The function-form condition: for random polynomial pairs (f, g),
///
/// ```text
/// d {f,g}_{NP} = L_{H^P_f} d_N g - L_{H^P_g} d_N f - d_N (H^P_f(g))
/// ```
pub fn cond_function_form(
    p: &Multivector,
    n: &EndoField,
    trials: usize,
    seed: u64,
) -> Result<CondOutcome, PnError> {
    let np = np_bivector(p, n)?;
    let chart = p.chart().clone();
    let mut rng = rng_for(seed, "cond-function-form");
    for _ in 0..trials {
        let f = random_poly(&chart, &mut rng, 2);
        let g = random_poly(&chart, &mut rng, 2);
        let df = ext_d(&DiffForm::scalar(f.clone()));
        let dg = ext_d(&DiffForm::scalar(g.clone()));
        let hf = bivector_sharp(p, &df).expect("chart");
        let hg = bivector_sharp(p, &dg).expect("chart");
        let fg_np = crate::calculus::bivector_eval(&np, &df, &dg);
        let hf_g = pairing(&dg, &hf).expect("pairing");
        let dn_f = d_n_apply(n, &DiffForm::scalar(f.clone()));
        let dn_g = d_n_apply(n, &DiffForm::scalar(g.clone()));
        let residual = ext_d(&DiffForm::scalar(fg_np))
            .sub(&lie_deriv_form(&hf, &dn_g))
            .add(&lie_deriv_form(&hg, &dn_f))
            .add(&d_n_apply(n, &DiffForm::scalar(hf_g)));
        if !residual.is_zero() {
            let inputs = vec![
                ("f".to_string(), f.to_expr_string()),
                ("g".to_string(), g.to_expr_string()),
            ];
            return Ok(CondOutcome { holds: false, witness: residual_witness(inputs, &residual) });
        }
    }
    Ok(CondOutcome { holds: true, witness: None })
}

/// Structure predicates and the four equivalent compatibility conditions.
#[derive(Debug, Clone)]
pub struct CompatReport {
    pub admissible: bool,
    pub poisson_p: bool,
    pub nijenhuis_n: bool,
    pub concomitant_zero: bool,
    pub cond_dn_derivation: Option<bool>,
    pub cond_dp_derivation: Option<bool>,
    pub cond_function_form: Option<bool>,
    /// (identity name, residual location) for each failed condition.
    pub witnesses: Vec<(String, String)>,
}

impl CompatReport {
    pub fn compatible(&self) -> bool {
        self.admissible && self.concomitant_zero
    }

    /// True when all four condition flags were evaluated and agree.
    pub fn conditions_agree(&self) -> Option<bool> {
        match (self.cond_dn_derivation, self.cond_dp_derivation, self.cond_function_form) {
            (Some(a), Some(b), Some(c)) => Some(
                a == self.concomitant_zero && b == self.concomitant_zero && c == self.concomitant_zero,
            ),
            _ => None,
        }
    }
}

/// Evaluate all structure predicates and the condition checks. The three
/// randomized conditions are only run on admissible pairs (the NP bracket
/// does not exist otherwise).
pub fn full_compat_report(
    p: &Multivector,
    n: &EndoField,
    trials: usize,
    seed: u64,
) -> CompatReport {
    let admissible = is_admissible(p, n);
    let poisson_p = is_poisson(p);
    let nijenhuis_n = is_nijenhuis(n);
    let conc = concomitant_coord(p, n);
    let concomitant_zero = conc.is_zero();
    let mut witnesses = Vec::new();
    if !admissible {
        let t = n.compose_bivector(p);
        'outer: for i in 1..=p.chart().dim() {
            for j in i..=p.chart().dim() {
                let s = t.get(i, j).add(t.get(j, i));
                if !s.is_zero() {
                    witnesses.push((
                        "admissible".to_string(),
                        format!("(NP)^({i},{j}) + (NP)^({j},{i}) = {}", s.to_expr_string()),
                    ));
                    break 'outer;
                }
            }
        }
    }
    if let Some(((k, j, m), v)) = conc.first_nonzero() {
        witnesses.push((
            "concomitant".to_string(),
            format!("C^({k},{j})_({m}) = {}", v.to_expr_string()),
        ));
    }
    let (mut dn, mut dp, mut ff) = (None, None, None);
    if admissible {
        if let Ok(out) = cond_dn_derivation(p, n, trials, seed) {
            if let Some(w) = &out.witness {
                witnesses.push((
                    "dn-derivation".to_string(),
                    format!("{:?} -> {} = {}", w.inputs, w.component, w.residual),
                ));
            }
            dn = Some(out.holds);
        }
        if let Ok(out) = cond_dp_derivation(p, n, trials, seed) {
            if let Some(w) = &out.witness {
                witnesses.push((
                    "dp-derivation".to_string(),
                    format!("{:?} -> {} = {}", w.inputs, w.component, w.residual),
                ));
            }
            dp = Some(out.holds);
        }
        if let Ok(out) = cond_function_form(p, n, trials, seed) {
            if let Some(w) = &out.witness {
                witnesses.push((
                    "function-form".to_string(),
                    format!("{:?} -> {} = {}", w.inputs, w.component, w.residual),
                ));
            }
            ff = Some(out.holds);
        }
    }
    CompatReport {
        admissible,
        poisson_p,
        nijenhuis_n,
        concomitant_zero,
        cond_dn_derivation: dn,
        cond_dp_derivation: dp,
        cond_function_form: ff,
        witnesses,
    }
}

fn require(pred: bool, name: &'static str) -> Result<(), PnError> {
    if pred {
        Ok(())
    } else {
        Err(PnError::PreconditionFailed(name))
    }
}

/// Residual of the trace identity, which vanishes identically on every
/// admissible Poisson-Nijenhuis pair (compatibility not required):
///
/// ```text
/// 1/2 sum_{k,j} C^{kj}_k a_j - 1/2 <P d Tr N, a> + D(a)
/// ```
///
/// where D is the derived-bracket operator of [`derived_bracket_op`].
pub fn trace_identity_residual(
    p: &Multivector,
    n: &EndoField,
    alpha: &DiffForm,
) -> Result<RatFunc, PnError> {
    require(is_admissible(p, n), "admissible")?;
    require(is_poisson(p), "poisson")?;
    require(is_nijenhuis(n), "nijenhuis")?;
    Ok(trace_identity_residual_unchecked(p, n, alpha))
}

/// The trace-identity residual without hypothesis gating.
pub fn trace_identity_residual_unchecked(
    p: &Multivector,
    n: &EndoField,
    alpha: &DiffForm,
) -> RatFunc {
    let chart = p.chart().clone();
    let half = RatFunc::from_rational(&chart, num::BigRational::new(1.into(), 2.into()));
    let conc = concomitant_coord(p, n);
    let trace = conc.partial_trace();
    let ac = alpha.vector_components();
    let mut lhs = RatFunc::zero(&chart);
    for (t, a) in trace.iter().zip(ac.iter()) {
        lhs = lhs.add(&t.mul(a));
    }
    let pd_tr = bivector_sharp(p, &ext_d(&DiffForm::scalar(n.trace()))).expect("chart");
    let mid = pairing(alpha, &pd_tr).expect("pairing");
    let op = derived_bracket_op(n, p).expect("admissible");
    let tail = op.apply(alpha).scalar_value();
    lhs.mul(&half).sub(&mid.mul(&half)).add(&tail)
}

/// Residual of the exact-form contraction (compatible pairs):
/// `i_P(d_N df) + 1/2 H^P_{Tr N}(f)`.
pub fn corollary_residual(
    p: &Multivector,
    n: &EndoField,
    f: &RatFunc,
) -> Result<RatFunc, PnError> {
    if !is_compatible(p, n) {
        return Err(PnError::NotCompatible);
    }
    Ok(corollary_residual_unchecked(p, n, f))
}

pub fn corollary_residual_unchecked(p: &Multivector, n: &EndoField, f: &RatFunc) -> RatFunc {
    let chart = p.chart().clone();
    let half = RatFunc::from_rational(&chart, num::BigRational::new(1.into(), 2.into()));
    let df = ext_d(&DiffForm::scalar(f.clone()));
    let lhs = int_biv(p, &d_n_apply(n, &df)).scalar_value();
    let h_tr = bivector_sharp(p, &ext_d(&DiffForm::scalar(n.trace()))).expect("chart");
    let rhs = pairing(&df, &h_tr).expect("pairing");
    lhs.add(&rhs.mul(&half))
}

/// Residual of the derived-bracket interior-product identity on a form of
/// any degree (compatible pairs):
/// `D(w) - i_V w` with `V = 1/2 P d Tr N`.
pub fn bm_operator_residual(
    p: &Multivector,
    n: &EndoField,
    omega: &DiffForm,
) -> Result<DiffForm, PnError> {
    if !is_compatible(p, n) {
        return Err(PnError::NotCompatible);
    }
    Ok(bm_operator_residual_unchecked(p, n, omega))
}

pub fn bm_operator_residual_unchecked(
    p: &Multivector,
    n: &EndoField,
    omega: &DiffForm,
) -> DiffForm {
    let chart = p.chart().clone();
    let half = RatFunc::from_rational(&chart, num::BigRational::new(1.into(), 2.into()));
    let op = derived_bracket_op(n, p).expect("admissible");
    let v = bivector_sharp(p, &ext_d(&DiffForm::scalar(n.trace())))
        .expect("chart")
        .scale(&half);
    op.apply(omega).sub(&int_vec(&v, omega))
}
