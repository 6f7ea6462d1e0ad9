//! Command dispatch and report assembly.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::exactlin::{jordan_chevalley_multiplicative, IntMatrix, RatMatrix};
use crate::hull::{
    algebraic_hull, check_equivalences, g_an, growth_degree, growth_degree_via_matrices, hull_invariants, verify_hull,
    HullData,
};
use crate::splitting::ops::{beta, minimal_splitting, nilradical, nilshadow_model, structure_decomposition};
use crate::splitting::{Exactness, GroupModel, Heuristics, Warning};

use super::checks::{self, cokernel, cokernel_label, CheckOutcome};
use super::{Command, SpecFile};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub model: String,
    /// Result objects keyed by command name.
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<CheckOutcome>,
    /// Commands that failed outright, keyed by command name.
    pub errors: BTreeMap<String, String>,
    pub warnings: Vec<Warning>,
    pub exactness: Exactness,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl Report {
    fn new(command: Command, model: &GroupModel) -> Self {
        Report {
            command: command.name().to_string(),
            model: model.label(),
            results: BTreeMap::new(),
            checks: Vec::new(),
            errors: BTreeMap::new(),
            warnings: Vec::new(),
            exactness: Exactness::Exact,
            text: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// 0 when every check passes and nothing heuristic was used without
    /// permission, 1 otherwise.
    pub fn exit_code(&self, allow_heuristic: bool) -> u8 {
        if !self.passed() || (self.exactness == Exactness::Heuristic && !allow_heuristic) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn render_text(&self) -> String {
        let mut out = vec![format!("{}: {}", self.command, self.model)];
        out.extend(self.text.iter().cloned());
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push(format!("{mark} {}", c.name));
            } else {
                out.push(format!("{mark} {} ({})", c.name, c.detail));
            }
        }
        for (k, e) in &self.errors {
            out.push(format!("error in {k}: {e}"));
        }
        for w in &self.warnings {
            out.push(format!("warning: {w}"));
        }
        out.push(format!("exactness: {:?}", self.exactness));
        out.join("\n") + "\n"
    }

    fn exactness(&mut self, e: Exactness, warnings: &[Warning]) {
        self.exactness = self.exactness.and(e);
        for w in warnings {
            if !self.warnings.contains(w) {
                self.warnings.push(w.clone());
            }
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

struct Ctx<'a> {
    model: &'a GroupModel,
    heur: Heuristics,
    seed: u64,
    hull: Option<Result<HullData, String>>,
}

impl Ctx<'_> {
    fn hull(&mut self) -> Result<HullData, String> {
        if self.hull.is_none() {
            self.hull = Some(algebraic_hull(self.model, &self.heur).map_err(|e| e.to_string()));
        }
        self.hull.clone().expect("just computed")
    }
}

fn jordan(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let mut items = Vec::new();
    for (i, a) in ctx.model.actions().iter().enumerate() {
        let j = jordan_chevalley_multiplicative(a).map_err(|e| e.to_string())?;
        let cert = &ctx.model.certificates()[i];
        rep.check(&format!("jordan.{i}.product"), &j.semisimple * &j.unipotent == *a, "");
        rep.check(
            &format!("jordan.{i}.commute"),
            j.semisimple.commutes_with(&j.unipotent),
            "",
        );
        rep.text.push(format!(
            "action {i}: semisimple {} unipotent {} ({})",
            j.semisimple,
            j.unipotent,
            cert.label()
        ));
        items.push(json!({"action": i, "decomposition": to_value(&j), "certificate": to_value(cert)}));
    }
    Ok(Value::Array(items))
}

fn snf(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let n = ctx.model.base_dim();
    let id = RatMatrix::identity(n);
    let mut items = Vec::new();
    let mut joint: Option<RatMatrix> = None;
    for (i, a) in ctx.model.actions().iter().enumerate() {
        let shifted = a - &id;
        joint = Some(match joint {
            None => shifted.clone(),
            Some(j) => j.hstack(&shifted),
        });
        match IntMatrix::try_from_rat(&shifted) {
            Ok(m) => {
                let (torsion, free) = cokernel(&m);
                let label = cokernel_label(&torsion, free);
                rep.text.push(format!("coker(A_{i} - I) = {label}"));
                items.push(json!({"action": i, "invariant_factors": to_value(&m.invariant_factors()
                    .iter().map(|f| f.to_string()).collect::<Vec<_>>()), "cokernel": label}));
            }
            Err(_) => items.push(json!({"action": i, "cokernel": null, "note": "A - I is not integral"})),
        }
    }
    let joint_value = match joint.as_ref().map(IntMatrix::try_from_rat) {
        Some(Ok(m)) => {
            let (torsion, free) = cokernel(&m);
            let label = cokernel_label(&torsion, free);
            rep.text.push(format!("coker[A_i - I] = {label}"));
            json!({"invariant_factors": m.invariant_factors().iter().map(|f| f.to_string()).collect::<Vec<_>>(), "cokernel": label})
        }
        _ => Value::Null,
    };
    Ok(json!({"actions": items, "joint": joint_value}))
}

fn nilradical_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let nil = nilradical(ctx.model, &ctx.heur).map_err(|e| e.to_string())?;
    rep.exactness(nil.relations.exactness, &nil.relations.warnings);
    rep.text.push(format!(
        "nilradical: full base, exponent lattice {} (rank {})",
        nil.subgroup.exponent_lattice,
        nil.relations.rank()
    ));
    Ok(to_value(&nil))
}

fn splitting_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let s = minimal_splitting(ctx.model, &ctx.heur).map_err(|e| e.to_string())?;
    let d = structure_decomposition(ctx.model, &ctx.heur).map_err(|e| e.to_string())?;
    rep.exactness(s.exactness, &s.warnings);
    rep.check(
        "splitting.minimal",
        s.minimality.minimal,
        format!("{} candidates", s.minimality.candidates_checked),
    );
    rep.check("splitting.covers", d.covers, "");
    rep.text.push(format!(
        "L: base dim {}, fixed by the generator semisimple parts",
        s.l.base_dim()
    ));
    Ok(json!({"splitting": to_value(&s), "decomposition": to_value(&d)}))
}

fn beta_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let s = minimal_splitting(ctx.model, &ctx.heur).map_err(|e| e.to_string())?;
    rep.exactness(s.exactness, &s.warnings);
    let gens: Vec<Value> = (0..ctx.model.rank())
        .map(|i| {
            let b = beta(&s, &ctx.model.generator(i)).expect("generator power");
            rep.text.push(format!("beta(t_{i}) = {b}"));
            to_value(&b)
        })
        .collect();
    let law = checks::beta_law(ctx.model, &ctx.heur, ctx.seed, 100);
    rep.checks.push(law);
    Ok(json!({"generators": gens}))
}

fn nilshadow_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let ns = nilshadow_model(ctx.model).map_err(|e| e.to_string())?;
    let degree = growth_degree_via_matrices(ctx.model).map_err(|e| e.to_string())?;
    rep.text.push(format!("nil-shadow model: {}", ns.model.label()));
    rep.text.push(format!("growth degree {degree}"));
    Ok(json!({"model": to_value(&ns.model), "real_completion": ns.real_completion, "growth_degree": degree}))
}

fn hull_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let h = ctx.hull()?;
    rep.exactness(h.exactness, &h.warnings);
    let inv = hull_invariants(&h);
    let shape = if h.nilshadow.is_abelian() {
        "abelian"
    } else {
        "non-abelian"
    };
    rep.text.push(format!(
        "nil-shadow: dim {}, {shape}, lcs quotients {:?}",
        inv.nilshadow_dim, inv.lcs_dims
    ));
    rep.text.push(format!(
        "K: torus rank {} ({:?}), finite orders {:?}",
        h.compact_part.torus_rank, h.compact_part.exactness, h.compact_part.finite_orders
    ));
    rep.text.push(format!("M~ dim {}", h.m_tilde_dim));
    Ok(json!({"hull": to_value(&h), "invariants": to_value(&inv)}))
}

fn gan_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let h = ctx.hull()?;
    let d = g_an(ctx.model, &h, &ctx.heur).map_err(|e| e.to_string())?;
    rep.exactness(d.exactness, &h.warnings);
    rep.check("gan.meets_g_in_nilradical", d.meets_g_in_nilradical, "");
    rep.text.push(d.label.clone());
    Ok(to_value(&d))
}

fn growth_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let h = ctx.hull()?;
    let d = growth_degree(&h);
    let via = growth_degree_via_matrices(ctx.model).map_err(|e| e.to_string())?;
    rep.check("growth.consistent", d == via, format!("{d} vs {via}"));
    rep.text.push(format!("growth degree {d}"));
    Ok(json!({"degree": d, "via_matrices": via}))
}

fn check410_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let h = ctx.hull()?;
    let r = check_equivalences(ctx.model, &h, &ctx.heur).map_err(|e| e.to_string())?;
    rep.exactness(r.exactness, &[]);
    rep.text.push(format!(
        "(a) K abelian {} <=> [G,G] in N {}; (c) G/N compact {} <=> nil-shadow/N compact {}",
        r.k_abelian, r.commutators_in_n, r.g_mod_n_compact, r.nilshadow_mod_n_compact
    ));
    Ok(to_value(&r))
}

fn verify_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let h = ctx.hull()?;
    let v = verify_hull(ctx.model, &h, ctx.seed);
    rep.check("verify.homomorphism", v.homomorphism, "");
    rep.check("verify.automorphisms", v.automorphisms, "");
    rep.check("verify.faithful", v.faithful, "");
    rep.check("verify.dense", v.dense, "");
    rep.check("verify.cocompact", v.cocompact, "");
    Ok(to_value(&v))
}

fn invariants_cmd(ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    let h = ctx.hull()?;
    rep.exactness(h.exactness, &h.warnings);
    let inv = hull_invariants(&h);
    rep.text.push(serde_json::to_string(&inv).expect("serializable"));
    Ok(to_value(&inv))
}

fn dispatch(c: Command, ctx: &mut Ctx, rep: &mut Report) -> Result<Value, String> {
    match c {
        Command::Jordan => jordan(ctx, rep),
        Command::Snf => snf(ctx, rep),
        Command::Nilradical => nilradical_cmd(ctx, rep),
        Command::Splitting => splitting_cmd(ctx, rep),
        Command::Beta => beta_cmd(ctx, rep),
        Command::Nilshadow => nilshadow_cmd(ctx, rep),
        Command::Hull => hull_cmd(ctx, rep),
        Command::Gan => gan_cmd(ctx, rep),
        Command::Growth => growth_cmd(ctx, rep),
        Command::Check410 => check410_cmd(ctx, rep),
        Command::Verify => verify_cmd(ctx, rep),
        Command::Invariants => invariants_cmd(ctx, rep),
        Command::Suite => unreachable!("suite is expanded by run"),
    }
}

fn run_one(c: Command, ctx: &mut Ctx, rep: &mut Report) {
    match dispatch(c, ctx, rep) {
        Ok(v) => {
            rep.results.insert(c.name().to_string(), v);
        }
        Err(e) => {
            rep.errors.insert(c.name().to_string(), e);
        }
    }
}

/// Runs one command, or for `suite` the requested commands (all of them
/// when none are requested), the model's property checks and the golden
/// corpus. Output depends only on the spec and seed.
pub fn run(spec: &SpecFile, command: Command) -> Report {
    let model = &spec.model;
    let mut ctx = Ctx {
        model,
        heur: spec.options.heuristics(),
        seed: spec.options.seed,
        hull: None,
    };
    let mut rep = Report::new(command, model);
    if command != Command::Suite {
        run_one(command, &mut ctx, &mut rep);
        return rep;
    }
    let polynomial = model.has_polynomial_growth();
    let commands: Vec<Command> = if spec.requested.is_empty() {
        Command::ALL.iter().copied().filter(|&c| c != Command::Suite).collect()
    } else {
        spec.requested
            .iter()
            .copied()
            .filter(|&c| c != Command::Suite)
            .collect()
    };
    for c in commands {
        if c.needs_hull() && !polynomial {
            rep.text.push(format!(
                "{}: skipped, the model does not have polynomial growth",
                c.name()
            ));
            continue;
        }
        run_one(c, &mut ctx, &mut rep);
    }
    let heur = ctx.heur.clone();
    rep.checks.extend(checks::model_checks(model, &heur, spec.options.seed));
    rep.checks.extend(checks::golden_corpus(&heur, spec.options.seed));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_spec;

    const COS35: &str =
        r#"{"model": {"base": {"kind": "real", "dim": 2}, "actions": [[["0","-1"],["1","6/5"]]], "exponent_rank": 1}}"#;

    #[test]
    fn hull_report_on_cos35() {
        let spec = parse_spec(COS35).unwrap();
        let r = run(&spec, Command::Hull);
        assert!(r.passed());
        let inv = &r.results["hull"]["invariants"];
        assert_eq!(inv["nilshadow_dim"], 3);
        assert_eq!(inv["torus_rank"], 1);
        assert_eq!(inv["m_tilde_dim"], 1);
        assert_eq!(r.exit_code(false), 0);
    }

    #[test]
    fn output_is_deterministic_and_roundtrips() {
        let spec = parse_spec(COS35).unwrap();
        let a = run(&spec, Command::Gan).to_json();
        let report = run(&spec, Command::Gan);
        assert_eq!(a, report.to_json());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v, to_value(&report));
    }

    #[test]
    fn growth_of_shear() {
        let spec = parse_spec(
            r#"{"model": {"base": {"kind": "lattice", "dim": 2}, "actions": [[["1","1"],["0","1"]]], "exponent_rank": 1}}"#,
        )
        .unwrap();
        let r = run(&spec, Command::Growth);
        assert_eq!(r.results["growth"]["degree"], 4);
    }

    #[test]
    fn exponential_growth_fails_hull() {
        let spec = parse_spec(
            r#"{"model": {"base": {"kind": "lattice", "dim": 2}, "actions": [[["2","1"],["1","1"]]], "exponent_rank": 1}}"#,
        )
        .unwrap();
        let r = run(&spec, Command::Hull);
        assert_eq!(r.exit_code(false), 1);
        assert!(r.errors.contains_key("hull"));
    }
}
