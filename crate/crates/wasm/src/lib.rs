//! Browser bindings: solve an OPB text, inspect one constraint under a partial assignment, and
//! list restart schedules. Every export returns a JSON string.

use pbcdcl::analysis::effective_literals;
use pbcdcl::config::{preset, PRESETS};
use pbcdcl::heuristics::{eligible_vars, BumpStrategy};
use pbcdcl::normalize::{normalize, Normalized};
use pbcdcl::opb::parse_opb;
use pbcdcl::quality::{degree, degree_bits, lbd, LbdVariant};
use pbcdcl::restarts::{luby_limit, PicoSat, LUBY_FACTOR};
use pbcdcl::search::{solve, Budget};
use pbcdcl::trail::{Assignment, TrailView};
use pbcdcl::{Literal, PBConstraint, Problem, Var};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn error(message: impl ToString) -> Value {
    json!({ "error": message.to_string() })
}

fn lit_name(l: Literal) -> String {
    if l.is_positive() {
        format!("x{}", l.var().id())
    } else {
        format!("~x{}", l.var().id())
    }
}

pub fn solve_json(opb: &str, preset_name: &str, max_conflicts: u64) -> Value {
    let Some(config) = preset(preset_name) else {
        return error(format!("unknown preset '{preset_name}'"));
    };
    let parsed = match parse_opb(opb) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let problem = Problem::from_opb(&parsed);
    match solve(&problem, config.clone(), &Budget::conflicts(max_conflicts)) {
        Ok(r) => json!({
            "status": r.status.name(),
            "config": config.to_string(),
            "objective": r.objective.map(|o| o.to_string()),
            "bounds": r.bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "model": r.model.map(|m| {
                (1..m.len()).map(|i| if m[i] { format!("x{i}") } else { format!("-x{i}") }).collect::<Vec<_>>()
            }),
            "stats": {
                "conflicts": r.stats.conflicts,
                "decisions": r.stats.decisions,
                "propagations": r.stats.propagations,
                "restarts": r.stats.restarts,
                "reductions": r.stats.reductions,
                "learned": r.stats.learned,
            },
        }),
        Err(e) => error(e),
    }
}

/// Reads `x1@3 -x2@1 ...`: each token sets the literal true at the given level (default 0).
fn parse_assignment(text: &str, num_vars: usize) -> Result<Assignment, String> {
    let mut a = Assignment::new(num_vars);
    for token in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let (lit, level) = match token.split_once('@') {
            Some((l, lvl)) => (l, lvl.parse::<u32>().map_err(|_| format!("bad level in '{token}'"))?),
            None => (token, 0),
        };
        let (positive, name) = match lit.strip_prefix(['-', '~']) {
            Some(rest) => (false, rest),
            None => (true, lit),
        };
        let id: u32 = name
            .strip_prefix('x')
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1 && n as usize <= num_vars)
            .ok_or_else(|| format!("unknown variable in '{token}'"))?;
        a.set(Var::new(id), positive, level);
    }
    Ok(a)
}

fn describe(c: &PBConstraint, trail: &Assignment) -> Value {
    let vars = |vs: Vec<Var>| vs.into_iter().map(|v| format!("x{}", v.id())).collect::<Vec<_>>();
    let lbds: serde_json::Map<String, Value> = LbdVariant::ALL
        .iter()
        .map(|&v| {
            let value = lbd(c, trail, v).map(Value::from).unwrap_or(Value::Null);
            (format!("lbd-{}", v.suffix()), value)
        })
        .collect();
    let bumps: serde_json::Map<String, Value> = [BumpStrategy::Default, BumpStrategy::BumpAssigned, BumpStrategy::BumpFalsified, BumpStrategy::BumpEffective]
        .iter()
        .map(|&s| (s.name().to_string(), json!(vars(eligible_vars(s, c, trail)))))
        .collect();
    json!({
        "constraint": c.to_string(),
        "degree": degree(c).to_string(),
        "degreeBits": degree_bits(c),
        "slack": c.slack(trail).to_string(),
        "conflicting": c.is_conflicting(trail),
        "propagates": c.propagated_literals(trail).into_iter().map(lit_name).collect::<Vec<_>>(),
        "effective": effective_literals(c, trail).ok().map(|ls| ls.into_iter().map(lit_name).collect::<Vec<_>>()),
        "lbd": lbds,
        "bump": bumps,
    })
}

pub fn explore_json(constraint: &str, assignment: &str) -> Value {
    let text = if constraint.trim_end().ends_with(';') {
        constraint.to_string()
    } else {
        format!("{constraint} ;")
    };
    let parsed = match parse_opb(&text) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let [raw] = parsed.constraints.as_slice() else {
        return error("enter exactly one constraint");
    };
    let trail = match parse_assignment(assignment, parsed.variable_count()) {
        Ok(t) => t,
        Err(e) => return error(e),
    };
    let normalized = match normalize(raw) {
        Normalized::Contradiction => return error("the constraint can never be satisfied"),
        Normalized::Constraints(cs) => cs,
    };
    if normalized.is_empty() {
        return error("the constraint always holds");
    }
    let assigned: Vec<String> = (1..=parsed.variable_count() as u32)
        .filter_map(|i| {
            let v = Var::new(i);
            let value = trail.var_value(v)?;
            Some(format!("{}@{}", lit_name(Literal::new(v, value)), trail.var_level(v)?))
        })
        .collect();
    json!({
        "assignment": assigned,
        "normalized": normalized.iter().map(|c| describe(c, &trail)).collect::<Vec<_>>(),
    })
}

pub fn schedule_json(count: usize) -> Value {
    let mut picosat = PicoSat::default();
    json!({
        "luby": (1..=count as u64).map(|k| luby_limit(k, LUBY_FACTOR)).collect::<Vec<_>>(),
        "picosat": (0..count).map(|_| picosat.next_limit()).collect::<Vec<_>>(),
    })
}

#[wasm_bindgen]
pub fn presets() -> String {
    json!(PRESETS).to_string()
}

#[wasm_bindgen]
pub fn solve_opb(opb: &str, preset_name: &str, max_conflicts: u32) -> String {
    solve_json(opb, preset_name, u64::from(max_conflicts)).to_string()
}

#[wasm_bindgen]
pub fn explore_constraint(constraint: &str, assignment: &str) -> String {
    explore_json(constraint, assignment).to_string()
}

#[wasm_bindgen]
pub fn restart_schedule(count: u32) -> String {
    schedule_json(count.min(10_000) as usize).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_instance() {
        let v = solve_json("+1 x1 +1 x2 >= 1 ;\n+1 ~x1 >= 1 ;", "roundingsat-best", 1000);
        assert_eq!(v["status"], "SAT");
        assert_eq!(v["model"], json!(["-x1", "x2"]));
        assert!(solve_json("", "nope", 1)["error"].is_string());
    }

    #[test]
    fn explorer_reproduces_the_running_example() {
        let v = explore_json(
            "+5 x1 +5 x2 +1 x3 +1 x4 +1 x5 +1 x6 >= 6",
            "-x1@3 x2@3 -x5@1 x6@2",
        );
        let c = &v["normalized"][0];
        assert_eq!(c["lbd"], json!({"lbd-a": 3, "lbd-s": 4, "lbd-d": 5, "lbd-f": 2, "lbd-e": 1}));
        assert_eq!(c["bump"]["bump-falsified"], json!(["x1", "x5"]));
        assert_eq!(c["bump"]["bump-effective"], json!(["x1"]));
        assert_eq!(c["degreeBits"], 3);

        let v = explore_json("+5 x1 +5 x2 +1 x3 +1 x4 +1 x5 +1 x6 >= 6", "-x5@1 x6@2 -x1@3");
        assert_eq!(v["normalized"][0]["propagates"], json!(["x2"]));
        assert!(explore_json("+1 x1 >= 1", "x9@1")["error"].is_string());
    }

    #[test]
    fn schedules() {
        let v = schedule_json(7);
        assert_eq!(v["luby"], json!([100, 100, 200, 100, 100, 200, 400]));
        assert_eq!(v["picosat"][0], 100);
    }
}
