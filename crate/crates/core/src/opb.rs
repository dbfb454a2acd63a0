//! OPB input format and competition-style result output.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::constraint::{RawConstraint, Relation};
use crate::error::OpbError;
use crate::literal::{Literal, Var};
use crate::problem::Objective;
use crate::search::{SolveResult, Status};

/// Largest variable index accepted by the parser.
pub const MAX_VARIABLE: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpbProblem {
    /// `#variable=` from the header, if present.
    pub declared_variables: Option<usize>,
    /// `#constraint=` from the header, if present.
    pub declared_constraints: Option<usize>,
    pub objective: Option<Objective>,
    pub constraints: Vec<RawConstraint>,
    /// Source line of each constraint.
    pub lines: Vec<usize>,
}

impl OpbProblem {
    /// Largest of the declared count and the highest index actually used.
    pub fn variable_count(&self) -> usize {
        let used = self
            .constraints
            .iter()
            .map(|c| c.max_var() as usize)
            .chain(self.objective.iter().flatten().map(|(_, l)| l.var().index()))
            .max()
            .unwrap_or(0);
        used.max(self.declared_variables.unwrap_or(0))
    }

    /// Same problem without the source positions and header hints.
    pub fn structure(&self) -> (Option<&Objective>, &[RawConstraint]) {
        (self.objective.as_ref(), &self.constraints)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigInt),
    Literal(Literal),
    Relation(Relation),
    Min,
    End,
}

fn syntax(line: usize, message: impl Into<String>) -> OpbError {
    OpbError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_literal(word: &str, line: usize) -> Result<Option<Literal>, OpbError> {
    let (positive, rest) = match word.strip_prefix('~') {
        Some(r) => (false, r),
        None => (true, word),
    };
    let Some(digits) = rest.strip_prefix('x') else {
        return Ok(None);
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("malformed variable '{word}'")));
    }
    let id: u64 = digits
        .parse()
        .ok()
        .filter(|&id| (1..=MAX_VARIABLE).contains(&id))
        .ok_or_else(|| syntax(line, format!("variable index out of range in '{word}'")))?;
    Ok(Some(Literal::new(Var::new(id as u32), positive)))
}

fn parse_token(word: &str, line: usize) -> Result<Token, OpbError> {
    let relation = match word {
        ">=" => Some(Relation::GreaterEq),
        "<=" => Some(Relation::LessEq),
        "=" => Some(Relation::Eq),
        ">" => Some(Relation::Greater),
        "<" => Some(Relation::Less),
        _ => None,
    };
    if let Some(r) = relation {
        return Ok(Token::Relation(r));
    }
    match word {
        "min:" => return Ok(Token::Min),
        "max:" => {
            return Err(OpbError::Unsupported {
                line,
                feature: "maximization objective".into(),
            })
        }
        ";" => return Ok(Token::End),
        _ => {}
    }
    if let Some(lit) = parse_literal(word, line)? {
        return Ok(Token::Literal(lit));
    }
    let digits = word.strip_prefix('+').unwrap_or(word);
    let unsigned = digits.strip_prefix('-').unwrap_or(digits);
    if !unsigned.is_empty() && unsigned.bytes().all(|b| b.is_ascii_digit()) {
        let n: BigInt = digits.parse().map_err(|_| syntax(line, format!("bad number '{word}'")))?;
        return Ok(Token::Number(n));
    }
    Err(syntax(line, format!("unexpected token '{word}'")))
}

/// Reads `#variable=` and `#constraint=` hints from a header comment.
fn parse_header(comment: &str, p: &mut OpbProblem) {
    let words: Vec<&str> = comment.split_whitespace().collect();
    for pair in words.windows(2) {
        let value = pair[1].parse::<usize>().ok();
        match pair[0] {
            "#variable=" => p.declared_variables = value,
            "#constraint=" => p.declared_constraints = value,
            _ => {}
        }
    }
}

/// Terms of a statement body: every coefficient is followed by exactly one literal.
fn parse_terms(
    tokens: &[Token],
    line: usize,
) -> Result<Vec<(BigInt, Literal)>, OpbError> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let Token::Number(coef) = &tokens[i] else {
            return Err(syntax(line, "expected a coefficient"));
        };
        let lits: Vec<Literal> = tokens[i + 1..]
            .iter()
            .map_while(|t| match t {
                Token::Literal(l) => Some(*l),
                _ => None,
            })
            .collect();
        match lits.len() {
            0 => return Err(syntax(line, format!("coefficient {coef} has no literal"))),
            1 => terms.push((coef.clone(), lits[0])),
            _ => {
                return Err(OpbError::Unsupported {
                    line,
                    feature: "non-linear (product) term".into(),
                })
            }
        }
        i += 1 + lits.len();
    }
    Ok(terms)
}

fn parse_statement(tokens: &[Token], line: usize, p: &mut OpbProblem) -> Result<(), OpbError> {
    if tokens.first() == Some(&Token::Min) {
        if p.objective.is_some() {
            return Err(syntax(line, "second objective"));
        }
        if !p.constraints.is_empty() {
            return Err(syntax(line, "objective must precede the constraints"));
        }
        p.objective = Some(parse_terms(&tokens[1..], line)?);
        return Ok(());
    }
    let rel_pos = tokens
        .iter()
        .position(|t| matches!(t, Token::Relation(_)))
        .ok_or_else(|| syntax(line, "constraint without relation"))?;
    let Token::Relation(relation) = tokens[rel_pos] else {
        unreachable!()
    };
    let bound = match &tokens[rel_pos + 1..] {
        [Token::Number(n)] => n.clone(),
        _ => return Err(syntax(line, "expected a single integer after the relation")),
    };
    if tokens[..rel_pos].contains(&Token::Min) {
        return Err(syntax(line, "misplaced 'min:'"));
    }
    let terms = parse_terms(&tokens[..rel_pos], line)?;
    p.constraints.push(RawConstraint::new(terms, relation, bound));
    p.lines.push(line);
    Ok(())
}

/// Parses OPB text. LF and CRLF line ends are accepted.
pub fn parse_opb(text: &str) -> Result<OpbProblem, OpbError> {
    let mut p = OpbProblem::default();
    let mut tokens = Vec::new();
    let mut start_line = 0;
    let mut seen_statement = false;
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.trim_end_matches('\r');
        if content.trim_start().starts_with('*') {
            if !seen_statement && p.declared_variables.is_none() {
                parse_header(content, &mut p);
            }
            continue;
        }
        for word in content.replace(';', " ; ").split_whitespace() {
            if tokens.is_empty() {
                start_line = line;
            }
            let token = parse_token(word, line)?;
            if token == Token::End {
                parse_statement(&tokens, start_line, &mut p)?;
                seen_statement = true;
                tokens.clear();
            } else {
                tokens.push(token);
            }
        }
    }
    if !tokens.is_empty() {
        return Err(syntax(start_line, "statement not terminated by ';'"));
    }
    Ok(p)
}

/// Parses raw bytes, rejecting invalid UTF-8 with the offending line.
pub fn parse_opb_bytes(bytes: &[u8]) -> Result<OpbProblem, OpbError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_opb(text),
        Err(e) => {
            let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
            Err(syntax(line, "invalid UTF-8"))
        }
    }
}

fn write_terms(out: &mut String, terms: &[(BigInt, Literal)]) {
    for (c, l) in terms {
        let sign = if c.is_negative() { "" } else { "+" };
        let name = if l.is_positive() {
            format!("x{}", l.var().id())
        } else {
            format!("~x{}", l.var().id())
        };
        let _ = write!(out, "{sign}{c} {name} ");
    }
}

/// Prints a problem in OPB syntax.
pub fn write_opb(p: &OpbProblem) -> String {
    let mut out = format!(
        "* #variable= {} #constraint= {}\n",
        p.variable_count(),
        p.constraints.len()
    );
    if let Some(obj) = &p.objective {
        out.push_str("min: ");
        write_terms(&mut out, obj);
        out.push_str(";\n");
    }
    for c in &p.constraints {
        write_terms(&mut out, &c.terms);
        let _ = writeln!(out, "{} {} ;", c.relation.symbol(), c.bound);
    }
    out
}

/// Competition output: `o` lines for improving bounds, the `s` line, then the `v` line.
/// With `stats`, `c` lines with the search counters follow.
pub fn write_result(result: &SolveResult, stats: bool) -> String {
    let mut out = String::new();
    for b in &result.bounds {
        let _ = writeln!(out, "o {b}");
    }
    let status = match result.status {
        Status::Sat => "SATISFIABLE",
        Status::Unsat => "UNSATISFIABLE",
        Status::Optimum => "OPTIMUM FOUND",
        Status::Unknown => "UNKNOWN",
    };
    let _ = writeln!(out, "s {status}");
    if let Some(model) = &result.model {
        let lits: Vec<String> = (1..model.len())
            .map(|i| if model[i] { format!("x{i}") } else { format!("-x{i}") })
            .collect();
        if !lits.is_empty() {
            let _ = writeln!(out, "v {}", lits.join(" "));
        }
    }
    if stats {
        let s = &result.stats;
        for (name, value) in [
            ("conflicts", s.conflicts),
            ("decisions", s.decisions),
            ("propagations", s.propagations),
            ("restarts", s.restarts),
            ("reductions", s.reductions),
            ("learned", s.learned),
        ] {
            let _ = writeln!(out, "c {name} {value}");
        }
        let _ = writeln!(out, "c wall_time {:.6}", s.wall_time);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Stats;

    fn l(id: i64) -> Literal {
        Literal::from_signed(id)
    }

    #[test]
    fn header_and_constraint() {
        let p = parse_opb("* #variable= 2 #constraint= 1\n+1 x1 +1 x2 >= 1 ;").unwrap();
        assert_eq!(p.constraints.len(), 1);
        assert_eq!(p.variable_count(), 2);
        assert_eq!(p.declared_constraints, Some(1));
        assert!(p.objective.is_none());
    }

    #[test]
    fn objective_line() {
        let p = parse_opb("min: +2 x1 +3 x2 ;\n+1 x1 +1 x2 >= 1 ;").unwrap();
        assert_eq!(
            p.objective,
            Some(vec![(BigInt::from(2), l(1)), (BigInt::from(3), l(2))])
        );
    }

    #[test]
    fn running_constraint_and_negations() {
        let p = parse_opb("+5 x1 +5 x2 +1 x3 +1 x4 +1 x5 +1 x6 >= 6 ;\r\n-2 ~x3 +1 x1 = -1;\r\n").unwrap();
        assert_eq!(p.constraints[0].terms.len(), 6);
        assert_eq!(p.constraints[0].bound, BigInt::from(6));
        assert_eq!(p.constraints[1].terms[0], (BigInt::from(-2), l(-3)));
        assert_eq!(p.constraints[1].relation, Relation::Eq);
        assert_eq!(p.lines, vec![1, 2]);
    }

    #[test]
    fn errors_are_located() {
        let e = parse_opb("* c\n+1 x1 x2 >= 1 ;").unwrap_err();
        assert!(matches!(e, OpbError::Unsupported { line: 2, .. }));
        assert_eq!(parse_opb("+1 x1 >= 1 ;\n+1 y1 >= 1 ;").unwrap_err().line(), 2);
        assert_eq!(parse_opb("+1 x1 >= 1").unwrap_err().line(), 1);
        assert!(parse_opb("+1 x0 >= 1 ;").is_err());
        assert!(parse_opb("+1 x1 >= ;").is_err());
        assert!(parse_opb("max: +1 x1 ;").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "min: -1 x1 +2 ~x2 ;\n+3 x1 -2 x2 >= 1 ;\n+1 x1 +1 x2 = 1 ;\n";
        let p = parse_opb(text).unwrap();
        let q = parse_opb(&write_opb(&p)).unwrap();
        assert_eq!(p.structure(), q.structure());
    }

    fn result(status: Status, model: Option<Vec<bool>>, bounds: &[i64]) -> SolveResult {
        SolveResult {
            status,
            model,
            objective: bounds.last().map(|&b| BigInt::from(b)),
            bounds: bounds.iter().map(|&b| BigInt::from(b)).collect(),
            stats: Stats::default(),
        }
    }

    #[test]
    fn result_lines() {
        assert_eq!(write_result(&result(Status::Unsat, None, &[]), false), "s UNSATISFIABLE\n");
        assert_eq!(
            write_result(&result(Status::Sat, Some(vec![false, true, false]), &[]), false),
            "s SATISFIABLE\nv x1 -x2\n"
        );
        assert_eq!(
            write_result(&result(Status::Optimum, Some(vec![false, true]), &[5, 3]), false),
            "o 5\no 3\ns OPTIMUM FOUND\nv x1\n"
        );
    }
}
