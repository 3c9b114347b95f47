//! Line-oriented text format for fuzzy system definitions.
//!
//! ```text
//! # comment
//! var input severity 0 10
//! var output treatDuration 10 60
//! term severity Low tri 0 0 5
//! term severity High trap 5 7 10 10
//! rule IF severity IS High AND mentalState IS Low THEN treatDuration IS Long
//! ```
//!
//! One output variable per file. Keywords `var`/`term`/`tri`/`trap` are
//! lowercase, rule keywords `IF`/`IS`/`AND`/`THEN` uppercase. Parse errors
//! carry the line and column of the offending token.

use super::{FuzzyError, FuzzySystem, LinguisticVariable, MembershipFunction, NamedRule, DEFAULT_RESOLUTION};

struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token { col: s + 1, text: &line[s..i] });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token { col: s + 1, text: &line[s..] });
    }
    tokens
}

fn parse_number(line_no: usize, tok: &Token<'_>) -> Result<f64, FuzzyError> {
    tok.text.parse::<f64>().map_err(|_| FuzzyError::Parse {
        line: line_no,
        col: tok.col,
        message: format!("expected a number, found '{}'", tok.text),
    })
}

fn err(line: usize, col: usize, message: impl Into<String>) -> FuzzyError {
    FuzzyError::Parse { line, col, message: message.into() }
}

/// Parses and fully validates a fuzzy system definition. Validation covers
/// parameter ordering, term/variable references, the single-output rule,
/// and the rule-base completeness grid check.
pub fn load_fls_definition(text: &str) -> Result<FuzzySystem, FuzzyError> {
    let mut inputs: Vec<LinguisticVariable> = Vec::new();
    let mut output: Option<LinguisticVariable> = None;
    let mut rules: Vec<NamedRule> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        match tokens[0].text {
            "var" => {
                if tokens.len() != 5 {
                    return Err(err(line_no, tokens[0].col, "expected: var input|output <name> <lo> <hi>"));
                }
                let kind = tokens[1].text;
                let name = tokens[2].text;
                if inputs.iter().any(|v| v.name() == name)
                    || output.as_ref().is_some_and(|v| v.name() == name)
                {
                    return Err(err(line_no, tokens[2].col, format!("duplicate variable '{name}'")));
                }
                let lo = parse_number(line_no, &tokens[3])?;
                let hi = parse_number(line_no, &tokens[4])?;
                let var = LinguisticVariable::new(name, lo, hi)?;
                match kind {
                    "input" => inputs.push(var),
                    "output" => {
                        if output.is_some() {
                            return Err(err(line_no, tokens[1].col, "more than one output variable"));
                        }
                        output = Some(var);
                    }
                    other => {
                        return Err(err(line_no, tokens[1].col, format!("expected 'input' or 'output', found '{other}'")));
                    }
                }
            }
            "term" => {
                if tokens.len() < 4 {
                    return Err(err(line_no, tokens[0].col, "expected: term <var> <name> tri|trap <params...>"));
                }
                let var_name = tokens[1].text;
                let term_name = tokens[2].text;
                let shape = tokens[3].text;
                let mf = match shape {
                    "tri" => {
                        if tokens.len() != 7 {
                            return Err(err(line_no, tokens[3].col, "tri takes exactly 3 parameters"));
                        }
                        MembershipFunction::triangular(
                            parse_number(line_no, &tokens[4])?,
                            parse_number(line_no, &tokens[5])?,
                            parse_number(line_no, &tokens[6])?,
                        )?
                    }
                    "trap" => {
                        if tokens.len() != 8 {
                            return Err(err(line_no, tokens[3].col, "trap takes exactly 4 parameters"));
                        }
                        MembershipFunction::trapezoidal(
                            parse_number(line_no, &tokens[4])?,
                            parse_number(line_no, &tokens[5])?,
                            parse_number(line_no, &tokens[6])?,
                            parse_number(line_no, &tokens[7])?,
                        )?
                    }
                    other => {
                        return Err(err(line_no, tokens[3].col, format!("expected 'tri' or 'trap', found '{other}'")));
                    }
                };
                let var = inputs
                    .iter_mut()
                    .find(|v| v.name() == var_name)
                    .or_else(|| output.as_mut().filter(|v| v.name() == var_name))
                    .ok_or_else(|| err(line_no, tokens[1].col, format!("unknown variable '{var_name}'")))?;
                var.add_term(term_name, mf)?;
            }
            "rule" => {
                // rule IF v IS t [AND v IS t]... THEN v IS t
                let t = &tokens;
                if t.len() < 8 || t[1].text != "IF" {
                    return Err(err(line_no, t[0].col, "expected: rule IF <var> IS <term> [AND <var> IS <term>]... THEN <var> IS <term>"));
                }
                let mut antecedents = Vec::new();
                let mut i = 2;
                loop {
                    if i + 2 >= t.len() || t[i + 1].text != "IS" {
                        return Err(err(line_no, t[i.min(t.len() - 1)].col, "expected '<var> IS <term>'"));
                    }
                    antecedents.push((t[i].text.to_string(), t[i + 2].text.to_string()));
                    i += 3;
                    match t.get(i).map(|tok| tok.text) {
                        Some("AND") => i += 1,
                        Some("THEN") => break,
                        _ => {
                            return Err(err(line_no, t[i.min(t.len() - 1)].col, "expected 'AND' or 'THEN'"));
                        }
                    }
                }
                i += 1; // past THEN
                if i + 3 != t.len() || t[i + 1].text != "IS" {
                    return Err(err(line_no, t[i.min(t.len() - 1)].col, "expected '<var> IS <term>' after THEN"));
                }
                let cons_var = t[i].text;
                let out = output
                    .as_ref()
                    .ok_or_else(|| err(line_no, t[i].col, "rule appears before the output variable is declared"))?;
                if cons_var != out.name() {
                    return Err(err(line_no, t[i].col, format!("rule consequent must use the output variable '{}', found '{cons_var}'", out.name())));
                }
                rules.push((antecedents, t[i + 2].text.to_string()));
            }
            other => {
                return Err(err(line_no, tokens[0].col, format!("unknown directive '{other}'")));
            }
        }
    }

    let output = output.ok_or_else(|| err(text.lines().count().max(1), 1, "no output variable declared"))?;
    FuzzySystem::new(inputs, output, &rules, DEFAULT_RESOLUTION)
}
