//! PGSolver game format: `parity <max-id>;` header, then one line per
//! vertex: `<id> <priority> <owner> <succ>,<succ>,... ["<label>"];`
//! with owner 0 = Even and 1 = Odd.

use thiserror::Error;

use crate::game::{build_game, GameError, ParityGame, Player, VertexSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("vertex {0} is never declared")]
    MissingVertex(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses PGSolver text. Vertex ids must be dense `0..=max-id`; declaration
/// order is free, successor order within a line is preserved.
pub fn parse_pgsolver(text: &str) -> Result<ParityGame, ParseError> {
    let mut lines = text.lines().enumerate();

    let (header_no, header) = lines
        .by_ref()
        .map(|(i, l)| (i + 1, l.trim()))
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| syntax(1, "missing header"))?;
    let max_id = parse_header(header).ok_or_else(|| {
        syntax(header_no, "expected header `parity <max-id>;`")
    })?;
    let n = max_id + 1;

    let mut specs: Vec<Option<VertexSpec>> = (0..n).map(|_| None).collect();
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (id, spec) = parse_vertex_line(line_no, line)?;
        if id > max_id {
            return Err(syntax(
                line_no,
                format!("vertex id {id} exceeds header maximum {max_id}"),
            ));
        }
        if specs[id].is_some() {
            return Err(syntax(line_no, format!("vertex {id} declared twice")));
        }
        specs[id] = Some(spec);
    }

    let mut resolved = Vec::with_capacity(n);
    for (id, spec) in specs.into_iter().enumerate() {
        resolved.push(spec.ok_or(ParseError::MissingVertex(id))?);
    }
    Ok(build_game(resolved)?)
}

fn parse_header(line: &str) -> Option<usize> {
    let rest = line.strip_prefix("parity")?.strip_suffix(';')?;
    rest.trim().parse().ok()
}

fn parse_vertex_line(line_no: usize, line: &str) -> Result<(usize, VertexSpec), ParseError> {
    let body = line
        .strip_suffix(';')
        .ok_or_else(|| syntax(line_no, "missing terminating `;`"))?
        .trim_end();

    let (body, label) = match body.strip_suffix('"') {
        Some(head) => {
            let open = head
                .rfind('"')
                .ok_or_else(|| syntax(line_no, "unmatched `\"` in label"))?;
            (head[..open].trim_end(), Some(head[open + 1..].to_string()))
        }
        None => (body, None),
    };

    let mut tokens = body.split_whitespace();
    let id = parse_num(line_no, tokens.next(), "vertex id")?;
    let priority = parse_num(line_no, tokens.next(), "priority")?;
    let owner = match tokens.next() {
        Some("0") => Player::Even,
        Some("1") => Player::Odd,
        other => {
            return Err(syntax(
                line_no,
                format!("owner must be 0 or 1, got {:?}", other.unwrap_or("")),
            ))
        }
    };
    let succ_text: String = tokens.collect();
    if succ_text.is_empty() {
        return Err(syntax(line_no, "missing successor list"));
    }
    let mut successors = Vec::new();
    for part in succ_text.split(',') {
        successors.push(parse_num(line_no, Some(part), "successor id")?);
    }

    let mut spec = VertexSpec::new(priority, owner, successors);
    spec.label = label;
    Ok((id, spec))
}

fn parse_num(line_no: usize, token: Option<&str>, what: &str) -> Result<usize, ParseError> {
    token
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| syntax(line_no, format!("expected {what}")))
}

/// Canonical serialization: vertices ascending, successors in stored order,
/// labels quoted. `parse_pgsolver(serialize_pgsolver(g))` equals `g`.
pub fn serialize_pgsolver(game: &ParityGame) -> String {
    let n = game.vertex_count();
    let mut out = format!("parity {};\n", n - 1);
    for v in 0..n {
        out.push_str(&format!(
            "{} {} {} ",
            v,
            game.priority(v),
            game.owner(v).parity()
        ));
        let succs: Vec<String> = game.successors(v).iter().map(|w| w.to_string()).collect();
        out.push_str(&succs.join(","));
        if let Some(label) = game.label(v) {
            out.push_str(&format!(" \"{label}\""));
        }
        out.push_str(";\n");
    }
    out
}
