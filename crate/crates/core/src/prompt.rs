//! Chat-format serialization of instances and parsing of solution lists.

use std::fmt::Write as _;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::codec::{encode_sequence, pair_tokens, scan_tokens, with_path};
use crate::error::{Error, Result};
use crate::frontier::Frontier;
use crate::linalg::Matrix;
use crate::problem::{Family, FamilyParams, ProblemInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
    /// Empty when no frontier was supplied.
    pub assistant: String,
}

pub fn system_prompt(family: Family, k: usize) -> String {
    let template = match family {
        Family::Boqp => include_str!("../templates/boqp.txt"),
        Family::Sbqp => include_str!("../templates/sbqp.txt"),
        Family::Ridge => include_str!("../templates/ridge.txt"),
        Family::Huber => include_str!("../templates/huber.txt"),
        Family::Softplus => include_str!("../templates/softplus.txt"),
    };
    template.replace("{K}", &k.to_string())
}

struct Writer {
    out: String,
}

impl Writer {
    fn vector(&mut self, name: &str, values: &[f64]) -> Result<()> {
        let body = encode_sequence(values).map_err(|e| with_path(e, name))?;
        self.open(name);
        if !body.is_empty() {
            self.out.push_str(&body);
            self.out.push(' ');
        }
        self.close(name);
        Ok(())
    }

    fn matrix(&mut self, name: &str, rows: &Matrix) -> Result<()> {
        self.open(name);
        for (i, row) in rows.iter().enumerate() {
            let body = encode_sequence(row).map_err(|e| with_path(e, &format!("{name}[{i}]")))?;
            let _ = write!(self.out, "R{i}: {body} ");
        }
        self.close(name);
        Ok(())
    }

    fn scalar(&mut self, name: &str, value: f64) -> Result<()> {
        let body = encode_sequence(&[value]).map_err(|e| with_path(e, name))?;
        let _ = write!(self.out, " {name}: {body}");
        Ok(())
    }

    fn open(&mut self, name: &str) {
        let _ = write!(self.out, " {name}_BEGIN ");
    }

    fn close(&mut self, name: &str) {
        let _ = write!(self.out, "{name}_END");
    }
}

/// User message for an instance and its anchors.
pub fn user_text(instance: &ProblemInstance, anchors: (&[f64], &[f64])) -> Result<String> {
    let n = instance.n;
    for a in [anchors.0, anchors.1] {
        if a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.len() });
        }
    }
    let mut w = Writer { out: format!("n={n}") };
    w.vector("lower", &instance.lower)?;
    w.vector("upper", &instance.upper)?;
    w.vector("anchor1", anchors.0)?;
    w.vector("anchor2", anchors.1)?;
    match &instance.params {
        FamilyParams::Boqp { quad, lin, constant } => {
            for i in 0..2 {
                w.matrix(&format!("Q{}", i + 1), &quad[i])?;
                w.vector(&format!("q{}", i + 1), &lin[i])?;
                w.scalar(&format!("c{}", i + 1), constant[i])?;
            }
        }
        FamilyParams::Sbqp { quad, lin } => {
            w.vector("a", &quad[0])?;
            w.vector("b", &lin[0])?;
            w.vector("alpha", &quad[1])?;
            w.vector("beta", &lin[1])?;
        }
        FamilyParams::Ridge { design, target, reg, .. } | FamilyParams::Softplus { design, target, reg, .. } => {
            for i in 0..2 {
                w.matrix(&format!("A{}obj", i + 1), &design[i])?;
                w.vector(&format!("b{}obj", i + 1), &target[i])?;
                w.scalar(&format!("lambda{}", i + 1), reg[i])?;
            }
        }
        FamilyParams::Huber { design, target, reg, delta, .. } => {
            for i in 0..2 {
                w.matrix(&format!("A{}obj", i + 1), &design[i])?;
                w.vector(&format!("b{}obj", i + 1), &target[i])?;
                w.scalar(&format!("lambda{}", i + 1), reg[i])?;
                w.scalar(&format!("delta{}", i + 1), delta[i])?;
            }
        }
    }
    w.matrix("A", &instance.cons_matrix)?;
    w.vector("b", &instance.cons_rhs)?;
    Ok(w.out)
}

/// Assistant message listing `solutions`.
pub fn assistant_text(solutions: &[Vec<f64>]) -> Result<String> {
    if solutions.is_empty() {
        return Ok(String::new());
    }
    let mut out = String::from("SOLUTIONS_BEGIN");
    for (k, x) in solutions.iter().enumerate() {
        let body = encode_sequence(x).map_err(|e| with_path(e, &format!("Sol{k}")))?;
        let _ = write!(out, " Sol{k}: {body}");
    }
    out.push_str(" SOLUTIONS_END");
    Ok(out)
}

/// `k` is the frontier size announced in the system prompt.
pub fn serialize(instance: &ProblemInstance, anchors: (&[f64], &[f64]), frontier: Option<&Frontier>, k: usize) -> Result<PromptBundle> {
    Ok(PromptBundle {
        system: system_prompt(instance.family(), k),
        user: user_text(instance, anchors)?,
        assistant: match frontier {
            Some(f) => assistant_text(&f.solutions())?,
            None => String::new(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SlotStatus {
    Ok,
    WrongTokenCount { expected: usize, found: usize },
    BadToken { pos: usize, msg: String },
    /// Beyond the first `K` groups.
    Extra,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotReport {
    /// The number after `Sol`, when it fits in `usize`.
    pub label: Option<usize>,
    pub status: SlotStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsedSolutions {
    pub vectors: Vec<Vec<f64>>,
    pub slots: Vec<SlotReport>,
    /// No `SOLUTIONS_BEGIN` marker was found.
    pub structural_failure: bool,
    pub missing_end: bool,
}

impl ParsedSolutions {
    pub fn skipped(&self) -> usize {
        self.slots.iter().filter(|s| !matches!(s.status, SlotStatus::Ok | SlotStatus::Extra)).count()
    }
}

fn sol_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"Sol(\d+)\s*:").expect("valid pattern"))
}

/// Extracts up to `k` vectors of length `n` from assistant-format text.
pub fn parse_solutions(text: &str, n: usize, k: usize) -> ParsedSolutions {
    let mut out = ParsedSolutions { vectors: vec![], slots: vec![], structural_failure: false, missing_end: false };
    let Some(start) = text.find("SOLUTIONS_BEGIN") else {
        out.structural_failure = true;
        return out;
    };
    let body = &text[start + "SOLUTIONS_BEGIN".len()..];
    let body = match body.find("SOLUTIONS_END") {
        Some(end) => &body[..end],
        None => {
            out.missing_end = true;
            body
        }
    };
    let marks: Vec<_> = sol_marker().captures_iter(body).collect();
    for (i, cap) in marks.iter().enumerate() {
        let whole = cap.get(0).expect("group 0");
        let label = cap[1].parse::<usize>().ok();
        let stop = marks.get(i + 1).map_or(body.len(), |c| c.get(0).expect("group 0").start());
        let chunk = &body[whole.end()..stop];
        let status = if out.vectors.len() >= k {
            SlotStatus::Extra
        } else {
            match scan_tokens(chunk) {
                Err(Error::Parse { pos, msg }) => SlotStatus::BadToken { pos: pos + whole.end(), msg },
                Err(e) => SlotStatus::BadToken { pos: whole.end(), msg: e.to_string() },
                Ok(tokens) if tokens.len() != 2 * n => SlotStatus::WrongTokenCount { expected: 2 * n, found: tokens.len() },
                Ok(tokens) => match pair_tokens(&tokens) {
                    Ok(pairs) => {
                        out.vectors.push(pairs.iter().map(|t| t.value()).collect());
                        SlotStatus::Ok
                    }
                    Err(Error::Parse { pos, msg }) => SlotStatus::BadToken { pos: pos + whole.end(), msg },
                    Err(e) => SlotStatus::BadToken { pos: whole.end(), msg: e.to_string() },
                },
            }
        };
        out.slots.push(SlotReport { label, status });
    }
    out
}
