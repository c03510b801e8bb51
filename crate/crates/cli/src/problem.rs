//! The line-oriented problem-file format: a universe declaration, named
//! operations, relations, groups, subgroups, and check directives.
//!
//! ```text
//! # comments start with '#'
//! universe 2
//! op AND arity=2 table=[0,0,0,1]
//! op P1 proj 2 1
//! op F3 translation 3
//! op FB indicator set=[2,3] a=0 b=1
//! op C0 constant 0 arity=1
//! rel LEQ arity=2 tuples=[(0,0),(0,1),(1,1)]
//! group Z z-rank=1 torsion=[] bounds=[31]
//! group Z12 z-rank=0 torsion=[12]
//! subgroup H of=Z12 gens=[3]
//! check pol-inv gens=AND arity=2
//! ```
//!
//! Tokens are whitespace-separated; lists must not contain spaces. Every
//! error carries the line number it came from.

use std::collections::BTreeMap;
use std::fmt;

use clonelab_core::group::{AbelianGroup, GroupWindow, SubgroupHandle};
use clonelab_core::{OpTable, Operation, Relation, Universe};

/// A parse failure, pointing at the offending line (1-based).
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// A `check` line from the file: kind plus `key=value` arguments.
#[derive(Clone, Debug)]
pub struct Directive {
    pub kind: String,
    pub args: BTreeMap<String, String>,
    pub line: usize,
}

/// A fully parsed problem file with resolved names.
#[derive(Debug, Default)]
pub struct ProblemFile {
    pub universe: Option<Universe>,
    ops: Vec<(String, Operation)>,
    rels: Vec<(String, Relation)>,
    windows: Vec<(String, GroupWindow)>,
    subgroups: Vec<(String, SubgroupHandle)>,
    pub checks: Vec<Directive>,
}

impl ProblemFile {
    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn rel(&self, name: &str) -> Option<&Relation> {
        self.rels.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn window(&self, name: &str) -> Option<&GroupWindow> {
        self.windows.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn subgroup(&self, name: &str) -> Option<&SubgroupHandle> {
        self.subgroups
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    fn known(&self, name: &str) -> bool {
        self.op(name).is_some()
            || self.rel(name).is_some()
            || self.window(name).is_some()
            || self.subgroup(name).is_some()
    }
}

fn split_kv(token: &str) -> Option<(&str, &str)> {
    token.split_once('=')
}

/// Parse `[a,b,c]` into integers; `[]` is empty.
fn parse_int_list(s: &str, line: usize) -> Result<Vec<i64>, ParseError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or(ParseError {
            line,
            message: format!("expected a bracketed list, found `{s}`"),
        })?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|p| {
            p.parse::<i64>().map_err(|_| ParseError {
                line,
                message: format!("`{p}` is not an integer"),
            })
        })
        .collect()
}

fn parse_u8_list(s: &str, line: usize) -> Result<Vec<u8>, ParseError> {
    parse_int_list(s, line)?
        .into_iter()
        .map(|v| {
            u8::try_from(v).map_err(|_| ParseError {
                line,
                message: format!("value {v} does not fit an element (0..=255)"),
            })
        })
        .collect()
}

/// Parse `[(0,0),(0,1)]` (or `[3,4]`, promoting bare integers to 1-tuples)
/// into integer vectors.
fn parse_tuple_list(s: &str, line: usize) -> Result<Vec<Vec<i64>>, ParseError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or(ParseError {
            line,
            message: format!("expected a bracketed list, found `{s}`"),
        })?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = inner;
    loop {
        if let Some(stripped) = rest.strip_prefix('(') {
            let (tuple, tail) = stripped.split_once(')').ok_or(ParseError {
                line,
                message: "unclosed tuple parenthesis".into(),
            })?;
            out.push(parse_int_list(&format!("[{tuple}]"), line)?);
            rest = match tail.strip_prefix(',') {
                Some(t) => t,
                None if tail.is_empty() => break,
                None => {
                    return err(line, "expected `,` between tuples");
                }
            };
        } else {
            let (head, tail) = match rest.split_once(',') {
                Some((h, t)) => (h, Some(t)),
                None => (rest, None),
            };
            let v: i64 = head.parse().map_err(|_| ParseError {
                line,
                message: format!("`{head}` is not an integer"),
            })?;
            out.push(vec![v]);
            match tail {
                Some(t) => rest = t,
                None => break,
            }
        }
    }
    Ok(out)
}

fn tuple_to_u8(t: &[i64], line: usize) -> Result<Vec<u8>, ParseError> {
    t.iter()
        .map(|&v| {
            u8::try_from(v).map_err(|_| ParseError {
                line,
                message: format!("value {v} does not fit an element (0..=255)"),
            })
        })
        .collect()
}

struct LineCtx<'a> {
    line: usize,
    tokens: Vec<&'a str>,
}

impl LineCtx<'_> {
    fn kv(&self, key: &str) -> Option<&str> {
        self.tokens
            .iter()
            .filter_map(|t| split_kv(t))
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
    }

    fn require(&self, key: &str) -> Result<&str, ParseError> {
        self.kv(key).ok_or(ParseError {
            line: self.line,
            message: format!("missing `{key}=`"),
        })
    }

    fn usize_kv(&self, key: &str) -> Result<usize, ParseError> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| ParseError {
            line: self.line,
            message: format!("`{raw}` is not a count"),
        })
    }

    fn u8_kv(&self, key: &str) -> Result<u8, ParseError> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| ParseError {
            line: self.line,
            message: format!("`{raw}` is not an element"),
        })
    }
}

/// Parse a problem file. Names must be unique across all kinds of
/// declarations, and all references (`of=`, check arguments naming
/// declared objects) must resolve.
pub fn parse(text: &str) -> Result<ProblemFile, ParseError> {
    let mut file = ProblemFile::default();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let ctx = LineCtx {
            line,
            tokens: tokens[1..].to_vec(),
        };
        match tokens[0] {
            "universe" => {
                if file.universe.is_some() {
                    return err(line, "universe already declared");
                }
                let m: usize = tokens
                    .get(1)
                    .ok_or(ParseError {
                        line,
                        message: "missing universe size".into(),
                    })?
                    .parse()
                    .map_err(|_| ParseError {
                        line,
                        message: "universe size must be a count".into(),
                    })?;
                file.universe = Some(Universe::new(m).map_err(|e| ParseError {
                    line,
                    message: e.to_string(),
                })?);
            }
            "op" => parse_op(&mut file, &ctx)?,
            "rel" => parse_rel(&mut file, &ctx)?,
            "group" => parse_group(&mut file, &ctx)?,
            "subgroup" => parse_subgroup(&mut file, &ctx)?,
            "check" => parse_check(&mut file, &ctx)?,
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }
    Ok(file)
}

fn claim_name(file: &ProblemFile, name: &str, line: usize) -> Result<String, ParseError> {
    if name.is_empty() || name.contains('=') {
        return err(line, format!("`{name}` is not a usable name"));
    }
    if file.known(name) {
        return err(line, format!("name `{name}` is already declared"));
    }
    Ok(name.to_string())
}

fn parse_op(file: &mut ProblemFile, ctx: &LineCtx) -> Result<(), ParseError> {
    let line = ctx.line;
    let name = claim_name(
        file,
        ctx.tokens.first().copied().unwrap_or_default(),
        line,
    )?;
    let shape = ctx.tokens.get(1).copied().unwrap_or_default();
    let op = match shape {
        "proj" => {
            let arity: usize = parse_pos(ctx, 2, "projection arity")?;
            let index: usize = parse_pos(ctx, 3, "projection index")?;
            Operation::projection(arity, index).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?
        }
        "translation" => {
            let raw = ctx.tokens.get(2).copied().ok_or(ParseError {
                line,
                message: "missing translation shift".into(),
            })?;
            let shift: Vec<i64> = if raw.starts_with('(') {
                parse_tuple_list(&format!("[{raw}]"), line)?
                    .pop()
                    .unwrap_or_default()
            } else {
                vec![raw.parse().map_err(|_| ParseError {
                    line,
                    message: format!("`{raw}` is not an integer shift"),
                })?]
            };
            let window = match ctx.kv("of") {
                Some(group_name) => file
                    .window(group_name)
                    .ok_or(ParseError {
                        line,
                        message: format!("unknown group `{group_name}`"),
                    })?
                    .clone(),
                None => {
                    let u = file.universe.ok_or(ParseError {
                        line,
                        message: "translation without `of=` needs a universe declared first"
                            .into(),
                    })?;
                    GroupWindow::z_window(u.size()).map_err(|e| ParseError {
                        line,
                        message: e.to_string(),
                    })?
                }
            };
            Operation::translation(window, &shift).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?
        }
        "indicator" => {
            let set = parse_u8_list(ctx.require("set")?, line)?;
            let a = ctx.u8_kv("a")?;
            let b = ctx.u8_kv("b")?;
            Operation::indicator(set, a, b).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?
        }
        "constant" => {
            let value: u8 = parse_pos(ctx, 2, "constant value")?;
            let arity = ctx.usize_kv("arity")?;
            Operation::constant(arity, value).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?
        }
        _ if shape.starts_with("arity=") => {
            let u = file.universe.ok_or(ParseError {
                line,
                message: "table operations need a universe declared first".into(),
            })?;
            let arity = ctx.usize_kv("arity")?;
            let entries = parse_u8_list(ctx.require("table")?, line)?;
            Operation::Table(OpTable::new(u, arity, entries).map_err(|e| ParseError {
                line,
                message: e.to_string(),
            })?)
        }
        other => {
            return err(
                line,
                format!("unknown operation shape `{other}` (expected arity=, proj, translation, indicator, or constant)"),
            );
        }
    };
    file.ops.push((name, op));
    Ok(())
}

fn parse_pos<T: std::str::FromStr>(
    ctx: &LineCtx,
    index: usize,
    what: &str,
) -> Result<T, ParseError> {
    let raw = ctx.tokens.get(index).copied().ok_or(ParseError {
        line: ctx.line,
        message: format!("missing {what}"),
    })?;
    raw.parse().map_err(|_| ParseError {
        line: ctx.line,
        message: format!("`{raw}` is not a valid {what}"),
    })
}

fn parse_rel(file: &mut ProblemFile, ctx: &LineCtx) -> Result<(), ParseError> {
    let line = ctx.line;
    let name = claim_name(
        file,
        ctx.tokens.first().copied().unwrap_or_default(),
        line,
    )?;
    let u = file.universe.ok_or(ParseError {
        line,
        message: "relations need a universe declared first".into(),
    })?;
    let arity = ctx.usize_kv("arity")?;
    let tuples = parse_tuple_list(ctx.require("tuples")?, line)?
        .iter()
        .map(|t| tuple_to_u8(t, line))
        .collect::<Result<Vec<_>, _>>()?;
    let rel = Relation::new(u, arity, tuples).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    file.rels.push((name, rel));
    Ok(())
}

fn parse_group(file: &mut ProblemFile, ctx: &LineCtx) -> Result<(), ParseError> {
    let line = ctx.line;
    let name = claim_name(
        file,
        ctx.tokens.first().copied().unwrap_or_default(),
        line,
    )?;
    let rank = ctx.usize_kv("z-rank")?;
    let torsion = parse_int_list(ctx.require("torsion")?, line)?;
    let group = AbelianGroup::new(rank, torsion).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    let window = if rank == 0 {
        if ctx.kv("bounds").is_some() {
            return err(line, "torsion groups window themselves; drop `bounds=`");
        }
        GroupWindow::whole(group)
    } else {
        let bounds = parse_int_list(ctx.require("bounds")?, line)?;
        GroupWindow::new(group, bounds)
    }
    .map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    file.windows.push((name, window));
    Ok(())
}

fn parse_subgroup(file: &mut ProblemFile, ctx: &LineCtx) -> Result<(), ParseError> {
    let line = ctx.line;
    let name = claim_name(
        file,
        ctx.tokens.first().copied().unwrap_or_default(),
        line,
    )?;
    let of = ctx.require("of")?;
    let window = file.window(of).ok_or(ParseError {
        line,
        message: format!("unknown group `{of}`"),
    })?;
    let group = window.group().clone();
    let gens = parse_tuple_list(ctx.require("gens")?, line)?;
    let handle = SubgroupHandle::new(group, gens).map_err(|e| ParseError {
        line,
        message: e.to_string(),
    })?;
    file.subgroups.push((name, handle));
    Ok(())
}

fn parse_check(file: &mut ProblemFile, ctx: &LineCtx) -> Result<(), ParseError> {
    let line = ctx.line;
    let kind = ctx
        .tokens
        .first()
        .copied()
        .ok_or(ParseError {
            line,
            message: "missing check kind".into(),
        })?
        .to_string();
    let mut args = BTreeMap::new();
    for token in &ctx.tokens[1..] {
        match split_kv(token) {
            Some((k, v)) => {
                args.insert(k.to_string(), v.to_string());
            }
            None => return err(line, format!("expected key=value, found `{token}`")),
        }
    }
    // named references in directive arguments must resolve now
    for key in ["gens", "op", "rels", "rel", "subgroup", "group"] {
        if let Some(list) = args.get(key) {
            for name in list.split(',') {
                if !file.known(name) {
                    return err(line, format!("unknown name `{name}` in `{key}=`"));
                }
            }
        }
    }
    file.checks.push(Directive { kind, args, line });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_kitchen_sink() {
        let text = "\
# a representative file
universe 5

op AND arity=2 table=[0,0,0,0,0,0,1,1,0,1,2,2,0,1,2,3,0,1,2,3]  # wrong length caught below in its own test
";
        // the table above has 20 entries, not 25: parse must fail on line 4
        let e = parse(text).unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn parses_operations_of_every_shape() {
        let text = "\
universe 4
op MAX arity=2 table=[0,1,2,3,1,1,2,3,2,2,2,3,3,3,3,3]
op P1 proj 2 1
op S translation 1
op FB indicator set=[2,3] a=0 b=1
op C0 constant 0 arity=1
rel LEQ arity=2 tuples=[(0,0),(0,1),(1,1)]
";
        let f = parse(text).unwrap();
        assert_eq!(f.universe.unwrap().size(), 4);
        assert_eq!(f.op("MAX").unwrap().evaluate(&[1, 2]).unwrap(), 2);
        assert_eq!(f.op("P1").unwrap().evaluate(&[3, 1]).unwrap(), 3);
        assert_eq!(f.op("S").unwrap().evaluate(&[2]).unwrap(), 3);
        assert_eq!(f.op("FB").unwrap().evaluate(&[2]).unwrap(), 0);
        assert_eq!(f.op("FB").unwrap().evaluate(&[0]).unwrap(), 1);
        assert_eq!(f.op("C0").unwrap().evaluate(&[3]).unwrap(), 0);
        assert_eq!(f.rel("LEQ").unwrap().len(), 3);
    }

    #[test]
    fn parses_groups_subgroups_and_group_translations() {
        let text = "\
group Z12 z-rank=0 torsion=[12]
subgroup H of=Z12 gens=[3]
op F3 translation (3) of=Z12
group Z z-rank=1 torsion=[] bounds=[10]
op T2 translation 2 of=Z
";
        let f = parse(text).unwrap();
        assert!(f.window("Z12").is_some());
        assert!(f.subgroup("H").is_some());
        assert_eq!(f.op("F3").unwrap().evaluate(&[11]).unwrap(), 2);
        assert_eq!(f.op("T2").unwrap().evaluate(&[3]).unwrap(), 5);
    }

    #[test]
    fn check_directives_carry_arguments_and_validate_names() {
        let text = "\
universe 2
op NOT arity=1 table=[1,0]
check pol-inv gens=NOT arity=1
";
        let f = parse(text).unwrap();
        assert_eq!(f.checks.len(), 1);
        assert_eq!(f.checks[0].kind, "pol-inv");
        assert_eq!(f.checks[0].args["gens"], "NOT");
        assert_eq!(f.checks[0].line, 3);

        let bad = "universe 2\ncheck pol-inv gens=MISSING\n";
        let e = parse(bad).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("MISSING"));
    }

    #[test]
    fn duplicate_names_are_rejected_with_the_line() {
        let text = "universe 2\nop A arity=1 table=[0,1]\nop A arity=1 table=[1,0]\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("already declared"));
    }

    #[test]
    fn error_lines_point_at_the_problem() {
        for (text, line) in [
            ("universe 2\nop X proj 2 5\n", 2),
            ("universe 2\nrel R arity=2 tuples=[(0,0)\n", 2),
            ("nonsense\n", 1),
            ("universe 2\nuniverse 3\n", 2),
            ("op T translation 1\n", 1),
            ("universe 2\n\nrel R arity=1 tuples=[(7)]\n", 3),
        ] {
            let e = parse(text).unwrap_err();
            assert_eq!(e.line, line, "for input {text:?}: {e}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# nothing here\nuniverse 3 # trailing comment\n\n";
        let f = parse(text).unwrap();
        assert_eq!(f.universe.unwrap().size(), 3);
    }
}
