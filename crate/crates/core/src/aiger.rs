//! ASCII AIGER (`aag`) reading and writing.
//!
//! Latches are split on read: each latch output becomes an extra input
//! after the regular inputs and each next-state function an extra output
//! after the regular outputs. Written files are purely combinational.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::aig::{Aig, Lit};

#[derive(Debug, Error)]
pub enum AigerError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn err(line: usize, msg: impl Into<String>) -> AigerError {
    AigerError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AigerHeader {
    pub max_var: u32,
    pub inputs: u32,
    pub latches: u32,
    pub outputs: u32,
    pub ands: u32,
}

fn parse_header(line: &str) -> Result<AigerHeader, AigerError> {
    let f: Vec<&str> = line.split_whitespace().collect();
    match f.first() {
        Some(&"aag") => {}
        Some(&"aig") => return Err(err(1, "binary AIGER is not supported, convert to aag first")),
        _ => return Err(err(1, "expected `aag M I L O A` header")),
    }
    if f.len() != 6 {
        return Err(err(1, "expected `aag M I L O A` header"));
    }
    let n: Vec<u32> = f[1..]
        .iter()
        .map(|s| s.parse().map_err(|_| err(1, format!("bad header field `{s}`"))))
        .collect::<Result<_, _>>()?;
    let h = AigerHeader {
        max_var: n[0],
        inputs: n[1],
        latches: n[2],
        outputs: n[3],
        ands: n[4],
    };
    if (h.max_var as u64) < h.inputs as u64 + h.latches as u64 + h.ands as u64 {
        return Err(err(1, "M is smaller than I + L + A"));
    }
    if h.max_var >= 1 << 30 {
        return Err(err(1, "M too large"));
    }
    Ok(h)
}

#[derive(Clone, Copy)]
enum Def {
    Undefined,
    Input(Lit),
    And { line: usize, a: u32, b: u32 },
    Resolved(Lit),
}

pub fn parse_aag(text: &str) -> Result<Aig, AigerError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let h = parse_header(first)?;
    let max_lit = 2 * h.max_var + 1;
    let mut next = |what: &str| -> Result<(usize, Vec<u32>), AigerError> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))?;
        let nums = l
            .split_whitespace()
            .map(|s| s.parse::<u32>().map_err(|_| err(ln, format!("bad literal `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        for &v in &nums {
            if v > max_lit {
                return Err(err(ln, format!("literal {v} exceeds 2M+1 = {max_lit}")));
            }
        }
        Ok((ln, nums))
    };

    let mut defs = vec![Def::Undefined; h.max_var as usize + 1];
    let mut aig = Aig::new(0);
    let define = |defs: &mut Vec<Def>, ln: usize, lit: u32, d: Def| -> Result<(), AigerError> {
        if lit & 1 == 1 || lit < 2 {
            return Err(err(ln, format!("cannot define literal {lit}")));
        }
        let v = (lit >> 1) as usize;
        if !matches!(defs[v], Def::Undefined) {
            return Err(err(ln, format!("variable {v} defined twice")));
        }
        defs[v] = d;
        Ok(())
    };

    for _ in 0..h.inputs {
        let (ln, n) = next("input")?;
        if n.len() != 1 {
            return Err(err(ln, "expected one input literal"));
        }
        let l = aig.add_input();
        define(&mut defs, ln, n[0], Def::Input(l))?;
    }
    let mut latch_next = Vec::new();
    for _ in 0..h.latches {
        let (ln, n) = next("latch")?;
        if n.len() != 2 && n.len() != 3 {
            return Err(err(ln, "expected `<lit> <next> [<reset>]`"));
        }
        let l = aig.add_input();
        define(&mut defs, ln, n[0], Def::Input(l))?;
        latch_next.push((ln, n[1]));
    }
    let mut outputs = Vec::new();
    for _ in 0..h.outputs {
        let (ln, n) = next("output")?;
        if n.len() != 1 {
            return Err(err(ln, "expected one output literal"));
        }
        outputs.push((ln, n[0]));
    }
    for _ in 0..h.ands {
        let (ln, n) = next("and gate")?;
        if n.len() != 3 {
            return Err(err(ln, "expected `<lhs> <rhs0> <rhs1>`"));
        }
        define(
            &mut defs,
            ln,
            n[0],
            Def::And {
                line: ln,
                a: n[1],
                b: n[2],
            },
        )?;
    }
    // Remaining lines are symbols and comments.

    let mut on_stack = vec![false; defs.len()];
    for v in 0..defs.len() {
        if matches!(defs[v], Def::And { .. }) {
            resolve(&mut aig, &mut defs, &mut on_stack, v as u32)?;
        }
    }
    let lit_of = |defs: &[Def], ln: usize, code: u32| -> Result<Lit, AigerError> {
        let v = (code >> 1) as usize;
        let base = match defs[v] {
            _ if v == 0 => Lit::FALSE,
            Def::Resolved(l) | Def::Input(l) => l,
            _ => return Err(err(ln, format!("literal {code} is undefined"))),
        };
        Ok(base ^ (code & 1 == 1))
    };
    for (ln, code) in outputs.into_iter().chain(latch_next) {
        let l = lit_of(&defs, ln, code)?;
        aig.add_output(l).map_err(|e| err(ln, e.to_string()))?;
    }
    aig.set_split_latches(h.latches as usize);
    Ok(aig)
}

/// Resolves AND variable `v` and, depth first, everything it depends on.
fn resolve(aig: &mut Aig, defs: &mut [Def], on_stack: &mut [bool], v: u32) -> Result<(), AigerError> {
    // Explicit stack: (variable, line referencing it, children pushed).
    let mut stack: Vec<(u32, usize, bool)> = vec![(v, 0, false)];
    while let Some(&(var, from, expanded)) = stack.last() {
        let vi = var as usize;
        match defs[vi] {
            Def::Input(_) | Def::Resolved(_) => {
                stack.pop();
            }
            Def::Undefined if var == 0 => {
                stack.pop();
            }
            Def::Undefined => {
                return Err(err(from, format!("literal {} is undefined", 2 * var)));
            }
            Def::And { line, a, b } if !expanded => {
                stack.last_mut().unwrap().2 = true;
                on_stack[vi] = true;
                for c in [a, b] {
                    let cv = (c >> 1) as usize;
                    if on_stack[cv] {
                        return Err(err(line, format!("cyclic definition through variable {cv}")));
                    }
                    stack.push((c >> 1, line, false));
                }
            }
            Def::And { line, a, b } => {
                let get = |c: u32| -> Lit {
                    let base = match defs[(c >> 1) as usize] {
                        Def::Input(l) | Def::Resolved(l) => l,
                        _ => Lit::FALSE,
                    };
                    base ^ (c & 1 == 1)
                };
                let l = aig.add_and(get(a), get(b)).map_err(|e| err(line, e.to_string()))?;
                defs[vi] = Def::Resolved(l);
                on_stack[vi] = false;
                stack.pop();
            }
        }
    }
    Ok(())
}

pub fn read_aag(path: &Path) -> Result<Aig, AigerError> {
    parse_aag(&std::fs::read_to_string(path)?)
}

/// Serializes the live, output-reachable part of `aig` with dense
/// topological numbering.
pub fn to_aag(aig: &Aig) -> String {
    let mut g = aig.clone();
    g.sweep_dangling();
    let (g, _) = g.compact();
    let i = g.num_inputs();
    let a = g.num_ands();
    let mut s = String::new();
    let _ = writeln!(s, "aag {} {} 0 {} {}", i + a, i, g.num_outputs(), a);
    for k in 0..i {
        let _ = writeln!(s, "{}", g.input(k).code());
    }
    for o in g.outputs() {
        let _ = writeln!(s, "{}", o.code());
    }
    for id in g.topo_order() {
        if g.is_and(id) {
            let [x, y] = g.fanins(id);
            let _ = writeln!(s, "{} {} {}", 2 * id.0, y.code(), x.code());
        }
    }
    if g.split_latches() > 0 {
        let l = g.split_latches();
        let _ = writeln!(s, "c");
        let _ = writeln!(
            s,
            "split latches: the last {l} inputs are latch outputs and the last {l} outputs their next-state functions"
        );
    }
    s
}

pub fn write_aag(aig: &Aig, path: &Path) -> Result<(), AigerError> {
    std::fs::write(path, to_aag(aig))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{check_equiv, CheckMode, Verdict};

    #[test]
    fn empty_and_smallest() {
        let aig = parse_aag("aag 0 0 0 0 0\n").unwrap();
        assert_eq!((aig.num_inputs(), aig.num_outputs(), aig.num_ands()), (0, 0, 0));
        let aig = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n").unwrap();
        assert_eq!(aig.num_ands(), 1);
        assert_eq!(to_aag(&aig), "aag 3 2 0 1 1\n2\n4\n6\n6 4 2\n");
    }

    #[test]
    fn duplicate_ands_merge() {
        let aig = parse_aag("aag 4 2 0 2 2\n2\n4\n6\n8\n6 2 4\n8 4 2\n").unwrap();
        assert_eq!(aig.num_ands(), 1);
        assert_eq!(aig.outputs()[0], aig.outputs()[1]);
    }

    #[test]
    fn out_of_order_definitions_and_symbols() {
        let text = "aag 5 2 0 1 3\n2\n4\n11\n10 7 9\n6 2 5\n8 3 4\ni0 a\ni1 b\no0 xor\nc\nanything goes\n";
        let aig = parse_aag(text).unwrap();
        assert_eq!(aig.num_ands(), 3);
        let mut xor = Aig::new(2);
        let l = xor.add_xor(xor.input(0), xor.input(1)).unwrap();
        xor.add_output(l).unwrap();
        assert_eq!(
            check_equiv(&aig, &xor, CheckMode::Exhaustive).unwrap(),
            Verdict::Equivalent
        );
    }

    #[test]
    fn latches_are_split() {
        // One latch toggled by an input: next = l ^ i.
        let text = "aag 5 1 1 1 3\n2\n4 11\n4\n6 2 5\n8 3 4\n10 7 9\n";
        let aig = parse_aag(text).unwrap();
        assert_eq!(aig.num_inputs(), 2);
        assert_eq!(aig.num_outputs(), 2);
        assert_eq!(aig.split_latches(), 1);
        let out = to_aag(&aig);
        assert!(out.starts_with("aag 5 2 0 2 3\n"));
        assert!(out.contains("\nc\nsplit latches"));
        let back = parse_aag(&out).unwrap();
        assert_eq!(
            check_equiv(&aig, &back, CheckMode::Exhaustive).unwrap(),
            Verdict::Equivalent
        );
        // With a reset value field as well.
        assert!(parse_aag("aag 1 0 1 0 0\n2 3 0\n").is_ok());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("", 1),
            ("aig 0 0 0 0 0\n", 1),
            ("aag 1 2 0 0 0\n2\n4\n", 1),
            ("aag 1 1 0 0 0\n3\n", 2),
            ("aag 2 1 0 1 0\n2\n9\n", 3),
            ("aag 2 1 0 1 0\n2\n4\n", 3),
            ("aag 3 1 0 1 2\n2\n6\n4 6 2\n6 4 2\n", 5),
            ("aag 2 1 0 0 1\n2\n2 2 2\n", 3),
            ("aag 3 1 0 1 1\n2\n6\n6 2 x\n", 4),
        ];
        for &(text, line) in cases {
            match parse_aag(text) {
                Err(AigerError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn writer_drops_dangling_and_is_stable() {
        let mut aig = Aig::new(3);
        let a = aig.add_and(aig.input(0), aig.input(1)).unwrap();
        let _dangling = aig.add_and(aig.input(1), aig.input(2)).unwrap();
        let b = aig.add_and(a, !aig.input(2)).unwrap();
        aig.add_output(!b).unwrap();
        aig.add_output(Lit::TRUE).unwrap();
        let text = to_aag(&aig);
        assert_eq!(text, "aag 5 3 0 2 2\n2\n4\n6\n11\n1\n8 4 2\n10 8 7\n");
        assert_eq!(to_aag(&aig), text);
        let back = parse_aag(&text).unwrap();
        assert_eq!(to_aag(&back), text);
        assert_eq!(back.num_ands(), 2);
    }
}
