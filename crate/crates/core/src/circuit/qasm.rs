//! OpenQASM 2.0 subset: one `qreg`, at most one `creg` (several when parsing
//! merged output), the standard single-qubit gates, `cx`, `measure` and
//! `barrier`. Register arguments without an index broadcast over the register.

use std::fmt::Write as _;

use super::{ClassicalRegister, Gate, GateKind, OneQubitGate, QuantumCircuit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: [&str; 13] = [
    "->", ";", ",", "[", "]", "(", ")", "+", "-", "*", "/", "^", "{",
];

fn lex(source: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit))
        {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            Tok::Number(text.parse().map_err(|_| Error::Syntax {
                line: tl,
                column: tc,
                message: format!("malformed number `{text}`"),
            })?)
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(Error::Syntax {
                    line: tl,
                    column: tc,
                    message: "unterminated string".into(),
                });
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else {
            let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    i += s.len();
                    Tok::Sym(s)
                }
                None => {
                    return Err(Error::Syntax {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        col += i - start;
        tokens.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    Ok(tokens)
}

/// Result of parsing a program that may carry several classical registers.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProgram {
    /// Classical bits are flattened: register `r` occupies
    /// `cregs[r].offset .. cregs[r].offset + cregs[r].size`.
    pub circuit: QuantumCircuit,
    pub qreg: String,
    pub cregs: Vec<ClassicalRegister>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
    allow_many_cregs: bool,
    qreg: Option<(String, usize)>,
    cregs: Vec<ClassicalRegister>,
    gates: Vec<Gate>,
}

enum Arg {
    Whole(String),
    Indexed(String, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.eof)
    }

    fn line(&self) -> usize {
        self.here().0
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.err(format!("expected `{sym}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Number(v)) if v.fract() == 0.0 && *v >= 0.0 => {
                let v = *v as usize;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected non-negative integer"),
        }
    }

    fn program(&mut self) -> Result<()> {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "OPENQASM") {
            self.pos += 1;
            match self.next() {
                Some(Tok::Number(_)) => {}
                _ => {
                    self.pos -= 1;
                    return self.err("expected version number");
                }
            }
            self.expect(";")?;
        }
        while self.peek().is_some() {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<()> {
        let line = self.line();
        let word = self.ident()?;
        match word.as_str() {
            "include" => {
                match self.next() {
                    Some(Tok::Str(_)) => {}
                    _ => {
                        self.pos -= 1;
                        return self.err("expected file name string");
                    }
                }
                self.expect(";")
            }
            "qreg" => {
                let name = self.ident()?;
                self.expect("[")?;
                let size = self.integer()?;
                self.expect("]")?;
                self.expect(";")?;
                if self.qreg.is_some() {
                    return Err(Error::MultipleRegisters {
                        line,
                        message: format!("second qreg `{name}`"),
                    });
                }
                self.qreg = Some((name, size));
                Ok(())
            }
            "creg" => {
                let name = self.ident()?;
                self.expect("[")?;
                let size = self.integer()?;
                self.expect("]")?;
                self.expect(";")?;
                if !self.cregs.is_empty() && !self.allow_many_cregs {
                    return Err(Error::MultipleRegisters {
                        line,
                        message: format!("second creg `{name}`"),
                    });
                }
                if self.cregs.iter().any(|r| r.name == name) {
                    return self.err(format!("creg `{name}` declared twice"));
                }
                let offset = self.cregs.last().map_or(0, |r| r.offset + r.size);
                self.cregs.push(ClassicalRegister { name, offset, size });
                Ok(())
            }
            "measure" => {
                let q = self.argument()?;
                self.expect("->")?;
                let c = self.argument()?;
                self.expect(";")?;
                let qubits = self.resolve_qubits(q, line)?;
                let clbits = self.resolve_clbits(c, line)?;
                if qubits.len() != clbits.len() {
                    return Err(Error::Syntax {
                        line,
                        column: 1,
                        message: "measure operands have different sizes".into(),
                    });
                }
                for (q, c) in qubits.into_iter().zip(clbits) {
                    self.gates.push(Gate::measure(q, c));
                }
                Ok(())
            }
            "barrier" => {
                let args = self.arguments()?;
                self.expect(";")?;
                let mut qubits = Vec::new();
                for a in args {
                    for q in self.resolve_qubits(a, line)? {
                        if !qubits.contains(&q) {
                            qubits.push(q);
                        }
                    }
                }
                self.gates.push(Gate::barrier(qubits));
                Ok(())
            }
            "gate" | "opaque" | "reset" | "if" => Err(Error::UnsupportedGate { name: word, line }),
            _ => self.gate_call(word, line),
        }
    }

    fn gate_call(&mut self, name: String, line: usize) -> Result<()> {
        let kind = match name.as_str() {
            "cx" | "CX" => GateKind::Cx,
            "U" => GateKind::Single(OneQubitGate::U3),
            other => match OneQubitGate::from_name(other) {
                Some(g) => GateKind::Single(g),
                None => return Err(Error::UnsupportedGate { name, line }),
            },
        };
        let mut params = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                params.push(self.expr()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let args = self.arguments()?;
        self.expect(";")?;
        let wrong_arity = |expected: &str| Error::Syntax {
            line,
            column: 1,
            message: format!("`{name}` expects {expected}"),
        };
        match kind {
            GateKind::Cx => {
                if args.len() != 2 || !params.is_empty() {
                    return Err(wrong_arity("two qubit arguments and no parameters"));
                }
                let mut it = args.into_iter();
                let c = self.resolve_qubits(it.next().unwrap(), line)?;
                let t = self.resolve_qubits(it.next().unwrap(), line)?;
                if c.len() != 1 || t.len() != 1 {
                    return Err(wrong_arity("indexed qubit arguments"));
                }
                if c[0] == t[0] {
                    return Err(wrong_arity("two distinct qubits"));
                }
                self.gates.push(Gate::cx(c[0], t[0]));
            }
            GateKind::Single(g) => {
                if args.len() != 1 || params.len() != g.num_params() {
                    return Err(wrong_arity(&format!(
                        "one qubit argument and {} parameters",
                        g.num_params()
                    )));
                }
                for q in self.resolve_qubits(args.into_iter().next().unwrap(), line)? {
                    self.gates.push(Gate::single(g, q, params.clone()));
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn argument(&mut self) -> Result<Arg> {
        let name = self.ident()?;
        if self.eat("[") {
            let idx = self.integer()?;
            self.expect("]")?;
            Ok(Arg::Indexed(name, idx))
        } else {
            Ok(Arg::Whole(name))
        }
    }

    fn arguments(&mut self) -> Result<Vec<Arg>> {
        let mut args = vec![self.argument()?];
        while self.eat(",") {
            args.push(self.argument()?);
        }
        Ok(args)
    }

    fn resolve_qubits(&self, arg: Arg, line: usize) -> Result<Vec<usize>> {
        let Some((qname, size)) = &self.qreg else {
            return Err(Error::Syntax {
                line,
                column: 1,
                message: "qubit used before qreg declaration".into(),
            });
        };
        let (name, idx) = match arg {
            Arg::Whole(n) => (n, None),
            Arg::Indexed(n, i) => (n, Some(i)),
        };
        if &name != qname {
            return Err(Error::Syntax {
                line,
                column: 1,
                message: format!("unknown quantum register `{name}`"),
            });
        }
        match idx {
            None => Ok((0..*size).collect()),
            Some(i) if i < *size => Ok(vec![i]),
            Some(i) => Err(Error::Syntax {
                line,
                column: 1,
                message: format!("index {i} out of range for {name}[{size}]"),
            }),
        }
    }

    fn resolve_clbits(&self, arg: Arg, line: usize) -> Result<Vec<usize>> {
        let (name, idx) = match arg {
            Arg::Whole(n) => (n, None),
            Arg::Indexed(n, i) => (n, Some(i)),
        };
        let Some(reg) = self.cregs.iter().find(|r| r.name == name) else {
            return Err(Error::Syntax {
                line,
                column: 1,
                message: format!("unknown classical register `{name}`"),
            });
        };
        match idx {
            None => Ok((reg.offset..reg.offset + reg.size).collect()),
            Some(i) if i < reg.size => Ok(vec![reg.offset + i]),
            Some(i) => Err(Error::Syntax {
                line,
                column: 1,
                message: format!("index {i} out of range for {name}[{}]", reg.size),
            }),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat("+") {
                v += self.term()?;
            } else if self.eat("-") {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat("*") {
                v *= self.unary()?;
            } else if self.eat("/") {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat("-") {
            return Ok(-self.unary()?);
        }
        if self.eat("+") {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat("^") {
            return Ok(base.powf(self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        match self.next() {
            Some(Tok::Number(v)) => Ok(v),
            Some(Tok::Sym("(")) => {
                let v = self.expr()?;
                self.expect(")")?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                if name == "pi" {
                    return Ok(std::f64::consts::PI);
                }
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => {
                        self.pos -= 1;
                        return self.err(format!("unknown identifier `{name}` in expression"));
                    }
                };
                self.expect("(")?;
                let v = self.expr()?;
                self.expect(")")?;
                Ok(f(v))
            }
            _ => {
                self.pos -= 1;
                self.err("expected expression")
            }
        }
    }
}

fn parse_with(source: &str, allow_many_cregs: bool) -> Result<ParsedProgram> {
    let tokens = lex(source)?;
    let eof = tokens.last().map_or((1, 1), |t| (t.line, t.column + 1));
    let mut p = Parser {
        tokens,
        pos: 0,
        eof,
        allow_many_cregs,
        qreg: None,
        cregs: Vec::new(),
        gates: Vec::new(),
    };
    p.program()?;
    let (qreg, num_qubits) = p.qreg.ok_or_else(|| Error::Syntax {
        line: eof.0,
        column: eof.1,
        message: "missing qreg declaration".into(),
    })?;
    let num_clbits = p.cregs.last().map_or(0, |r| r.offset + r.size);
    let mut circuit = QuantumCircuit::new("", num_qubits, num_clbits);
    for g in p.gates {
        circuit.push(g)?;
    }
    Ok(ParsedProgram {
        circuit,
        qreg,
        cregs: p.cregs,
    })
}

/// Parse a single-register program.
pub fn parse_qasm(source: &str) -> Result<QuantumCircuit> {
    parse_with(source, false).map(|p| p.circuit)
}

/// Read a single-register program from disk. The circuit is named after the
/// file stem.
pub fn load_qasm(path: impl AsRef<std::path::Path>) -> Result<QuantumCircuit> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_qasm(&text)
        .map(|c| c.with_id(id))
        .map_err(|e| e.in_file(path))
}

/// Parse a program that may declare several classical registers, such as
/// the merged output of the compiler.
pub fn parse_program(source: &str) -> Result<ParsedProgram> {
    parse_with(source, true)
}

pub fn emit_qasm(circuit: &QuantumCircuit) -> String {
    let cregs = if circuit.num_clbits > 0 {
        vec![ClassicalRegister {
            name: "c".into(),
            offset: 0,
            size: circuit.num_clbits,
        }]
    } else {
        Vec::new()
    };
    emit_program(circuit, &cregs)
}

/// Emit `circuit` with its flattened classical bits split over `cregs`.
pub fn emit_program(circuit: &QuantumCircuit, cregs: &[ClassicalRegister]) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits);
    for r in cregs {
        let _ = writeln!(out, "creg {}[{}];", r.name, r.size);
    }
    for g in circuit.gates() {
        match g.kind {
            GateKind::Single(s) => {
                out.push_str(s.name());
                if !g.params.is_empty() {
                    let ps: Vec<String> = g.params.iter().map(|p| format!("{p:?}")).collect();
                    let _ = write!(out, "({})", ps.join(","));
                }
                let _ = writeln!(out, " q[{}];", g.qubits[0]);
            }
            GateKind::Cx => {
                let _ = writeln!(out, "cx q[{}],q[{}];", g.qubits[0], g.qubits[1]);
            }
            GateKind::Measure => {
                let bit = g.clbit.expect("measure without clbit");
                let reg = cregs
                    .iter()
                    .find(|r| bit >= r.offset && bit < r.offset + r.size)
                    .expect("clbit outside every classical register");
                let _ = writeln!(
                    out,
                    "measure q[{}] -> {}[{}];",
                    g.qubits[0],
                    reg.name,
                    bit - reg.offset
                );
            }
            GateKind::Barrier => {
                let qs: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
                let _ = writeln!(out, "barrier {};", qs.join(","));
            }
        }
    }
    out
}
