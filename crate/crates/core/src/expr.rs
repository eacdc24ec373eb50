//! Graphing-function expressions: parsing, printing and evaluation.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { ("*" | "/") factor }
//! factor := "-" factor | power
//! power  := atom [ "^" factor ]
//! atom   := number | "i" | "pi" | ident | ident "(" expr ")" | "(" expr ")"
//! ```
//!
//! Variables are `t1, t2` (tube), `z1, z1b, z2, z2b` (rigid) or `v` (one-variable
//! profiles). Exponents must be variable-free and real.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::jet::{Jet, JetError, ScalarKind, C64, SINGULAR_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// Real variables `t1, t2`.
    Tube,
    /// Conjugate-paired complex variables `z1, z1b, z2, z2b`.
    Rigid,
    /// One real variable `v`.
    Profile,
}

impl DomainKind {
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            DomainKind::Tube => &["t1", "t2"],
            DomainKind::Rigid => &["z1", "z1b", "z2", "z2b"],
            DomainKind::Profile => &["v"],
        }
    }

    pub fn scalar_kind(self) -> ScalarKind {
        match self {
            DomainKind::Rigid => ScalarKind::Complex,
            DomainKind::Tube | DomainKind::Profile => ScalarKind::Real,
        }
    }

    fn all() -> [DomainKind; 3] {
        [DomainKind::Tube, DomainKind::Rigid, DomainKind::Profile]
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Tube => "tube",
            DomainKind::Rigid => "rigid",
            DomainKind::Profile => "profile",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("unknown function `{name}` at {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("`{name}` at {pos} is not allowed in the {domain} domain")]
    DomainMix {
        name: String,
        pos: usize,
        domain: DomainKind,
    },
    #[error("expression belongs to the {expected} domain, evaluated in {got}")]
    DomainMismatch {
        expected: DomainKind,
        got: DomainKind,
    },
    #[error("evaluation failed at {pos}: {source}")]
    Eval {
        pos: usize,
        #[source]
        source: JetError,
    },
}

impl ExprError {
    /// The underlying jet error of an evaluation failure.
    pub fn jet_error(&self) -> Option<&JetError> {
        match self {
            ExprError::Eval { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExprError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Literal(C64),
    /// Index into [`DomainKind::variables`].
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// One AST node; `pos` is the byte offset in the source text (0 for
/// synthesized nodes). Equality ignores positions.
#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    pub pos: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Node {
    fn new(kind: NodeKind, pos: usize) -> Self {
        Self { kind, pos }
    }

    fn count(&self) -> usize {
        1 + match &self.kind {
            NodeKind::Literal(_) | NodeKind::Var(_) => 0,
            NodeKind::Neg(a) | NodeKind::Call(_, a) => a.count(),
            NodeKind::Binary(_, a, b) => a.count() + b.count(),
        }
    }

    fn has_vars(&self) -> bool {
        match &self.kind {
            NodeKind::Literal(_) => false,
            NodeKind::Var(_) => true,
            NodeKind::Neg(a) | NodeKind::Call(_, a) => a.has_vars(),
            NodeKind::Binary(_, a, b) => a.has_vars() || b.has_vars(),
        }
    }

    fn any(&self, pred: &dyn Fn(&NodeKind) -> bool) -> bool {
        pred(&self.kind)
            || match &self.kind {
                NodeKind::Literal(_) | NodeKind::Var(_) => false,
                NodeKind::Neg(a) | NodeKind::Call(_, a) => a.any(pred),
                NodeKind::Binary(_, a, b) => a.any(pred) || b.any(pred),
            }
    }
}

/// A validated expression together with the domain its variables live in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    domain: DomainKind,
    root: Node,
}

/// Where to evaluate: the domain and the point. Rigid points list only
/// `(z1, z2)`; the conjugates are supplied during seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalDomain {
    pub kind: DomainKind,
    pub point: Vec<C64>,
}

impl EvalDomain {
    pub fn tube(t1: f64, t2: f64) -> Self {
        Self {
            kind: DomainKind::Tube,
            point: vec![C64::new(t1, 0.0), C64::new(t2, 0.0)],
        }
    }

    pub fn rigid(z1: C64, z2: C64) -> Self {
        Self {
            kind: DomainKind::Rigid,
            point: vec![z1, z2],
        }
    }

    pub fn profile(v: f64) -> Self {
        Self {
            kind: DomainKind::Profile,
            point: vec![C64::new(v, 0.0)],
        }
    }

    /// Coordinates of every domain variable, conjugates included.
    pub fn seed_point(&self) -> Vec<C64> {
        match self.kind {
            DomainKind::Rigid => {
                let (z1, z2) = (self.point[0], self.point[1]);
                vec![z1, z1.conj(), z2, z2.conj()]
            }
            _ => self.point.clone(),
        }
    }
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                pos: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                pos: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

// ---------------------------------------------------------------- parsing

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    domain: DomainKind,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{c}`")))
        }
    }

    fn unexpected(&self, what: &str) -> ExprError {
        let found = match self.peek() {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        };
        ExprError::Syntax {
            pos: self.pos(),
            message: format!("{what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            let pos = self.pos();
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn factor(&mut self) -> Result<Node> {
        let pos = self.pos();
        if self.eat('-') {
            let inner = self.factor()?;
            return Ok(Node::new(NodeKind::Neg(Box::new(inner)), pos));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        let pos = self.pos();
        if self.eat('^') {
            let exponent = self.factor()?;
            if exponent.has_vars() {
                return Err(ExprError::Syntax {
                    pos: exponent.pos,
                    message: "exponent must not contain variables".into(),
                });
            }
            let value = fold_constant(&exponent).map_err(|source| ExprError::Eval {
                pos: exponent.pos,
                source,
            })?;
            if value.im != 0.0 || !value.re.is_finite() {
                return Err(ExprError::Syntax {
                    pos: exponent.pos,
                    message: "exponent must be a finite real constant".into(),
                });
            }
            return Ok(Node::new(
                NodeKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                pos,
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(x) => Ok(Node::new(NodeKind::Literal(C64::new(x, 0.0)), pos)),
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(name, pos),
            _ => {
                self.at -= 1;
                Err(self.unexpected("expected a number, variable, function or `(`"))
            }
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Node> {
        if *self.peek() == Tok::Sym('(') {
            let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                name: name.clone(),
                pos,
            })?;
            self.bump();
            let arg = self.expr()?;
            self.expect(')')?;
            return Ok(Node::new(NodeKind::Call(func, Box::new(arg)), pos));
        }
        if Func::from_name(&name).is_some() {
            return Err(ExprError::Syntax {
                pos,
                message: format!("function `{name}` needs an argument in parentheses"),
            });
        }
        match name.as_str() {
            "pi" => return Ok(Node::new(NodeKind::Literal(C64::new(PI, 0.0)), pos)),
            "i" => {
                if self.domain != DomainKind::Rigid {
                    return Err(ExprError::DomainMix {
                        name,
                        pos,
                        domain: self.domain,
                    });
                }
                return Ok(Node::new(NodeKind::Literal(C64::new(0.0, 1.0)), pos));
            }
            _ => {}
        }
        if let Some(k) = self.domain.variables().iter().position(|v| *v == name) {
            return Ok(Node::new(NodeKind::Var(k), pos));
        }
        let foreign = DomainKind::all()
            .iter()
            .any(|d| d.variables().contains(&name.as_str()));
        if foreign {
            Err(ExprError::DomainMix {
                name,
                pos,
                domain: self.domain,
            })
        } else {
            Err(ExprError::UnknownVariable { name, pos })
        }
    }
}

fn fold_constant(node: &Node) -> std::result::Result<C64, JetError> {
    eval_scalar_node(node, &[], ScalarKind::Complex)
}

// ---------------------------------------------------------------- printing

fn node_precedence(node: &Node) -> u8 {
    match &node.kind {
        NodeKind::Binary(op, ..) => op.precedence(),
        NodeKind::Neg(_) => 3,
        _ => 5,
    }
}

fn is_plain_literal(c: C64) -> bool {
    c.im == 0.0 && c.re >= 0.0 && c.re.is_sign_positive()
}

fn write_literal(f: &mut fmt::Formatter<'_>, c: C64) -> fmt::Result {
    if is_plain_literal(c) {
        if c.re == PI {
            f.write_str("pi")
        } else {
            write!(f, "{}", c.re)
        }
    } else if c.re == 0.0 && c.im == 1.0 {
        f.write_str("i")
    } else if c.im == 0.0 {
        write!(f, "(-{})", -c.re)
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        write!(f, "({}{}{}*i)", c.re, sign, c.im.abs())
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, domain: DomainKind) -> fmt::Result {
    let child = |f: &mut fmt::Formatter<'_>, n: &Node, paren: bool| -> fmt::Result {
        if paren {
            f.write_str("(")?;
            write_node(f, n, domain)?;
            f.write_str(")")
        } else {
            write_node(f, n, domain)
        }
    };
    match &node.kind {
        NodeKind::Literal(c) => write_literal(f, *c),
        NodeKind::Var(k) => f.write_str(domain.variables()[*k]),
        NodeKind::Neg(a) => {
            f.write_str("-")?;
            child(f, a, node_precedence(a) < 3)
        }
        NodeKind::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, domain)?;
            f.write_str(")")
        }
        NodeKind::Binary(BinOp::Pow, a, b) => {
            child(f, a, node_precedence(a) < 5)?;
            f.write_str("^")?;
            child(f, b, node_precedence(b) < 3)
        }
        NodeKind::Binary(op, a, b) => {
            let p = op.precedence();
            child(f, a, node_precedence(a) < p)?;
            write!(f, "{}", op.symbol())?;
            child(f, b, node_precedence(b) <= p)
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, self.domain)
    }
}

// ---------------------------------------------------------------- evaluation

fn integer_exponent(e: f64) -> Option<i32> {
    (e.fract() == 0.0 && e.abs() <= 1e6).then_some(e as i32)
}

fn exponent_value(node: &Node) -> f64 {
    fold_constant(node)
        .expect("exponent validated at parse time")
        .re
}

fn eval_jet_node(node: &Node, vars: &[Jet]) -> Result<Jet> {
    let at = |source: JetError| ExprError::Eval {
        pos: node.pos,
        source,
    };
    Ok(match &node.kind {
        NodeKind::Literal(c) => {
            if vars[0].kind() == ScalarKind::Real && c.im != 0.0 {
                return Err(at(JetError::RealKindViolated));
            }
            vars[0].constant_like(*c)
        }
        NodeKind::Var(k) => vars[*k].clone(),
        NodeKind::Neg(a) => eval_jet_node(a, vars)?.neg(),
        NodeKind::Call(func, a) => {
            let x = eval_jet_node(a, vars)?;
            match func {
                Func::Exp => x.exp(),
                Func::Log => x.ln(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Sqrt => x.sqrt(),
            }
            .map_err(at)?
        }
        NodeKind::Binary(BinOp::Pow, a, b) => {
            let base = eval_jet_node(a, vars)?;
            let e = exponent_value(b);
            match integer_exponent(e) {
                Some(m) => base.powi(m),
                None => base.powf(e),
            }
            .map_err(at)?
        }
        NodeKind::Binary(op, a, b) => {
            let x = eval_jet_node(a, vars)?;
            let y = eval_jet_node(b, vars)?;
            match op {
                BinOp::Add => x.add(&y),
                BinOp::Sub => x.sub(&y),
                BinOp::Mul => x.mul(&y),
                BinOp::Div => x.div(&y),
                BinOp::Pow => unreachable!(),
            }
            .map_err(at)?
        }
    })
}

fn branch_ok(z: C64, kind: ScalarKind) -> bool {
    match kind {
        ScalarKind::Real => z.re > 0.0 && z.norm() > SINGULAR_THRESHOLD,
        ScalarKind::Complex => {
            z.norm() > SINGULAR_THRESHOLD
                && !(z.im.abs() <= crate::jet::BRANCH_CUT_THRESHOLD && z.re < 0.0)
        }
    }
}

/// Direct complex-arithmetic evaluation, independent of the jet kernel.
fn eval_scalar_node(
    node: &Node,
    vars: &[C64],
    kind: ScalarKind,
) -> std::result::Result<C64, JetError> {
    Ok(match &node.kind {
        NodeKind::Literal(c) => *c,
        NodeKind::Var(k) => vars[*k],
        NodeKind::Neg(a) => -eval_scalar_node(a, vars, kind)?,
        NodeKind::Call(func, a) => {
            let x = eval_scalar_node(a, vars, kind)?;
            let need = |name: &'static str| {
                if branch_ok(x, kind) {
                    Ok(())
                } else {
                    Err(JetError::BranchCutViolation { func: name, at: x })
                }
            };
            match func {
                Func::Exp => x.exp(),
                Func::Log => {
                    need("log")?;
                    x.ln()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    let c = x.cos();
                    if c.norm() <= SINGULAR_THRESHOLD {
                        return Err(JetError::DivisionBySingularJet(c));
                    }
                    x.sin() / c
                }
                Func::Sqrt => {
                    need("sqrt")?;
                    x.sqrt()
                }
            }
        }
        NodeKind::Binary(op, a, b) => {
            let x = eval_scalar_node(a, vars, kind)?;
            let y = eval_scalar_node(b, vars, kind)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.norm() <= SINGULAR_THRESHOLD {
                        return Err(JetError::DivisionBySingularJet(y));
                    }
                    x / y
                }
                BinOp::Pow => match integer_exponent(y.re) {
                    Some(m) => {
                        if m < 0 && x.norm() <= SINGULAR_THRESHOLD {
                            return Err(JetError::DivisionBySingularJet(x));
                        }
                        x.powi(m)
                    }
                    None => {
                        if !branch_ok(x, kind) {
                            return Err(JetError::BranchCutViolation { func: "pow", at: x });
                        }
                        x.powf(y.re)
                    }
                },
            }
        }
    })
}

impl ExprAst {
    /// Parses and validates `text` for the given domain.
    pub fn parse(text: &str, domain: DomainKind) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(ExprError::Empty);
        }
        let mut p = Parser {
            toks: lex(text)?,
            at: 0,
            domain,
        };
        let root = p.expr()?;
        if *p.peek() != Tok::End {
            return Err(p.unexpected("expected an operator or end of input"));
        }
        Ok(Self { domain, root })
    }

    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    /// True when the expression divides or uses `log`/`tan`, i.e. when it
    /// can be singular somewhere.
    pub fn has_singular_ops(&self) -> bool {
        self.root.any(&|k| {
            matches!(
                k,
                NodeKind::Binary(BinOp::Div, ..)
                    | NodeKind::Call(Func::Log | Func::Tan, _)
            ) || matches!(k, NodeKind::Binary(BinOp::Pow, _, e) if exponent_value(e) < 0.0)
        })
    }

    /// Variables that occur in the expression, as names.
    pub fn free_variables(&self) -> Vec<&'static str> {
        let names = self.domain.variables();
        (0..names.len())
            .filter(|&k| self.root.any(&|n| matches!(n, NodeKind::Var(j) if *j == k)))
            .map(|k| names[k])
            .collect()
    }

    /// The conjugate expression: `z1 <-> z1b`, `z2 <-> z2b`, literals conjugated.
    pub fn conjugate(&self) -> Self {
        fn go(node: &Node, domain: DomainKind) -> Node {
            let kind = match &node.kind {
                NodeKind::Literal(c) => NodeKind::Literal(c.conj()),
                NodeKind::Var(k) if domain == DomainKind::Rigid => NodeKind::Var(*k ^ 1),
                NodeKind::Var(k) => NodeKind::Var(*k),
                NodeKind::Neg(a) => NodeKind::Neg(Box::new(go(a, domain))),
                NodeKind::Call(f, a) => NodeKind::Call(*f, Box::new(go(a, domain))),
                NodeKind::Binary(op, a, b) => {
                    NodeKind::Binary(*op, Box::new(go(a, domain)), Box::new(go(b, domain)))
                }
            };
            Node::new(kind, node.pos)
        }
        Self {
            domain: self.domain,
            root: go(&self.root, self.domain),
        }
    }

    /// Combines two expressions of the same domain with `op` (not `Pow`).
    pub fn combine(&self, op: BinOp, other: &Self) -> Result<Self> {
        assert!(op != BinOp::Pow, "combine does not build powers");
        if self.domain != other.domain {
            return Err(ExprError::DomainMismatch {
                expected: self.domain,
                got: other.domain,
            });
        }
        Ok(Self {
            domain: self.domain,
            root: Node::new(
                NodeKind::Binary(op, Box::new(self.root.clone()), Box::new(other.root.clone())),
                0,
            ),
        })
    }

    pub fn negate(&self) -> Self {
        Self {
            domain: self.domain,
            root: Node::new(NodeKind::Neg(Box::new(self.root.clone())), 0),
        }
    }

    fn check_domain(&self, kind: DomainKind) -> Result<()> {
        if kind != self.domain {
            return Err(ExprError::DomainMismatch {
                expected: self.domain,
                got: kind,
            });
        }
        Ok(())
    }

    /// Jet of the expression at the domain point, to total order `order`.
    pub fn eval_jet(&self, dom: &EvalDomain, order: usize) -> Result<Jet> {
        self.check_domain(dom.kind)?;
        let vars = Jet::seed_all(&dom.seed_point(), order, self.domain.scalar_kind())
            .map_err(|source| ExprError::Eval { pos: 0, source })?;
        self.eval_with(&vars)
    }

    /// Evaluates with every variable bound to the given jet (one per domain
    /// variable, all of one shape).
    pub fn eval_with(&self, vars: &[Jet]) -> Result<Jet> {
        assert_eq!(
            vars.len(),
            self.domain.variables().len(),
            "one jet per domain variable"
        );
        eval_jet_node(&self.root, vars)
    }

    /// Plain scalar evaluation at the domain point.
    pub fn eval_scalar(&self, dom: &EvalDomain) -> Result<C64> {
        self.check_domain(dom.kind)?;
        self.eval_scalar_at(&dom.seed_point())
    }

    /// Plain scalar evaluation with explicit values for every domain
    /// variable (conjugates included for rigid expressions).
    pub fn eval_scalar_at(&self, values: &[C64]) -> Result<C64> {
        eval_scalar_node(&self.root, values, self.domain.scalar_kind()).map_err(|source| {
            ExprError::Eval {
                pos: self.root.pos,
                source,
            }
        })
    }

    /// Scalar evaluation of a real-valued profile expression at `v`.
    pub fn eval_real(&self, v: f64) -> Result<f64> {
        self.eval_scalar_at(&[Complex64::new(v, 0.0)]).map(|z| z.re)
    }
}

/// Parses `text` in the given domain; free-function form of [`ExprAst::parse`].
pub fn parse(text: &str, domain: DomainKind) -> Result<ExprAst> {
    ExprAst::parse(text, domain)
}

/// Jet of `ast` at `dom`; free-function form of [`ExprAst::eval_jet`].
pub fn eval_jet(ast: &ExprAst, dom: &EvalDomain, order: usize) -> Result<Jet> {
    ast.eval_jet(dom, order)
}
