//! Nested radical expressions in a parenthesized prefix syntax.
//!
//! ```text
//! expr := INTEGER | RATIONAL            ; 163, -4, 13591409/6
//!       | NAME                          ; bound by an enclosing let
//!       | (add expr expr ...) | (mul expr expr ...)
//!       | (sub expr expr) | (neg expr) | (div expr expr)
//!       | (pow expr INTEGER)
//!       | (sqrt expr) | (cbrt expr) | (root expr INTEGER)
//!       | (let NAME expr expr)
//! ```
//!
//! `;` starts a comment that runs to the end of the line. A `let` binding is
//! evaluated once, so a root inside it is a single node with a single
//! branch choice wherever the name is used. Root nodes are numbered in the
//! order their opening parenthesis appears.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{pow10, BigRational, PrecComplex, PrecReal, PrecisionContext};

pub const MAX_ROOT_NODES: usize = 8;
// Extra working bits: the closed forms of interest cancel about 30 digits.
const EVAL_GUARD_BITS: u32 = 192;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(BigRational),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    Sub(usize, usize),
    Neg(usize),
    Div(usize, usize),
    Pow(usize, i64),
    Root { arg: usize, n: u32, id: usize },
}

/// A radical expression stored as a DAG; `let` bindings are shared.
#[derive(Clone, Debug, PartialEq)]
pub struct RadicalExpr {
    nodes: Vec<Node>,
    root: usize,
    // (node index, degree) in id order
    roots: Vec<(usize, u32)>,
    source: String,
}

impl RadicalExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            nodes: Vec::new(),
            roots: Vec::new(),
            scopes: Vec::new(),
        };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing token {:?}",
                p.tokens[p.pos]
            )));
        }
        let mut roots = p.roots;
        roots.sort_by_key(|&(id, _, _)| id);
        let roots: Vec<(usize, u32)> = roots.into_iter().map(|(_, node, n)| (node, n)).collect();
        if roots.len() > MAX_ROOT_NODES {
            return Err(Error::InvalidArgument(format!(
                "{} root nodes exceed the limit of {MAX_ROOT_NODES}",
                roots.len()
            )));
        }
        Ok(Self {
            nodes: p.nodes,
            root,
            roots,
            source: text.to_string(),
        })
    }

    /// Number of root nodes.
    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Degree of each root node, in id order.
    pub fn root_degrees(&self) -> Vec<u32> {
        self.roots.iter().map(|&(_, n)| n).collect()
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl FromStr for RadicalExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split(';').next().unwrap_or("");
        let mut atom = String::new();
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    if !atom.is_empty() {
                        out.push(Token::Atom(std::mem::take(&mut atom)));
                    }
                    out.push(if ch == '(' { Token::Open } else { Token::Close });
                }
                c if c.is_whitespace() => {
                    if !atom.is_empty() {
                        out.push(Token::Atom(std::mem::take(&mut atom)));
                    }
                }
                c => atom.push(c),
            }
        }
        if !atom.is_empty() {
            out.push(Token::Atom(atom));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nodes: Vec<Node>,
    // (preorder id, node index, degree)
    roots: Vec<(usize, usize, u32)>,
    scopes: Vec<(String, usize)>,
}

impl Parser {
    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn atom(&mut self) -> Result<String> {
        match self.next()? {
            Token::Atom(a) => Ok(a),
            t => Err(Error::Parse(format!("expected an atom, found {t:?}"))),
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            Token::Close => Ok(()),
            t => Err(Error::Parse(format!("expected ')', found {t:?}"))),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let a = self.atom()?;
        a.parse()
            .map_err(|_| Error::Parse(format!("expected an integer, found {a:?}")))
    }

    fn expr(&mut self) -> Result<usize> {
        match self.next()? {
            Token::Close => Err(Error::Parse("unexpected ')'".into())),
            Token::Atom(a) => self.leaf(&a),
            Token::Open => {
                let op = self.atom()?;
                let node = self.compound(&op)?;
                self.close()?;
                Ok(node)
            }
        }
    }

    fn leaf(&mut self, a: &str) -> Result<usize> {
        if let Some(&(_, idx)) = self.scopes.iter().rev().find(|(n, _)| n == a) {
            return Ok(idx);
        }
        let starts_numeric = a
            .trim_start_matches(['-', '+'])
            .starts_with(|c: char| c.is_ascii_digit());
        if !starts_numeric {
            return Err(Error::Parse(format!("unbound name {a:?}")));
        }
        let q = parse_rational(a)?;
        Ok(self.push(Node::Const(q)))
    }

    fn list(&mut self) -> Result<Vec<usize>> {
        let mut items = Vec::new();
        while self.tokens.get(self.pos) != Some(&Token::Close) {
            items.push(self.expr()?);
        }
        Ok(items)
    }

    fn compound(&mut self, op: &str) -> Result<usize> {
        Ok(match op {
            "add" | "mul" => {
                let items = self.list()?;
                if items.len() < 2 {
                    return Err(Error::Parse(format!("{op} needs at least two operands")));
                }
                self.push(if op == "add" {
                    Node::Add(items)
                } else {
                    Node::Mul(items)
                })
            }
            "sub" | "div" => {
                let a = self.expr()?;
                let b = self.expr()?;
                self.push(if op == "sub" {
                    Node::Sub(a, b)
                } else {
                    Node::Div(a, b)
                })
            }
            "neg" => {
                let a = self.expr()?;
                self.push(Node::Neg(a))
            }
            "pow" => {
                let a = self.expr()?;
                let e = self.integer()?;
                self.push(Node::Pow(a, e))
            }
            "sqrt" | "cbrt" | "root" => {
                let id = self.roots.len();
                self.roots.push((id, usize::MAX, 0));
                let arg = self.expr()?;
                let n = match op {
                    "sqrt" => 2,
                    "cbrt" => 3,
                    _ => {
                        let n = self.integer()?;
                        if !(2..=64).contains(&n) {
                            return Err(Error::Parse(format!("root degree {n} out of range")));
                        }
                        n as u32
                    }
                };
                let node = self.push(Node::Root { arg, n, id });
                self.roots[id] = (id, node, n);
                node
            }
            "let" => {
                let name = self.atom()?;
                if name.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+') {
                    return Err(Error::Parse(format!("invalid binding name {name:?}")));
                }
                let value = self.expr()?;
                self.scopes.push((name, value));
                let body = self.expr()?;
                self.scopes.pop();
                body
            }
            other => return Err(Error::Parse(format!("unknown operator {other:?}"))),
        })
    }
}

fn parse_rational(a: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number {a:?}"));
    match a.split_once('/') {
        Some((n, d)) => {
            let n = Integer::from_str(n).map_err(|_| bad())?;
            let d = Integer::from_str(d).map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {a:?}")));
            }
            Ok(Rational::from((n, d)))
        }
        None => Ok(Rational::from(Integer::from_str(a).map_err(|_| bad())?)),
    }
}

/// Branch index per root node, in id order. Branch `b` of an `n`-th root
/// multiplies the default root by `exp(2πi b/n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BranchAssignment(pub Vec<u32>);

impl BranchAssignment {
    pub fn default_for(e: &RadicalExpr) -> Self {
        Self(vec![0; e.root_count()])
    }

    pub fn is_default(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

impl fmt::Display for BranchAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Debug)]
struct C {
    re: Float,
    im: Float,
}

impl C {
    fn real(re: Float) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Self { re, im }
    }

    fn add(&self, o: &C, bits: u32) -> C {
        C {
            re: Float::with_val(bits, &self.re + &o.re),
            im: Float::with_val(bits, &self.im + &o.im),
        }
    }

    fn sub(&self, o: &C, bits: u32) -> C {
        C {
            re: Float::with_val(bits, &self.re - &o.re),
            im: Float::with_val(bits, &self.im - &o.im),
        }
    }

    fn mul(&self, o: &C, bits: u32) -> C {
        let re = Float::with_val(bits, &self.re * &o.re) - Float::with_val(bits, &self.im * &o.im);
        let im = Float::with_val(bits, &self.re * &o.im) + Float::with_val(bits, &self.im * &o.re);
        C { re, im }
    }

    fn norm_sq(&self, bits: u32) -> Float {
        Float::with_val(bits, self.re.square_ref()) + Float::with_val(bits, self.im.square_ref())
    }

    fn recip(&self, bits: u32) -> C {
        let n = self.norm_sq(bits);
        C {
            re: Float::with_val(bits, &self.re / &n),
            im: -Float::with_val(bits, &self.im / &n),
        }
    }

    fn is_effectively_real(&self, bits: u32) -> bool {
        if self.im.is_zero() {
            return true;
        }
        let scale =
            Float::with_val(bits, self.re.abs_ref()) >> (bits as i32 - EVAL_GUARD_BITS as i32 / 2);
        Float::with_val(bits, self.im.abs_ref()) <= scale
    }

    /// Default `n`-th root: the real root for odd `n` of a negative real,
    /// the principal complex root otherwise.
    fn root(&self, n: u32, bits: u32) -> C {
        if self.is_effectively_real(bits) {
            let x = Float::with_val(bits, &self.re);
            if x >= 0 {
                return C::real(x.root(n));
            }
            if n % 2 == 1 {
                return C::real(-(-x).root(n));
            }
        }
        let modulus = self.norm_sq(bits).sqrt().root(n);
        let arg = Float::with_val(bits, self.im.atan2_ref(&self.re)) / n;
        let (s, c) = arg.sin_cos(Float::new(bits));
        C {
            re: Float::with_val(bits, &modulus * &c),
            im: Float::with_val(bits, &modulus * &s),
        }
    }

    fn unit(b: u32, n: u32, bits: u32) -> C {
        let angle = Float::with_val(bits, Constant::Pi) * (2 * b) / n;
        let (s, c) = angle.sin_cos(Float::new(bits));
        C { re: c, im: s }
    }
}

fn eval_nodes(e: &RadicalExpr, br: &BranchAssignment, bits: u32, tiny: &Float) -> Result<C> {
    if br.0.len() != e.root_count() {
        return Err(Error::InvalidArgument(format!(
            "branch assignment has {} entries, expression has {} root nodes",
            br.0.len(),
            e.root_count()
        )));
    }
    for (i, (&b, &(_, n))) in br.0.iter().zip(&e.roots).enumerate() {
        if b >= n {
            return Err(Error::InvalidArgument(format!(
                "branch {b} is out of range for root node {i} of degree {n}"
            )));
        }
    }
    let mut vals: Vec<C> = Vec::with_capacity(e.nodes.len());
    for (idx, node) in e.nodes.iter().enumerate() {
        let v = match node {
            Node::Const(q) => C::real(Float::with_val(bits, q)),
            Node::Add(items) => items[1..]
                .iter()
                .fold(vals[items[0]].clone(), |acc, &i| acc.add(&vals[i], bits)),
            Node::Mul(items) => items[1..]
                .iter()
                .fold(vals[items[0]].clone(), |acc, &i| acc.mul(&vals[i], bits)),
            Node::Sub(a, b) => vals[*a].sub(&vals[*b], bits),
            Node::Neg(a) => C {
                re: -vals[*a].re.clone(),
                im: -vals[*a].im.clone(),
            },
            Node::Div(a, b) => {
                let d = &vals[*b];
                if d.norm_sq(bits).sqrt() < *tiny {
                    return Err(Error::Evaluation {
                        node: idx,
                        reason: "division by a value indistinguishable from zero".into(),
                    });
                }
                vals[*a].mul(&d.recip(bits), bits)
            }
            Node::Pow(a, k) => {
                let base = &vals[*a];
                let mut base = if *k < 0 {
                    if base.norm_sq(bits).sqrt() < *tiny {
                        return Err(Error::Evaluation {
                            node: idx,
                            reason: "negative power of a value indistinguishable from zero".into(),
                        });
                    }
                    base.recip(bits)
                } else {
                    base.clone()
                };
                let mut acc = C::real(Float::with_val(bits, 1));
                let mut k = k.unsigned_abs();
                while k > 0 {
                    if k & 1 == 1 {
                        acc = acc.mul(&base, bits);
                    }
                    base = base.mul(&base, bits);
                    k >>= 1;
                }
                acc
            }
            Node::Root { arg, n, id } => {
                let r = vals[*arg].root(*n, bits);
                match br.0[*id] {
                    0 => r,
                    b => r.mul(&C::unit(b, *n, bits), bits),
                }
            }
        };
        vals.push(v);
    }
    Ok(vals.swap_remove(e.root))
}

/// Evaluates `e` under the branch choice `br`, in complex arithmetic.
pub fn radical_eval(
    e: &RadicalExpr,
    br: &BranchAssignment,
    ctx: &PrecisionContext,
) -> Result<PrecComplex> {
    let bits = ctx.bits() + EVAL_GUARD_BITS;
    let tiny = pow10(-(ctx.digits() as i64), bits);
    let v = eval_nodes(e, br, bits, &tiny)?;
    Ok(PrecComplex::new(
        PrecReal::from_float(v.re, ctx),
        PrecReal::from_float(v.im, ctx),
    ))
}

fn assignment_at(mut index: u64, degrees: &[u32]) -> BranchAssignment {
    let mut out = vec![0u32; degrees.len()];
    for (slot, &n) in out.iter_mut().zip(degrees).rev() {
        *slot = (index % n as u64) as u32;
        index /= n as u64;
    }
    BranchAssignment(out)
}

/// `true` when `v` is real to `10^-(P/2)` and within `10^-(P-20)` of `target`.
pub fn matches_target(v: &PrecComplex, target: &PrecReal, ctx: &PrecisionContext) -> bool {
    let bits = ctx.bits();
    let im_tol = pow10(-(ctx.digits() as i64 / 2), bits);
    let tol = ctx.tolerance();
    let im_ok = Float::with_val(bits, v.im.value().abs_ref()) < im_tol;
    let diff = Float::with_val(bits, v.re.value() - target.value()).abs();
    im_ok && diff < tol
}

/// Every branch assignment in lexicographic order; the first that evaluates
/// to `target` is returned.
pub fn branch_search(
    e: &RadicalExpr,
    target: &PrecReal,
    ctx: &PrecisionContext,
) -> Option<BranchAssignment> {
    let degrees = e.root_degrees();
    let total: u64 = degrees.iter().map(|&n| n as u64).product();
    (0..total).into_par_iter().find_map_first(|i| {
        let br = assignment_at(i, &degrees);
        let v = radical_eval(e, &br, ctx).ok()?;
        matches_target(&v, target, ctx).then_some(br)
    })
}

/// A named expression file: `name = expr`, separated by blank lines.
pub fn parse_named(text: &str) -> Result<HashMap<String, RadicalExpr>> {
    let mut out = HashMap::new();
    let mut current: Option<(String, String)> = None;
    let flush = |cur: &mut Option<(String, String)>,
                 out: &mut HashMap<String, RadicalExpr>|
     -> Result<()> {
        if let Some((name, body)) = cur.take() {
            out.insert(name, RadicalExpr::parse(&body)?);
        }
        Ok(())
    };
    for line in text.lines() {
        let stripped = line.split(';').next().unwrap_or("").trim();
        if let Some((name, rest)) = stripped.split_once('=') {
            if !name.contains('(') {
                flush(&mut current, &mut out)?;
                current = Some((name.trim().to_string(), rest.to_string()));
                continue;
            }
        }
        if let Some((_, body)) = current.as_mut() {
            body.push('\n');
            body.push_str(line);
        } else if !stripped.is_empty() {
            return Err(Error::Parse(format!(
                "expression text before a name: {stripped:?}"
            )));
        }
    }
    flush(&mut current, &mut out)?;
    Ok(out)
}
