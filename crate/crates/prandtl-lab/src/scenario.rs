//! Scenario files and the closed-form expression language used to define
//! initial data u0(X, Y) and outer flows uE(t, x), pEx(t, x).
//!
//! The language is deliberately tiny: constants, five named variables,
//! seven unary functions, the four arithmetic operators, and integer
//! powers. That set is closed under symbolic differentiation, which is
//! what the blow-up diagnostics need (third derivatives of the datum and
//! exact x-derivatives of the outer pressure gradient).

use crate::kernels::{OdeSpec, QuadSpec};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Variables: lowercase t, x, y are Eulerian (time and space), uppercase
/// X, Y are Lagrangian labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    EulerX,
    EulerY,
    LagX,
    LagY,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::EulerX => "x",
            Var::EulerY => "y",
            Var::LagX => "X",
            Var::LagY => "Y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unary {
    Neg,
    Sin,
    Cos,
    Exp,
    Sqrt,
    Tanh,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binary {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree. Subtrees are reference-counted so differentiation can
/// share structure; trees are immutable once built.
#[derive(Debug, Clone)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(Unary, Arc<Expr>),
    Binary(Binary, Arc<Expr>, Arc<Expr>),
    /// Integer powers only; keeps differentiation total and branch-free.
    Pow(Arc<Expr>, i32),
}

/// Values bound to the five variables during evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub lag_x: f64,
    pub lag_y: f64,
}

impl Env {
    pub fn lagrangian(lag_x: f64, lag_y: f64) -> Self {
        Env {
            lag_x,
            lag_y,
            ..Default::default()
        }
    }

    pub fn eulerian(t: f64, x: f64) -> Self {
        Env {
            t,
            x,
            ..Default::default()
        }
    }

    fn get(&self, v: Var) -> f64 {
        match v {
            Var::T => self.t,
            Var::EulerX => self.x,
            Var::EulerY => self.y,
            Var::LagX => self.lag_x,
            Var::LagY => self.lag_y,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum ScenarioError {
    #[error("parse error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
    Parse {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} must be a literal integer")]
    NonIntegerExponent { offset: usize },
    #[error("derivative order {0} not supported (1..=3)")]
    InvalidOrder(u32),
    #[error("scenario line {line}: {message}")]
    File { line: usize, message: String },
    #[error("scenario is missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("outer flow violates the Bernoulli relation: residual {residual:e} at (t, x) = ({t}, {x}) exceeds {tol:e}")]
    BernoulliViolation {
        t: f64,
        x: f64,
        residual: f64,
        tol: f64,
    },
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn eval(&self, env: &Env) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Var(v) => env.get(*v),
            Expr::Unary(op, e) => {
                let u = e.eval(env);
                match op {
                    Unary::Neg => -u,
                    Unary::Sin => u.sin(),
                    Unary::Cos => u.cos(),
                    Unary::Exp => u.exp(),
                    Unary::Sqrt => u.sqrt(),
                    Unary::Tanh => u.tanh(),
                    Unary::Abs => u.abs(),
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(env), b.eval(env));
                match op {
                    Binary::Add => a + b,
                    Binary::Sub => a - b,
                    Binary::Mul => a * b,
                    Binary::Div => a / b,
                }
            }
            Expr::Pow(e, n) => e.eval(env).powi(*n),
        }
    }
}

// Smart constructors with constant folding and neutral-element removal.
// Folding never changes the value of an expression at points where the
// original was defined.

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(v) => Expr::Const(-v),
        other => Expr::Unary(Unary::Neg, Arc::new(other)),
    }
}

fn unary(op: Unary, e: Expr) -> Expr {
    if op == Unary::Neg {
        return neg(e);
    }
    if let Expr::Const(v) = e {
        let folded = Expr::Unary(op, Arc::new(Expr::Const(v))).eval(&Env::default());
        return Expr::Const(folded);
    }
    Expr::Unary(op, Arc::new(e))
}

fn add(a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(x + y);
    }
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Expr::Binary(Binary::Add, Arc::new(a), Arc::new(b))
}

fn sub(a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(x - y);
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return neg(b);
    }
    Expr::Binary(Binary::Sub, Arc::new(a), Arc::new(b))
}

fn mul(a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(x * y);
    }
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Expr::Const(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Binary(Binary::Mul, Arc::new(a), Arc::new(b))
}

fn div(a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        if *y != 0.0 {
            return Expr::Const(x / y);
        }
    }
    if is_const(&a, 0.0) {
        return Expr::Const(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Binary(Binary::Div, Arc::new(a), Arc::new(b))
}

fn pow(e: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Const(1.0),
        1 => e,
        _ => {
            if let Expr::Const(v) = e {
                return Expr::Const(v.powi(n));
            }
            Expr::Pow(Arc::new(e), n)
        }
    }
}

fn derive(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
        Expr::Unary(op, u) => {
            let du = derive(u, var);
            let u = (**u).clone();
            match op {
                Unary::Neg => neg(du),
                Unary::Sin => mul(unary(Unary::Cos, u), du),
                Unary::Cos => neg(mul(unary(Unary::Sin, u), du)),
                Unary::Exp => mul(unary(Unary::Exp, u), du),
                Unary::Sqrt => div(du, mul(Expr::Const(2.0), unary(Unary::Sqrt, u))),
                Unary::Tanh => mul(
                    sub(Expr::Const(1.0), pow(unary(Unary::Tanh, u), 2)),
                    du,
                ),
                // d|u| = u/|u| du away from u = 0.
                Unary::Abs => mul(div(u.clone(), unary(Unary::Abs, u)), du),
            }
        }
        Expr::Binary(op, a, b) => {
            let (da, db) = (derive(a, var), derive(b, var));
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                Binary::Add => add(da, db),
                Binary::Sub => sub(da, db),
                Binary::Mul => add(mul(da, b), mul(a, db)),
                Binary::Div => div(sub(mul(da, b.clone()), mul(a, db)), pow(b, 2)),
            }
        }
        Expr::Pow(u, n) => {
            let du = derive(u, var);
            mul(
                mul(Expr::Const(*n as f64), pow((**u).clone(), n - 1)),
                du,
            )
        }
    }
}

/// Exact symbolic derivative of order 1..=3 with respect to one variable.
pub fn differentiate(e: &Expr, var: Var, order: u32) -> Result<Expr, ScenarioError> {
    if !(1..=3).contains(&order) {
        return Err(ScenarioError::InvalidOrder(order));
    }
    let mut out = derive(e, var);
    for _ in 1..order {
        out = derive(&out, var);
    }
    Ok(out)
}

// Precedence levels for printing: additive 1, multiplicative 2, unary
// minus 3, power 4, atoms 5.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Const(v) if *v < 0.0 => 3,
        Expr::Const(_) | Expr::Var(_) => 5,
        Expr::Unary(Unary::Neg, _) => 3,
        Expr::Unary(..) => 5,
        Expr::Binary(Binary::Add | Binary::Sub, ..) => 1,
        Expr::Binary(..) => 2,
        Expr::Pow(..) => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_level: u8) -> fmt::Result {
    if level(e) < min_level {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Unary(Unary::Neg, e) => {
                write!(f, "-")?;
                write_child(f, e, 3)
            }
            Expr::Unary(op, e) => {
                let name = match op {
                    Unary::Neg => unreachable!(),
                    Unary::Sin => "sin",
                    Unary::Cos => "cos",
                    Unary::Exp => "exp",
                    Unary::Sqrt => "sqrt",
                    Unary::Tanh => "tanh",
                    Unary::Abs => "abs",
                };
                write!(f, "{name}({e})")
            }
            Expr::Binary(op, a, b) => {
                let (sym, lvl, right_bump) = match op {
                    Binary::Add => ("+", 1, 1),
                    Binary::Sub => ("-", 1, 2),
                    Binary::Mul => ("*", 2, 2),
                    Binary::Div => ("/", 2, 3),
                };
                write_child(f, a, lvl)?;
                write!(f, "{sym}")?;
                write_child(f, b, right_bump)
            }
            Expr::Pow(e, n) => {
                write_child(f, e, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parser: recursive descent with byte offsets.

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn found_desc(&self) -> String {
        match self.src.get(self.pos) {
            Some(&c) => format!("'{}'", c as char),
            None => "end of input".to_string(),
        }
    }

    fn error(&mut self, expected: Vec<&'static str>) -> ScenarioError {
        self.skip_ws();
        ScenarioError::Parse {
            offset: self.pos,
            found: self.found_desc(),
            expected,
        }
    }

    fn expr(&mut self) -> Result<Expr, ScenarioError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = add(acc, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ScenarioError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = mul(acc, self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ScenarioError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ScenarioError> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer_exponent()?;
            base = pow(base, n);
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32, ScenarioError> {
        self.skip_ws();
        let start = self.pos;
        let mut sign = 1i64;
        if self.src.get(self.pos) == Some(&b'-') {
            sign = -1;
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(ScenarioError::NonIntegerExponent { offset: start });
        }
        // A decimal point or exponent marker means a non-integer literal.
        if self
            .src
            .get(self.pos)
            .is_some_and(|&c| c == b'.' || c == b'e' || c == b'E')
        {
            return Err(ScenarioError::NonIntegerExponent { offset: start });
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let mag: i64 = text
            .parse()
            .map_err(|_| ScenarioError::NonIntegerExponent { offset: start })?;
        i32::try_from(sign * mag).map_err(|_| ScenarioError::NonIntegerExponent { offset: start })
    }

    fn atom(&mut self) -> Result<Expr, ScenarioError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(self.error(vec![")"]))
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(self.error(vec!["number", "identifier", "(", "-"])),
        }
    }

    fn number(&mut self) -> Result<Expr, ScenarioError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|&c| c.is_ascii_digit() || c == b'.')
        {
            self.pos += 1;
        }
        if self
            .src
            .get(self.pos)
            .is_some_and(|&c| c == b'e' || c == b'E')
        {
            let mark = self.pos;
            self.pos += 1;
            if self
                .src
                .get(self.pos)
                .is_some_and(|&c| c == b'+' || c == b'-')
            {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // 'e' belonged to something else
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ScenarioError::Parse {
                offset: start,
                found: format!("'{text}'"),
                expected: vec!["number"],
            })
    }

    fn identifier(&mut self) -> Result<Expr, ScenarioError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphabetic())
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            "t" => Ok(Expr::Var(Var::T)),
            "x" => Ok(Expr::Var(Var::EulerX)),
            "y" => Ok(Expr::Var(Var::EulerY)),
            "X" => Ok(Expr::Var(Var::LagX)),
            "Y" => Ok(Expr::Var(Var::LagY)),
            "sin" | "cos" | "exp" | "sqrt" | "tanh" | "abs" => {
                let op = match name {
                    "sin" => Unary::Sin,
                    "cos" => Unary::Cos,
                    "exp" => Unary::Exp,
                    "sqrt" => Unary::Sqrt,
                    "tanh" => Unary::Tanh,
                    _ => Unary::Abs,
                };
                if self.peek() != Some(b'(') {
                    return Err(self.error(vec!["("]));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error(vec![")"]));
                }
                self.pos += 1;
                Ok(unary(op, arg))
            }
            _ => Err(ScenarioError::UnknownIdentifier {
                offset: start,
                name: name.to_string(),
            }),
        }
    }
}

/// Parse an expression in the scenario grammar.
pub fn parse_expr(src: &str) -> Result<Expr, ScenarioError> {
    let mut p = Parser::new(src);
    let e = p.expr()?;
    if p.peek().is_some() {
        Err(p.error(vec!["operator", "end of input"]))
    } else {
        Ok(e)
    }
}

// ---------------------------------------------------------------------------
// Scenario files.

/// Rectangular Lagrangian window "x0 x1 y0 y1".
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// A fully parsed scenario: datum, optional outer flow, and the numerical
/// settings every downstream module reads.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub u0: Expr,
    pub u_e: Option<Expr>,
    pub p_ex: Option<Expr>,
    pub window: Window,
    pub grid_n: u32,
    pub t_max: f64,
    pub quad: QuadSpec,
    pub ode: OdeSpec,
    pub bernoulli_tol: f64,
}

impl Scenario {
    /// The outer pressure gradient, defaulting to zero when absent.
    pub fn p_ex_or_zero(&self) -> Expr {
        self.p_ex.clone().unwrap_or(Expr::Const(0.0))
    }
}

/// Result of [`validate_scenario`]: measured quantities plus boundedness
/// and decay flags for the datum.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Sup of the Bernoulli residual on the validation grid (None when no
    /// outer velocity is prescribed).
    pub bernoulli_sup: Option<f64>,
    pub grad_sup: f64,
    pub grad_bounded: bool,
    /// Largest |d_X u0| sampled on the two x-edges of the window.
    pub edge_shear: f64,
    /// Whether the edge shear has decayed below 10% of the interior sup.
    pub shear_decays_at_edges: bool,
}

/// Check the Bernoulli relation for the outer flow and basic boundedness
/// and decay of the datum over the scenario window.
pub fn validate_scenario(s: &Scenario) -> Result<ValidationReport, ScenarioError> {
    let mut bernoulli_sup = None;
    if let (Some(u_e), Some(p_ex)) = (&s.u_e, &s.p_ex) {
        let du_dt = differentiate(u_e, Var::T, 1)?;
        let du_dx = differentiate(u_e, Var::EulerX, 1)?;
        let mut sup = 0.0f64;
        let mut worst = (0.0, 0.0);
        for i in 0..21 {
            let t = s.t_max * i as f64 / 20.0;
            for j in 0..21 {
                let x = s.window.x0 + (s.window.x1 - s.window.x0) * j as f64 / 20.0;
                let env = Env::eulerian(t, x);
                let r = du_dt.eval(&env) + u_e.eval(&env) * du_dx.eval(&env) + p_ex.eval(&env);
                if r.abs() > sup {
                    sup = r.abs();
                    worst = (t, x);
                }
            }
        }
        if sup > s.bernoulli_tol {
            return Err(ScenarioError::BernoulliViolation {
                t: worst.0,
                x: worst.1,
                residual: sup,
                tol: s.bernoulli_tol,
            });
        }
        bernoulli_sup = Some(sup);
    }

    let du_dx = differentiate(&s.u0, Var::LagX, 1)?;
    let du_dy = differentiate(&s.u0, Var::LagY, 1)?;
    let n = s.grid_n.max(2);
    let mut grad_sup = 0.0f64;
    let mut edge_shear = 0.0f64;
    let mut all_finite = true;
    for i in 0..n {
        let fx = i as f64 / (n - 1) as f64;
        let xl = s.window.x0 + (s.window.x1 - s.window.x0) * fx;
        for j in 0..n {
            let fy = j as f64 / (n - 1) as f64;
            let yl = s.window.y0 + (s.window.y1 - s.window.y0) * fy;
            let env = Env::lagrangian(xl, yl);
            let gx = du_dx.eval(&env);
            let gy = du_dy.eval(&env);
            if !gx.is_finite() || !gy.is_finite() {
                all_finite = false;
                continue;
            }
            grad_sup = grad_sup.max(gx.abs().max(gy.abs()));
            if i == 0 || i == n - 1 {
                edge_shear = edge_shear.max(gx.abs());
            }
        }
    }
    Ok(ValidationReport {
        bernoulli_sup,
        grad_sup,
        grad_bounded: all_finite && grad_sup < 1e6,
        edge_shear,
        shear_decays_at_edges: edge_shear <= 0.1 * grad_sup.max(1e-300),
    })
}

fn unquote(line: usize, v: &str) -> Result<String, ScenarioError> {
    let v = v.trim();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        Ok(v[1..v.len() - 1].to_string())
    } else {
        Err(ScenarioError::File {
            line,
            message: format!("expected a quoted string, got '{v}'"),
        })
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ScenarioError> {
    v.trim().parse().map_err(|_| ScenarioError::File {
        line,
        message: format!("key '{key}': expected a number, got '{}'", v.trim()),
    })
}

/// Parse the flat key-value scenario format. One `key = value` pair per
/// line; expressions, names and windows are double-quoted; `#` starts a
/// comment; unknown keys are rejected.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut name = None;
    let mut u0 = None;
    let mut u_e = None;
    let mut p_ex = None;
    let mut window = None;
    let mut grid_n = None;
    let mut t_max = None;
    let mut quad = QuadSpec::profile_default();
    let mut ode = OdeSpec::characteristics_default();
    let mut bernoulli_tol = 1e-8;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ScenarioError::File {
            line,
            message: format!("expected 'key = value', got '{trimmed}'"),
        })?;
        let key = key.trim();
        match key {
            "name" => name = Some(unquote(line, value)?),
            "u0" => u0 = Some(parse_expr(&unquote(line, value)?)?),
            "uE" => u_e = Some(parse_expr(&unquote(line, value)?)?),
            "pEx" => p_ex = Some(parse_expr(&unquote(line, value)?)?),
            "window" => {
                let s = unquote(line, value)?;
                let parts: Vec<f64> = s
                    .split_whitespace()
                    .map(|p| parse_f64(line, "window", p))
                    .collect::<Result<_, _>>()?;
                if parts.len() != 4 {
                    return Err(ScenarioError::File {
                        line,
                        message: format!("window needs 4 numbers, got {}", parts.len()),
                    });
                }
                window = Some(Window {
                    x0: parts[0],
                    x1: parts[1],
                    y0: parts[2],
                    y1: parts[3],
                });
            }
            "grid_n" => {
                grid_n = Some(value.trim().parse().map_err(|_| ScenarioError::File {
                    line,
                    message: format!("grid_n: expected an integer, got '{}'", value.trim()),
                })?)
            }
            "t_max" => t_max = Some(parse_f64(line, key, value)?),
            "quad_abs_tol" => quad.abs_tol = parse_f64(line, key, value)?,
            "quad_rel_tol" => quad.rel_tol = parse_f64(line, key, value)?,
            "ode_abs_tol" => ode.abs_tol = parse_f64(line, key, value)?,
            "ode_rel_tol" => ode.rel_tol = parse_f64(line, key, value)?,
            "event_tol" => ode.event_tol = parse_f64(line, key, value)?,
            "bernoulli_tol" => bernoulli_tol = parse_f64(line, key, value)?,
            other => {
                return Err(ScenarioError::File {
                    line,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }

    Ok(Scenario {
        name: name.ok_or(ScenarioError::MissingKey("name"))?,
        u0: u0.ok_or(ScenarioError::MissingKey("u0"))?,
        u_e,
        p_ex,
        window: window.ok_or(ScenarioError::MissingKey("window"))?,
        grid_n: grid_n.ok_or(ScenarioError::MissingKey("grid_n"))?,
        t_max: t_max.ok_or(ScenarioError::MissingKey("t_max"))?,
        quad,
        ode,
        bernoulli_tol,
    })
}

/// Load a scenario from a file path.
pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::File {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}
