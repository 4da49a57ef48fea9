//! Analytic coefficient functions of (s, t, r, θ, φ, ψ).
//!
//! Generator coefficients are built from a closed set of blocks: constants,
//! the coordinates themselves, sums, products, and sin/cos/cot/csc. Partial
//! derivatives are taken symbolically on this tree, so they are exact; the
//! result is again an [`Expr`], which is what makes commutators of fields
//! representable.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::dual::Scalar;

/// Number of jet base variables: s plus five coordinates.
pub const NVARS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    S,
    T,
    R,
    Theta,
    Phi,
    Psi,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::S, Var::T, Var::R, Var::Theta, Var::Phi, Var::Psi];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::S => "s",
            Var::T => "t",
            Var::R => "r",
            Var::Theta => "theta",
            Var::Phi => "phi",
            Var::Psi => "psi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Cot(Box<Expr>),
    Csc(Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Const(0.0)
    }

    pub fn one() -> Self {
        Expr::Const(1.0)
    }

    pub fn c(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    /// Structural zero. Expressions that cancel only numerically are not
    /// detected.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Self {
        let mut constant = 0.0;
        let mut terms = Vec::new();
        for e in items {
            match e {
                Expr::Const(c) => constant += c,
                Expr::Sum(inner) => {
                    for t in inner {
                        match t {
                            Expr::Const(c) => constant += c,
                            other => terms.push(other),
                        }
                    }
                }
                other => terms.push(other),
            }
        }
        if constant != 0.0 {
            terms.push(Expr::Const(constant));
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn product(items: impl IntoIterator<Item = Expr>) -> Self {
        let mut constant = 1.0;
        let mut factors = Vec::new();
        for e in items {
            match e {
                Expr::Const(c) => constant *= c,
                Expr::Product(inner) => {
                    for f in inner {
                        match f {
                            Expr::Const(c) => constant *= c,
                            other => factors.push(other),
                        }
                    }
                }
                other => factors.push(other),
            }
        }
        if constant == 0.0 {
            return Expr::zero();
        }
        if factors.is_empty() {
            return Expr::Const(constant);
        }
        if constant != 1.0 {
            factors.insert(0, Expr::Const(constant));
        }
        if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        }
    }

    pub fn sin(self) -> Self {
        match self.as_const() {
            Some(c) => Expr::Const(c.sin()),
            None => Expr::Sin(Box::new(self)),
        }
    }

    pub fn cos(self) -> Self {
        match self.as_const() {
            Some(c) => Expr::Const(c.cos()),
            None => Expr::Cos(Box::new(self)),
        }
    }

    pub fn cot(self) -> Self {
        Expr::Cot(Box::new(self))
    }

    pub fn csc(self) -> Self {
        Expr::Csc(Box::new(self))
    }

    pub fn scale(self, c: f64) -> Self {
        Expr::product([Expr::Const(c), self])
    }

    /// ∂/∂v, simplified on the fly.
    pub fn derivative(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Sum(terms) => Expr::sum(terms.iter().map(|t| t.derivative(v))),
            Expr::Product(factors) => {
                let mut out = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    let df = f.derivative(v);
                    if df.is_zero() {
                        continue;
                    }
                    let rest = factors
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, g)| g.clone());
                    out.push(Expr::product(rest.chain(std::iter::once(df))));
                }
                Expr::sum(out)
            }
            Expr::Sin(u) => chain(u, v, |u| u.clone().cos()),
            Expr::Cos(u) => chain(u, v, |u| -u.clone().sin()),
            Expr::Cot(u) => chain(u, v, |u| {
                let csc = u.clone().csc();
                -(csc.clone() * csc)
            }),
            Expr::Csc(u) => chain(u, v, |u| -(u.clone().csc() * u.clone().cot())),
        }
    }

    pub fn eval<S: Scalar>(&self, z: &[S; NVARS]) -> S {
        match self {
            Expr::Const(c) => S::from_f64(*c),
            Expr::Var(v) => z[v.index()],
            Expr::Sum(terms) => {
                let mut acc = S::zero();
                for t in terms {
                    acc += t.eval(z);
                }
                acc
            }
            Expr::Product(factors) => {
                let mut acc = S::one();
                for f in factors {
                    acc *= f.eval(z);
                }
                acc
            }
            Expr::Sin(u) => u.eval(z).sin(),
            Expr::Cos(u) => u.eval(z).cos(),
            Expr::Cot(u) => {
                let a = u.eval(z);
                a.cos() / a.sin()
            }
            Expr::Csc(u) => u.eval(z).sin().recip(),
        }
    }

    /// True when the expression does not mention `v`.
    pub fn independent_of(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(w) => *w != v,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().all(|x| x.independent_of(v)),
            Expr::Sin(u) | Expr::Cos(u) | Expr::Cot(u) | Expr::Csc(u) => u.independent_of(v),
        }
    }
}

fn chain(u: &Expr, v: Var, outer: impl Fn(&Expr) -> Expr) -> Expr {
    let du = u.derivative(v);
    if du.is_zero() {
        Expr::zero()
    } else {
        Expr::product([outer(u), du])
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::sum([self, o])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::sum([self, -o])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::product([self, o])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(-1.0)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Const(c)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::Var(v)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Sum(ts) => {
                write!(f, "(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Expr::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Expr::Sin(u) => write!(f, "sin({u})"),
            Expr::Cos(u) => write!(f, "cos({u})"),
            Expr::Cot(u) => write!(f, "cot({u})"),
            Expr::Csc(u) => write!(f, "csc({u})"),
        }
    }
}
