//! Expression tree, evaluation, printing and symbolic differentiation.

use std::fmt;

use super::VecFieldError;

/// Unary functions of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }
}

/// Expression node. Variables are stored as indices into the declared
/// variable list of the owning [`super::Expression`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn eval(&self, point: &[f64]) -> Result<f64, VecFieldError> {
        let v = match self {
            Node::Num(c) => *c,
            Node::Var(i) => point[*i],
            Node::Add(l, r) => l.eval(point)? + r.eval(point)?,
            Node::Sub(l, r) => l.eval(point)? - r.eval(point)?,
            Node::Mul(l, r) => l.eval(point)? * r.eval(point)?,
            Node::Div(l, r) => {
                let d = r.eval(point)?;
                if d == 0.0 {
                    return Err(VecFieldError::Domain("division by zero".into()));
                }
                l.eval(point)? / d
            }
            Node::Neg(e) => -e.eval(point)?,
            Node::Pow(b, k) => b.eval(point)?.powi(*k),
            Node::Call(f, a) => {
                let x = a.eval(point)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(VecFieldError::Domain(format!(
                                "ln of non-positive value {x}"
                            )));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(VecFieldError::Domain(format!(
                                "sqrt of negative value {x}"
                            )));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                    Func::Tanh => x.tanh(),
                }
            }
        };
        if !v.is_finite() {
            return Err(VecFieldError::NonFinite(format!("{self}")));
        }
        Ok(v)
    }

    /// True when the subtree references variable index `var`.
    pub fn references(&self, var: usize) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var(i) => *i == var,
            Node::Add(l, r) | Node::Sub(l, r) | Node::Mul(l, r) | Node::Div(l, r) => {
                l.references(var) || r.references(var)
            }
            Node::Neg(e) | Node::Call(_, e) => e.references(var),
            Node::Pow(b, _) => b.references(var),
        }
    }

    /// Exact derivative with respect to variable index `var`.
    ///
    /// Built through the folding constructors below so that repeated
    /// differentiation stays compact. `abs` differentiates to
    /// `u/abs(u) * u'`, which raises a domain error when evaluated at a
    /// zero of `u`.
    pub fn derivative(&self, var: usize) -> Node {
        match self {
            Node::Num(_) => Node::Num(0.0),
            Node::Var(i) => Node::Num(if *i == var { 1.0 } else { 0.0 }),
            Node::Add(l, r) => add(l.derivative(var), r.derivative(var)),
            Node::Sub(l, r) => sub(l.derivative(var), r.derivative(var)),
            Node::Mul(l, r) => add(
                mul(l.derivative(var), (**r).clone()),
                mul((**l).clone(), r.derivative(var)),
            ),
            Node::Div(l, r) => div(
                sub(
                    mul(l.derivative(var), (**r).clone()),
                    mul((**l).clone(), r.derivative(var)),
                ),
                pow((**r).clone(), 2),
            ),
            Node::Neg(e) => neg(e.derivative(var)),
            Node::Pow(b, k) => match *k {
                0 => Node::Num(0.0),
                k => mul(
                    mul(Node::Num(k as f64), pow((**b).clone(), k - 1)),
                    b.derivative(var),
                ),
            },
            Node::Call(f, a) => {
                let inner = a.derivative(var);
                let a = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Exp => call(Func::Exp, a),
                    Func::Ln => div(Node::Num(1.0), a),
                    Func::Sqrt => div(Node::Num(1.0), mul(Node::Num(2.0), call(Func::Sqrt, a))),
                    Func::Abs => div(a.clone(), call(Func::Abs, a)),
                    Func::Tanh => sub(Node::Num(1.0), pow(call(Func::Tanh, a), 2)),
                };
                mul(outer, inner)
            }
        }
    }

    /// Substitute `x_i -> x_i + offset_i`.
    pub fn shifted(&self, offsets: &[f64]) -> Node {
        match self {
            Node::Num(c) => Node::Num(*c),
            Node::Var(i) => {
                let c = offsets.get(*i).copied().unwrap_or(0.0);
                if c == 0.0 {
                    Node::Var(*i)
                } else {
                    Node::Add(Box::new(Node::Var(*i)), Box::new(Node::Num(c)))
                }
            }
            Node::Add(l, r) => Node::Add(Box::new(l.shifted(offsets)), Box::new(r.shifted(offsets))),
            Node::Sub(l, r) => Node::Sub(Box::new(l.shifted(offsets)), Box::new(r.shifted(offsets))),
            Node::Mul(l, r) => Node::Mul(Box::new(l.shifted(offsets)), Box::new(r.shifted(offsets))),
            Node::Div(l, r) => Node::Div(Box::new(l.shifted(offsets)), Box::new(r.shifted(offsets))),
            Node::Neg(e) => Node::Neg(Box::new(e.shifted(offsets))),
            Node::Pow(b, k) => Node::Pow(Box::new(b.shifted(offsets)), *k),
            Node::Call(f, a) => Node::Call(*f, Box::new(a.shifted(offsets))),
        }
    }
}

// Folding constructors used by differentiation. Constants are folded only
// when the folded value is finite, so domain errors stay where they were.

pub(crate) fn add(l: Node, r: Node) -> Node {
    match (l, r) {
        (Node::Num(a), Node::Num(b)) if (a + b).is_finite() => Node::Num(a + b),
        (Node::Num(z), r) if z == 0.0 => r,
        (l, Node::Num(z)) if z == 0.0 => l,
        (l, r) => Node::Add(Box::new(l), Box::new(r)),
    }
}

pub(crate) fn sub(l: Node, r: Node) -> Node {
    match (l, r) {
        (Node::Num(a), Node::Num(b)) if (a - b).is_finite() => Node::Num(a - b),
        (l, Node::Num(z)) if z == 0.0 => l,
        (Node::Num(z), r) if z == 0.0 => neg(r),
        (l, r) => Node::Sub(Box::new(l), Box::new(r)),
    }
}

pub(crate) fn mul(l: Node, r: Node) -> Node {
    match (l, r) {
        (Node::Num(a), Node::Num(b)) if (a * b).is_finite() => Node::Num(a * b),
        (Node::Num(z), _) | (_, Node::Num(z)) if z == 0.0 => Node::Num(0.0),
        (Node::Num(o), r) if o == 1.0 => r,
        (l, Node::Num(o)) if o == 1.0 => l,
        (l, r) => Node::Mul(Box::new(l), Box::new(r)),
    }
}

pub(crate) fn div(l: Node, r: Node) -> Node {
    match (l, r) {
        (Node::Num(z), _) if z == 0.0 => Node::Num(0.0),
        (l, Node::Num(o)) if o == 1.0 => l,
        (l, r) => Node::Div(Box::new(l), Box::new(r)),
    }
}

pub(crate) fn neg(e: Node) -> Node {
    match e {
        Node::Num(c) => Node::Num(-c),
        Node::Neg(inner) => *inner,
        e => Node::Neg(Box::new(e)),
    }
}

pub(crate) fn pow(b: Node, k: i32) -> Node {
    match k {
        0 => Node::Num(1.0),
        1 => b,
        _ => Node::Pow(Box::new(b), k),
    }
}

pub(crate) fn call(f: Func, a: Node) -> Node {
    Node::Call(f, Box::new(a))
}

// Printing. Precedences follow the grammar: additive 1, multiplicative 2,
// unary minus 3, power 4, atom 5. A child is parenthesized whenever the
// grammar would otherwise regroup it, so print -> parse rebuilds the same
// evaluation order.

impl Node {
    fn prec(&self) -> u8 {
        match self {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Num(c) if *c < 0.0 => 3,
            Node::Pow(..) => 4,
            Node::Num(_) | Node::Var(_) | Node::Call(..) => 5,
        }
    }
}

/// Renders the node with variable names supplied by the owner.
pub(crate) struct NodeDisplay<'a> {
    pub node: &'a Node,
    pub vars: &'a [String],
}

impl fmt::Display for NodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_named(self.node, self.vars, f, 0)
    }
}

fn fmt_named(node: &Node, vars: &[String], f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    if node.prec() < min {
        write!(f, "(")?;
        fmt_named(node, vars, f, 0)?;
        return write!(f, ")");
    }
    match node {
        Node::Num(c) => write!(f, "{c}"),
        Node::Var(i) => write!(f, "{}", vars[*i]),
        Node::Add(l, r) => {
            fmt_named(l, vars, f, 1)?;
            write!(f, "+")?;
            fmt_named(r, vars, f, 2)
        }
        Node::Sub(l, r) => {
            fmt_named(l, vars, f, 1)?;
            write!(f, "-")?;
            fmt_named(r, vars, f, 2)
        }
        Node::Mul(l, r) => {
            fmt_named(l, vars, f, 2)?;
            write!(f, "*")?;
            fmt_named(r, vars, f, 3)
        }
        Node::Div(l, r) => {
            fmt_named(l, vars, f, 2)?;
            write!(f, "/")?;
            fmt_named(r, vars, f, 3)
        }
        Node::Neg(e) => {
            write!(f, "-")?;
            fmt_named(e, vars, f, 4)
        }
        Node::Pow(b, k) => {
            fmt_named(b, vars, f, 5)?;
            write!(f, "^{k}")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            fmt_named(a, vars, f, 0)?;
            write!(f, ")")
        }
    }
}

// Display without variable names is only used in error messages for
// non-finite evaluation; placeholder names keep it total.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..64).map(|i| format!("v{i}")).collect();
        fmt_named(self, &names, f, 0)
    }
}
