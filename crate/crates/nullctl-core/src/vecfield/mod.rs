//! Vector fields and scalar time signals in a small arithmetic expression
//! language, with exact symbolic differentiation.
//!
//! Expressions are immutable after construction; every operation here is a
//! pure function and safe to call concurrently.

mod ast;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::par::par_map;

pub use ast::{Func, Node};

/// Number of grid points per axis used by the remainder-coefficient
/// estimate.
pub const REMAINDER_GRID_POINTS: usize = 201;

/// Multiplier applied to the grid supremum of the Hessian norms. The grid
/// only samples the supremum; the factor covers the gap to the true value
/// for the smooth fields this toolkit targets.
pub const REMAINDER_SAFETY_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VecFieldError {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("non-integer exponent at offset {offset}")]
    NonIntegerExponent { offset: usize },
    #[error("point has {got} coordinates but {expected} variables are declared")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value while evaluating `{0}`")]
    NonFinite(String),
    #[error("vector field needs {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
}

/// A parsed scalar expression over a declared list of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    node: Node,
    vars: Vec<String>,
}

impl Expression {
    /// Parse `source` over the given variable names.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Self, VecFieldError> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let node = parser::parse(source, &vars)?;
        Ok(Expression { node, vars })
    }

    /// Parse a signal in the single variable `t`.
    pub fn parse_time(source: &str) -> Result<Self, VecFieldError> {
        Self::parse(source, &["t"])
    }

    /// The constant-zero expression over the given variables.
    pub fn zero(vars: &[&str]) -> Self {
        Expression {
            node: Node::Num(0.0),
            vars: vars.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub(crate) fn node(&self) -> &Node {
        &self.node
    }

    /// Evaluate at `point` (one coordinate per declared variable).
    pub fn eval(&self, point: &[f64]) -> Result<f64, VecFieldError> {
        if point.len() != self.vars.len() {
            return Err(VecFieldError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        self.node.eval(point)
    }

    /// Exact derivative with respect to the variable at `var_index`.
    pub fn derivative(&self, var_index: usize) -> Expression {
        assert!(var_index < self.vars.len(), "derivative variable out of range");
        Expression { node: self.node.derivative(var_index), vars: self.vars.clone() }
    }

    /// True when the expression mentions the variable at `var_index`.
    pub fn references(&self, var_index: usize) -> bool {
        self.node.references(var_index)
    }

    /// Substitute every variable `v_i` by `v_i + offsets[i]`.
    pub fn shifted(&self, offsets: &[f64]) -> Expression {
        Expression { node: self.node.shifted(offsets), vars: self.vars.clone() }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ast::NodeDisplay { node: &self.node, vars: &self.vars })
    }
}

/// An autonomous vector field: `dim` components, each an expression in
/// `x1..xn`. Autonomy is enforced at parse time because `t` is not a
/// declared variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dim: usize,
    components: Vec<Expression>,
}

impl VectorField {
    pub fn parse(dim: usize, sources: &[&str]) -> Result<Self, VecFieldError> {
        if sources.len() != dim {
            return Err(VecFieldError::ComponentCount { expected: dim, got: sources.len() });
        }
        let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let components = sources
            .iter()
            .map(|s| Expression::parse(s, &name_refs))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, VecFieldError> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// Jacobian matrix at `x`: entry `(i, j) = d f_i / d x_j`, computed by
    /// symbolic differentiation followed by evaluation.
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix, VecFieldError> {
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        for (i, comp) in self.components.iter().enumerate() {
            for j in 0..n {
                data[i * n + j] = comp.derivative(j).eval(x)?;
            }
        }
        Ok(Matrix::from_vec(n, n, data))
    }

    /// Hessian of component `component` at `x`. Entries are computed for
    /// `i <= j` and mirrored, so the result is symmetric by construction.
    pub fn hessian(&self, component: usize, x: &[f64]) -> Result<Matrix, VecFieldError> {
        let exprs = self.hessian_exprs(component);
        eval_hessian(&exprs, self.dim, x)
    }

    /// Upper-triangle second partials of one component, row by row.
    fn hessian_exprs(&self, component: usize) -> Vec<Expression> {
        let n = self.dim;
        let comp = &self.components[component];
        let firsts: Vec<Expression> = (0..n).map(|i| comp.derivative(i)).collect();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for (i, fi) in firsts.iter().enumerate() {
            for j in i..n {
                out.push(fi.derivative(j));
            }
        }
        out
    }

    /// Grid estimate of `sum_i 1/2 sup_box ||Hessian(f_i)||` without the
    /// safety factor. Shared by the remainder coefficient and the
    /// global-controllability boundedness heuristic.
    pub fn hessian_bound_estimate(&self, bounds: &[(f64, f64)]) -> Result<f64, VecFieldError> {
        let n = self.dim;
        if bounds.len() != n {
            return Err(VecFieldError::DimensionMismatch { expected: n, got: bounds.len() });
        }
        for &(lo, hi) in bounds {
            if !(lo <= 0.0 && 0.0 <= hi && lo < hi) {
                return Err(VecFieldError::Domain(format!(
                    "remainder box [{lo}, {hi}] must contain the origin"
                )));
            }
        }
        if n > 4 {
            return Err(VecFieldError::Domain(format!(
                "remainder grid with {REMAINDER_GRID_POINTS} points per axis is intractable \
                 for dimension {n}; supply an explicit remainder-coefficient override"
            )));
        }

        let hessians: Vec<Vec<Expression>> = (0..n).map(|i| self.hessian_exprs(i)).collect();
        let m = REMAINDER_GRID_POINTS;
        let axis = |k: usize, (lo, hi): (f64, f64)| lo + (hi - lo) * k as f64 / (m - 1) as f64;

        // Parallel over the first axis; each worker walks the remaining
        // axes with an odometer and reports per-component maxima.
        let slices: Vec<usize> = (0..m).collect();
        let results: Vec<Result<Vec<f64>, VecFieldError>> = par_map(slices, |k0| {
            let mut maxima = vec![0.0f64; n];
            let mut point = vec![0.0f64; n];
            point[0] = axis(k0, bounds[0]);
            let mut idx = vec![0usize; n.saturating_sub(1)];
            loop {
                for (ax, &i) in idx.iter().enumerate() {
                    point[ax + 1] = axis(i, bounds[ax + 1]);
                }
                for (comp, exprs) in hessians.iter().enumerate() {
                    let h = eval_hessian(exprs, n, &point)?;
                    let norm = crate::linalg::spectral_norm(&h)
                        .map_err(|e| VecFieldError::Domain(e.to_string()))?;
                    if norm > maxima[comp] {
                        maxima[comp] = norm;
                    }
                }
                // advance odometer over axes 1..n
                let mut ax = idx.len();
                loop {
                    if ax == 0 {
                        return Ok(maxima);
                    }
                    ax -= 1;
                    idx[ax] += 1;
                    if idx[ax] < m {
                        break;
                    }
                    idx[ax] = 0;
                }
            }
        });

        let mut maxima = vec![0.0f64; n];
        for r in results {
            let slice_max = r?;
            for (m, s) in maxima.iter_mut().zip(slice_max) {
                if s > *m {
                    *m = s;
                }
            }
        }
        Ok(maxima.iter().map(|m| 0.5 * m).sum())
    }

    /// Quadratic Taylor-remainder coefficient `c_R` with
    /// `|R_2(a)| <= c_R |a|^2` on the box: the grid estimate of
    /// `sum_i 1/2 sup ||Hessian(f_i)||` times [`REMAINDER_SAFETY_FACTOR`].
    pub fn remainder_coefficient(&self, bounds: &[(f64, f64)]) -> Result<f64, VecFieldError> {
        Ok(REMAINDER_SAFETY_FACTOR * self.hessian_bound_estimate(bounds)?)
    }

    /// The field in coordinates centered at `x_star`:
    /// `g(y) = f(y + x_star)`.
    pub fn shifted(&self, x_star: &[f64]) -> VectorField {
        VectorField {
            dim: self.dim,
            components: self.components.iter().map(|c| c.shifted(x_star)).collect(),
        }
    }
}

fn eval_hessian(upper: &[Expression], n: usize, x: &[f64]) -> Result<Matrix, VecFieldError> {
    let mut data = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let v = upper[k].eval(x)?;
            data[i * n + j] = v;
            data[j * n + i] = v;
            k += 1;
        }
    }
    Ok(Matrix::from_vec(n, n, data))
}
