//! Exact fitting of structure constants in operator relations.
//!
//! A [`Relation`] states `lhs = sum_i u_i B_i` for unknown scalars `u_i`.
//! Each shift `k` and power `x^j` of every operator involved contributes one
//! linear equation, so a family of relations becomes a rational linear
//! system. Relations may share unknowns.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use super::ShiftOp;
use crate::exactnum::{format_rational, Rational};
use crate::linalg::{self, Solution};

/// `lhs = sum (unknown index, basis operator)`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub lhs: ShiftOp,
    pub terms: Vec<(usize, ShiftOp)>,
}

impl Relation {
    pub fn new(name: impl Into<String>, lhs: ShiftOp) -> Self {
        Relation {
            name: name.into(),
            lhs,
            terms: Vec::new(),
        }
    }

    pub fn term(mut self, unknown: usize, op: ShiftOp) -> Self {
        self.terms.push((unknown, op));
        self
    }

    /// `lhs - sum u_i B_i` at the given values.
    pub fn residual(&self, values: &[Rational]) -> ShiftOp {
        self.terms
            .iter()
            .fold(self.lhs.clone(), |acc, (i, op)| &acc - &op.scale(&values[*i]))
    }

    fn monomials(&self) -> BTreeSet<(i64, usize)> {
        std::iter::once(&self.lhs)
            .chain(self.terms.iter().map(|(_, op)| op))
            .flat_map(|op| {
                op.terms()
                    .iter()
                    .flat_map(|(&k, p)| (0..p.coeffs().len()).map(move |j| (k, j)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittedConstants {
    names: Vec<String>,
    values: Vec<Rational>,
}

impl FittedConstants {
    pub fn new(names: &[&str], values: Vec<Rational>) -> Self {
        assert_eq!(names.len(), values.len());
        FittedConstants {
            names: names.iter().map(|s| s.to_string()).collect(),
            values,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.names.iter().position(|n| n == name).map(|i| &self.values[i])
    }

    /// Panics when `name` was not one of the unknowns.
    pub fn value(&self, name: &str) -> Rational {
        self.get(name)
            .unwrap_or_else(|| panic!("no fitted constant named {name}"))
            .clone()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.names.iter().map(String::as_str).zip(&self.values)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .iter()
            .map(|(n, v)| (n.to_string(), serde_json::Value::String(format_rational(v))))
            .collect();
        serde_json::Value::Object(map)
    }
}

impl fmt::Display for FittedConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(n, v)| format!("{n} = {v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FitError {
    #[error("relation {relation} fails: residual {residual}")]
    Inconsistent { relation: String, residual: ShiftOp },
    #[error("non-unique fit: particular solution {particular}, {} null direction(s)", null_directions.len())]
    NonUnique {
        particular: FittedConstants,
        null_directions: Vec<FittedConstants>,
    },
}

fn equations(relations: &[Relation], unknowns: usize) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for rel in relations {
        for (k, j) in rel.monomials() {
            let mut row = vec![Rational::zero(); unknowns];
            for (i, op) in &rel.terms {
                row[*i] += op.coeff(k).coeff(j);
            }
            let b = rel.lhs.coeff(k).coeff(j);
            if row.iter().all(Zero::is_zero) && b.is_zero() {
                continue;
            }
            rows.push(row);
            rhs.push(b);
        }
    }
    (rows, rhs)
}

/// Solves the relations for the unknowns. A unique solution is verified by
/// recomputing every residual operator, which must be exactly zero.
pub fn fit_relations(unknowns: &[&str], relations: &[Relation]) -> Result<FittedConstants, FitError> {
    let n = unknowns.len();
    let (rows, rhs) = equations(relations, n);
    match linalg::solve(&rows, &rhs, n) {
        Solution::Unique(values) => {
            for rel in relations {
                let residual = rel.residual(&values);
                if !residual.is_zero() {
                    return Err(FitError::Inconsistent {
                        relation: rel.name.clone(),
                        residual,
                    });
                }
            }
            Ok(FittedConstants::new(unknowns, values))
        }
        Solution::Family {
            particular,
            null_directions,
        } => Err(FitError::NonUnique {
            particular: FittedConstants::new(unknowns, particular),
            null_directions: null_directions
                .into_iter()
                .map(|d| FittedConstants::new(unknowns, linalg::normalize_direction(&d)))
                .collect(),
        }),
        Solution::Inconsistent => {
            // keep the longest consistent prefix of equations and report the
            // residual at one of its solutions
            let mut kept_rows: Vec<Vec<Rational>> = Vec::new();
            let mut kept_rhs: Vec<Rational> = Vec::new();
            let mut values = vec![Rational::zero(); n];
            for (row, b) in rows.iter().zip(&rhs) {
                kept_rows.push(row.clone());
                kept_rhs.push(b.clone());
                match linalg::solve(&kept_rows, &kept_rhs, n) {
                    Solution::Unique(v) => values = v,
                    Solution::Family { particular, .. } => values = particular,
                    Solution::Inconsistent => {
                        kept_rows.pop();
                        kept_rhs.pop();
                    }
                }
            }
            let (relation, residual) = relations
                .iter()
                .map(|rel| (rel.name.clone(), rel.residual(&values)))
                .find(|(_, r)| !r.is_zero())
                .expect("an inconsistent system leaves a nonzero residual");
            Err(FitError::Inconsistent { relation, residual })
        }
    }
}
