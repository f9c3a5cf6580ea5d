use std::collections::HashSet;

use super::grid::{Rat, ValueGrid};
use crate::error::{Error, Result};

/// A finite class F of functions X -> grid, stored as a row-major value matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionClass {
    domain: Vec<String>,
    grid: ValueGrid,
    n_x: usize,
    values: Vec<i64>,
}

impl FunctionClass {
    /// Builds a class from numerator rows. Duplicate rows are dropped, keeping
    /// the first occurrence, so the class is a set.
    pub fn new(domain: Vec<String>, grid: ValueGrid, rows: Vec<Vec<i64>>) -> Result<Self> {
        let n_x = domain.len();
        if n_x == 0 {
            return Err(Error::InvalidClass("domain must be nonempty".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidClass("class must contain a function".into()));
        }
        let mut seen = HashSet::new();
        let mut values = Vec::with_capacity(rows.len() * n_x);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_x {
                return Err(Error::InvalidClass(format!(
                    "row {i} has {} entries, domain has {n_x}",
                    row.len()
                )));
            }
            if let Some(&v) = row.iter().find(|&&v| !grid.contains(v)) {
                return Err(Error::OffGrid {
                    value: format!("{v}/{}", grid.q()),
                    grid: grid.to_string(),
                });
            }
            if seen.insert(row.clone()) {
                values.extend_from_slice(&row);
            }
        }
        Ok(Self {
            domain,
            grid,
            n_x,
            values,
        })
    }

    /// Domain labels `x1, x2, ...`.
    pub fn default_domain(n_x: usize) -> Vec<String> {
        (1..=n_x).map(|i| format!("x{i}")).collect()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn grid(&self) -> &ValueGrid {
        &self.grid
    }

    pub fn n_functions(&self) -> usize {
        self.values.len() / self.n_x
    }

    pub fn n_points(&self) -> usize {
        self.n_x
    }

    pub fn row(&self, f: usize) -> &[i64] {
        &self.values[f * self.n_x..(f + 1) * self.n_x]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.values.chunks(self.n_x)
    }

    /// Numerator of f(x) without bounds checks beyond slice indexing.
    #[inline]
    pub fn value(&self, f: usize, x: usize) -> i64 {
        self.values[f * self.n_x + x]
    }

    /// f(x) as an exact rational.
    pub fn eval(&self, f: usize, x: usize) -> Result<Rat> {
        if f >= self.n_functions() {
            return Err(Error::IndexOutOfRange {
                what: "function",
                index: f,
                len: self.n_functions(),
            });
        }
        if x >= self.n_x {
            return Err(Error::IndexOutOfRange {
                what: "point",
                index: x,
                len: self.n_x,
            });
        }
        Ok(self.grid.to_rat(self.value(f, x)))
    }

    /// Same class on the grid with denominator `q * k`.
    pub fn refine(&self, k: i64) -> Result<Self> {
        let grid = self.grid.refine(k)?;
        Ok(Self {
            domain: self.domain.clone(),
            grid,
            n_x: self.n_x,
            values: self.values.iter().map(|v| v * k).collect(),
        })
    }

    /// Subclass on the given function indices, in the given order.
    pub fn subclass(&self, fs: &[usize]) -> Result<Self> {
        let rows = fs
            .iter()
            .map(|&f| {
                if f < self.n_functions() {
                    Ok(self.row(f).to_vec())
                } else {
                    Err(Error::IndexOutOfRange {
                        what: "function",
                        index: f,
                        len: self.n_functions(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.domain.clone(), self.grid.clone(), rows)
    }

    /// Distinct values attained at point `x`, ascending.
    pub fn attained(&self, x: usize) -> Vec<i64> {
        let mut v: Vec<i64> = (0..self.n_functions()).map(|f| self.value(f, x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// A sample x_{1:n} given as indices into the class domain (repeats allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SampleDesign {
    indices: Vec<usize>,
}

impl SampleDesign {
    pub fn new(indices: Vec<usize>, n_x: usize) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= n_x) {
            return Err(Error::IndexOutOfRange {
                what: "design point",
                index: i,
                len: n_x,
            });
        }
        Ok(Self { indices })
    }

    /// Every domain point once, in order.
    pub fn all_points(class: &FunctionClass) -> Self {
        Self {
            indices: (0..class.n_points()).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}
