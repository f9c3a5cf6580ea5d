use num_traits::{Signed, Zero};

use super::grid::{fmt_rat, Rat, ValueGrid};
use crate::error::{Error, Result};

/// Distance on the value alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Metric {
    /// `|a - b|` on the rational values.
    Absolute,
    /// Explicit table indexed by alphabet position.
    Tabulated { table: Vec<Vec<Rat>> },
}

impl Metric {
    /// Builds a tabulated metric, rejecting anything that is not a metric
    /// (asymmetry, negative entries, nonzero diagonal, triangle violations).
    pub fn tabulated(table: Vec<Vec<Rat>>) -> Result<Self> {
        let k = table.len();
        if k == 0 || table.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidMetric("table must be square and nonempty".into()));
        }
        for a in 0..k {
            if !table[a][a].is_zero() {
                return Err(Error::InvalidMetric(format!("c({a},{a}) != 0")));
            }
            for b in 0..k {
                if table[a][b].is_negative() {
                    return Err(Error::InvalidMetric(format!("c({a},{b}) < 0")));
                }
                if table[a][b] != table[b][a] {
                    return Err(Error::InvalidMetric(format!("c({a},{b}) != c({b},{a})")));
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if table[a][c] > table[a][b] + table[b][c] {
                        return Err(Error::InvalidMetric(format!(
                            "triangle violated: c({a},{c}) = {} > c({a},{b}) + c({b},{c})",
                            fmt_rat(&table[a][c])
                        )));
                    }
                }
            }
        }
        Ok(Metric::Tabulated { table })
    }

    pub fn is_absolute(&self) -> bool {
        matches!(self, Metric::Absolute)
    }

    /// Checks that a tabulated metric covers exactly the grid's alphabet.
    pub fn validate_for(&self, grid: &ValueGrid) -> Result<()> {
        match self {
            Metric::Absolute => Ok(()),
            Metric::Tabulated { table } if table.len() == grid.size() => Ok(()),
            Metric::Tabulated { table } => Err(Error::InvalidMetric(format!(
                "table has {} rows but the alphabet has {} values",
                table.len(),
                grid.size()
            ))),
        }
    }

    /// Distance between two grid numerators.
    pub fn dist(&self, grid: &ValueGrid, a: i64, b: i64) -> Rat {
        match self {
            Metric::Absolute => Rat::new((a - b).abs() as i128, grid.q() as i128),
            Metric::Tabulated { table } => table[grid.index_of(a)][grid.index_of(b)],
        }
    }

    /// `dist(a, b) <= r`.
    pub fn within(&self, grid: &ValueGrid, a: i64, b: i64, r: &Rat) -> bool {
        match self {
            Metric::Absolute => {
                ((a - b).abs() as i128) * r.denom() <= r.numer() * grid.q() as i128
            }
            Metric::Tabulated { .. } => self.dist(grid, a, b) <= *r,
        }
    }

    /// `dist(a, b) >= r`.
    pub fn at_least(&self, grid: &ValueGrid, a: i64, b: i64, r: &Rat) -> bool {
        match self {
            Metric::Absolute => {
                ((a - b).abs() as i128) * r.denom() >= r.numer() * grid.q() as i128
            }
            Metric::Tabulated { .. } => self.dist(grid, a, b) >= *r,
        }
    }

    /// Tabulated copy of `|a - b|` for a grid, handy for tests and file output.
    pub fn absolute_table(grid: &ValueGrid) -> Vec<Vec<Rat>> {
        grid.values()
            .map(|a| grid.values().map(|b| Metric::Absolute.dist(grid, a, b)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::grid::{rat, rat_int};

    #[test]
    fn absolute_distance() {
        let g = ValueGrid::real(4).unwrap();
        assert_eq!(Metric::Absolute.dist(&g, -4, 2), rat(3, 2));
        assert!(Metric::Absolute.within(&g, 0, 2, &rat(1, 2)));
        assert!(!Metric::Absolute.within(&g, 0, 3, &rat(1, 2)));
        assert!(Metric::Absolute.at_least(&g, 0, 2, &rat(1, 2)));
    }

    #[test]
    fn tabulated_validation() {
        let z = rat_int(0);
        let one = rat_int(1);
        let three = rat_int(3);
        let ok = vec![vec![z, one, one], vec![one, z, one], vec![one, one, z]];
        assert!(Metric::tabulated(ok).is_ok());
        let triangle = vec![vec![z, one, three], vec![one, z, one], vec![three, one, z]];
        assert!(matches!(Metric::tabulated(triangle), Err(Error::InvalidMetric(_))));
        let asym = vec![vec![z, one], vec![three, z]];
        assert!(Metric::tabulated(asym).is_err());
        let g = ValueGrid::integer(3).unwrap();
        let t = Metric::tabulated(Metric::absolute_table(&g)).unwrap();
        assert!(t.validate_for(&g).is_ok());
        assert!(t.validate_for(&ValueGrid::integer(4).unwrap()).is_err());
        assert_eq!(t.dist(&g, 1, 3), rat_int(2));
    }
}
