use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::{MapError, WarehouseMap};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Per-station parcel type probabilities: `prob(k, j)` is the chance that a
/// parcel loaded at station `k` has type `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeDistribution {
    n_types: usize,
    rows: Vec<Vec<f64>>,
}

impl TypeDistribution {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, MapError> {
        let bad = |msg: String| Err(MapError::Distribution(msg));
        let Some(first) = rows.first() else {
            return bad("at least one station row is required".into());
        };
        let n_types = first.len();
        if n_types == 0 {
            return bad("at least one parcel type is required".into());
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n_types {
                return bad(format!(
                    "station {k} has {} entries, expected {n_types}",
                    row.len()
                ));
            }
            if let Some(j) = row.iter().position(|p| !(0.0..=1.0).contains(p)) {
                return bad(format!("probability m[{k}][{j}] = {} outside [0, 1]", row[j]));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return bad(format!("station {k} probabilities sum to {sum}, not 1"));
            }
        }
        Ok(TypeDistribution { n_types, rows })
    }

    /// Every station draws every type with equal probability.
    pub fn uniform(n_stations: usize, n_types: usize) -> Self {
        let p = 1.0 / n_types as f64;
        TypeDistribution {
            n_types,
            rows: vec![vec![p; n_types]; n_stations],
        }
    }

    /// Independent symmetric Dirichlet(1) rows, i.e. uniform on the simplex.
    pub fn dirichlet(n_stations: usize, n_types: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n_stations)
            .map(|_| {
                let draws: Vec<f64> = (0..n_types).map(|_| Exp1.sample(&mut rng)).collect();
                let total: f64 = draws.iter().sum();
                draws.into_iter().map(|x| x / total).collect()
            })
            .collect();
        TypeDistribution { n_types, rows }
    }

    #[inline]
    pub fn n_types(&self) -> usize {
        self.n_types
    }

    #[inline]
    pub fn n_stations(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn prob(&self, station: usize, ty: usize) -> f64 {
        self.rows[station][ty]
    }

    pub fn row(&self, station: usize) -> &[f64] {
        &self.rows[station]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Checks that the distribution fits `map`: one row per station and no
    /// more types than bins.
    pub fn validate_for(&self, map: &WarehouseMap) -> Result<(), MapError> {
        if self.n_stations() != map.stations().len() {
            return Err(MapError::Distribution(format!(
                "{} station rows for a map with {} stations",
                self.n_stations(),
                map.stations().len()
            )));
        }
        if self.n_types > map.bins().len() {
            return Err(MapError::Distribution(format!(
                "{} parcel types exceed the {} bins",
                self.n_types,
                map.bins().len()
            )));
        }
        Ok(())
    }

    /// Parses whitespace-separated rows; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let row = content
                .split_whitespace()
                .enumerate()
                .map(|(c, tok)| {
                    tok.parse::<f64>().map_err(|_| MapError::Parse {
                        line: lineno + 1,
                        column: c + 1,
                        message: format!("`{tok}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# {} stations x {} types\n",
            self.n_stations(),
            self.n_types
        );
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}
