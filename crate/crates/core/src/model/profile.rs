use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ValidationReport;
use crate::scalar::Scalar;

/// Coefficient fields of the vessel-network PDE sampled on a 1-D grid.
///
/// `c` is compliance per unit length, `a0` the basal cross-section, `n`
/// the number of parallel vessels. `l_r` separates the systemic and
/// pulmonary domains of the two-heart circulation; `l_l` is the loop
/// length. The grid runs from 0 to `l_l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialProfile<T> {
    pub x: Vec<T>,
    pub c: Vec<T>,
    pub a0: Vec<T>,
    pub n: Vec<T>,
    pub mu: T,
    pub l_r: T,
    pub l_l: T,
}

impl<T: Scalar> SpatialProfile<T> {
    /// Builds and validates a profile.
    pub fn new(x: Vec<T>, c: Vec<T>, a0: Vec<T>, n: Vec<T>, mu: T, l_r: T, l_l: T) -> Result<Self> {
        let profile = Self {
            x,
            c,
            a0,
            n,
            mu,
            l_r,
            l_l,
        };
        let report = profile.validate();
        if report.is_valid() {
            Ok(profile)
        } else {
            Err(Error::InvalidInput(report.summary()))
        }
    }

    /// Constant coefficients on `nodes` equally spaced points of `[0, l_l]`.
    pub fn uniform(nodes: usize, l_l: T, l_r: T, c: T, a0: T, n: T, mu: T) -> Result<Self> {
        Self::from_fn(nodes, l_l, l_r, mu, |_| (c, a0, n))
    }

    /// Samples `(C, A0, N)` from a closure on a uniform grid.
    pub fn from_fn(
        nodes: usize,
        l_l: T,
        l_r: T,
        mu: T,
        mut fields: impl FnMut(T) -> (T, T, T),
    ) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::InvalidInput("profile needs at least 3 nodes".into()));
        }
        let h = l_l / T::from_count(nodes - 1);
        let x: Vec<T> = (0..nodes)
            .map(|i| if i + 1 == nodes { l_l } else { h * T::from_count(i) })
            .collect();
        let (mut c, mut a0, mut n) = (Vec::new(), Vec::new(), Vec::new());
        for &xi in &x {
            let (ci, ai, ni) = fields(xi);
            c.push(ci);
            a0.push(ai);
            n.push(ni);
        }
        Self::new(x, c, a0, n, mu, l_r, l_l)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let m = self.x.len();
        r.require(m >= 3, "x", "must have at least 3 nodes");
        r.require(
            self.c.len() == m && self.a0.len() == m && self.n.len() == m,
            "C/A0/N",
            "must have one value per grid node",
        );
        if !r.is_valid() {
            return r;
        }
        r.require(
            self.x.windows(2).all(|w| w[1] > w[0]),
            "x",
            "must be strictly increasing",
        );
        let all_finite = |v: &[T]| v.iter().all(|a| a.is_finite());
        r.require(
            all_finite(&self.x) && all_finite(&self.c) && all_finite(&self.a0) && all_finite(&self.n),
            "fields",
            "must be finite at every node",
        );
        r.require(self.c.iter().all(|&v| v > T::zero()), "C", "must be positive at every node");
        r.require(self.a0.iter().all(|&v| v > T::zero()), "A0", "must be positive at every node");
        r.require(self.n.iter().all(|&v| v >= T::one()), "N", "must be at least 1 at every node");
        r.require(self.mu > T::zero() && self.mu.is_finite(), "mu", "must be positive");
        r.require(
            self.l_r > T::zero() && self.l_r < self.l_l,
            "L_r",
            "must satisfy 0 < L_r < L_l",
        );
        let tol = T::lit(1e-9) * self.l_l.abs().max(T::one());
        r.require(self.x[0].abs() <= tol, "x", "must start at 0");
        r.require((self.x[m - 1] - self.l_l).abs() <= tol, "x", "must end at L_l");
        r
    }

    /// Index of the grid node at `x_target`, if one lies within `tol`.
    pub fn node_at(&self, x_target: T, tol: T) -> Option<usize> {
        self.x.iter().position(|&x| (x - x_target).abs() <= tol)
    }

    /// Reads a profile CSV. Scalar header entries are `# key=value`
    /// comment lines (`mu`, `L_r`, `L_l`); the body has columns
    /// `x, C, A0, N` in any order.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: "<profile>".into(),
            message,
        };
        let mut header: BTreeMap<String, f64> = BTreeMap::new();
        for line in text.lines() {
            let Some(rest) = line.trim_start().strip_prefix('#') else {
                continue;
            };
            if let Some((key, value)) = rest.split_once('=') {
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("bad header value in `{line}`")))?;
                header.insert(key.trim().to_string(), value);
            }
        }
        let scalar = |key: &str| {
            header
                .get(key)
                .copied()
                .map(T::lit)
                .ok_or_else(|| parse_err(format!("missing header entry `{key}`")))
        };
        let (mu, l_r, l_l) = (scalar("mu")?, scalar("L_r")?, scalar("L_l")?);

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| parse_err(e.to_string()))?
            .clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_err(format!("missing column `{name}`")))
        };
        let cols = [column("x")?, column("C")?, column("A0")?, column("N")?];
        let mut fields: [Vec<T>; 4] = Default::default();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            for (k, &col) in cols.iter().enumerate() {
                let v: f64 = record
                    .get(col)
                    .ok_or_else(|| parse_err(format!("row {row}: short record")))?
                    .parse()
                    .map_err(|_| parse_err(format!("row {row}: non-numeric value")))?;
                fields[k].push(T::lit(v));
            }
        }
        let [x, c, a0, n] = fields;
        Self::new(x, c, a0, n, mu, l_r, l_l)
    }

    /// Serialises in the format read by [`SpatialProfile::from_csv_str`].
    pub fn to_csv_string(&self) -> String {
        let mut out = format!(
            "# mu={}\n# L_r={}\n# L_l={}\nx,C,A0,N\n",
            self.mu.as_f64(),
            self.l_r.as_f64(),
            self.l_l.as_f64()
        );
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.x[i].as_f64(),
                self.c[i].as_f64(),
                self.a0[i].as_f64(),
                self.n[i].as_f64()
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpatialProfile<f64> {
        SpatialProfile::from_fn(11, 2.0, 1.0, 0.04, |x| (0.01 + 0.001 * x, 1.0 + x, 1.0 + x * x)).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let p = sample();
        let back = SpatialProfile::<f64>::from_csv_str(&p.to_csv_string()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn rejects_zero_compliance_and_bad_markers() {
        let err = SpatialProfile::<f64>::uniform(5, 1.0, 0.5, 0.0, 1.0, 1.0, 0.1).unwrap_err();
        assert!(err.to_string().contains("C must be positive"));
        let err = SpatialProfile::<f64>::uniform(5, 1.0, 1.5, 0.1, 1.0, 1.0, 0.1).unwrap_err();
        assert!(err.to_string().contains("L_r"));
        let err = SpatialProfile::<f64>::uniform(5, 1.0, 0.5, 0.1, 1.0, 0.5, 0.1).unwrap_err();
        assert!(err.to_string().contains("N must be at least 1"));
    }

    #[test]
    fn missing_header_is_a_parse_error() {
        let text = "# mu=1\n# L_l=1\nx,C,A0,N\n0,1,1,1\n0.5,1,1,1\n1,1,1,1\n";
        let err = SpatialProfile::<f64>::from_csv_str(text).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn columns_in_any_order() {
        let text = "# mu=0.5\n# L_r=0.5\n# L_l=1\nN,A0,x,C\n1,2,0,0.1\n1,2,0.5,0.1\n2,2,1,0.1\n";
        let p = SpatialProfile::<f64>::from_csv_str(text).unwrap();
        assert_eq!(p.n, vec![1.0, 1.0, 2.0]);
        assert_eq!(p.x, vec![0.0, 0.5, 1.0]);
    }
}
