//! Inequality records and the closed-form bound coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::column_select::ColumnSelection;
use crate::scalar::{RealScalar, Scalar};

/// Default relative slack of every check.
pub const REL_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// Left-hand side.
    pub achieved: f64,
    /// Right-hand side.
    pub bound: f64,
    /// `achieved / bound`; `0` when both vanish.
    #[serde(with = "extended_float")]
    pub ratio: f64,
    pub passed: bool,
}

impl BoundCheck {
    /// `achieved <= bound * (1 + rel) + abs`.
    pub fn new(name: impl Into<String>, achieved: f64, bound: f64, rel: f64, abs: f64) -> Self {
        let ratio = if bound > 0.0 {
            achieved / bound
        } else if achieved == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        BoundCheck {
            name: name.into(),
            achieved,
            bound,
            ratio,
            passed: achieved.is_finite() && achieved <= bound * (1.0 + rel) + abs,
        }
    }
}

/// JSON has no infinities: non-finite values travel as `"inf"`, `"-inf"`, `"nan"`.
mod extended_float {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *x {
            x if x.is_finite() => Repr::Num(x),
            x if x.is_nan() => Repr::Text("nan".into()),
            x if x > 0.0 => Repr::Text("inf".into()),
            _ => Repr::Text("-inf".into()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(D::Error::custom(format!("bad float {t:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
    /// Measured quantities that are not themselves inequalities.
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn check(&mut self, name: impl Into<String>, achieved: f64, bound: f64, abs: f64) {
        self.checks
            .push(BoundCheck::new(name, achieved, bound, REL_SLACK, abs));
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) {
        self.values.insert(name.into(), v);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: BoundReport) {
        self.checks.extend(other.checks);
        self.values.extend(other.values);
    }
}

/// `sqrt(r + 1)`: column error over surrogate error, Frobenius.
pub fn column_fro_factor(r: usize) -> f64 {
    ((r + 1) as f64).sqrt()
}

/// `sqrt(1 + r (p - r))`: column error over surrogate error, spectral.
pub fn column_spec_factor(r: usize, p: usize) -> f64 {
    (1.0 + (r * p.saturating_sub(r)) as f64).sqrt()
}

/// `sqrt(2r + 2)`: projective skeleton, Frobenius.
pub fn projective_fro_factor(r: usize) -> f64 {
    ((2 * r + 2) as f64).sqrt()
}

/// `sqrt(2 + 2r (p - r))`: projective skeleton, spectral.
pub fn projective_spec_factor(r: usize, p: usize) -> f64 {
    (2.0 + 2.0 * (r * p.saturating_sub(r)) as f64).sqrt()
}

/// `r + 1`: cross skeleton, Frobenius.
pub fn cross_fro_factor(r: usize) -> f64 {
    (r + 1) as f64
}

/// `sqrt(1 + r (r + 2) (p - r))`: cross skeleton, spectral.
pub fn cross_spec_factor(r: usize, p: usize) -> f64 {
    (1.0 + (r * (r + 2) * p.saturating_sub(r)) as f64).sqrt()
}

/// `sqrt(1 + rho^2 r (N - r))`: strong RRQR, spectral.
pub fn rrqr_factor(r: usize, n: usize, rho: f64) -> f64 {
    (1.0 + rho * rho * (r * n.saturating_sub(r)) as f64).sqrt()
}

/// `sqrt(1 + r (rho^2 r + rho^2 + 1) (p - r))`: RRQR-based skeleton, spectral.
pub fn spectral_skeleton_factor(r: usize, p: usize, rho: f64) -> f64 {
    let r_f = r as f64;
    let rho2 = rho * rho;
    (1.0 + r_f * (rho2 * r_f + rho2 + 1.0) * p.saturating_sub(r) as f64).sqrt()
}

/// `||V_hat^{-1}||_F^2 <= r (N - r + 1)`.
pub fn inverse_fro_sq_bound(r: usize, n: usize) -> f64 {
    (r * (n + 1 - r)) as f64
}

/// `||V_hat^{-1}||_2^2 <= 1 + r (N - r)`.
pub fn inverse_spec_sq_bound(r: usize, n: usize) -> f64 {
    1.0 + (r * (n - r)) as f64
}

/// `||V_hat^+||_F^2 <= k (N - k + 1) / (r - k + 1)` after `k` of `r` steps.
pub fn partial_inverse_bound(k: usize, r: usize, n: usize) -> f64 {
    (k * (n + 1 - k)) as f64 / (r + 1 - k) as f64
}

/// `sqrt(1 + r min(M, N - r))`: column error over surrogate error, spectral,
/// using `rank(A - A V^* V) <= min(M, N - r)` for an arbitrary surrogate.
pub fn column_spec_rank_factor(r: usize, m: usize, n: usize) -> f64 {
    (1.0 + (r * m.min(n.saturating_sub(r))) as f64).sqrt()
}

/// Checks of a column selection of an `M x N` matrix against its reference
/// error.
///
/// `cw_spec` uses the factor `sqrt(1 + r (min(M, N) - r))`, which rests on
/// `rank(A - Z) <= min(M, N) - r`. That holds for `Z = A_r` and whenever
/// `M >= N`; for `M < N` and other surrogates it can fail, so `cw_spec_rank`
/// with the rank bound `min(M, N - r)` is reported next to it.
///
/// `scale` (typically `||A||_F`) sets the absolute slack `1e-10 * scale`.
pub fn column_bounds<T: Scalar>(sel: &ColumnSelection<T>, shape: (usize, usize), scale: f64) -> BoundReport {
    let (m, n) = shape;
    let min_dim = m.min(n);
    let r = sel.rank();
    let abs = 1e-10 * scale;
    let mut rep = BoundReport::default();
    let proj = sel.err_proj;
    rep.value("err_proj_fro", proj.fro.as_f64());
    rep.value("err_proj_spec", proj.spec.as_f64());
    if let Some(cw) = sel.err_cw {
        rep.value("err_cw_fro", cw.fro.as_f64());
        rep.value("err_cw_spec", cw.spec.as_f64());
        rep.check("proj_le_cw_fro", proj.fro.as_f64(), cw.fro.as_f64(), abs);
        rep.check("proj_le_cw_spec", proj.spec.as_f64(), cw.spec.as_f64(), abs);
    }
    let Some(z) = sel.reference_err() else {
        return rep;
    };
    let (zf, zs) = (z.fro.as_f64(), z.spec.as_f64());
    rep.value("surrogate_fro", zf);
    rep.value("surrogate_spec", zs);
    let (ef, es) = match sel.err_cw {
        Some(cw) => (cw.fro.as_f64(), cw.spec.as_f64()),
        None => (proj.fro.as_f64(), proj.spec.as_f64()),
    };
    rep.check("cw_fro", ef, column_fro_factor(r) * zf, abs);
    rep.check(
        "cw_spec_sq",
        es * es,
        zs * zs + r as f64 * zf * zf,
        abs * abs + 2.0 * abs * es,
    );
    rep.check("cw_spec", es, column_spec_factor(r, min_dim) * zs, abs);
    if m < n {
        rep.check("cw_spec_rank", es, column_spec_rank_factor(r, m, n) * zs, abs);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_arithmetic() {
        let c = BoundCheck::new("x", 1.0, 2.0, 0.0, 0.0);
        assert!(c.passed && c.ratio == 0.5);
        let z = BoundCheck::new("z", 0.0, 0.0, 0.0, 0.0);
        assert!(z.passed && z.ratio == 0.0);
        let bad = BoundCheck::new("b", 1.0, 0.0, 0.0, 1e-3);
        assert!(!bad.passed && bad.ratio.is_infinite());
        let nan = BoundCheck::new("n", f64::NAN, 1.0, 0.0, 0.0);
        assert!(!nan.passed);
    }

    #[test]
    fn factors() {
        assert_eq!(column_fro_factor(3), 2.0);
        assert_eq!(cross_fro_factor(3), 4.0);
        assert_eq!(projective_fro_factor(2), 6f64.sqrt());
        assert_eq!(inverse_fro_sq_bound(1, 5), 5.0);
        assert_eq!(partial_inverse_bound(1, 1, 5), 5.0);
        assert_eq!(inverse_spec_sq_bound(3, 3), 1.0);
        assert!((spectral_skeleton_factor(1, 3, 1.0) - 7f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn report_roundtrip() {
        let mut r = BoundReport::default();
        r.check("a", 1.0, 2.0, 0.0);
        r.value("v", 3.5);
        let s = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(back.all_passed());

        r.check("b", 1.0, 0.0, 0.0);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"inf\""));
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
