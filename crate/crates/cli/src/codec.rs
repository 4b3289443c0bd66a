//! Cacheable forms of the core result types. Numbers are decimal strings
//! long enough to round-trip the binary value exactly.

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use wasep::bethe_finite::BetheRootSet;
use wasep::edge::{EdgeRootSet, TailModel, W0Policy};
use wasep::series::{ExactCoeff, MuPolySeries, SeriesResult};

fn f_enc(x: &Float) -> String {
    x.to_string_radix(10, None)
}

fn f_dec(s: &str, prec: u32) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(prec, p))
}

fn c_enc(z: &Complex) -> [String; 2] {
    [f_enc(z.real()), f_enc(z.imag())]
}

fn c_dec(z: &[String; 2], prec: u32) -> Option<Complex> {
    Some(Complex::with_val(prec, (f_dec(&z[0], prec)?, f_dec(&z[1], prec)?)))
}

#[derive(Serialize, Deserialize)]
pub struct BetheEntry {
    prec: u32,
    l: usize,
    n: usize,
    mu: String,
    q: String,
    roots: Vec<[String; 2]>,
    quantum_numbers: Vec<f64>,
    residual: String,
    residual_prec: u32,
}

impl From<&BetheRootSet> for BetheEntry {
    fn from(s: &BetheRootSet) -> Self {
        Self {
            prec: s.prec(),
            l: s.l,
            n: s.n,
            mu: f_enc(&s.mu),
            q: f_enc(&s.q),
            roots: s.roots.iter().map(c_enc).collect(),
            quantum_numbers: s.quantum_numbers.clone(),
            residual: f_enc(&s.residual),
            residual_prec: s.residual.prec(),
        }
    }
}

impl BetheEntry {
    pub fn decode(&self) -> Option<BetheRootSet> {
        let p = self.prec;
        Some(BetheRootSet {
            l: self.l,
            n: self.n,
            mu: f_dec(&self.mu, p)?,
            q: f_dec(&self.q, p)?,
            roots: self.roots.iter().map(|z| c_dec(z, p)).collect::<Option<_>>()?,
            quantum_numbers: self.quantum_numbers.clone(),
            residual: f_dec(&self.residual, self.residual_prec)?,
        })
    }
}

#[derive(Serialize, Deserialize)]
pub struct EdgeEntry {
    prec: u32,
    mu: String,
    m: usize,
    w: BTreeMap<i64, [String; 2]>,
    tail_error: f64,
    residual: f64,
    w0_policy: String,
    warnings: Vec<String>,
}

pub fn policy_name(p: W0Policy) -> &'static str {
    match p {
        W0Policy::Absent => "absent",
        W0Policy::Asymptote => "asymptote",
        W0Policy::Continued => "continued",
        W0Policy::Tasep => "tasep",
    }
}

impl EdgeEntry {
    /// Only solved finite-μ sets are cached.
    pub fn encode(s: &EdgeRootSet) -> Option<Self> {
        let mu = s.mu.as_ref()?;
        Some(Self {
            prec: mu.prec(),
            mu: f_enc(mu),
            m: s.m,
            w: s.w.iter().map(|(&j, z)| (j, c_enc(z))).collect(),
            tail_error: s.tail_error,
            residual: s.residual,
            w0_policy: policy_name(s.w0_policy).into(),
            warnings: s.warnings.clone(),
        })
    }

    pub fn decode(&self) -> Option<EdgeRootSet> {
        let p = self.prec;
        let w0_policy = match self.w0_policy.as_str() {
            "absent" => W0Policy::Absent,
            "asymptote" => W0Policy::Asymptote,
            "continued" => W0Policy::Continued,
            "tasep" => W0Policy::Tasep,
            _ => return None,
        };
        Some(EdgeRootSet {
            mu: Some(f_dec(&self.mu, p)?),
            m: self.m,
            w: self.w.iter().map(|(&j, z)| Some((j, c_dec(z, p)?))).collect::<Option<_>>()?,
            tail_model: TailModel::ErfAsymptotic,
            tail_error: self.tail_error,
            residual: self.residual,
            w0_policy,
            warnings: self.warnings.clone(),
        })
    }
}

/// Exact series content as coefficient tokens.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub order_max: usize,
    pub e1: Vec<String>,
    /// Index 0 is order −1.
    pub c_asymptotic: Vec<String>,
    pub c_wronskian: Vec<String>,
    pub alpha: PolyEntry,
    pub beta: PolyEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyEntry {
    pub min_order: i32,
    pub coeffs: Vec<Vec<String>>,
}

fn toks(v: &[ExactCoeff]) -> Vec<String> {
    v.iter().map(ExactCoeff::format_exact).collect()
}

fn poly(p: &MuPolySeries) -> PolyEntry {
    PolyEntry { min_order: p.min_order, coeffs: p.coeffs.iter().map(|c| toks(c)).collect() }
}

impl From<&SeriesResult> for SeriesEntry {
    fn from(r: &SeriesResult) -> Self {
        Self {
            order_max: r.order_max,
            e1: toks(&r.e1),
            c_asymptotic: toks(&r.c_asymptotic),
            c_wronskian: toks(&r.c_wronskian),
            alpha: poly(&r.alpha),
            beta: poly(&r.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wasep::PrecisionContext;

    #[test]
    fn bethe_entry_round_trips_bit_exactly() {
        let ctx = PrecisionContext::with_bits(200).unwrap();
        let s = wasep::bethe_finite::solve_gap_roots(8, 4, &ctx.real(0.7), &ctx, None).unwrap();
        let json = serde_json::to_string(&BetheEntry::from(&s)).unwrap();
        let back = serde_json::from_str::<BetheEntry>(&json).unwrap().decode().unwrap();
        assert_eq!(back.roots, s.roots);
        assert_eq!(back.q, s.q);
        assert_eq!(back.residual, s.residual);
        assert_eq!(back.prec(), s.prec());
    }

    #[test]
    fn edge_entry_round_trips() {
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let s = wasep::edge::solve_edge_roots(&ctx.real(0.5), 8, &ctx, None).unwrap();
        let e = EdgeEntry::encode(&s).unwrap();
        let back = serde_json::from_str::<EdgeEntry>(&serde_json::to_string(&e).unwrap()).unwrap().decode().unwrap();
        assert_eq!(back.w, s.w);
        assert_eq!(back.tail_error, s.tail_error);
        assert_eq!(back.w0_policy, s.w0_policy);
        assert!(EdgeEntry::encode(&EdgeRootSet::at_infinity(4, &ctx).unwrap()).is_none());
    }
}
