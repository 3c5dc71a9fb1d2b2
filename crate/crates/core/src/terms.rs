//! The thirteen information terms of the unified achievable rate region.

use serde::Serialize;

use crate::error::Result;
use crate::pmf::JointPmf;

/// Conditional mutual informations (bits) feeding the rate constraints.
///
/// Over the variable set `(U1p, U1, V1, U2p, U2, V12, V2, X1, X2, X3, Y1, Y2,
/// Yh2)` the terms are:
///
/// | term | expression |
/// |------|------------|
/// | a | I(V1; U2 \| U1p, U1, U2p) |
/// | b | I(Y1, V1, V12; Yh2 \| U1p, U1, U2p, U2, X3) |
/// | c | I(Y2; Yh2 \| U1p, U1, U2p, U2, X3) |
/// | d | I(Y1; U1p, U1, V1, U2p, U2, V12, X3) |
/// | e | I(Y1; V1, U2p, U2, V12, X3 \| U1p, U1) |
/// | f | I(Y1; V1, V12, X3 \| U1p, U1, U2p, U2) |
/// | g | I(Y1, Yh2; V1, V12 \| U1p, U1, U2p, U2, X3) |
/// | h | I(Y1; U2p, U2, V12, X3 \| U1p, U1, V1) |
/// | i | I(Y1; V12, X3 \| U1p, U1, V1, U2p, U2) |
/// | j | I(Y1, Yh2; V12 \| U1p, U1, V1, U2p, U2, X3) |
/// | k | I(Y2; U1, U2, V2 \| U1p, U2p, X3) |
/// | l | I(Y2; U2, V2 \| U1p, U1, U2p, X3) |
/// | m | I(Y2; V2 \| U1p, U1, U2p, U2, X3) |
/// | n_term | I(Y1; X3 \| U1p, U1, V1, U2p, U2, V12) |
///
/// The two pair-binning thresholds are carried alongside:
/// `bin_pair_single = I(V1; V2 | U1p, U1, U2p, U2)` and
/// `bin_pair_sum = I(V1, V12; V2 | U1p, U1, U2p, U2)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InfoTermSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub n_term: f64,
    pub bin_pair_single: f64,
    pub bin_pair_sum: f64,
}

impl InfoTermSet {
    pub fn zero() -> Self {
        InfoTermSet {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            e: 0.0,
            f: 0.0,
            g: 0.0,
            h: 0.0,
            i: 0.0,
            j: 0.0,
            k: 0.0,
            l: 0.0,
            m: 0.0,
            n_term: 0.0,
            bin_pair_single: 0.0,
            bin_pair_sum: 0.0,
        }
    }

    /// Scales every term, preserving the system's positive homogeneity.
    pub fn scaled(&self, lambda: f64) -> Self {
        InfoTermSet {
            a: self.a * lambda,
            b: self.b * lambda,
            c: self.c * lambda,
            d: self.d * lambda,
            e: self.e * lambda,
            f: self.f * lambda,
            g: self.g * lambda,
            h: self.h * lambda,
            i: self.i * lambda,
            j: self.j * lambda,
            k: self.k * lambda,
            l: self.l * lambda,
            m: self.m * lambda,
            n_term: self.n_term * lambda,
            bin_pair_single: self.bin_pair_single * lambda,
            bin_pair_sum: self.bin_pair_sum * lambda,
        }
    }
}

/// Evaluates every term on a joint covering the full variable set.
pub fn compute_info_terms(p: &JointPmf) -> Result<InfoTermSet> {
    let i = |a: &[&str], b: &[&str], c: &[&str]| p.cond_mutual_info(a, b, c);
    Ok(InfoTermSet {
        a: i(&["V1"], &["U2"], &["U1p", "U1", "U2p"])?,
        b: i(&["Y1", "V1", "V12"], &["Yh2"], &["U1p", "U1", "U2p", "U2", "X3"])?,
        c: i(&["Y2"], &["Yh2"], &["U1p", "U1", "U2p", "U2", "X3"])?,
        d: i(&["Y1"], &["U1p", "U1", "V1", "U2p", "U2", "V12", "X3"], &[])?,
        e: i(&["Y1"], &["V1", "U2p", "U2", "V12", "X3"], &["U1p", "U1"])?,
        f: i(&["Y1"], &["V1", "V12", "X3"], &["U1p", "U1", "U2p", "U2"])?,
        g: i(&["Y1", "Yh2"], &["V1", "V12"], &["U1p", "U1", "U2p", "U2", "X3"])?,
        h: i(&["Y1"], &["U2p", "U2", "V12", "X3"], &["U1p", "U1", "V1"])?,
        i: i(&["Y1"], &["V12", "X3"], &["U1p", "U1", "V1", "U2p", "U2"])?,
        j: i(&["Y1", "Yh2"], &["V12"], &["U1p", "U1", "V1", "U2p", "U2", "X3"])?,
        k: i(&["Y2"], &["U1", "U2", "V2"], &["U1p", "U2p", "X3"])?,
        l: i(&["Y2"], &["U2", "V2"], &["U1p", "U1", "U2p", "X3"])?,
        m: i(&["Y2"], &["V2"], &["U1p", "U1", "U2p", "U2", "X3"])?,
        n_term: i(&["Y1"], &["X3"], &["U1p", "U1", "V1", "U2p", "U2", "V12"])?,
        bin_pair_single: i(&["V1"], &["V2"], &["U1p", "U1", "U2p", "U2"])?,
        bin_pair_sum: i(&["V1", "V12"], &["V2"], &["U1p", "U1", "U2p", "U2"])?,
    })
}
