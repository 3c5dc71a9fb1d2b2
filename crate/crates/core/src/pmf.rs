//! Named-variable joint pmfs and exact information quantities in bits.
//!
//! All measures use log base 2 with the convention `0 log 0 = 0`. Tensors are
//! dense and row-major with the first variable slowest. Conditional mutual
//! information is computed as
//! `I(A;B|C) = H(A,C) + H(B,C) - H(C) - H(A,B,C)`
//! and clamped to zero when it lands in `(-TOL_INFO, 0)`; values more negative
//! than `-TOL_INFO` indicate a corrupted pmf and raise
//! [`Error::NumericIntegrity`].

use crate::error::{Error, Result};

/// Stochasticity tolerance shared across the crate.
pub const TOL_PMF: f64 = 1e-9;
/// Clamp threshold for conditional mutual informations.
pub const TOL_INFO: f64 = 1e-9;
/// Dense joint pmfs are capped at 2^24 entries.
pub const MAX_JOINT_ENTRIES: usize = 1 << 24;

/// A dense joint probability mass function over named discrete variables.
#[derive(Debug, Clone)]
pub struct JointPmf {
    vars: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// Builds a joint pmf, validating normalization and non-negativity.
    ///
    /// Entries in `[-1e-15, 0)` are clamped to zero.
    pub fn new(vars: Vec<String>, cards: Vec<usize>, mut probs: Vec<f64>) -> Result<Self> {
        assert_eq!(vars.len(), cards.len(), "one cardinality per variable");
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::OverlappingSets(v.clone()));
            }
        }
        let total: usize = cards.iter().product();
        if total > MAX_JOINT_ENTRIES {
            return Err(Error::JointTooLarge { entries: total, cap: MAX_JOINT_ENTRIES });
        }
        if probs.len() != total {
            return Err(Error::LengthMismatch { expected: total, got: probs.len() });
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if *p < 0.0 {
                if *p < -1e-15 {
                    return Err(Error::NegativeEntry { index: i, value: *p });
                }
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TOL_PMF {
            return Err(Error::MassMismatch(sum));
        }
        Ok(Self { vars, cards, probs })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn card_of(&self, var: &str) -> Result<usize> {
        self.index_of(var).map(|i| self.cards[i])
    }

    fn index_of(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// Flat index of a symbol tuple given in this pmf's variable order.
    pub fn flat_index(&self, symbols: &[usize]) -> usize {
        debug_assert_eq!(symbols.len(), self.cards.len());
        let mut idx = 0;
        for (s, c) in symbols.iter().zip(&self.cards) {
            debug_assert!(s < c);
            idx = idx * c + s;
        }
        idx
    }

    /// Sums out every variable not in `keep`; the order of kept variables is
    /// preserved.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let mut keep_idx = Vec::with_capacity(keep.len());
        for k in keep {
            let i = self.index_of(k)?;
            if keep_idx.contains(&i) {
                return Err(Error::OverlappingSets((*k).to_string()));
            }
            keep_idx.push(i);
        }
        // Preserve the pmf's own variable order, per the contract.
        keep_idx.sort_unstable();
        let kept_vars: Vec<String> = keep_idx.iter().map(|&i| self.vars[i].clone()).collect();
        let kept_cards: Vec<usize> = keep_idx.iter().map(|&i| self.cards[i]).collect();
        let out_len: usize = kept_cards.iter().product::<usize>().max(1);
        let mut out = vec![0.0; out_len];

        // Strides of each source axis, then of each kept axis in the output.
        let n = self.cards.len();
        let mut src_stride = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            src_stride[i] = src_stride[i + 1] * self.cards[i + 1];
        }
        let mut out_stride_for_axis = vec![0usize; n];
        let mut acc = 1usize;
        for (pos, &axis) in keep_idx.iter().enumerate().rev() {
            out_stride_for_axis[axis] = acc;
            acc *= kept_cards[pos];
        }

        let mut symbols = vec![0usize; n];
        for (flat, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                // Still advance the index below.
            } else {
                let mut o = 0usize;
                let mut rem = flat;
                for i in 0..n {
                    let s = rem / src_stride[i];
                    rem %= src_stride[i];
                    symbols[i] = s;
                    o += s * out_stride_for_axis[i];
                }
                out[o] += p;
            }
        }
        JointPmf::new(kept_vars, kept_cards, out)
    }

    /// Shannon entropy of the marginal over `vars`, in bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        let m = self.marginalize(vars)?;
        Ok(entropy_of(&m.probs))
    }

    /// Conditional mutual information `I(A;B|C)` in bits; `C` may be empty.
    ///
    /// The three sets must be pairwise disjoint subsets of the variables.
    pub fn cond_mutual_info(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        for x in a {
            if b.contains(x) || c.contains(x) {
                return Err(Error::OverlappingSets((*x).to_string()));
            }
        }
        for x in b {
            if c.contains(x) {
                return Err(Error::OverlappingSets((*x).to_string()));
            }
        }
        let ac: Vec<&str> = a.iter().chain(c.iter()).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b.iter()).chain(c.iter()).copied().collect();
        let h_ac = self.entropy(&ac)?;
        let h_bc = self.entropy(&bc)?;
        let h_c = if c.is_empty() { 0.0 } else { self.entropy(c)? };
        let h_abc = self.entropy(&abc)?;
        let raw = h_ac + h_bc - h_c - h_abc;
        if raw < -TOL_INFO {
            return Err(Error::NumericIntegrity(raw));
        }
        Ok(raw.max(0.0))
    }
}

/// `-sum p log2 p` over a flat slice, skipping zeros.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(vars: &[&str], cards: &[usize], probs: &[f64]) -> JointPmf {
        JointPmf::new(
            vars.iter().map(|s| s.to_string()).collect(),
            cards.to_vec(),
            probs.to_vec(),
        )
        .unwrap()
    }

    fn uniform_bits(names: &[&str]) -> JointPmf {
        let n = names.len();
        pmf(names, &vec![2; n], &vec![1.0 / (1 << n) as f64; 1 << n])
    }

    #[test]
    fn marginalize_independent_bits() {
        let p = uniform_bits(&["A", "B"]);
        let m = p.marginalize(&["A"]).unwrap();
        assert_eq!(m.vars(), &["A".to_string()]);
        assert!((m.probs()[0] - 0.5).abs() < 1e-15);
        assert!((m.probs()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn marginalize_keep_all_is_identity() {
        let p = pmf(&["A", "B"], &[2, 3], &[0.1, 0.2, 0.05, 0.15, 0.3, 0.2]);
        let m = p.marginalize(&["A", "B"]).unwrap();
        assert_eq!(m.probs(), p.probs());
    }

    #[test]
    fn marginalize_matches_double_loop_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let cards = [2usize, 3, 2];
        let total: usize = cards.iter().product();
        let mut probs: Vec<f64> = (0..total).map(|_| -f64::ln(rng.gen::<f64>())).collect();
        let s: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= s);
        let p = pmf(&["A", "B", "C"], &cards, &probs);

        // Brute-force: sum over B by explicit loops.
        let mut expect = vec![0.0; 4];
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    expect[a * 2 + c] += probs[(a * 3 + b) * 2 + c];
                }
            }
        }
        let m = p.marginalize(&["A", "C"]).unwrap();
        for (got, want) in m.probs().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn marginalize_unknown_variable() {
        let p = uniform_bits(&["A"]);
        assert!(matches!(p.marginalize(&["Z"]), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn entropy_uniform_bit() {
        let p = uniform_bits(&["A"]);
        assert!((p.entropy(&["A"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_point_mass() {
        let p = pmf(&["A"], &[3], &[0.0, 1.0, 0.0]);
        assert!(p.entropy(&["A"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_bernoulli_011() {
        let p = pmf(&["A"], &[2], &[0.89, 0.11]);
        assert!((p.entropy(&["A"]).unwrap() - 0.49991).abs() < 1e-4);
    }

    #[test]
    fn cmi_independent_is_zero() {
        let p = uniform_bits(&["A", "B"]);
        assert!(p.cond_mutual_info(&["A"], &["B"], &[]).unwrap() < 1e-12);
    }

    #[test]
    fn cmi_copy_variable_is_one_bit() {
        let p = pmf(&["A", "B"], &[2, 2], &[0.5, 0.0, 0.0, 0.5]);
        assert!((p.cond_mutual_info(&["A"], &["B"], &[]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cmi_bsc_011() {
        // Uniform input through a binary symmetric coupling with flip 0.11.
        let p = pmf(
            &["A", "B"],
            &[2, 2],
            &[0.5 * 0.89, 0.5 * 0.11, 0.5 * 0.11, 0.5 * 0.89],
        );
        assert!((p.cond_mutual_info(&["A"], &["B"], &[]).unwrap() - 0.50009).abs() < 1e-4);
    }

    #[test]
    fn cmi_rejects_overlap() {
        let p = uniform_bits(&["A", "B"]);
        assert!(matches!(
            p.cond_mutual_info(&["A"], &["A"], &[]),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn joint_size_cap() {
        let res = JointPmf::new(
            (0..25).map(|i| format!("V{i}")).collect(),
            vec![2; 25],
            vec![0.0; 1],
        );
        assert!(matches!(res, Err(Error::JointTooLarge { .. })));
    }

    fn random_pmf(seed: u64, cards: &[usize]) -> JointPmf {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let total: usize = cards.iter().product();
        let mut probs: Vec<f64> = (0..total).map(|_| -f64::ln(rng.gen::<f64>())).collect();
        let s: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= s);
        let vars = (0..cards.len()).map(|i| format!("V{i}")).collect();
        JointPmf::new(vars, cards.to_vec(), probs).unwrap()
    }

    #[test]
    fn chain_rule_on_random_pmfs() {
        for seed in 0..20 {
            let p = random_pmf(seed, &[2, 3, 2, 2]);
            let lhs = p.cond_mutual_info(&["V0"], &["V1", "V2"], &["V3"]).unwrap();
            let rhs = p.cond_mutual_info(&["V0"], &["V1"], &["V3"]).unwrap()
                + p.cond_mutual_info(&["V0"], &["V2"], &["V1", "V3"]).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn data_processing_on_markov_chain() {
        use rand::{Rng, SeedableRng};
        for seed in 0..20 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw_row = |n: usize| {
                let mut row: Vec<f64> = (0..n).map(|_| -f64::ln(rng.gen::<f64>())).collect();
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= s);
                row
            };
            let pa = draw_row(2);
            let pba: Vec<Vec<f64>> = (0..2).map(|_| draw_row(2)).collect();
            let pcb: Vec<Vec<f64>> = (0..2).map(|_| draw_row(2)).collect();
            let mut probs = vec![0.0; 8];
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        probs[(a * 2 + b) * 2 + c] = pa[a] * pba[a][b] * pcb[b][c];
                    }
                }
            }
            let p = pmf(&["A", "B", "C"], &[2, 2, 2], &probs);
            let iac = p.cond_mutual_info(&["A"], &["C"], &[]).unwrap();
            let iab = p.cond_mutual_info(&["A"], &["B"], &[]).unwrap();
            assert!(iac <= iab + 1e-9, "seed {seed}: I(A;C)={iac} > I(A;B)={iab}");
        }
    }
}
