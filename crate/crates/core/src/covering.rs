//! Monte Carlo validation of the two covering lemmas at finite blocklength.
//!
//! The single-codeword experiment (`gp`) draws the superposition context,
//! then searches `2^{n R'}` conditionally drawn candidates for one jointly
//! typical with the context; success becomes likely once `R'` clears the
//! mutual-information threshold. The pair experiment (`marton`) searches
//! candidate `(v12, v2)` pairs against the pair-binning thresholds.
//!
//! Strong typicality is a per-cell count condition, so given the context's
//! cell counts the number of typical candidates is binomially distributed
//! with an exactly computable per-candidate probability. Beyond the
//! index-space cap the experiment therefore switches from the materialized
//! scan to flipping each trial with its exact success probability; the two
//! strategies have identical outcome laws, which the tests check at small
//! blocklength.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::factored::{derive_seed, FactoredDistribution, Scheme};
use crate::pmf::JointPmf;

/// Typicality slack and blocklength.
#[derive(Debug, Clone, Copy)]
pub struct TypicalityConfig {
    pub epsilon: f64,
    pub n: usize,
}

impl TypicalityConfig {
    pub fn new(epsilon: f64, n: usize) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidInput("blocklength must be at least 1".into()));
        }
        Ok(TypicalityConfig { epsilon, n })
    }
}

/// Strong (robust) typicality: every joint cell's empirical frequency must
/// lie within `eps * p(a) + eps / |cells|` of `p(a)`, and cells of zero
/// probability must not occur at all.
pub fn typicality_test(seqs: &[&[usize]], p: &JointPmf, cfg: &TypicalityConfig) -> Result<bool> {
    if seqs.len() != p.vars().len() {
        return Err(Error::LengthMismatch { expected: p.vars().len(), got: seqs.len() });
    }
    for s in seqs {
        if s.len() != cfg.n {
            return Err(Error::LengthMismatch { expected: cfg.n, got: s.len() });
        }
    }
    let cells = p.probs().len();
    let mut counts = vec![0usize; cells];
    let mut symbols = vec![0usize; seqs.len()];
    for t in 0..cfg.n {
        for (i, s) in seqs.iter().enumerate() {
            symbols[i] = s[t];
        }
        counts[p.flat_index(&symbols)] += 1;
    }
    let n = cfg.n as f64;
    for (a, (&count, &prob)) in counts.iter().zip(p.probs()).enumerate() {
        let _ = a;
        if prob == 0.0 {
            if count > 0 {
                return Ok(false);
            }
            continue;
        }
        let tol = cfg.epsilon * prob + cfg.epsilon / cells as f64;
        if (count as f64 / n - prob).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveringMode {
    Gp,
    Marton,
}

impl CoveringMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "gp" => Ok(CoveringMode::Gp),
            "marton" => Ok(CoveringMode::Marton),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Pick materialized search when the index space fits the cap, the exact
    /// coverage law beyond it.
    Auto,
    Materialized,
    Exact,
}

/// Experiment options. `epsilon` is the typicality slack; `marton_r1b` fixes
/// the first pair dimension's rate (bits/symbol) while the sum rate sweeps.
#[derive(Debug, Clone, Copy)]
pub struct CoveringOptions {
    pub epsilon: f64,
    pub marton_r1b: f64,
    pub cap_bits: f64,
    pub strategy: Strategy,
}

impl Default for CoveringOptions {
    fn default() -> Self {
        CoveringOptions { epsilon: 0.1, marton_r1b: 0.0, cap_bits: 24.0, strategy: Strategy::Auto }
    }
}

/// Outcome of one rate point.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringResult {
    pub mode: CoveringMode,
    pub offset: f64,
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    /// Candidate-index rate in bits/symbol (sum rate for pair mode).
    pub rate_used: f64,
    /// Operative threshold: the single-codeword cost for `gp`, the pair-sum
    /// cost for `marton`.
    pub threshold: f64,
    /// The pair mode's full threshold triple `(r1b >= 0, single, sum)`.
    pub marton_thresholds: Option<[f64; 3]>,
    pub success_rate: f64,
    pub strategy: &'static str,
}

/// One covering instance: a target joint over `ctx_vars + [z]`, candidates
/// drawn iid from `p(z | sub_vars)`.
struct CoverInstance {
    /// Target probabilities indexed `(ctx_cell, z)`.
    target: Vec<f64>,
    ctx_cards: Vec<usize>,
    ctx_cells: usize,
    z_card: usize,
    /// Marginal over context cells.
    ctx_marginal: Vec<f64>,
    /// Codegen conditional per context cell (constant across cells sharing a
    /// sub-cell): indexed `(ctx_cell, z)`.
    codegen: Vec<f64>,
    /// Count windows per `(ctx_cell, z)` at the experiment blocklength.
    lo: Vec<i64>,
    hi: Vec<i64>,
    n: usize,
}

impl CoverInstance {
    fn build(
        joint: &JointPmf,
        ctx_vars: &[&str],
        z_var: &str,
        sub_vars: &[&str],
        epsilon: f64,
        n: usize,
    ) -> Result<CoverInstance> {
        let mut keep: Vec<&str> = ctx_vars.to_vec();
        keep.push(z_var);
        let m = joint.marginalize(&keep)?;
        // Reorder to (ctx..., z): marginalize preserves joint order, so map.
        let order: Vec<usize> = keep
            .iter()
            .map(|v| m.vars().iter().position(|x| x == v).expect("kept var"))
            .collect();
        let ctx_cards: Vec<usize> = ctx_vars.iter().map(|v| m.card_of(v).unwrap()).collect();
        let z_card = m.card_of(z_var)?;
        let ctx_cells: usize = ctx_cards.iter().product::<usize>().max(1);
        let mut target = vec![0.0; ctx_cells * z_card];
        let mcards = m.cards().to_vec();
        let total = m.probs().len();
        let mut msyms = vec![0usize; mcards.len()];
        for flat in 0..total {
            let mut rem = flat;
            for i in (0..mcards.len()).rev() {
                msyms[i] = rem % mcards[i];
                rem /= mcards[i];
            }
            // Symbols in keep-order.
            let mut ctx_cell = 0usize;
            for (k, &pos) in order[..ctx_vars.len()].iter().enumerate() {
                ctx_cell = ctx_cell * ctx_cards[k] + msyms[pos];
            }
            let z = msyms[order[ctx_vars.len()]];
            target[ctx_cell * z_card + z] = m.probs()[flat];
        }
        let ctx_marginal: Vec<f64> =
            (0..ctx_cells).map(|c| target[c * z_card..(c + 1) * z_card].iter().sum()).collect();

        // Codegen conditional: p(z | sub) marginalized over the rest.
        let sub_pos: Vec<usize> = sub_vars
            .iter()
            .map(|v| ctx_vars.iter().position(|x| x == v).expect("sub in ctx"))
            .collect();
        let sub_cards: Vec<usize> = sub_pos.iter().map(|&i| ctx_cards[i]).collect();
        let sub_cells: usize = sub_cards.iter().product::<usize>().max(1);
        let mut sub_joint = vec![0.0; sub_cells * z_card];
        let mut csyms = vec![0usize; ctx_cards.len()];
        for c in 0..ctx_cells {
            let mut rem = c;
            for i in (0..ctx_cards.len()).rev() {
                csyms[i] = rem % ctx_cards[i];
                rem /= ctx_cards[i];
            }
            let mut s = 0usize;
            for (k, &i) in sub_pos.iter().enumerate() {
                s = s * sub_cards[k] + csyms[i];
            }
            for z in 0..z_card {
                sub_joint[s * z_card + z] += target[c * z_card + z];
            }
        }
        let mut codegen = vec![0.0; ctx_cells * z_card];
        for c in 0..ctx_cells {
            let mut rem = c;
            for i in (0..ctx_cards.len()).rev() {
                csyms[i] = rem % ctx_cards[i];
                rem /= ctx_cards[i];
            }
            let mut s = 0usize;
            for (k, &i) in sub_pos.iter().enumerate() {
                s = s * sub_cards[k] + csyms[i];
            }
            let mass: f64 = sub_joint[s * z_card..(s + 1) * z_card].iter().sum();
            for z in 0..z_card {
                codegen[c * z_card + z] = if mass > 1e-12 {
                    sub_joint[s * z_card + z] / mass
                } else {
                    1.0 / z_card as f64
                };
            }
        }

        // Typicality windows at blocklength n.
        let cells = (ctx_cells * z_card) as f64;
        let mut lo = vec![0i64; ctx_cells * z_card];
        let mut hi = vec![0i64; ctx_cells * z_card];
        for (i, &q) in target.iter().enumerate() {
            if q == 0.0 {
                lo[i] = 0;
                hi[i] = 0;
            } else {
                let tol = epsilon * q + epsilon / cells;
                lo[i] = ((n as f64 * (q - tol)) - 1e-9).ceil().max(0.0) as i64;
                hi[i] = ((n as f64 * (q + tol)) + 1e-9).floor().min(n as f64) as i64;
            }
        }
        Ok(CoverInstance { target, ctx_cards, ctx_cells, z_card, ctx_marginal, codegen, lo, hi, n })
    }

    fn draw_context(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        (0..self.n).map(|_| draw_from(&self.ctx_marginal, rng)).collect()
    }

    /// Exact probability that one conditionally drawn candidate is jointly
    /// typical with the given context, in log2 (`None` means zero).
    fn log2_single_candidate(&self, ctx: &[usize], ln_fact: &[f64]) -> Option<f64> {
        let mut counts = vec![0usize; self.ctx_cells];
        for &c in ctx {
            counts[c] += 1;
        }
        let mut log2_q = 0.0;
        for c in 0..self.ctx_cells {
            let n_c = counts[c];
            let lo = &self.lo[c * self.z_card..(c + 1) * self.z_card];
            let hi = &self.hi[c * self.z_card..(c + 1) * self.z_card];
            let m = &self.codegen[c * self.z_card..(c + 1) * self.z_card];
            if n_c == 0 {
                // No symbols in this context cell: all (c, z) counts are 0,
                // which must be allowed by the windows.
                if lo.iter().any(|&l| l > 0) {
                    return None;
                }
                continue;
            }
            let p_ln = multinomial_window_ln(n_c, m, lo, hi, ln_fact)?;
            log2_q += p_ln / std::f64::consts::LN_2;
        }
        Some(log2_q)
    }
}

fn draw_from(pmf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    pmf.len() - 1
}

/// `ln P(k_z in [lo_z, hi_z] for all z, sum k_z = n)` for a multinomial with
/// cell probabilities `m`. Processes categories sequentially as binomials of
/// the remaining mass, restricting the running remainder to the reachable
/// window. Returns `None` when the probability is exactly zero.
fn multinomial_window_ln(
    n: usize,
    m: &[f64],
    lo: &[i64],
    hi: &[i64],
    ln_fact: &[f64],
) -> Option<f64> {
    let z_card = m.len();
    // Remaining-sum windows after each category.
    let mut suffix_lo = vec![0i64; z_card + 1];
    let mut suffix_hi = vec![0i64; z_card + 1];
    for z in (0..z_card).rev() {
        suffix_lo[z] = suffix_lo[z + 1] + lo[z];
        suffix_hi[z] = suffix_hi[z + 1] + hi[z].min(n as i64);
    }
    if suffix_lo[0] > n as i64 || suffix_hi[0] < n as i64 {
        return None;
    }
    // dp over remaining count, in linear space with a running log scale.
    let mut rem_lo = n as i64;
    let mut rem_hi = n as i64;
    let mut dp = vec![1.0f64; 1]; // probability of remainder == rem_lo + idx
    let mut scale_ln = 0.0f64;
    let mut mass_left = 1.0f64;
    for z in 0..z_card {
        let p_rel = if mass_left > 1e-300 { (m[z] / mass_left).min(1.0) } else { 0.0 };
        // New remainder window.
        let new_lo = (rem_lo - hi[z]).max(suffix_lo[z + 1]).max(0);
        let new_hi = (rem_hi - lo[z]).min(suffix_hi[z + 1]);
        if new_lo > new_hi {
            return None;
        }
        let mut next = vec![0.0f64; (new_hi - new_lo + 1) as usize];
        for (idx, &weight) in dp.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let r = rem_lo + idx as i64;
            let k_min = lo[z].max(r - new_hi).max(0);
            let k_max = hi[z].min(r - new_lo).min(r);
            for k in k_min..=k_max {
                // Degenerate category probabilities make individual terms
                // impossible, not the whole window.
                let Some(ln_b) = ln_binomial(r as usize, k as usize, p_rel, ln_fact) else {
                    continue;
                };
                let contrib = weight * ln_b.exp();
                next[(r - k - new_lo) as usize] += contrib;
            }
        }
        // Rescale to keep dp in a sane float range.
        let mx = next.iter().cloned().fold(0.0f64, f64::max);
        if mx == 0.0 {
            return None;
        }
        if mx < 1e-100 {
            let inv = 1.0 / mx;
            next.iter_mut().for_each(|v| *v *= inv);
            scale_ln += mx.ln();
        }
        dp = next;
        rem_lo = new_lo;
        rem_hi = new_hi;
        mass_left -= m[z];
    }
    // All categories processed: the remainder must be zero.
    if rem_lo > 0 || rem_hi < 0 {
        return None;
    }
    let p = dp[(0 - rem_lo) as usize];
    if p == 0.0 {
        return None;
    }
    Some(p.ln() + scale_ln)
}

/// `ln C(n, k) + k ln p + (n-k) ln(1-p)`, honoring degenerate `p`.
fn ln_binomial(n: usize, k: usize, p: f64, ln_fact: &[f64]) -> Option<f64> {
    if k > n {
        return None;
    }
    if p <= 0.0 {
        return if k == 0 { Some(0.0) } else { None };
    }
    if p >= 1.0 {
        return if k == n { Some(0.0) } else { None };
    }
    Some(
        ln_fact[n] - ln_fact[k] - ln_fact[n - k]
            + k as f64 * p.ln()
            + (n - k) as f64 * (1.0 - p).ln(),
    )
}

fn ln_fact_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

fn success_probability(log2_q: Option<f64>, log2_n: f64) -> f64 {
    let Some(log2_q) = log2_q else { return 0.0 };
    let a = log2_n + log2_q;
    if a > 9.0 {
        return 1.0;
    }
    let nq = a.exp2();
    if log2_q < -50.0 {
        // Candidates are iid: P(miss all) = (1-q)^N ~ exp(-Nq) for tiny q.
        -(-nq).exp_m1()
    } else {
        let q = log2_q.exp2();
        let n = (log2_n.exp2()).max(1.0);
        -(n * (-q).ln_1p()).exp_m1()
    }
}

const GP_CTX: [&str; 4] = ["U1p", "U1", "V1", "U2p"];
const GP_SUB: [&str; 3] = ["U1p", "U1", "U2p"];
const MARTON_CTX: [&str; 6] = ["U1p", "U1", "V1", "U2p", "U2", "V12"];
const MARTON_SUB: [&str; 4] = ["U1p", "U1", "U2p", "U2"];

/// Runs the covering experiment at `threshold + offset` for every offset.
///
/// Candidate codebooks follow the superposition construction: the context is
/// drawn from the scheme's joint, candidates from the conditional that omits
/// the variables being covered. Offsets share random streams (contexts are
/// identical and candidate lists are prefixes), making success monotone in
/// the rate sample by sample.
#[allow(clippy::too_many_arguments)]
pub fn covering_experiment(
    mode: CoveringMode,
    fd: &FactoredDistribution,
    ch: &ChannelSpec,
    n: usize,
    rate_offsets: &[f64],
    trials: u64,
    seed: u64,
    opts: &CoveringOptions,
) -> Result<Vec<CoveringResult>> {
    if fd.scheme != Scheme::Theorem1 {
        return Err(Error::ModeSchemeMismatch {
            expected: "theorem1".to_string(),
            got: fd.scheme.name().to_string(),
        });
    }
    if opts.epsilon <= 0.0 || n == 0 {
        return Err(Error::InvalidInput("need epsilon > 0 and n >= 1".into()));
    }
    let joint = fd.assemble_joint(ch)?;
    let terms = crate::terms::compute_info_terms(&joint)?;
    let (threshold, marton_thresholds) = match mode {
        CoveringMode::Gp => (terms.a, None),
        CoveringMode::Marton => (
            terms.bin_pair_sum,
            Some([0.0, terms.bin_pair_single, terms.bin_pair_sum]),
        ),
    };

    let mut results = Vec::with_capacity(rate_offsets.len());
    for &offset in rate_offsets {
        let rate = (threshold + offset).max(0.0);
        let result = match mode {
            CoveringMode::Gp => run_single_cover(
                &joint,
                &GP_CTX,
                "U2",
                &GP_SUB,
                n,
                rate,
                trials,
                seed,
                opts,
            )?,
            CoveringMode::Marton => {
                if opts.marton_r1b > 0.0 {
                    run_pair_cover(&joint, n, rate, trials, seed, opts)?
                } else {
                    run_single_cover(
                        &joint,
                        &MARTON_CTX,
                        "V2",
                        &MARTON_SUB,
                        n,
                        rate,
                        trials,
                        seed,
                        opts,
                    )?
                }
            }
        };
        let (successes, strategy) = result;
        results.push(CoveringResult {
            mode,
            offset,
            n,
            trials,
            successes,
            rate_used: rate,
            threshold,
            marton_thresholds,
            success_rate: successes as f64 / trials.max(1) as f64,
            strategy,
        });
    }
    Ok(results)
}

#[allow(clippy::too_many_arguments)]
fn run_single_cover(
    joint: &JointPmf,
    ctx_vars: &[&str],
    z_var: &str,
    sub_vars: &[&str],
    n: usize,
    rate: f64,
    trials: u64,
    seed: u64,
    opts: &CoveringOptions,
) -> Result<(u64, &'static str)> {
    let inst = CoverInstance::build(joint, ctx_vars, z_var, sub_vars, opts.epsilon, n)?;
    let log2_n_cand = (n as f64) * rate;
    let use_exact = match opts.strategy {
        Strategy::Materialized => {
            if log2_n_cand > opts.cap_bits {
                return Err(Error::IndexSpaceTooLarge { bits: log2_n_cand, cap: opts.cap_bits as u32 });
            }
            false
        }
        Strategy::Exact => true,
        Strategy::Auto => log2_n_cand > opts.cap_bits,
    };
    let ln_fact = ln_fact_table(n);
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(seed, trial);
            let mut ctx_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 1));
            let ctx = inst.draw_context(&mut ctx_rng);
            if use_exact {
                let mut bern_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 3));
                let p = success_probability(
                    inst.log2_single_candidate(&ctx, &ln_fact),
                    log2_n_cand,
                );
                u64::from(bern_rng.gen::<f64>() < p)
            } else {
                let n_cand = log2_n_cand.exp2().floor().max(1.0) as u64;
                let mut cand_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 2));
                let mut counts = vec![0i64; inst.ctx_cells * inst.z_card];
                for _ in 0..n_cand {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for &c in &ctx {
                        let row = &inst.codegen[c * inst.z_card..(c + 1) * inst.z_card];
                        let z = draw_from(row, &mut cand_rng);
                        counts[c * inst.z_card + z] += 1;
                    }
                    let ok = counts
                        .iter()
                        .zip(inst.lo.iter().zip(&inst.hi))
                        .all(|(&k, (&lo, &hi))| k >= lo && k <= hi);
                    if ok {
                        return 1;
                    }
                }
                0
            }
        })
        .sum();
    Ok((successes, if use_exact { "exact_tail" } else { "materialized" }))
}

/// Materialized pair search: `2^{n r1b}` first-coordinate candidates against
/// `2^{n r22}` second-coordinate candidates, sum rate fixed by the caller.
fn run_pair_cover(
    joint: &JointPmf,
    n: usize,
    sum_rate: f64,
    trials: u64,
    seed: u64,
    opts: &CoveringOptions,
) -> Result<(u64, &'static str)> {
    let r1b = opts.marton_r1b.min(sum_rate);
    let r22 = sum_rate - r1b;
    let bits = (n as f64) * (r1b + r22);
    if bits > opts.cap_bits {
        return Err(Error::IndexSpaceTooLarge { bits, cap: opts.cap_bits as u32 });
    }
    let eps = opts.epsilon;
    // Full 7-variable target.
    let full_vars = ["U1p", "U1", "V1", "U2p", "U2", "V12", "V2"];
    let target = joint.marginalize(&full_vars)?;
    let cfg = TypicalityConfig::new(eps, n)?;

    // Contexts and conditionals.
    let ctx_vars = ["U1p", "U1", "V1", "U2p", "U2"];
    let ctx_inst = CoverInstance::build(joint, &ctx_vars[..4], "U2", &["U1p", "U1", "V1", "U2p"], eps, n)?;
    let v12_inst = CoverInstance::build(joint, &ctx_vars, "V12", &ctx_vars, eps, n)?;
    let v2_inst = CoverInstance::build(joint, &["U1p", "U1", "V1", "U2p", "U2", "V12"], "V2", &MARTON_SUB, eps, n)?;

    let k_cand = ((n as f64) * r1b).exp2().floor().max(1.0) as u64;
    let l_cand = ((n as f64) * r22).exp2().floor().max(1.0) as u64;

    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(seed, trial);
            let mut ctx_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 1));
            // Context (u1p, u1, v1, u2p) plus u2 from its true conditional.
            let base_ctx = ctx_inst.draw_context(&mut ctx_rng);
            let mut u2_seq = Vec::with_capacity(n);
            for &c in &base_ctx {
                // True conditional of u2 given the 4-var context cell.
                let row: Vec<f64> = {
                    let mass: f64 = ctx_inst.target
                        [c * ctx_inst.z_card..(c + 1) * ctx_inst.z_card]
                        .iter()
                        .sum();
                    ctx_inst.target[c * ctx_inst.z_card..(c + 1) * ctx_inst.z_card]
                        .iter()
                        .map(|&p| if mass > 1e-12 { p / mass } else { 1.0 / ctx_inst.z_card as f64 })
                        .collect()
                };
                u2_seq.push(draw_from(&row, &mut ctx_rng));
            }
            // 5-var context cells for the candidate conditionals.
            let ctx5: Vec<usize> = base_ctx
                .iter()
                .zip(&u2_seq)
                .map(|(&c, &u2)| c * ctx_inst.z_card + u2)
                .collect();
            let mut cand_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 2));
            let v12_cands: Vec<Vec<usize>> = (0..k_cand)
                .map(|_| {
                    ctx5.iter()
                        .map(|&c| {
                            let row =
                                &v12_inst.codegen[c * v12_inst.z_card..(c + 1) * v12_inst.z_card];
                            draw_from(row, &mut cand_rng)
                        })
                        .collect()
                })
                .collect();
            let v2_cands: Vec<Vec<usize>> = (0..l_cand)
                .map(|_| {
                    ctx5.iter()
                        .map(|&c| {
                            let row =
                                &v2_inst.codegen[c * v2_inst.z_card..(c + 1) * v2_inst.z_card];
                            draw_from(row, &mut cand_rng)
                        })
                        .collect()
                })
                .collect();
            // Decompose the context cells back into variable sequences.
            let mut seqs4: Vec<Vec<usize>> = vec![vec![0; n]; 4];
            for (t, &c) in base_ctx.iter().enumerate() {
                let mut rem = c;
                for i in (0..4).rev() {
                    seqs4[i][t] = rem % ctx_inst.ctx_cards[i];
                    rem /= ctx_inst.ctx_cards[i];
                }
            }
            for (k, v12) in v12_cands.iter().enumerate() {
                let _ = k;
                for v2 in &v2_cands {
                    let seqs: Vec<&[usize]> = vec![
                        &seqs4[0], &seqs4[1], &seqs4[2], &seqs4[3], &u2_seq, v12, v2,
                    ];
                    if typicality_test(&seqs, &target, &cfg).unwrap_or(false) {
                        return 1;
                    }
                }
            }
            0
        })
        .sum();
    Ok((successes, "materialized"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factored::Factor;

    fn pmf(vars: &[&str], cards: &[usize], probs: &[f64]) -> JointPmf {
        JointPmf::new(
            vars.iter().map(|s| s.to_string()).collect(),
            cards.to_vec(),
            probs.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn exact_type_is_typical() {
        let p = pmf(&["A"], &[2], &[0.5, 0.5]);
        let cfg = TypicalityConfig::new(0.01, 4).unwrap();
        let seq = [0usize, 1, 0, 1];
        assert!(typicality_test(&[&seq], &p, &cfg).unwrap());
    }

    #[test]
    fn constant_sequence_vs_uniform_fails() {
        let p = pmf(&["A"], &[2], &[0.5, 0.5]);
        let cfg = TypicalityConfig::new(0.1, 100).unwrap();
        let seq = vec![0usize; 100];
        assert!(!typicality_test(&[&seq], &p, &cfg).unwrap());
    }

    #[test]
    fn zero_cell_occurrence_fails() {
        let p = pmf(&["A"], &[2], &[1.0, 0.0]);
        let cfg = TypicalityConfig::new(0.5, 10).unwrap();
        let mut seq = vec![0usize; 10];
        assert!(typicality_test(&[&seq], &p, &cfg).unwrap());
        seq[3] = 1;
        assert!(!typicality_test(&[&seq], &p, &cfg).unwrap());
    }

    #[test]
    fn lln_makes_iid_draws_typical() {
        let p = pmf(&["A", "B"], &[2, 2], &[0.4, 0.1, 0.2, 0.3]);
        let cfg = TypicalityConfig::new(0.1, 2000).unwrap();
        let mut hits = 0;
        for seed in 0..500u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a = Vec::with_capacity(2000);
            let mut b = Vec::with_capacity(2000);
            for _ in 0..2000 {
                let cell = draw_from(p.probs(), &mut rng);
                a.push(cell / 2);
                b.push(cell % 2);
            }
            if typicality_test(&[&a, &b], &p, &cfg).unwrap() {
                hits += 1;
            }
        }
        assert!(hits >= 495, "typical fraction {}/500", hits);
    }

    /// Distribution with independent context: one candidate suffices.
    fn independent_fd(ch: &ChannelSpec) -> FactoredDistribution {
        let mut cards = Scheme::Theorem1.default_cards(ch);
        for v in ["U1p", "U1", "U2p", "V12", "V2", "Yh2"] {
            cards.insert(v.to_string(), 1);
        }
        cards.insert("V1".to_string(), 2);
        cards.insert("U2".to_string(), 2);
        let fds = crate::factored::sample_factored(Scheme::Theorem1, &cards, 1, 2);
        let mut fd = fds.into_iter().next().unwrap();
        // V1 uniform; U2 uniform independent of V1.
        fd.factors[2].probs = vec![0.5, 0.5];
        fd.factors[4].probs = vec![0.5, 0.5, 0.5, 0.5];
        fd
    }

    /// V1 uniform, U2 = V1 with flip probability `alpha`.
    fn correlated_fd(ch: &ChannelSpec, alpha: f64) -> FactoredDistribution {
        let mut fd = independent_fd(ch);
        fd.factors[4].probs = vec![1.0 - alpha, alpha, alpha, 1.0 - alpha];
        fd
    }

    fn test_channel() -> ChannelSpec {
        ChannelSpec::sample_random([2, 2, 2, 2, 2], 1)
    }

    #[test]
    fn single_candidate_succeeds_when_independent() {
        let ch = test_channel();
        let fd = independent_fd(&ch);
        let opts = CoveringOptions::default();
        let res =
            covering_experiment(CoveringMode::Gp, &fd, &ch, 1000, &[0.0], 200, 5, &opts).unwrap();
        assert!(res[0].threshold.abs() < 1e-9);
        assert!(res[0].success_rate >= 0.95, "rate {}", res[0].success_rate);
        assert_eq!(res[0].strategy, "materialized");
    }

    #[test]
    fn materialized_and_exact_agree_at_small_n() {
        let ch = test_channel();
        let fd = correlated_fd(&ch, 0.2);
        let trials = 400;
        let n = 40;
        let mut opts = CoveringOptions { epsilon: 0.12, ..Default::default() };
        opts.strategy = Strategy::Materialized;
        let mat = covering_experiment(CoveringMode::Gp, &fd, &ch, n, &[0.05], trials, 9, &opts)
            .unwrap();
        opts.strategy = Strategy::Exact;
        let exact = covering_experiment(CoveringMode::Gp, &fd, &ch, n, &[0.05], trials, 9, &opts)
            .unwrap();
        let d = (mat[0].success_rate - exact[0].success_rate).abs();
        // Same law, independent randomness: allow ~4 sigma of binomial noise.
        assert!(d < 0.14, "materialized {} vs exact {}", mat[0].success_rate, exact[0].success_rate);
    }

    #[test]
    fn success_monotone_in_rate() {
        let ch = test_channel();
        let fd = correlated_fd(&ch, 0.2);
        let opts = CoveringOptions { epsilon: 0.05, ..Default::default() };
        let res = covering_experiment(
            CoveringMode::Gp,
            &fd,
            &ch,
            800,
            &[-0.15, -0.05, 0.05, 0.15],
            200,
            11,
            &opts,
        )
        .unwrap();
        for w in res.windows(2) {
            assert!(
                w[0].successes <= w[1].successes,
                "successes {} > {} for offsets {} < {}",
                w[0].successes,
                w[1].successes,
                w[0].offset,
                w[1].offset
            );
        }
    }

    #[test]
    fn deterministic_codegen_exact_path() {
        // U2 is a copy of U2p: candidate draws are deterministic, so the
        // per-cell law degenerates to 0/1 probabilities and success is just
        // the context landing inside its typicality windows.
        let ch = test_channel();
        let mut cards = Scheme::Theorem1.default_cards(&ch);
        for v in ["U1p", "U1", "V12", "V2", "Yh2"] {
            cards.insert(v.to_string(), 1);
        }
        cards.insert("V1".to_string(), 2);
        cards.insert("U2p".to_string(), 2);
        cards.insert("U2".to_string(), 2);
        let mut fd = crate::factored::sample_factored(Scheme::Theorem1, &cards, 1, 4)
            .into_iter()
            .next()
            .unwrap();
        fd.factors[2].probs = vec![0.5, 0.5]; // V1 uniform
        fd.factors[3].probs = vec![0.5, 0.5]; // U2p uniform
        // (U2, V12, V2) | (U1p, U1, V1, U2p): u2 copies u2p.
        let mut probs = vec![0.0; 8];
        for v1 in 0..2usize {
            let _ = v1;
            for u2p in 0..2usize {
                probs[(v1 * 2 + u2p) * 2 + u2p] = 1.0;
            }
        }
        fd.factors[4] = Factor {
            produced: vec!["U2".into(), "V12".into(), "V2".into()],
            given: vec!["U1p".into(), "U1".into(), "V1".into(), "U2p".into()],
            produced_cards: vec![2, 1, 1],
            given_cards: vec![1, 1, 2, 2],
            probs,
        };
        let opts =
            CoveringOptions { epsilon: 0.1, strategy: Strategy::Exact, ..Default::default() };
        let res = covering_experiment(CoveringMode::Gp, &fd, &ch, 600, &[0.1], 100, 3, &opts)
            .unwrap();
        assert!(res[0].threshold.abs() < 1e-9);
        assert!(res[0].success_rate >= 0.8, "rate {}", res[0].success_rate);
    }

    #[test]
    fn success_monotone_in_blocklength_above_threshold() {
        let ch = test_channel();
        let fd = correlated_fd(&ch, 0.2);
        let opts = CoveringOptions { epsilon: 0.05, ..Default::default() };
        let rate = |n: usize| {
            covering_experiment(CoveringMode::Gp, &fd, &ch, n, &[0.15], 200, 19, &opts).unwrap()
                [0]
            .success_rate
        };
        let short = rate(400);
        let long = rate(1600);
        assert!(long >= short - 0.02, "n=1600 gives {long}, n=400 gives {short}");
    }

    #[test]
    fn determinism() {
        let ch = test_channel();
        let fd = correlated_fd(&ch, 0.2);
        let opts = CoveringOptions { epsilon: 0.05, ..Default::default() };
        let a = covering_experiment(CoveringMode::Gp, &fd, &ch, 800, &[0.15], 100, 13, &opts)
            .unwrap();
        let b = covering_experiment(CoveringMode::Gp, &fd, &ch, 800, &[0.15], 100, 13, &opts)
            .unwrap();
        assert_eq!(a[0].successes, b[0].successes);
    }

    #[test]
    fn index_space_cap_enforced() {
        let ch = test_channel();
        let fd = correlated_fd(&ch, 0.2);
        let opts = CoveringOptions { strategy: Strategy::Materialized, ..Default::default() };
        let res = covering_experiment(CoveringMode::Gp, &fd, &ch, 800, &[0.15], 10, 1, &opts);
        assert!(matches!(res, Err(Error::IndexSpaceTooLarge { .. })));
    }

    #[test]
    fn marton_null_v12_matches_relabeled_gp() {
        // Marton with V12 null covering V2 is the same covering law as GP
        // covering U2 after swapping the roles of U2 and V2.
        let ch = test_channel();
        let mut cards = Scheme::Theorem1.default_cards(&ch);
        for v in ["U1p", "U1", "U2p", "V12", "Yh2"] {
            cards.insert(v.to_string(), 1);
        }
        cards.insert("V1".to_string(), 2);
        // fd_marton: U2 null, V2 correlated with V1.
        let mut cards_m = cards.clone();
        cards_m.insert("U2".to_string(), 1);
        cards_m.insert("V2".to_string(), 2);
        let mut fd_m = crate::factored::sample_factored(Scheme::Theorem1, &cards_m, 1, 3)
            .into_iter()
            .next()
            .unwrap();
        fd_m.factors[2].probs = vec![0.5, 0.5];
        // (U2, V12, V2) | (U1p, U1, V1, U2p): rows indexed by v1.
        fd_m.factors[4] = Factor {
            produced: vec!["U2".into(), "V12".into(), "V2".into()],
            given: vec!["U1p".into(), "U1".into(), "V1".into(), "U2p".into()],
            produced_cards: vec![1, 1, 2],
            given_cards: vec![1, 1, 2, 1],
            probs: vec![0.8, 0.2, 0.2, 0.8],
        };
        // fd_gp: V2 null, U2 correlated with V1 identically.
        let fd_g = correlated_fd(&ch, 0.2);
        let opts = CoveringOptions { epsilon: 0.05, ..Default::default() };
        let m = covering_experiment(CoveringMode::Marton, &fd_m, &ch, 600, &[0.1, -0.1], 200, 17, &opts)
            .unwrap();
        let g = covering_experiment(CoveringMode::Gp, &fd_g, &ch, 600, &[0.1, -0.1], 200, 23, &opts)
            .unwrap();
        assert!((m[0].threshold - g[0].threshold).abs() < 1e-9);
        for (a, b) in m.iter().zip(&g) {
            assert!(
                (a.success_rate - b.success_rate).abs() <= 0.05,
                "marton {} vs gp {} at offset {}",
                a.success_rate,
                b.success_rate,
                a.offset
            );
        }
    }

    #[test]
    fn marton_pair_search_sum_rate_law() {
        // 2-D pair search with v2 = v1 xor v12 exactly: a pair hits iff the
        // v2 candidate matches the xor pattern pointwise, so each of the
        // 2^{n(r1b + r22)} pairs hits with probability 2^{-n} and the sum
        // rate alone controls success.
        let ch = test_channel();
        let mut cards = Scheme::Theorem1.default_cards(&ch);
        for v in ["U1p", "U1", "U2p", "U2", "Yh2"] {
            cards.insert(v.to_string(), 1);
        }
        let mut fd = crate::factored::sample_factored(Scheme::Theorem1, &cards, 1, 8)
            .into_iter()
            .next()
            .unwrap();
        fd.factors[2].probs = vec![0.5, 0.5]; // V1 uniform
        let mut probs = Vec::new();
        for v1 in 0..2usize {
            for v12 in 0..2usize {
                for v2 in 0..2usize {
                    probs.push(if v2 == v1 ^ v12 { 0.5 } else { 0.0 });
                }
            }
        }
        fd.factors[4] = Factor {
            produced: vec!["U2".into(), "V12".into(), "V2".into()],
            given: vec!["U1p".into(), "U1".into(), "V1".into(), "U2p".into()],
            produced_cards: vec![1, 2, 2],
            given_cards: vec![1, 1, 2, 1],
            probs,
        };
        let n = 16;
        let opts = CoveringOptions { epsilon: 0.8, marton_r1b: 0.5, ..Default::default() };
        // Threshold I(V1, V12; V2) is exactly 1 bit.
        let res = covering_experiment(
            CoveringMode::Marton,
            &fd,
            &ch,
            n,
            &[0.25, -0.25],
            60,
            31,
            &opts,
        )
        .unwrap();
        assert!((res[0].threshold - 1.0).abs() < 1e-9);
        assert_eq!(res[0].strategy, "materialized");
        // Expected hits: 2^{n(1+0.25) - n} = 16 above, 2^{-4} below.
        assert!(res[0].success_rate >= 0.8, "above-threshold rate {}", res[0].success_rate);
        assert!(res[1].success_rate <= 0.35, "below-threshold rate {}", res[1].success_rate);
    }
}
