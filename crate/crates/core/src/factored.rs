//! Factored auxiliary-variable distributions that parameterize each region.
//!
//! A [`FactoredDistribution`] is an ordered list of conditional pmf tensors
//! whose signature must match its scheme exactly. Assembly multiplies the
//! factors with the channel law into a full [`JointPmf`] over the scheme's
//! variable set.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::pmf::{JointPmf, TOL_PMF};

/// Factorization schemes supported by the region modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Full superposition structure with a quantized second output.
    Theorem1,
    /// A bare input joint `p(x1, x2, x3)`.
    Corollary1,
    /// The decode-and-forward + binning structure over `(X3, U1, X1, U2, V2)`.
    Rsub,
    /// Composite-variable structure over `(T', V, S', W, U)` where the
    /// composites carry deterministic projections onto `X3` and `X1`.
    Chu,
    /// Relay-broadcast structure over `(U2p, U2, V12, V2, X2)` with sender 1
    /// silenced.
    Pcrbc,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Theorem1 => "theorem1",
            Scheme::Corollary1 => "corollary1",
            Scheme::Rsub => "rsub",
            Scheme::Chu => "chu",
            Scheme::Pcrbc => "pcrbc",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "theorem1" => Ok(Scheme::Theorem1),
            "corollary1" => Ok(Scheme::Corollary1),
            "rsub" => Ok(Scheme::Rsub),
            "chu" => Ok(Scheme::Chu),
            "pcrbc" => Ok(Scheme::Pcrbc),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }

    /// All joint variables in canonical order (channel outputs included).
    pub fn vars(self) -> &'static [&'static str] {
        match self {
            Scheme::Theorem1 => &[
                "U1p", "U1", "V1", "U2p", "U2", "V12", "V2", "X1", "X2", "X3", "Y1", "Y2", "Yh2",
            ],
            Scheme::Corollary1 => &["X1", "X2", "X3", "Y1", "Y2"],
            Scheme::Rsub => &["X3", "U1", "X1", "U2", "V2", "X2", "Y1", "Y2"],
            Scheme::Chu => &["Tp", "V", "Sp", "W", "U", "X2", "X1", "X3", "Y1", "Y2"],
            Scheme::Pcrbc => &["U2p", "U2", "V12", "V2", "X2", "X3", "X1", "Y1", "Y2", "Yh2"],
        }
    }

    /// Factor signature: `(produced, given)` name lists, in generative order.
    /// The channel `p(y1, y2 | x1, x2, x3)` is implicit and not listed.
    pub fn signature(self) -> Vec<(Vec<&'static str>, Vec<&'static str>)> {
        match self {
            Scheme::Theorem1 => vec![
                (vec!["U1p"], vec![]),
                (vec!["U1"], vec!["U1p"]),
                (vec!["V1"], vec!["U1p", "U1"]),
                (vec!["U2p"], vec!["U1p"]),
                (vec!["U2", "V12", "V2"], vec!["U1p", "U1", "V1", "U2p"]),
                (vec!["X1"], vec!["U1p", "U1", "V1"]),
                (vec!["X2"], vec!["U1p", "U1", "V1", "U2p", "U2", "V12", "V2"]),
                (vec!["X3"], vec!["U1p", "U2p"]),
                (vec!["Yh2"], vec!["U1p", "U1", "U2p", "U2", "X3", "Y2"]),
            ],
            Scheme::Corollary1 => vec![(vec!["X1", "X2", "X3"], vec![])],
            Scheme::Rsub => vec![
                (vec!["X3"], vec![]),
                (vec!["U1"], vec!["X3"]),
                (vec!["X1"], vec!["X3", "U1"]),
                (vec!["U2"], vec!["X3", "U1", "X1"]),
                (vec!["V2"], vec!["X3", "U1", "X1"]),
                (vec!["X2"], vec!["X3", "U1", "X1", "U2", "V2"]),
            ],
            Scheme::Chu => vec![
                (vec!["Tp"], vec![]),
                (vec!["V"], vec!["Tp"]),
                (vec!["Sp"], vec!["V", "Tp"]),
                (vec!["W"], vec!["Sp", "V", "Tp"]),
                (vec!["U"], vec!["Sp", "V", "Tp"]),
                (vec!["X2"], vec!["U", "W", "Sp", "V", "Tp"]),
                // Deterministic projections of the composite variables.
                (vec!["X1"], vec!["Sp"]),
                (vec!["X3"], vec!["Tp"]),
            ],
            Scheme::Pcrbc => vec![
                (vec!["U2p", "U2", "V12", "V2", "X2"], vec![]),
                (vec!["X3"], vec!["U2p"]),
                (vec!["Yh2"], vec!["U2p", "U2", "X3", "Y2"]),
            ],
        }
    }

    /// Auxiliary variables the sampler must assign cardinalities to
    /// (everything that is neither a channel input nor output).
    pub fn aux_vars(self) -> Vec<&'static str> {
        self.vars()
            .iter()
            .copied()
            .filter(|v| !matches!(*v, "X1" | "X2" | "X3" | "Y1" | "Y2"))
            .collect()
    }

    /// Default cardinalities: binary auxiliaries, channel alphabets from `ch`.
    pub fn default_cards(self, ch: &ChannelSpec) -> BTreeMap<String, usize> {
        let mut cards = BTreeMap::new();
        for v in self.aux_vars() {
            cards.insert(v.to_string(), 2);
        }
        cards.insert("X1".into(), ch.card_x1);
        cards.insert("X2".into(), ch.card_x2);
        cards.insert("X3".into(), ch.card_x3);
        cards.insert("Y1".into(), ch.card_y1);
        cards.insert("Y2".into(), ch.card_y2);
        cards
    }
}

/// One conditional pmf tensor `p(produced | given)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Factor {
    pub produced: Vec<String>,
    pub given: Vec<String>,
    pub produced_cards: Vec<usize>,
    pub given_cards: Vec<usize>,
    /// Row-major `(given..., produced...)`; each row sums to 1.
    pub probs: Vec<f64>,
}

impl Factor {
    pub fn rows(&self) -> usize {
        self.given_cards.iter().product::<usize>().max(1)
    }

    pub fn cols(&self) -> usize {
        self.produced_cards.iter().product::<usize>().max(1)
    }

    #[inline]
    pub fn value(&self, given_syms: &[usize], produced_syms: &[usize]) -> f64 {
        let mut r = 0usize;
        for (s, c) in given_syms.iter().zip(&self.given_cards) {
            r = r * c + s;
        }
        let mut p = 0usize;
        for (s, c) in produced_syms.iter().zip(&self.produced_cards) {
            p = p * c + s;
        }
        self.probs[r * self.cols() + p]
    }

    /// Builds a factor by evaluating `f(given_syms, produced_syms)` and
    /// validating row stochasticity.
    pub fn from_fn<F>(
        produced: Vec<String>,
        given: Vec<String>,
        produced_cards: Vec<usize>,
        given_cards: Vec<usize>,
        mut f: F,
    ) -> Result<Factor>
    where
        F: FnMut(&[usize], &[usize]) -> f64,
    {
        let rows: usize = given_cards.iter().product::<usize>().max(1);
        let cols: usize = produced_cards.iter().product::<usize>().max(1);
        let mut probs = vec![0.0; rows * cols];
        let mut gsyms = vec![0usize; given_cards.len()];
        let mut psyms = vec![0usize; produced_cards.len()];
        for r in 0..rows {
            decode(r, &given_cards, &mut gsyms);
            for c in 0..cols {
                decode(c, &produced_cards, &mut psyms);
                probs[r * cols + c] = f(&gsyms, &psyms);
            }
        }
        let factor = Factor { produced, given, produced_cards, given_cards, probs };
        factor.check_stochastic()?;
        Ok(factor)
    }

    fn check_stochastic(&self) -> Result<()> {
        let cols = self.cols();
        for (i, &p) in self.probs.iter().enumerate() {
            if p < 0.0 || p > 1.0 + TOL_PMF {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        for r in 0..self.rows() {
            let sum: f64 = self.probs[r * cols..(r + 1) * cols].iter().sum();
            if (sum - 1.0).abs() > TOL_PMF {
                return Err(Error::RowSumMismatch { x1: r, x2: 0, x3: 0, sum });
            }
        }
        Ok(())
    }

    fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|&p| p < TOL_PMF || (p - 1.0).abs() < TOL_PMF)
    }
}

fn decode(mut flat: usize, cards: &[usize], out: &mut [usize]) {
    for i in (0..cards.len()).rev() {
        out[i] = flat % cards[i];
        flat /= cards[i];
    }
}

/// A scheme instance: cardinalities plus the ordered factor list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactoredDistribution {
    pub scheme: Scheme,
    pub cards: BTreeMap<String, usize>,
    pub factors: Vec<Factor>,
}

impl FactoredDistribution {
    pub fn new(
        scheme: Scheme,
        cards: BTreeMap<String, usize>,
        factors: Vec<Factor>,
    ) -> Result<Self> {
        let signature = scheme.signature();
        for v in scheme.vars() {
            if !cards.contains_key(*v) {
                return Err(Error::UnknownVariable((*v).to_string()));
            }
        }
        if factors.len() != signature.len() {
            return Err(Error::InvalidInput(format!(
                "scheme {} expects {} factors, got {}",
                scheme.name(),
                signature.len(),
                factors.len()
            )));
        }
        for (i, (factor, (produced, given))) in factors.iter().zip(&signature).enumerate() {
            let p_ok = factor.produced.iter().map(String::as_str).eq(produced.iter().copied());
            let g_ok = factor.given.iter().map(String::as_str).eq(given.iter().copied());
            if !p_ok || !g_ok {
                return Err(Error::SignatureMismatch {
                    index: i,
                    produced: factor.produced.clone(),
                    given: factor.given.clone(),
                    expected_produced: produced.iter().map(|s| s.to_string()).collect(),
                    expected_given: given.iter().map(|s| s.to_string()).collect(),
                });
            }
            for (v, &c) in factor.produced.iter().zip(&factor.produced_cards) {
                if cards[v] != c {
                    return Err(Error::CardinalityMismatch { var: v.clone(), expected: cards[v], got: c });
                }
            }
            for (v, &c) in factor.given.iter().zip(&factor.given_cards) {
                if cards[v] != c {
                    return Err(Error::CardinalityMismatch { var: v.clone(), expected: cards[v], got: c });
                }
            }
            factor.check_stochastic()?;
        }
        if scheme == Scheme::Chu {
            // The composite projections must be deterministic for the
            // composite channel reading to make sense.
            for factor in &factors {
                if (factor.produced == ["X1"] || factor.produced == ["X3"])
                    && !factor.is_deterministic()
                {
                    return Err(Error::InvalidInput(
                        "chu projection factors must be deterministic".into(),
                    ));
                }
            }
        }
        Ok(Self { scheme, cards, factors })
    }

    pub fn card(&self, var: &str) -> usize {
        self.cards[var]
    }

    /// Multiplies the factors and the channel law into the full joint.
    pub fn assemble_joint(&self, ch: &ChannelSpec) -> Result<JointPmf> {
        for (var, want) in [
            ("X1", ch.card_x1),
            ("X2", ch.card_x2),
            ("X3", ch.card_x3),
            ("Y1", ch.card_y1),
            ("Y2", ch.card_y2),
        ] {
            if self.cards[var] != want {
                return Err(Error::CardinalityMismatch {
                    var: var.to_string(),
                    expected: want,
                    got: self.cards[var],
                });
            }
        }
        let vars: Vec<String> = self.scheme.vars().iter().map(|s| s.to_string()).collect();
        let cards: Vec<usize> = vars.iter().map(|v| self.cards[v]).collect();
        let pos: BTreeMap<&str, usize> =
            vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let total: usize = cards.iter().product();

        // Pre-resolve factor variable positions.
        let resolved: Vec<(Vec<usize>, Vec<usize>)> = self
            .factors
            .iter()
            .map(|f| {
                (
                    f.given.iter().map(|v| pos[v.as_str()]).collect(),
                    f.produced.iter().map(|v| pos[v.as_str()]).collect(),
                )
            })
            .collect();
        let x1 = pos["X1"];
        let x2 = pos["X2"];
        let x3 = pos["X3"];
        let y1 = pos["Y1"];
        let y2 = pos["Y2"];

        let mut probs = vec![0.0; total];
        let mut syms = vec![0usize; vars.len()];
        let mut gbuf = vec![0usize; 8];
        let mut pbuf = vec![0usize; 8];
        for (flat, slot) in probs.iter_mut().enumerate() {
            decode(flat, &cards, &mut syms);
            let mut p = ch.w(syms[x1], syms[x2], syms[x3], syms[y1], syms[y2]);
            if p == 0.0 {
                continue;
            }
            for (factor, (gpos, ppos)) in self.factors.iter().zip(&resolved) {
                gbuf.resize(gpos.len(), 0);
                pbuf.resize(ppos.len(), 0);
                for (b, &i) in gbuf.iter_mut().zip(gpos.iter()) {
                    *b = syms[i];
                }
                for (b, &i) in pbuf.iter_mut().zip(ppos.iter()) {
                    *b = syms[i];
                }
                p *= factor.value(&gbuf, &pbuf);
                if p == 0.0 {
                    break;
                }
            }
            *slot = p;
        }
        JointPmf::new(vars, cards, probs)
    }
}

/// Residuals of the conditional-independence structure a scheme implies.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    pub scheme: Scheme,
    /// `(label, residual_bits)` per generative step.
    pub residuals: Vec<(String, f64)>,
    pub pass: bool,
}

/// Threshold below which a conditional-independence residual passes.
pub const FACTORIZATION_TOL: f64 = 1e-8;

/// Checks every conditional independence implied by the scheme's generative
/// order: each step's produced variables must be independent of all earlier
/// variables outside its conditioning set, given the conditioning set.
pub fn verify_factorization(p: &JointPmf, scheme: Scheme) -> Result<FactorizationReport> {
    let signature = scheme.signature();
    for v in scheme.vars() {
        if !p.vars().iter().any(|x| x == v) {
            return Err(Error::UnknownVariable((*v).to_string()));
        }
    }
    let outputs = ["Y1", "Y2"];
    let mut events: Vec<(Vec<&str>, Vec<&str>)> = Vec::new();
    let mut post_channel: Vec<(Vec<&str>, Vec<&str>)> = Vec::new();
    for (produced, given) in &signature {
        let needs_output = given.iter().any(|g| outputs.contains(g));
        if needs_output {
            post_channel.push((produced.clone(), given.clone()));
        } else {
            events.push((produced.clone(), given.clone()));
        }
    }
    events.push((vec!["Y1", "Y2"], vec!["X1", "X2", "X3"]));
    events.extend(post_channel);

    let mut produced_so_far: Vec<&str> = Vec::new();
    let mut residuals = Vec::new();
    for (produced, given) in &events {
        let rest: Vec<&str> = produced_so_far
            .iter()
            .copied()
            .filter(|v| !given.contains(v) && !produced.contains(v))
            .collect();
        if !rest.is_empty() {
            let r = p.cond_mutual_info(produced, &rest, given)?;
            let label = format!(
                "{} _||_ {} | {}",
                produced.join(","),
                rest.join(","),
                if given.is_empty() { "-".to_string() } else { given.join(",") }
            );
            residuals.push((label, r));
        }
        produced_so_far.extend(produced.iter().copied());
    }
    let pass = residuals.iter().all(|(_, r)| *r < FACTORIZATION_TOL);
    Ok(FactorizationReport { scheme, residuals, pass })
}

/// Deterministic per-index seed derivation (splitmix-style).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn dirichlet_row(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..n).map(|_| -f64::ln(rng.gen::<f64>())).collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= s);
    row
}

fn build_factor(
    scheme: Scheme,
    cards: &BTreeMap<String, usize>,
    produced: &[&str],
    given: &[&str],
    kind: SampleKind,
    rng: &mut impl Rng,
) -> Factor {
    let produced_cards: Vec<usize> = produced.iter().map(|v| cards[*v]).collect();
    let given_cards: Vec<usize> = given.iter().map(|v| cards[*v]).collect();
    let cols: usize = produced_cards.iter().product::<usize>().max(1);
    let rows: usize = given_cards.iter().product::<usize>().max(1);

    // Chu's composite projections are always the quotient maps.
    if scheme == Scheme::Chu && (produced == ["X1"] || produced == ["X3"]) {
        return Factor::from_fn(
            produced.iter().map(|s| s.to_string()).collect(),
            given.iter().map(|s| s.to_string()).collect(),
            produced_cards.clone(),
            given_cards.clone(),
            |g, p| if p[0] == g[0] % produced_cards[0] { 1.0 } else { 0.0 },
        )
        .expect("quotient map is deterministic");
    }

    let probs = match kind {
        SampleKind::Uniform => vec![1.0 / cols as f64; rows * cols],
        SampleKind::Identity => {
            let mut probs = vec![0.0; rows * cols];
            let mut gsyms = vec![0usize; given_cards.len()];
            let mut psyms = vec![0usize; produced_cards.len()];
            for r in 0..rows {
                decode(r, &given_cards, &mut gsyms);
                let src = gsyms.first().copied().unwrap_or(0);
                for (i, c) in produced_cards.iter().enumerate() {
                    psyms[i] = src % c;
                }
                let mut cidx = 0usize;
                for (s, c) in psyms.iter().zip(&produced_cards) {
                    cidx = cidx * c + s;
                }
                probs[r * cols + cidx] = 1.0;
            }
            probs
        }
        SampleKind::Random => {
            let mut probs = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                probs.extend(dirichlet_row(rng, cols));
            }
            probs
        }
    };
    Factor {
        produced: produced.iter().map(|s| s.to_string()).collect(),
        given: given.iter().map(|s| s.to_string()).collect(),
        produced_cards,
        given_cards,
        probs,
    }
}

#[derive(Clone, Copy)]
enum SampleKind {
    Uniform,
    Identity,
    Random,
}

/// Draws `count` scheme instances. Deterministic in `(seed, index)`; indices
/// 0 and 1 are the all-uniform and all-deterministic-identity specials when
/// `count >= 3`.
pub fn sample_factored(
    scheme: Scheme,
    cards: &BTreeMap<String, usize>,
    count: usize,
    seed: u64,
) -> Vec<FactoredDistribution> {
    (0..count)
        .map(|index| {
            let kind = if count >= 3 && index == 0 {
                SampleKind::Uniform
            } else if count >= 3 && index == 1 {
                SampleKind::Identity
            } else {
                SampleKind::Random
            };
            let mut rng =
                rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64));
            let factors = scheme
                .signature()
                .into_iter()
                .map(|(produced, given)| {
                    build_factor(scheme, cards, &produced, &given, kind, &mut rng)
                })
                .collect();
            FactoredDistribution::new(scheme, cards.clone(), factors)
                .expect("sampled factors match the signature")
        })
        .collect()
}
