//! Per-mode rate-inequality systems and their projection onto the
//! `(R1, R2)` plane.
//!
//! The `theorem1` mode states the main region directly: split-rate and
//! binning-rate constraints whose constants are the [`InfoTermSet`] terms,
//! plus the four documented drop-rule variants, each intersected with its
//! literal zero side conditions. The `pre_elim` mode states the underlying
//! encoder/decoder constraint system with the quantization rate still
//! present; eliminating that rate must reproduce the stated region, which the
//! path-equivalence check verifies numerically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fme::{InequalitySystem, Sense};
use crate::geometry::{union_hull, RatePolytope};
use crate::pmf::JointPmf;
use crate::terms::{compute_info_terms, InfoTermSet};

/// Region construction modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Theorem1,
    PreElim,
    Outer,
    Corollary1,
    Rsub,
    RsubRewritten,
    Chu,
    Pcrbc,
    Bross,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Theorem1 => "theorem1",
            Mode::PreElim => "pre_elim",
            Mode::Outer => "outer",
            Mode::Corollary1 => "corollary1",
            Mode::Rsub => "rsub",
            Mode::RsubRewritten => "rsub_rewritten",
            Mode::Chu => "chu",
            Mode::Pcrbc => "pcrbc",
            Mode::Bross => "bross",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.replace('-', "_").as_str() {
            "theorem1" => Ok(Mode::Theorem1),
            "pre_elim" => Ok(Mode::PreElim),
            "outer" => Ok(Mode::Outer),
            "corollary1" => Ok(Mode::Corollary1),
            "rsub" => Ok(Mode::Rsub),
            "rsub_rewritten" => Ok(Mode::RsubRewritten),
            "chu" => Ok(Mode::Chu),
            "pcrbc" => Ok(Mode::Pcrbc),
            "bross" => Ok(Mode::Bross),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }

    /// The factorization scheme whose joints this mode consumes.
    pub fn scheme(self) -> crate::factored::Scheme {
        use crate::factored::Scheme;
        match self {
            Mode::Theorem1 | Mode::PreElim => Scheme::Theorem1,
            Mode::Outer | Mode::Corollary1 => Scheme::Corollary1,
            Mode::Rsub | Mode::RsubRewritten => Scheme::Rsub,
            Mode::Chu => Scheme::Chu,
            Mode::Pcrbc | Mode::Bross => Scheme::Pcrbc,
        }
    }

    /// Default definitions of the rate pair in terms of the mode's variables.
    pub fn rate_defs(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Mode::Theorem1 | Mode::PreElim => (&["R11", "R1P", "R1B"], &["R22", "R2P"]),
            Mode::Outer | Mode::Corollary1 => (&["R1"], &["R2"]),
            Mode::Rsub | Mode::RsubRewritten => (&["R1P", "R11"], &["R2P", "R22"]),
            Mode::Chu => (&["R1R", "R11"], &["R2P", "R22"]),
            Mode::Pcrbc | Mode::Bross => (&["R1B"], &["R2P", "R22"]),
        }
    }
}

/// Knobs for the theorem1/pre_elim builders.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegionOptions {
    /// Keep the relay's codebook-size exponent distinct from the quantization
    /// rate (coupled by `Rbar >= Rhat`) instead of merging them.
    pub separate_x3_rate: bool,
}

/// One system of the (possibly multi-system) region description.
#[derive(Debug, Clone)]
pub struct LabeledSystem {
    pub label: String,
    pub system: InequalitySystem,
}

fn sys_with(vars: &[&str]) -> InequalitySystem {
    InequalitySystem::new(vars.iter().map(|s| s.to_string()).collect())
}

const THEOREM1_VARS: [&str; 8] = ["R11", "R1P", "R1B", "R22", "R2P", "Rp1B", "Rp2P", "Rp22"];

/// The stated main region: base system plus the four drop-rule variants.
pub fn theorem1_systems(t: &InfoTermSet) -> Vec<LabeledSystem> {
    let base_rows: Vec<(&str, Vec<(&str, f64)>, Sense, f64)> = vec![
        ("bin_gp", vec![("Rp2P", 1.0)], Sense::Ge, t.a),
        ("bin_pair_single", vec![("Rp22", 1.0)], Sense::Ge, t.bin_pair_single),
        ("bin_pair_sum", vec![("Rp1B", 1.0), ("Rp22", 1.0)], Sense::Ge, t.bin_pair_sum),
        (
            "dec1_full_stack",
            vec![("R1P", 1.0), ("R11", 1.0), ("R2P", 1.0), ("Rp2P", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)],
            Sense::Le,
            t.a + t.b + t.d - t.c,
        ),
        (
            "dec1_no_r1p",
            vec![("R11", 1.0), ("R2P", 1.0), ("Rp2P", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)],
            Sense::Le,
            t.a + t.b + t.e - t.c,
        ),
        (
            "dec1_pub_bcast",
            vec![("R2P", 1.0), ("Rp2P", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)],
            Sense::Le,
            t.a + t.b + t.h - t.c,
        ),
        ("dec1_priv_a", vec![("R11", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.a + t.b + t.f - t.c),
        ("dec1_priv_b", vec![("R11", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.a + t.g),
        ("dec1_bcast_a", vec![("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.j),
        ("dec1_bcast_b", vec![("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.b + t.i - t.c),
        (
            "dec2_full_stack",
            vec![("R1P", 1.0), ("R2P", 1.0), ("Rp2P", 1.0), ("R22", 1.0), ("Rp22", 1.0)],
            Sense::Le,
            t.k,
        ),
        ("dec2_no_r1p", vec![("R2P", 1.0), ("Rp2P", 1.0), ("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.l),
        ("dec2_priv", vec![("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.m),
    ];
    let drops: [(&str, &str, &[&str]); 4] = [
        ("drop_e1", "dec1_full_stack", &["R1P", "R11", "R1B", "Rp1B"]),
        ("drop_e2", "dec1_no_r1p", &["R11", "R1B", "Rp1B"]),
        ("drop_e3", "dec1_pub_bcast", &["R1B", "Rp1B"]),
        ("drop_f1", "dec2_full_stack", &["R2P", "Rp2P", "R22", "Rp22"]),
    ];
    assemble_variants(&THEOREM1_VARS, &base_rows, &drops, |sys| {
        sys.push_feasibility("quantization_feasibility", t.c, t.n_term + t.b);
    })
}

/// The encoder/decoder constraint system before the quantization rate is
/// eliminated, with the same drop-rule variants applied to its rows.
pub fn pre_elim_systems(t: &InfoTermSet, opts: &RegionOptions) -> Vec<LabeledSystem> {
    let mut vars: Vec<&str> = THEOREM1_VARS.to_vec();
    vars.push("Rhat");
    if opts.separate_x3_rate {
        vars.push("Rbar");
    }
    // The decoder-side rate is the codebook exponent when the two are kept
    // distinct; the quantization covering condition always binds Rhat.
    let rh: &str = if opts.separate_x3_rate { "Rbar" } else { "Rhat" };
    let mut base_rows: Vec<(&str, Vec<(&str, f64)>, Sense, f64)> = vec![
        ("quant_cover", vec![("Rhat", 1.0)], Sense::Ge, t.c),
        ("bin_gp", vec![("Rp2P", 1.0)], Sense::Ge, t.a),
        ("bin_pair_single", vec![("Rp22", 1.0)], Sense::Ge, t.bin_pair_single),
        ("bin_pair_sum", vec![("Rp1B", 1.0), ("Rp22", 1.0)], Sense::Ge, t.bin_pair_sum),
        (
            "dec1_full_stack",
            vec![
                ("R1P", 1.0),
                ("R11", 1.0),
                ("R2P", 1.0),
                ("Rp2P", 1.0),
                (rh, 1.0),
                ("R1B", 1.0),
                ("Rp1B", 1.0),
            ],
            Sense::Le,
            t.a + t.b + t.d,
        ),
        (
            "dec1_no_r1p",
            vec![("R11", 1.0), ("R2P", 1.0), ("Rp2P", 1.0), (rh, 1.0), ("R1B", 1.0), ("Rp1B", 1.0)],
            Sense::Le,
            t.a + t.b + t.e,
        ),
        ("dec1_priv_quant", vec![("R11", 1.0), (rh, 1.0), ("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.a + t.b + t.f),
        ("dec1_priv", vec![("R11", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.a + t.g),
        (
            "dec1_pub_bcast",
            vec![("R2P", 1.0), ("Rp2P", 1.0), (rh, 1.0), ("R1B", 1.0), ("Rp1B", 1.0)],
            Sense::Le,
            t.a + t.b + t.h,
        ),
        ("dec1_quant_bcast", vec![(rh, 1.0), ("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.b + t.i),
        ("dec1_quant", vec![(rh, 1.0)], Sense::Le, t.n_term + t.b),
        ("dec1_bcast", vec![("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.j),
        (
            "dec2_full_stack",
            vec![("R1P", 1.0), ("R2P", 1.0), ("Rp2P", 1.0), ("R22", 1.0), ("Rp22", 1.0)],
            Sense::Le,
            t.k,
        ),
        ("dec2_no_r1p", vec![("R2P", 1.0), ("Rp2P", 1.0), ("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.l),
        ("dec2_priv", vec![("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.m),
    ];
    if opts.separate_x3_rate {
        // The relay codebook must index every retained quantization label.
        base_rows.push(("x3_codebook", vec![("Rbar", 1.0), ("Rhat", -1.0)], Sense::Ge, 0.0));
    }
    let drops: [(&str, &str, &[&str]); 4] = [
        ("drop_e1", "dec1_full_stack", &["R1P", "R11", "R1B", "Rp1B"]),
        ("drop_e2", "dec1_no_r1p", &["R11", "R1B", "Rp1B"]),
        ("drop_e3", "dec1_pub_bcast", &["R1B", "Rp1B"]),
        ("drop_f1", "dec2_full_stack", &["R2P", "Rp2P", "R22", "Rp22"]),
    ];
    assemble_variants(&vars, &base_rows, &drops, |_| {})
}

fn assemble_variants(
    vars: &[&str],
    base_rows: &[(&str, Vec<(&str, f64)>, Sense, f64)],
    drops: &[(&str, &str, &[&str])],
    finish: impl Fn(&mut InequalitySystem),
) -> Vec<LabeledSystem> {
    let build = |skip: Option<&str>, pins: &[&str]| -> InequalitySystem {
        let mut sys = sys_with(vars);
        for (label, terms, sense, rhs) in base_rows {
            if Some(*label) == skip {
                continue;
            }
            sys.push_row(terms, *sense, *rhs).expect("vars declared");
        }
        for pin in pins {
            sys.pin_zero(pin).expect("vars declared");
        }
        finish(&mut sys);
        sys
    };
    let mut out = vec![LabeledSystem { label: "base".to_string(), system: build(None, &[]) }];
    for (name, skip, pins) in drops {
        out.push(LabeledSystem { label: name.to_string(), system: build(Some(skip), pins) });
    }
    out
}

fn cmi(p: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    p.cond_mutual_info(a, b, c)
}

fn outer_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let ia = cmi(p, &["Y1"], &["X1", "X2", "X3"], &[])?;
    let ib = cmi(p, &["Y2"], &["X2"], &["X1", "X3"])?;
    let ic = cmi(p, &["Y1", "Y2"], &["X1", "X2"], &["X3"])?;
    let mut sys = sys_with(&["R1", "R2"]);
    sys.push_row(&[("R1", 1.0)], Sense::Le, ia)?;
    sys.push_row(&[("R2", 1.0)], Sense::Le, ib)?;
    sys.push_row(&[("R1", 1.0), ("R2", 1.0)], Sense::Le, ic)?;
    Ok(vec![LabeledSystem { label: "base".into(), system: sys }])
}

fn corollary1_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let ia = cmi(p, &["Y1"], &["X1", "X3"], &[])?;
    let ib = cmi(p, &["Y2"], &["X2"], &["X1", "X3"])?;
    let ic = cmi(p, &["Y2"], &["X1", "X2"], &["X3"])?;
    let mut sys = sys_with(&["R1", "R2"]);
    sys.push_row(&[("R1", 1.0)], Sense::Le, ia)?;
    sys.push_row(&[("R2", 1.0)], Sense::Le, ib)?;
    sys.push_row(&[("R1", 1.0), ("R2", 1.0)], Sense::Le, ic)?;
    Ok(vec![LabeledSystem { label: "base".into(), system: sys }])
}

fn rsub_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let va = cmi(p, &["Y1"], &["X3", "U1", "X1", "U2"], &[])?;
    let vb = cmi(p, &["Y1"], &["X1", "U2"], &["X3", "U1"])?;
    let vc = cmi(p, &["Y1"], &["U2"], &["X3", "U1", "X1"])?;
    let vd = cmi(p, &["Y1", "U2"], &["X1"], &["X3", "U1"])?;
    let ve = cmi(p, &["Y2"], &["U1", "U2", "V2"], &["X3"])?
        - cmi(p, &["X1"], &["U2", "V2"], &["X3", "U1"])?;
    let vf = cmi(p, &["Y2"], &["U2", "V2"], &["X3", "U1"])?
        - cmi(p, &["X1"], &["U2", "V2"], &["X3", "U1"])?;
    let vg = cmi(p, &["Y2"], &["V2"], &["X3", "U1", "U2"])?
        - cmi(p, &["X1"], &["V2"], &["X3", "U1", "U2"])?;
    rsub_shaped(va, vb, vc, vd, ve, vf, vg)
}

fn rsub_rewritten_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let wa = cmi(p, &["Y1"], &["X3", "U1", "X1", "U2"], &[])?;
    let wb = cmi(p, &["Y1", "U2"], &["X1"], &["X3", "U1"])? + cmi(p, &["Y1"], &["U2"], &["X3"])?
        - cmi(p, &["U1", "X1"], &["U2"], &["X3"])?
        + cmi(p, &["U1"], &["U2"], &["X3", "Y1"])?;
    let wc = cmi(p, &["Y1", "U1", "X1"], &["U2"], &["X3"])?
        - cmi(p, &["U1", "X1"], &["U2"], &["X3"])?;
    let wd = cmi(p, &["Y1", "U2"], &["X1"], &["X3", "U1"])?;
    let we = cmi(p, &["Y2"], &["U1", "U2", "V2"], &["X3"])? + cmi(p, &["U2"], &["V2"], &["X3"])?
        + cmi(p, &["U1"], &["U2", "V2"], &["X3"])?
        - cmi(p, &["U1", "X1"], &["V2"], &["X3"])?
        - cmi(p, &["U1", "X1"], &["U2"], &["X3"])?;
    let wf = cmi(p, &["Y2"], &["U2", "V2"], &["X3", "U1"])?
        - cmi(p, &["X1"], &["U2"], &["X3", "U1"])?
        - cmi(p, &["X1"], &["V2"], &["X3", "U1"])?
        + cmi(p, &["U2"], &["V2"], &["X3", "U1"])?;
    let wg = cmi(p, &["Y2", "U1", "U2"], &["V2"], &["X3"])?
        - cmi(p, &["U1", "X1"], &["V2"], &["X3"])?;
    rsub_shaped(wa, wb, wc, wd, we, wf, wg)
}

fn rsub_shaped(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    f: f64,
    g: f64,
) -> Result<Vec<LabeledSystem>> {
    let mut sys = sys_with(&["R1P", "R11", "R2P", "R22"]);
    sys.push_row(&[("R1P", 1.0), ("R11", 1.0), ("R2P", 1.0)], Sense::Le, a)?;
    sys.push_row(&[("R11", 1.0), ("R2P", 1.0)], Sense::Le, b)?;
    sys.push_row(&[("R2P", 1.0)], Sense::Le, c)?;
    sys.push_row(&[("R11", 1.0)], Sense::Le, d)?;
    sys.push_row(&[("R1P", 1.0), ("R2P", 1.0), ("R22", 1.0)], Sense::Le, e)?;
    sys.push_row(&[("R2P", 1.0), ("R22", 1.0)], Sense::Le, f)?;
    sys.push_row(&[("R22", 1.0)], Sense::Le, g)?;
    Ok(vec![LabeledSystem { label: "base".into(), system: sys }])
}

fn chu_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let i_vsp_w = cmi(p, &["V", "Sp"], &["W"], &["Tp"])?;
    let i_vsp_u = cmi(p, &["V", "Sp"], &["U"], &["Tp"])?;
    let ca = cmi(p, &["Tp", "W", "V", "Sp"], &["Y1"], &[])?;
    let cb =
        cmi(p, &["Sp"], &["W", "Y1"], &["V", "Tp"])? + cmi(p, &["W"], &["Y1"], &["Tp"])? - i_vsp_w;
    let cc = cmi(p, &["Sp"], &["W", "Y1"], &["V", "Tp"])?;
    let cd = cmi(p, &["W"], &["Y1"], &["Tp"])? - i_vsp_w;
    let ce = cmi(p, &["V", "U", "W"], &["Y2"], &["Tp"])? + cmi(p, &["V"], &["U", "W"], &["Tp"])?
        + cmi(p, &["W"], &["U"], &["Tp"])?
        - i_vsp_u
        - i_vsp_w;
    let cf = cmi(p, &["V", "U"], &["W", "Y2"], &["Tp"])? + cmi(p, &["U"], &["V"], &["Tp"])? - i_vsp_u;
    let cg = cmi(p, &["V", "W"], &["U", "Y2"], &["Tp"])? + cmi(p, &["W"], &["V"], &["Tp"])? - i_vsp_w;
    let ch_ = cmi(p, &["U", "W"], &["V", "Y2"], &["Tp"])? + cmi(p, &["U"], &["W"], &["Tp"])?
        - i_vsp_u
        - i_vsp_w;
    let ci = cmi(p, &["V"], &["U", "W", "Y2"], &["Tp"])?;
    let cj = cmi(p, &["U"], &["V", "W", "Y2"], &["Tp"])? - i_vsp_u;
    let ck = cmi(p, &["W"], &["V", "U", "Y2"], &["Tp"])? - i_vsp_w;

    let mut sys = sys_with(&["R1R", "R11", "R2P", "R22"]);
    sys.push_row(&[("R1R", 1.0), ("R11", 1.0), ("R2P", 1.0)], Sense::Le, ca)?;
    sys.push_row(&[("R11", 1.0), ("R2P", 1.0)], Sense::Le, cb)?;
    sys.push_row(&[("R11", 1.0)], Sense::Le, cc)?;
    sys.push_row(&[("R2P", 1.0)], Sense::Le, cd)?;
    sys.push_row(&[("R1R", 1.0), ("R22", 1.0), ("R2P", 1.0)], Sense::Le, ce)?;
    sys.push_row(&[("R1R", 1.0), ("R22", 1.0)], Sense::Le, cf)?;
    sys.push_row(&[("R1R", 1.0), ("R2P", 1.0)], Sense::Le, cg)?;
    sys.push_row(&[("R22", 1.0), ("R2P", 1.0)], Sense::Le, ch_)?;
    sys.push_row(&[("R1R", 1.0)], Sense::Le, ci)?;
    sys.push_row(&[("R22", 1.0)], Sense::Le, cj)?;
    sys.push_row(&[("R2P", 1.0)], Sense::Le, ck)?;
    Ok(vec![LabeledSystem { label: "base".into(), system: sys }])
}

/// Constants shared by the relay-broadcast region and its shrunk form.
struct PcrbcTerms {
    bin: f64,
    b: f64,
    c: f64,
    d: f64,
    j: f64,
    i: f64,
    k: f64,
    m: f64,
    n: f64,
}

fn pcrbc_terms(p: &JointPmf) -> Result<PcrbcTerms> {
    Ok(PcrbcTerms {
        bin: cmi(p, &["V12"], &["V2"], &["U2p", "U2"])?,
        b: cmi(p, &["Yh2"], &["V12", "Y1"], &["U2p", "U2", "X3"])?,
        c: cmi(p, &["Y2"], &["Yh2"], &["U2p", "U2", "X3"])?,
        d: cmi(p, &["Y1"], &["U2p", "U2", "V12", "X3"], &[])?,
        j: cmi(p, &["Y1", "Yh2"], &["V12"], &["U2p", "U2", "X3"])?,
        i: cmi(p, &["Y1"], &["V12", "X3"], &["U2p", "U2"])?,
        k: cmi(p, &["Y2"], &["U2", "V2"], &["U2p", "X3"])?,
        m: cmi(p, &["Y2"], &["V2"], &["U2p", "U2", "X3"])?,
        n: cmi(p, &["Y1"], &["X3"], &["U2p", "U2", "V12"])?,
    })
}

const PCRBC_VARS: [&str; 5] = ["R1B", "R22", "R2P", "Rp1B", "Rp22"];

fn pcrbc_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let t = pcrbc_terms(p)?;
    let mut sys = sys_with(&PCRBC_VARS);
    sys.push_row(&[("Rp1B", 1.0), ("Rp22", 1.0)], Sense::Ge, t.bin)?;
    sys.push_row(&[("R2P", 1.0), ("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.b + t.d - t.c)?;
    sys.push_row(&[("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.j)?;
    sys.push_row(&[("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.i + t.b - t.c)?;
    sys.push_row(&[("R2P", 1.0), ("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.k)?;
    sys.push_row(&[("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.m)?;
    sys.push_feasibility("quantization_feasibility", t.c, t.n + t.b);
    Ok(vec![LabeledSystem { label: "base".into(), system: sys }])
}

fn bross_system(p: &JointPmf) -> Result<Vec<LabeledSystem>> {
    let t = pcrbc_terms(p)?;
    let common = cmi(p, &["Y1"], &["U2p", "U2", "X3", "Yh2"], &[])?;
    let c_given_y1 = cmi(p, &["Y2"], &["Yh2"], &["U2p", "U2", "X3", "Y1"])?;
    let i_x3 = cmi(p, &["Y1"], &["X3"], &["U2p", "U2"])?;
    let mut sys = sys_with(&PCRBC_VARS);
    sys.push_row(&[("Rp1B", 1.0), ("Rp22", 1.0)], Sense::Ge, t.bin)?;
    sys.push_row(&[("R2P", 1.0)], Sense::Le, common - t.c)?;
    sys.push_row(&[("R1B", 1.0), ("Rp1B", 1.0)], Sense::Le, t.j)?;
    sys.push_row(&[("R2P", 1.0), ("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.k)?;
    sys.push_row(&[("R22", 1.0), ("Rp22", 1.0)], Sense::Le, t.m)?;
    sys.push_feasibility("residual_quantization", c_given_y1, i_x3);
    Ok(vec![LabeledSystem { label: "base".into(), system: sys }])
}

/// Builds the mode's inequality system(s) from a joint covering the mode's
/// variable set.
pub fn build_rate_system(
    p: &JointPmf,
    mode: Mode,
    opts: &RegionOptions,
) -> Result<Vec<LabeledSystem>> {
    for v in mode.scheme().vars() {
        if !p.vars().iter().any(|x| x == v) {
            return Err(Error::ModeSchemeMismatch {
                expected: mode.scheme().name().to_string(),
                got: format!("joint over {:?}", p.vars()),
            });
        }
    }
    match mode {
        Mode::Theorem1 => {
            let t = compute_info_terms(p)?;
            Ok(theorem1_systems(&t))
        }
        Mode::PreElim => {
            let t = compute_info_terms(p)?;
            Ok(pre_elim_systems(&t, opts))
        }
        Mode::Outer => outer_system(p),
        Mode::Corollary1 => corollary1_system(p),
        Mode::Rsub => rsub_system(p),
        Mode::RsubRewritten => rsub_rewritten_system(p),
        Mode::Chu => chu_system(p),
        Mode::Pcrbc => pcrbc_system(p),
        Mode::Bross => bross_system(p),
    }
}

/// Projects one system onto `(R1, R2)` where each total is the sum of the
/// named rate variables. Returns the empty polytope when infeasible.
pub fn project_single(
    sys: &InequalitySystem,
    r1_def: &[&str],
    r2_def: &[&str],
) -> Result<RatePolytope> {
    let mut work = sys.clone();
    for (total, def) in [("R1", r1_def), ("R2", r2_def)] {
        for v in def {
            if !work.vars.iter().any(|x| x == v) {
                return Err(Error::UndeclaredVariableInDef((*v).to_string()));
            }
        }
        let identity = def.len() == 1 && def[0] == total;
        if identity {
            continue;
        }
        work.vars.push(total.to_string());
        for row in &mut work.rows {
            row.coeffs.push(0.0);
        }
        let mut terms: Vec<(&str, f64)> = def.iter().map(|v| (*v, 1.0)).collect();
        terms.push((total, -1.0));
        work.push_row(&terms, Sense::Le, 0.0)?;
        work.push_row(&terms, Sense::Ge, 0.0)?;
    }
    let projected = work.eliminate_all_except(&["R1", "R2"])?;
    if !projected.feasibility_ok() {
        return Ok(RatePolytope::empty());
    }
    let r1 = projected.var_index("R1")?;
    let r2 = projected.var_index("R2")?;
    let halfplanes: Vec<(f64, f64, f64)> = projected
        .rows
        .iter()
        .map(|row| (row.coeffs[r1], row.coeffs[r2], row.rhs))
        .collect();
    RatePolytope::from_halfplanes(halfplanes)
}

/// Projects every system of a region description and unions the results.
pub fn project_region(
    systems: &[LabeledSystem],
    r1_def: &[&str],
    r2_def: &[&str],
) -> Result<RatePolytope> {
    let mut polys = Vec::new();
    for ls in systems {
        let p = project_single(&ls.system, r1_def, r2_def)?;
        if !p.is_empty() {
            polys.push(p);
        }
    }
    if polys.is_empty() {
        return Ok(RatePolytope::empty());
    }
    Ok(union_hull(&polys))
}

/// Convenience: build the mode's systems from a joint and project with the
/// mode's default rate definitions.
pub fn mode_polytope(p: &JointPmf, mode: Mode, opts: &RegionOptions) -> Result<RatePolytope> {
    let systems = build_rate_system(p, mode, opts)?;
    let (r1, r2) = mode.rate_defs();
    project_region(&systems, r1, r2)
}

/// A vertex of one path's polytope that the other path's polytope excludes.
#[derive(Debug, Clone, Serialize)]
pub struct PathWitness {
    /// "stated_not_in_pre_elim" or "pre_elim_not_in_stated".
    pub direction: String,
    pub vertex: (f64, f64),
    pub halfplane: (f64, f64, f64),
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathComparison {
    pub stated: RatePolytope,
    pub pre_elim: RatePolytope,
    pub mutual_within_tol: bool,
    pub witnesses: Vec<PathWitness>,
}

/// Projects the stated region and the pre-elimination region of the same
/// joint and checks mutual containment at `tol`; disagreements are reported
/// with full witnesses rather than absorbed.
pub fn compare_region_paths(p: &JointPmf, opts: &RegionOptions, tol: f64) -> Result<PathComparison> {
    let stated = mode_polytope(p, Mode::Theorem1, opts)?;
    let pre = mode_polytope(p, Mode::PreElim, opts)?;
    let mut witnesses = Vec::new();
    if !pre.contains(&stated, tol) {
        if let Some((vertex, halfplane, slack)) = pre.worst_violation(&stated) {
            witnesses.push(PathWitness {
                direction: "stated_not_in_pre_elim".into(),
                vertex,
                halfplane,
                slack,
            });
        }
    }
    if !stated.contains(&pre, tol) {
        if let Some((vertex, halfplane, slack)) = stated.worst_violation(&pre) {
            witnesses.push(PathWitness {
                direction: "pre_elim_not_in_stated".into(),
                vertex,
                halfplane,
                slack,
            });
        }
    }
    // Containment of an empty region is vacuous; flag empty-vs-nonempty.
    if stated.is_empty() != pre.is_empty() {
        witnesses.push(PathWitness {
            direction: if stated.is_empty() {
                "stated_empty_pre_elim_not".into()
            } else {
                "pre_elim_empty_stated_not".into()
            },
            vertex: (f64::NAN, f64::NAN),
            halfplane: (0.0, 0.0, 0.0),
            slack: f64::INFINITY,
        });
    }
    Ok(PathComparison {
        mutual_within_tol: witnesses.is_empty(),
        stated,
        pre_elim: pre,
        witnesses,
    })
}

/// Region of a mode over sampled scheme distributions: per-sample polytopes
/// plus their union hull. Parallel over samples, deterministic by index.
pub fn sampled_region(
    mode: Mode,
    ch: &crate::channel::ChannelSpec,
    cards: &std::collections::BTreeMap<String, usize>,
    count: usize,
    seed: u64,
    opts: &RegionOptions,
) -> Result<(RatePolytope, Vec<RatePolytope>)> {
    use rayon::prelude::*;
    let fds = crate::factored::sample_factored(mode.scheme(), cards, count, seed);
    let per: Result<Vec<RatePolytope>> = fds
        .par_iter()
        .map(|fd| {
            let joint = fd.assemble_joint(ch)?;
            mode_polytope(&joint, mode, opts)
        })
        .collect();
    let per = per?;
    let nonempty: Vec<RatePolytope> = per.iter().filter(|p| !p.is_empty()).cloned().collect();
    let hull = if nonempty.is_empty() { RatePolytope::empty() } else { union_hull(&nonempty) };
    Ok((hull, per))
}
