//! Outer bound evaluation and capacity verification on degraded Z channels.
//!
//! For a factored Z channel the chain `(X1, X2) - (Y2, X3) - Y1` holds
//! structurally, which kills the cross term in the sum-rate decomposition.
//! When additionally `Y1` ignores `X2` given `(X1, X3)`, the outer bound's
//! `R1` constraint collapses onto the inner bound's and the two regions
//! coincide input by input; [`verify_theorem3`] checks both facts
//! numerically.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelSpec, ZChannelSpec};
use crate::error::{Error, Result};
use crate::factored::derive_seed;
use crate::geometry::{union_hull, RatePolytope};
use crate::pmf::JointPmf;
use crate::region::{mode_polytope, Mode, RegionOptions};

/// An input distribution `p(x1, x2, x3)` paired with an id for reporting.
#[derive(Debug, Clone)]
pub struct InputJoint {
    pub id: String,
    pub probs: Vec<f64>,
}

/// Joint of inputs and outputs for one input distribution.
pub fn input_output_joint(ch: &ChannelSpec, input: &InputJoint) -> Result<JointPmf> {
    let [c1, c2, c3, cy1, cy2] = ch.cards();
    let expected = c1 * c2 * c3;
    if input.probs.len() != expected {
        return Err(Error::LengthMismatch { expected, got: input.probs.len() });
    }
    let vars = ["X1", "X2", "X3", "Y1", "Y2"].map(String::from).to_vec();
    let cards = vec![c1, c2, c3, cy1, cy2];
    let mut probs = Vec::with_capacity(expected * cy1 * cy2);
    for x1 in 0..c1 {
        for x2 in 0..c2 {
            for x3 in 0..c3 {
                let px = input.probs[(x1 * c2 + x2) * c3 + x3];
                for y1 in 0..cy1 {
                    for y2 in 0..cy2 {
                        probs.push(px * ch.w(x1, x2, x3, y1, y2));
                    }
                }
            }
        }
    }
    JointPmf::new(vars, cards, probs)
}

/// Product-form grid `p(x1)p(x2)p(x3)` with per-axis probabilities on a
/// `1/step` lattice, plus `joint_count` Dirichlet-sampled full joints.
pub fn default_input_search(ch: &ChannelSpec, step: usize, joint_count: usize, seed: u64) -> Vec<InputJoint> {
    let mut out = grid_product_inputs(ch, step);
    out.extend(dirichlet_inputs(ch, joint_count, seed));
    out
}

/// All product distributions whose per-axis marginals lie on the `1/step`
/// lattice. Only binary axes are gridded; larger alphabets fall back to a
/// coarse lattice over the simplex corners plus uniform.
pub fn grid_product_inputs(ch: &ChannelSpec, step: usize) -> Vec<InputJoint> {
    let [c1, c2, c3, _, _] = ch.cards();
    let axis = |card: usize| -> Vec<Vec<f64>> {
        if card == 1 {
            vec![vec![1.0]]
        } else if card == 2 {
            (0..=step)
                .map(|i| {
                    let p = i as f64 / step as f64;
                    vec![p, 1.0 - p]
                })
                .collect()
        } else {
            let mut rows: Vec<Vec<f64>> = (0..card)
                .map(|i| {
                    let mut r = vec![0.0; card];
                    r[i] = 1.0;
                    r
                })
                .collect();
            rows.push(vec![1.0 / card as f64; card]);
            rows
        }
    };
    let (a1, a2, a3) = (axis(c1), axis(c2), axis(c3));
    let mut out = Vec::with_capacity(a1.len() * a2.len() * a3.len());
    for (i, p1) in a1.iter().enumerate() {
        for (j, p2) in a2.iter().enumerate() {
            for (k, p3) in a3.iter().enumerate() {
                let mut probs = Vec::with_capacity(c1 * c2 * c3);
                for v1 in p1 {
                    for v2 in p2 {
                        for v3 in p3 {
                            probs.push(v1 * v2 * v3);
                        }
                    }
                }
                out.push(InputJoint { id: format!("grid:{i}:{j}:{k}"), probs });
            }
        }
    }
    out
}

/// Dirichlet-style full joints over `(x1, x2, x3)`, deterministic per index.
pub fn dirichlet_inputs(ch: &ChannelSpec, count: usize, seed: u64) -> Vec<InputJoint> {
    let [c1, c2, c3, _, _] = ch.cards();
    let n = c1 * c2 * c3;
    (0..count)
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let mut probs: Vec<f64> = (0..n).map(|_| -f64::ln(rng.gen::<f64>())).collect();
            let s: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= s);
            InputJoint { id: format!("dirichlet:{i}"), probs }
        })
        .collect()
}

fn per_input_polytope(ch: &ChannelSpec, input: &InputJoint, mode: Mode) -> Result<RatePolytope> {
    let joint = input_output_joint(ch, input)?;
    mode_polytope(&joint, mode, &RegionOptions::default())
}

/// Union over the sampled inputs of the per-input outer-bound polytopes.
pub fn outer_bound_region(ch: &ChannelSpec, inputs: &[InputJoint]) -> Result<RatePolytope> {
    region_over_inputs(ch, inputs, Mode::Outer)
}

/// Union over the sampled inputs of the per-input inner-bound polytopes.
pub fn corollary1_region(ch: &ChannelSpec, inputs: &[InputJoint]) -> Result<RatePolytope> {
    region_over_inputs(ch, inputs, Mode::Corollary1)
}

fn region_over_inputs(ch: &ChannelSpec, inputs: &[InputJoint], mode: Mode) -> Result<RatePolytope> {
    let polys: Result<Vec<RatePolytope>> = inputs
        .par_iter()
        .map(|input| per_input_polytope(ch, input, mode))
        .collect();
    let polys = polys?;
    let nonempty: Vec<RatePolytope> = polys.into_iter().filter(|p| !p.is_empty()).collect();
    if nonempty.is_empty() {
        return Ok(RatePolytope::empty());
    }
    Ok(union_hull(&nonempty))
}

/// Per-input record of the capacity check.
#[derive(Debug, Clone, Serialize)]
pub struct PerInputReport {
    pub id: String,
    pub inner: RatePolytope,
    pub outer: RatePolytope,
    pub hausdorff: f64,
    /// `I(Y1; X1, X2 | Y2, X3)` in bits: must vanish under degradedness.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityVerdict {
    Coincide,
    Gap { max_distance: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    pub per_distribution: Vec<PerInputReport>,
    pub overall_inner: RatePolytope,
    pub overall_outer: RatePolytope,
    pub verdict: CapacityVerdict,
}

/// Checks, input by input, that the degradedness residual vanishes and that
/// inner and outer polytopes coincide; the verdict aggregates the worst
/// Hausdorff distance.
pub fn verify_theorem3(
    z: &ZChannelSpec,
    inputs: &[InputJoint],
    tol: f64,
) -> Result<CapacityReport> {
    let ch = z.lift_z_channel()?;
    verify_capacity_on(&ch, inputs, tol)
}

/// Same check on an already-lifted channel; errors unless the structural
/// degradedness flag is set (use `force` to evaluate anyway, e.g. to exhibit
/// a nonzero residual on a non-degraded channel).
pub fn verify_capacity_on_channel(
    ch: &ChannelSpec,
    inputs: &[InputJoint],
    tol: f64,
    force: bool,
) -> Result<CapacityReport> {
    if !ch.is_structurally_degraded() && !force {
        return Err(Error::NotDegraded);
    }
    verify_capacity_on(ch, inputs, tol)
}

fn verify_capacity_on(ch: &ChannelSpec, inputs: &[InputJoint], tol: f64) -> Result<CapacityReport> {
    let per: Result<Vec<PerInputReport>> = inputs
        .par_iter()
        .map(|input| {
            let joint = input_output_joint(ch, input)?;
            let residual = joint.cond_mutual_info(&["Y1"], &["X1", "X2"], &["Y2", "X3"])?;
            let inner = mode_polytope(&joint, Mode::Corollary1, &RegionOptions::default())?;
            let outer = mode_polytope(&joint, Mode::Outer, &RegionOptions::default())?;
            let hausdorff = inner.hausdorff(&outer);
            Ok(PerInputReport { id: input.id.clone(), inner, outer, hausdorff, residual })
        })
        .collect();
    let per = per?;
    let overall_inner = union_hull(&per.iter().map(|r| r.inner.clone()).collect::<Vec<_>>());
    let overall_outer = union_hull(&per.iter().map(|r| r.outer.clone()).collect::<Vec<_>>());
    let max_distance = per.iter().map(|r| r.hausdorff).fold(0.0f64, f64::max);
    let verdict = if max_distance < tol {
        CapacityVerdict::Coincide
    } else {
        CapacityVerdict::Gap { max_distance }
    };
    Ok(CapacityReport { per_distribution: per, overall_inner, overall_outer, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TOL_GEO;

    #[test]
    fn constant_output_channel_gives_origin() {
        // Both outputs constant: all informations vanish.
        let mut w = vec![0.0; 32];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    w[((x1 * 2 + x2) * 2 + x3) * 4] = 1.0;
                }
            }
        }
        let ch = ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap();
        let inputs = dirichlet_inputs(&ch, 10, 3);
        let outer = outer_bound_region(&ch, &inputs).unwrap();
        assert_eq!(outer.vertices.len(), 1);
        let inner = corollary1_region(&ch, &inputs).unwrap();
        assert_eq!(inner.vertices.len(), 1);
    }

    #[test]
    fn xor_z_outer_rows_at_uniform_inputs() {
        let ch = ZChannelSpec::xor_example().lift_z_channel().unwrap();
        let uniform = InputJoint { id: "uniform".into(), probs: vec![1.0 / 8.0; 8] };
        let joint = input_output_joint(&ch, &uniform).unwrap();
        let ia = joint.cond_mutual_info(&["Y1"], &["X1", "X2", "X3"], &[]).unwrap();
        let ib = joint.cond_mutual_info(&["Y2"], &["X2"], &["X1", "X3"]).unwrap();
        let ic = joint.cond_mutual_info(&["Y1", "Y2"], &["X1", "X2"], &["X3"]).unwrap();
        assert!((ia - 1.0).abs() < 1e-12);
        assert!((ib - 1.0).abs() < 1e-12);
        assert!((ic - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xor_z_outer_hull_is_triangle() {
        let ch = ZChannelSpec::xor_example().lift_z_channel().unwrap();
        let inputs = grid_product_inputs(&ch, 8);
        let outer = outer_bound_region(&ch, &inputs).unwrap();
        assert!(outer.contains_point((1.0, 0.0), TOL_GEO));
        assert!(outer.contains_point((0.0, 1.0), TOL_GEO));
        for v in &outer.vertices {
            assert!(v.0 + v.1 <= 1.0 + 1e-9, "{v:?}");
        }
    }

    #[test]
    fn identity_channel_outer_contains_one_one() {
        let mut w = vec![0.0; 32];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    w[(((x1 * 2 + x2) * 2 + x3) * 2 + x1) * 2 + x2] = 1.0;
                }
            }
        }
        let ch = ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap();
        let uniform = InputJoint { id: "uniform".into(), probs: vec![1.0 / 8.0; 8] };
        let outer = outer_bound_region(&ch, &[uniform]).unwrap();
        assert!(outer.contains_point((1.0, 1.0), TOL_GEO));
    }

    #[test]
    fn xor_z_corollary1_triangle_at_uniform() {
        let ch = ZChannelSpec::xor_example().lift_z_channel().unwrap();
        let uniform = InputJoint { id: "uniform".into(), probs: vec![1.0 / 8.0; 8] };
        let inner = corollary1_region(&ch, &[uniform]).unwrap();
        assert!(inner.contains_point((1.0, 0.0), TOL_GEO));
        assert!(inner.contains_point((0.0, 1.0), TOL_GEO));
        assert!(!inner.contains_point((0.6, 0.6), TOL_GEO));
    }

    #[test]
    fn product_channel_same_triangle() {
        // y1 = x3, y2 = x2.
        let mut w = vec![0.0; 32];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    w[(((x1 * 2 + x2) * 2 + x3) * 2 + x3) * 2 + x2] = 1.0;
                }
            }
        }
        let ch = ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap();
        let uniform = InputJoint { id: "uniform".into(), probs: vec![1.0 / 8.0; 8] };
        let inner = corollary1_region(&ch, &[uniform]).unwrap();
        assert!(inner.contains_point((1.0, 0.0), TOL_GEO));
        assert!(inner.contains_point((0.0, 1.0), TOL_GEO));
        for v in &inner.vertices {
            assert!(v.0 + v.1 <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn degraded_z_coincides_per_input() {
        for seed in 0..3 {
            let z = ZChannelSpec::sample_capacity_class([2, 2, 2, 2, 2], 40 + seed);
            let inputs = dirichlet_inputs(&z.lift_z_channel().unwrap(), 20, seed);
            let report = verify_theorem3(&z, &inputs, TOL_GEO).unwrap();
            for r in &report.per_distribution {
                assert!(r.residual < 1e-8, "{}: residual {}", r.id, r.residual);
                assert!(r.hausdorff < TOL_GEO, "{}: hausdorff {}", r.id, r.hausdorff);
            }
            assert!(matches!(report.verdict, CapacityVerdict::Coincide));
        }
    }

    #[test]
    fn inner_always_inside_outer() {
        for seed in 0..3 {
            let ch = ChannelSpec::sample_random([2, 2, 2, 2, 2], 60 + seed);
            for input in dirichlet_inputs(&ch, 10, seed) {
                let joint = input_output_joint(&ch, &input).unwrap();
                let inner =
                    mode_polytope(&joint, Mode::Corollary1, &RegionOptions::default()).unwrap();
                let outer = mode_polytope(&joint, Mode::Outer, &RegionOptions::default()).unwrap();
                assert!(outer.contains(&inner, TOL_GEO), "{}", input.id);
            }
        }
    }

    #[test]
    fn forced_non_degraded_reports_residual() {
        // y1 = x1 without the degradedness flag: residual must be positive.
        let mut w = vec![0.0; 32];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    for y2 in 0..2usize {
                        w[(((x1 * 2 + x2) * 2 + x3) * 2 + x1) * 2 + y2] = 0.5;
                    }
                }
            }
        }
        let ch = ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap();
        assert!(matches!(
            verify_capacity_on_channel(&ch, &[], TOL_GEO, false),
            Err(Error::NotDegraded)
        ));
        let uniform = InputJoint { id: "uniform".into(), probs: vec![1.0 / 8.0; 8] };
        let report = verify_capacity_on_channel(&ch, &[uniform], TOL_GEO, true).unwrap();
        assert!(report.per_distribution[0].residual > 0.5);
    }

    #[test]
    fn lifted_z_degradedness_is_numerically_exact() {
        // p(y1 | y2, x1, x2, x3) equals p(y1 | y2, x3) wherever defined.
        let z = ZChannelSpec::sample_capacity_class([2, 2, 2, 2, 2], 123);
        let ch = z.lift_z_channel().unwrap();
        for input in dirichlet_inputs(&ch, 5, 9) {
            let joint = input_output_joint(&ch, &input).unwrap();
            let residual = joint.cond_mutual_info(&["Y1"], &["X1", "X2"], &["Y2", "X3"]).unwrap();
            assert!(residual < 1e-10);
        }
    }
}
