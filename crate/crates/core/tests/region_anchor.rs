//! End-to-end anchor on an analytically solvable instance: parallel clean
//! bit pipes `y1 = x1`, `y2 = x2` with the helper silent. Carrying user 1's
//! message privately on `V1 = X1` and user 2's privately on `V2 = X2` makes
//! the rate pair (1, 1) achievable, and the outer bound shows nothing beyond
//! the unit square.

use std::collections::BTreeMap;

use rrlab_core::channel::ChannelSpec;
use rrlab_core::factored::{Factor, FactoredDistribution, Scheme};
use rrlab_core::geometry::TOL_GEO;
use rrlab_core::region::{build_rate_system, mode_polytope, project_single, Mode, RegionOptions};

fn parallel_bit_pipes() -> ChannelSpec {
    let mut w = vec![0.0; 32];
    for x1 in 0..2usize {
        for x2 in 0..2usize {
            for x3 in 0..2usize {
                w[(((x1 * 2 + x2) * 2 + x3) * 2 + x1) * 2 + x2] = 1.0;
            }
        }
    }
    ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap()
}

/// V1 a fresh uniform bit copied into X1; V2 a fresh uniform bit copied into
/// X2; every other auxiliary is a constant and X3 is pinned.
fn private_bits_distribution(ch: &ChannelSpec) -> FactoredDistribution {
    let mut cards: BTreeMap<String, usize> = Scheme::Theorem1.default_cards(ch);
    for v in ["U1p", "U1", "U2p", "U2", "V12", "Yh2"] {
        cards.insert(v.to_string(), 1);
    }
    let mk = |produced: &[&str], given: &[&str], f: &mut dyn FnMut(&[usize], &[usize]) -> f64| {
        Factor::from_fn(
            produced.iter().map(|s| s.to_string()).collect(),
            given.iter().map(|s| s.to_string()).collect(),
            produced.iter().map(|v| cards[*v]).collect(),
            given.iter().map(|v| cards[*v]).collect(),
            f,
        )
        .unwrap()
    };
    let factors = vec![
        mk(&["U1p"], &[], &mut |_, _| 1.0),
        mk(&["U1"], &["U1p"], &mut |_, _| 1.0),
        mk(&["V1"], &["U1p", "U1"], &mut |_, _| 0.5),
        mk(&["U2p"], &["U1p"], &mut |_, _| 1.0),
        mk(&["U2", "V12", "V2"], &["U1p", "U1", "V1", "U2p"], &mut |_, p| {
            // V2 uniform, the rest constants.
            if p[2] < 2 {
                0.5
            } else {
                0.0
            }
        }),
        mk(&["X1"], &["U1p", "U1", "V1"], &mut |g, p| if p[0] == g[2] { 1.0 } else { 0.0 }),
        mk(
            &["X2"],
            &["U1p", "U1", "V1", "U2p", "U2", "V12", "V2"],
            &mut |g, p| if p[0] == g[6] { 1.0 } else { 0.0 },
        ),
        mk(&["X3"], &["U1p", "U2p"], &mut |_, p| if p[0] == 0 { 1.0 } else { 0.0 }),
        mk(&["Yh2"], &["U1p", "U1", "U2p", "U2", "X3", "Y2"], &mut |_, _| 1.0),
    ];
    FactoredDistribution::new(Scheme::Theorem1, cards, factors).unwrap()
}

/// Destination 1 hears only the helper (`y1 = x3`) while destination 2
/// observes sender 1 perfectly (`y2 = x1`). In the base constraint system
/// the private message moves only when the quantizer forwards `y2`: with
/// `Yh2` copying `y2` the pair (1, 0) is achievable, with the quantizer
/// disabled the base system collapses to the origin. The drop-rule branch
/// with user 2 fully silent still reaches (1, 0) through the helper-index
/// route, which is the literal reading of the drop conditions.
#[test]
fn quantize_and_forward_moves_the_private_message() {
    let mut w = vec![0.0; 32];
    for x1 in 0..2usize {
        for x2 in 0..2usize {
            for x3 in 0..2usize {
                w[(((x1 * 2 + x2) * 2 + x3) * 2 + x3) * 2 + x1] = 1.0;
            }
        }
    }
    let ch = ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap();
    let mut cards: BTreeMap<String, usize> = Scheme::Theorem1.default_cards(&ch);
    for v in ["U1p", "U1", "U2p", "U2", "V12", "V2"] {
        cards.insert(v.to_string(), 1);
    }
    let build = |cards: &BTreeMap<String, usize>, quantize: bool| {
        let mk =
            |produced: &[&str], given: &[&str], f: &mut dyn FnMut(&[usize], &[usize]) -> f64| {
                Factor::from_fn(
                    produced.iter().map(|s| s.to_string()).collect(),
                    given.iter().map(|s| s.to_string()).collect(),
                    produced.iter().map(|v| cards[*v]).collect(),
                    given.iter().map(|v| cards[*v]).collect(),
                    f,
                )
                .unwrap()
            };
        let factors = vec![
            mk(&["U1p"], &[], &mut |_, _| 1.0),
            mk(&["U1"], &["U1p"], &mut |_, _| 1.0),
            mk(&["V1"], &["U1p", "U1"], &mut |_, _| 0.5),
            mk(&["U2p"], &["U1p"], &mut |_, _| 1.0),
            mk(&["U2", "V12", "V2"], &["U1p", "U1", "V1", "U2p"], &mut |_, _| 1.0),
            mk(&["X1"], &["U1p", "U1", "V1"], &mut |g, p| if p[0] == g[2] { 1.0 } else { 0.0 }),
            mk(
                &["X2"],
                &["U1p", "U1", "V1", "U2p", "U2", "V12", "V2"],
                &mut |_, p| if p[0] == 0 { 1.0 } else { 0.0 },
            ),
            mk(&["X3"], &["U1p", "U2p"], &mut |_, _| 0.5),
            mk(&["Yh2"], &["U1p", "U1", "U2p", "U2", "X3", "Y2"], &mut |g, p| {
                if quantize {
                    // Copy the observed y2 (last conditioning variable).
                    if p[0] == g[5] {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    1.0
                }
            }),
        ];
        FactoredDistribution::new(Scheme::Theorem1, cards.clone(), factors).unwrap()
    };

    let opts = RegionOptions::default();
    let base_polytope = |fd: &FactoredDistribution| {
        let joint = fd.assemble_joint(&ch).unwrap();
        let systems = build_rate_system(&joint, Mode::Theorem1, &opts).unwrap();
        assert_eq!(systems[0].label, "base");
        let (r1, r2) = Mode::Theorem1.rate_defs();
        project_single(&systems[0].system, r1, r2).unwrap()
    };

    let with_cf = build(&cards, true);
    let poly = base_polytope(&with_cf);
    assert!(
        poly.contains_point((1.0, 0.0), TOL_GEO),
        "quantize-and-forward misses (1,0): {:?}",
        poly.vertices
    );

    let mut cards_off = cards.clone();
    cards_off.insert("Yh2".to_string(), 1);
    let without = build(&cards_off, false);
    let poly = base_polytope(&without);
    let best = poly.vertices.iter().map(|v| v.0 + v.1).fold(0.0f64, f64::max);
    assert!(best < 1e-9, "base system without quantizer should collapse: {:?}", poly.vertices);

    // The drop-variant union keeps the helper-index route open.
    let joint = without.assemble_joint(&ch).unwrap();
    let full = mode_polytope(&joint, Mode::Theorem1, &opts).unwrap();
    assert!(full.contains_point((1.0, 0.0), TOL_GEO));
}

#[test]
fn private_bits_achieve_the_unit_square_corner() {
    let ch = parallel_bit_pipes();
    let fd = private_bits_distribution(&ch);
    let joint = fd.assemble_joint(&ch).unwrap();
    let opts = RegionOptions::default();
    for mode in [Mode::Theorem1, Mode::PreElim] {
        let poly = mode_polytope(&joint, mode, &opts).unwrap();
        assert!(
            poly.contains_point((1.0, 1.0), TOL_GEO),
            "{} misses (1,1): {:?}",
            mode.name(),
            poly.vertices
        );
        // Nothing beyond a bit per user on clean bit pipes.
        for v in &poly.vertices {
            assert!(v.0 <= 1.0 + 1e-9 && v.1 <= 1.0 + 1e-9);
        }
    }
}
