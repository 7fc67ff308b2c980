//! Property tests over seeded generators: format round-trips, flip
//! involution, gluing bookkeeping, handle-trace validity, and move
//! safety.

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vpbridge_core::corpus;
use vpbridge_core::handle::{derive_summary, HandlePresentation, OneHandle, ZeroHandle};
use vpbridge_core::invariant::{invariants_unchecked, netchi, netext, width};
use vpbridge_core::model::{GraphPairMeta, SurfaceId};
use vpbridge_core::moves::MoveSpec;
use vpbridge_core::sums::{flip, glue, SumAttach, SumPoint};
use vpbridge_core::textfmt;

fn seeded_diagram(seed: u64) -> vpbridge_core::model::Diagram {
    corpus::random_corpus(seed, 1).pop().unwrap()
}

proptest! {
    /// parse ∘ print is the identity on valid diagrams (canonical form).
    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let d = seeded_diagram(seed);
        let text = textfmt::print(&d);
        let back = textfmt::parse(&text).expect("printer output parses");
        prop_assert_eq!(&textfmt::print(&back), &text);
        prop_assert!(back.validate().is_valid());
        let a = invariants_unchecked(&d);
        let b = invariants_unchecked(&back);
        prop_assert_eq!(a.netext, b.netext);
        prop_assert_eq!(a.width, b.width);
        prop_assert_eq!(a.netchi, b.netchi);
    }

    /// Flipping is an involution, preserves validity and invariants.
    #[test]
    fn flip_involution(seed in any::<u64>()) {
        let d = seeded_diagram(seed);
        let f = flip(&d);
        prop_assert!(f.validate().is_valid());
        prop_assert_eq!(flip(&f), d.clone());
        prop_assert_eq!(netext(&f), netext(&d));
        prop_assert_eq!(width(&f), width(&d));
        prop_assert_eq!(netchi(&f), netchi(&d));
    }

    /// Gluing along a kind-2 sphere adds exactly +2 to netχ and is
    /// netext-additive; the summing sphere contributes extent 0.
    #[test]
    fn glue_bookkeeping(seed1 in any::<u64>(), seed2 in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed1 ^ seed2);
        let d1 = corpus::random_atom(&mut rng);
        let d2 = corpus::random_atom(&mut rng);
        let point = |d: &vpbridge_core::model::Diagram| SumPoint {
            body: d.bodies.values().find(|b| b.bridge_arcs > 0).unwrap().id.clone(),
            attach: SumAttach::OnBridge,
        };
        let whole = glue(&d1, &point(&d1), &d2, &point(&d2)).expect("atoms glue");
        prop_assert!(whole.validate().is_valid());
        prop_assert_eq!(netchi(&whole), netchi(&d1) + netchi(&d2) + 2);
        prop_assert_eq!(netext(&whole), netext(&d1) + netext(&d2));
        prop_assert_eq!(width(&whole), width(&d1) + width(&d2));
    }

    /// Every summary the handle trace derives passes the validator: the
    /// two realizability routes agree in this direction too.
    #[test]
    fn derived_summaries_validate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_presentation(&mut rng);
        match derive_summary(&h) {
            Err(_) => {} // structurally rejected presentations are fine
            Ok(derived) => {
                let mut ctx = derived.context(GraphPairMeta::link());
                ctx.add_body(derived.body.clone());
                let rep = ctx.validate_body(&derived.body);
                prop_assert!(rep.is_valid(), "witness-derived summary invalid: {}", rep);
            }
        }
    }

    /// Applying any generated move keeps the diagram valid (incidence,
    /// coherence, acyclicity all re-checked post-move).
    #[test]
    fn moves_preserve_validity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = seeded_diagram(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        if let Some(spec) = corpus::random_untelescope(&d, &mut rng) {
            let out = vpbridge_core::moves::apply_move(
                &d,
                &MoveSpec::Untelescope(Box::new(spec)),
            ).expect("generator certificates apply");
            prop_assert!(out.validate().is_valid());
        }
    }
}

/// A random handle presentation, structurally plausible but not
/// necessarily connected; the trace either rejects it or produces a
/// valid summary. Products over once-punctured spheres are excluded:
/// those ∂₋ components sit outside the validator's hypotheses (they
/// force a sphere meeting the graph exactly once).
fn random_presentation<R: Rng>(rng: &mut R) -> HandlePresentation {
    let mut h = HandlePresentation::default();
    let n0 = rng.random_range(1..5usize);
    for k in 0..n0 {
        match rng.random_range(0..3u32) {
            0 => h.zero_handles.push(ZeroHandle::TrivialBallEmpty),
            1 => h.zero_handles.push(ZeroHandle::TrivialBallArc),
            _ => {
                let genus = rng.random_range(0..3);
                let mut strands = rng.random_range(0..4);
                if genus == 0 && strands == 1 {
                    strands = 2;
                }
                h.zero_handles.push(ZeroHandle::Product {
                    surface: SurfaceId(format!("f{}", k)),
                    genus,
                    strands,
                });
            }
        }
    }
    let slot_count = |z: &ZeroHandle| match z {
        ZeroHandle::TrivialBallEmpty => 0u32,
        ZeroHandle::TrivialBallArc => 2,
        ZeroHandle::Product { strands, .. } => *strands,
    };
    let mut free: Vec<(usize, u32)> = h
        .zero_handles
        .iter()
        .enumerate()
        .flat_map(|(i, z)| (0..slot_count(z)).map(move |s| (i, s)))
        .collect();
    for _ in 0..rng.random_range(0..6usize) {
        if rng.random_bool(0.5) && free.len() >= 2 {
            let a = free.swap_remove(rng.random_range(0..free.len()));
            let b = free.swap_remove(rng.random_range(0..free.len()));
            h.one_handles.push(OneHandle::cored(a.0, a.1, b.0, b.1));
        } else {
            let a = rng.random_range(0..n0);
            let b = rng.random_range(0..n0);
            h.one_handles.push(OneHandle::plain(a, b));
        }
    }
    h
}

/// Non-negativity chain: on valid flagged diagrams with no (B³, ∅) body
/// and no negative-extent component, width ≥ netext ≥ bound ≥ 0 holds
/// exactly for link pairs with tori-or-empty boundary. Randomized search
/// for violations must come up empty.
#[test]
fn nonnegativity_chain_no_violations() {
    use vpbridge_core::halfint::Half;
    use vpbridge_core::invariant::nonnegativity_bound;
    use vpbridge_core::model::{Role, TKind};

    let mut checked = 0usize;
    for mut d in corpus::random_corpus(24_601, 500) {
        d.meta.irreducible = true;
        d.meta.every_sphere_separates = true;
        d.meta.every_surface_separates = true;
        if d.meta.t_kind != TKind::Link {
            continue;
        }
        if d.boundary_surfaces().any(|s| s.genus != 1) {
            continue;
        }
        let empty_ball = d
            .bodies
            .values()
            .any(|b| b.looks_like_empty_ball(&d.surfaces[&b.plus]));
        let negative_component = d
            .surfaces
            .values()
            .any(|s| s.role != Role::Boundary && s.ext() < Half::ZERO);
        if empty_ball || negative_component {
            continue;
        }
        let rep = nonnegativity_bound(&d).expect("preconditions set");
        assert!(rep.bound >= Half::ZERO, "bound {} < 0", rep.bound);
        assert!(
            rep.satisfied,
            "netext {} below bound {}",
            rep.netext, rep.bound
        );
        assert_eq!(rep.width_vs_netext, Some(true), "width < netext");
        checked += 1;
    }
    assert!(checked > 100, "only {} diagrams qualified", checked);
}

proptest! {
    /// The diagram parser never panics: arbitrary input either parses or
    /// returns a line-tagged error.
    #[test]
    fn parser_never_panics(input in "\\PC{0,200}") {
        let _ = textfmt::parse(&input);
        let _ = textfmt::parse_moves(&input);
    }

    /// Near-miss inputs built from real records with random mutations
    /// also never panic.
    #[test]
    fn parser_survives_mutations(seed in any::<u64>(), cut in 0usize..400) {
        let d = seeded_diagram(seed);
        let mut text = textfmt::print(&d);
        if !text.is_empty() {
            let at = cut % text.len();
            while !text.is_char_boundary(at % text.len()) {
                text.pop();
            }
            text.truncate(at.min(text.len()));
        }
        let _ = textfmt::parse(&text);
    }
}
