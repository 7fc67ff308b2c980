//! Diagram builders and seeded random generators.
//!
//! The named builders reconstruct the worked diagrams (the width-92 and
//! width-74 stacks, the circular braid-closure diagram with net extent
//! zero, bridge positions, graph atoms). The random generators produce
//! valid diagrams, untelescope certificates, glue trees, and thinning
//! scripts for the property and acceptance suites; all take explicit
//! rngs so runs are reproducible.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certs::{self, CutChoice, SplitData};
use crate::model::{Compressionbody, Diagram, GraphPairMeta, Role, SurfaceComp, SurfaceId};
use crate::moves::{self, MoveSpec, StrandMerge, UnperturbSpec, UntelescopeSpec};
use crate::sums::{self, SumAttach, SumPoint};

/// Two (B³, ∅) glued along an unpunctured thick sphere: (S³, ∅).
pub fn empty_ball_pair() -> Diagram {
    let mut d = Diagram::new(GraphPairMeta::empty());
    d.add_surface(SurfaceComp::new("h0", Role::Thick, 0, 0));
    d.add_body(Compressionbody::new("top", "h0"));
    d.add_body(Compressionbody::new("bot", "h0"));
    d.orient("h0", "bot", "top");
    d
}

/// A genus-g bridge position with b bridge arcs on each side: thick
/// surface (g, 2b) between two handlebody-like bodies.
pub fn bridge_position(genus: u32, bridges: u32) -> Diagram {
    let meta = if bridges == 0 {
        GraphPairMeta::empty()
    } else {
        GraphPairMeta::link()
    };
    let mut d = Diagram::new(meta);
    d.add_surface(SurfaceComp::new("h0", Role::Thick, genus, 2 * bridges));
    d.add_body(Compressionbody::new("top", "h0").with_bridges(bridges));
    d.add_body(Compressionbody::new("bot", "h0").with_bridges(bridges));
    d.orient("h0", "bot", "top");
    d
}

/// A genus-1 Heegaard diagram; with `with_core` one side carries a core
/// loop, giving (lens space or S³, core loop).
pub fn solid_torus_pair(with_core: bool) -> Diagram {
    let meta = if with_core {
        GraphPairMeta::link()
    } else {
        GraphPairMeta::empty()
    };
    let mut d = Diagram::new(meta);
    d.add_surface(SurfaceComp::new("h0", Role::Thick, 1, 0));
    d.add_body(Compressionbody::new("top", "h0").with_loops(u32::from(with_core)));
    d.add_body(Compressionbody::new("bot", "h0"));
    d.orient("h0", "bot", "top");
    d
}

/// Exterior-style diagram: a genus-g Heegaard surface with a handlebody
/// on one side and boundary tori behind the other.
pub fn knot_exterior(genus: u32, boundary_tori: u32) -> Diagram {
    assert!(genus >= boundary_tori, "genus must cover the boundary tori");
    let mut d = Diagram::new(GraphPairMeta::empty());
    d.add_surface(SurfaceComp::new("h0", Role::Thick, genus, 0));
    let mut outer = Compressionbody::new("out", "h0");
    for t in 0..boundary_tori {
        let id = format!("m{}", t);
        d.add_surface(SurfaceComp::new(id.clone(), Role::Boundary, 1, 0));
        outer.minus.push(SurfaceId(id));
    }
    d.add_body(outer);
    d.add_body(Compressionbody::new("in", "h0"));
    d.orient("h0", "out", "in");
    d
}

/// θ-graph atom: a thick sphere with both trivalent vertices drilled,
/// plus `extra_bridges` bridge arcs on each side. `extra_bridges = 0` is
/// the trivial θ (net extent ½).
pub fn theta_atom(extra_bridges: u32) -> Diagram {
    let mut d = Diagram::new(GraphPairMeta::graph(vec![3, 3]));
    d.add_surface(SurfaceComp::new(
        "h0",
        Role::Thick,
        0,
        3 + 2 * extra_bridges,
    ));
    d.add_surface(SurfaceComp::drilled_vertex("v1", 3));
    d.add_surface(SurfaceComp::drilled_vertex("v2", 3));
    d.add_body(
        Compressionbody::new("top", "h0")
            .with_minus(&["v1"])
            .with_vertical("v1", 3)
            .with_bridges(extra_bridges),
    );
    d.add_body(
        Compressionbody::new("bot", "h0")
            .with_minus(&["v2"])
            .with_vertical("v2", 3)
            .with_bridges(extra_bridges),
    );
    d.orient("h0", "bot", "top");
    d
}

/// Linear stack: thick surfaces `thicks` alternating with thin surfaces
/// `thins` (`thins.len() + 1 == thicks.len()`), trivial-ball ends. Shapes
/// must nest: each thin fits under both neighbouring thick surfaces with
/// even puncture differences.
pub fn stack(thicks: &[(u32, u32)], thins: &[(u32, u32)]) -> Diagram {
    assert_eq!(thins.len() + 1, thicks.len());
    let any_punct = thicks.iter().any(|(_, p)| *p > 0);
    let meta = if any_punct {
        GraphPairMeta::link()
    } else {
        GraphPairMeta::empty()
    };
    let mut d = Diagram::new(meta);
    for (i, (g, p)) in thicks.iter().enumerate() {
        assert!(p % 2 == 0, "end and middle thick punctures must be even");
        d.add_surface(SurfaceComp::new(format!("h{}", i), Role::Thick, *g, *p));
    }
    for (i, (g, p)) in thins.iter().enumerate() {
        d.add_surface(SurfaceComp::new(format!("n{}", i), Role::Thin, *g, *p));
    }
    // Bottom ball body.
    let mut bot = Compressionbody::new("bot", "h0");
    bot.bridge_arcs = thicks[0].1 / 2;
    d.add_body(bot);
    for (i, (tg, tp)) in thins.iter().enumerate() {
        assert!(
            *tg <= thicks[i].0.min(thicks[i + 1].0),
            "thin genus must fit under both neighbours"
        );
        let below = thicks[i].1;
        let above = thicks[i + 1].1;
        assert!(
            *tp <= below && (below - tp).is_multiple_of(2),
            "stack shapes must nest"
        );
        assert!(
            *tp <= above && (above - tp).is_multiple_of(2),
            "stack shapes must nest"
        );
        let mut down = Compressionbody::new(format!("d{}", i), format!("h{}", i));
        down.minus.push(SurfaceId(format!("n{}", i)));
        if *tp > 0 {
            down.vertical_arcs.insert(SurfaceId(format!("n{}", i)), *tp);
        }
        down.bridge_arcs = (below - tp) / 2;
        d.add_body(down);
        let mut upb = Compressionbody::new(format!("u{}", i), format!("h{}", i + 1));
        upb.minus.push(SurfaceId(format!("n{}", i)));
        if *tp > 0 {
            upb.vertical_arcs.insert(SurfaceId(format!("n{}", i)), *tp);
        }
        upb.bridge_arcs = (above - tp) / 2;
        d.add_body(upb);
    }
    let last = thicks.len() - 1;
    let mut top = Compressionbody::new("top", format!("h{}", last));
    top.bridge_arcs = thicks[last].1 / 2;
    d.add_body(top);
    // Upward orientation.
    d.orient("h0", "bot", if thins.is_empty() { "top" } else { "d0" });
    for i in 0..thins.len() {
        d.orient(&format!("n{}", i), &format!("d{}", i), &format!("u{}", i));
        let next = if i + 1 == thins.len() {
            "top".to_owned()
        } else {
            format!("d{}", i + 1)
        };
        d.orient(&format!("h{}", i + 1), &format!("u{}", i), &next);
    }
    d
}

/// The wide stack of the worked width comparison: three thick 10-punctured spheres over two thin
/// 4-punctured spheres, trivial 5-bridge ends.
pub fn width92_stack() -> Diagram {
    let mut d = Diagram::new(GraphPairMeta::link());
    for i in 1..=3 {
        d.add_surface(SurfaceComp::new(format!("h{}", i), Role::Thick, 0, 10));
    }
    for i in 1..=2 {
        d.add_surface(SurfaceComp::new(format!("f{}", i), Role::Thin, 0, 4));
    }
    let block = |id: &str, plus: &str, thin: &str| {
        Compressionbody::new(id, plus)
            .with_minus(&[thin])
            .with_vertical(thin, 4)
            .with_bridges(3)
    };
    d.add_body(Compressionbody::new("bb", "h1").with_bridges(5));
    d.add_body(block("w1", "h1", "f1"));
    d.add_body(block("w2", "h2", "f1"));
    d.add_body(block("w3", "h2", "f2"));
    d.add_body(block("w4", "h3", "f2"));
    d.add_body(Compressionbody::new("bt", "h3").with_bridges(5));
    d.orient("h1", "bb", "w1");
    d.orient("f1", "w1", "w2");
    d.orient("h2", "w2", "w3");
    d.orient("f2", "w3", "w4");
    d.orient("h3", "w4", "bt");
    d
}

/// The width-74 diagram: thick extents (2, 4, 4, 2) over thin extents
/// (1, 1, 1).
pub fn width74_stack() -> Diagram {
    stack(
        &[(0, 6), (0, 10), (0, 10), (0, 6)],
        &[(0, 4), (0, 4), (0, 4)],
    )
}

/// The circular braid-closure diagram over a non-separating sphere
/// family: k thick and k thin 2-punctured spheres (k even), each chunk a
/// trivial ball against a twice-punctured ball with one ghost arc. Net
/// extent 0.
pub fn circular_netext_zero(k: usize) -> Diagram {
    assert!(
        k >= 2 && k.is_multiple_of(2),
        "need an even number of levels"
    );
    let mut d = Diagram::new(GraphPairMeta::link());
    for i in 0..k {
        d.add_surface(SurfaceComp::new(format!("t{}", i), Role::Thick, 0, 2));
        d.add_surface(SurfaceComp::new(format!("f{}", i), Role::Thin, 0, 2));
    }
    for i in 0..k {
        let next = (i + 1) % k;
        d.add_body(Compressionbody::new(format!("ball{}", i), format!("t{}", i)).with_bridges(1));
        let w = Compressionbody::new(format!("w{}", i), format!("t{}", i))
            .with_minus(&[&format!("f{}", i), &format!("f{}", next)])
            .with_vertical(&format!("f{}", i), 1)
            .with_vertical(&format!("f{}", next), 1)
            .with_ghost(&format!("f{}", i), &format!("f{}", next));
        d.add_body(w);
    }
    for i in 0..k {
        // Even-index w bodies flow upward (∂₋ in, ∂₊ out).
        if i % 2 == 0 {
            d.orient(
                &format!("t{}", i),
                &format!("w{}", i),
                &format!("ball{}", i),
            );
        } else {
            d.orient(
                &format!("t{}", i),
                &format!("ball{}", i),
                &format!("w{}", i),
            );
        }
        let left = (i + k - 1) % k;
        if i % 2 == 0 {
            d.orient(
                &format!("f{}", i),
                &format!("w{}", left),
                &format!("w{}", i),
            );
        } else {
            d.orient(
                &format!("f{}", i),
                &format!("w{}", i),
                &format!("w{}", left),
            );
        }
    }
    d
}

/// Seeds the flags asserting an irreducible pair in a sphere-separating
/// manifold, as the sum and bound operations require.
pub fn assert_irreducible(mut d: Diagram) -> Diagram {
    d.meta.irreducible = true;
    d.meta.every_sphere_separates = true;
    d
}

fn choose_index<R: Rng>(rng: &mut R, len: usize) -> usize {
    rng.random_range(0..len)
}

/// A random small atom diagram suitable for gluing (non-trivial, closed).
pub fn random_atom<R: Rng>(rng: &mut R) -> Diagram {
    let d = match rng.random_range(0..4u32) {
        0 => bridge_position(rng.random_range(0..2), rng.random_range(2..5)),
        1 => theta_atom(rng.random_range(1..3)),
        2 => bridge_position(0, rng.random_range(2..6)),
        _ => {
            let b = rng.random_range(2..4);
            bridge_position(1, b)
        }
    };
    assert_irreducible(d)
}

/// A random linear stack with matching even puncture counts.
pub fn random_stack<R: Rng>(rng: &mut R) -> Diagram {
    let levels = rng.random_range(2..5usize);
    let mut thicks = Vec::new();
    for _ in 0..levels {
        let g = rng.random_range(0..3u32);
        let p = 2 * rng.random_range(1..5u32);
        thicks.push((g, p));
    }
    let mut thins = Vec::new();
    for w in thicks.windows(2) {
        let gmax = w[0].0.min(w[1].0);
        let pmax = w[0].1.min(w[1].1);
        let g = rng.random_range(0..=gmax);
        // Even puncture count, at least 2 to keep the lint clean.
        let p = 2 * rng.random_range(1..=pmax / 2);
        thins.push((g, p));
    }
    stack(&thicks, &thins)
}

/// A random valid diagram drawn from atoms, stacks, glue trees, the
/// circular example, and thinned variants.
pub fn random_diagram<R: Rng>(rng: &mut R) -> Diagram {
    match rng.random_range(0..8u32) {
        0..=1 => random_atom(rng),
        2..=3 => random_stack(rng),
        4 => circular_netext_zero(2 * rng.random_range(1..3usize)),
        5 => random_glue_tree(rng, 2).whole,
        6 => {
            let d = random_stack(rng);
            match random_untelescope(&d, rng) {
                Some(spec) => moves::elementary_thinning(&d, &spec).unwrap_or(d),
                None => d,
            }
        }
        _ => {
            let g = rng.random_range(1..3);
            knot_exterior(g, rng.random_range(1..=g))
        }
    }
}

/// A deterministic corpus of valid diagrams.
pub fn random_corpus(seed: u64, n: usize) -> Vec<Diagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let d = random_diagram(&mut rng);
        debug_assert!(
            d.validate().is_valid(),
            "generator must produce valid diagrams"
        );
        out.push(d);
    }
    out
}

/// A glue tree: the whole, its parts, and the summing sphere counts.
pub struct GlueTree {
    pub whole: Diagram,
    pub parts: Vec<Diagram>,
    pub p2: usize,
    pub p3: usize,
}

fn random_kind2_point<R: Rng>(d: &Diagram, rng: &mut R) -> Option<SumPoint> {
    let hosts: Vec<&Compressionbody> = d.bodies.values().filter(|b| b.bridge_arcs > 0).collect();
    if hosts.is_empty() {
        return None;
    }
    let body = hosts[choose_index(rng, hosts.len())];
    Some(SumPoint {
        body: body.id.clone(),
        attach: SumAttach::OnBridge,
    })
}

fn random_kind3_point<R: Rng>(d: &Diagram, rng: &mut R) -> Option<SumPoint> {
    let mut options = Vec::new();
    for b in d.bodies.values() {
        for m in &b.minus {
            if let Some(s) = d.surfaces.get(m) {
                if s.drilled && s.punctures == 3 {
                    options.push((b.id.clone(), m.clone()));
                }
            }
        }
    }
    if options.is_empty() {
        return None;
    }
    let (body, v) = options[choose_index(rng, options.len())].clone();
    Some(SumPoint {
        body,
        attach: SumAttach::AtVertex(v),
    })
}

/// Glues `n` random non-trivial atoms into a random tree, mixing kinds 2
/// and 3 where both sides offer trivalent vertices.
pub fn random_glue_tree<R: Rng>(rng: &mut R, n: usize) -> GlueTree {
    assert!(n >= 2);
    let mut parts: Vec<Diagram> = (0..n).map(|_| random_atom(rng)).collect();
    let mut whole = parts[0].clone();
    let mut p2 = 0;
    let mut p3 = 0;
    for part in parts.iter().skip(1) {
        let try3 = rng.random_bool(0.4);
        let glued = if try3 {
            match (
                random_kind3_point(&whole, rng),
                random_kind3_point(part, rng),
            ) {
                (Some(a), Some(b)) => {
                    p3 += 1;
                    sums::glue(&whole, &a, part, &b).expect("kind-3 glue")
                }
                _ => {
                    let a = random_kind2_point(&whole, rng).expect("bridge available");
                    let b = random_kind2_point(part, rng).expect("bridge available");
                    p2 += 1;
                    sums::glue(&whole, &a, part, &b).expect("kind-2 glue")
                }
            }
        } else {
            let a = random_kind2_point(&whole, rng).expect("bridge available");
            let b = random_kind2_point(part, rng).expect("bridge available");
            p2 += 1;
            sums::glue(&whole, &a, part, &b).expect("kind-2 glue")
        };
        whole = glued;
    }
    // Parts are recorded in gluing order.
    parts.truncate(n);
    GlueTree {
        whole,
        parts,
        p2,
        p3,
    }
}

fn maybe_cut<R: Rng>(rng: &mut R, body: &Compressionbody) -> Option<CutChoice> {
    if !rng.random_bool(0.35) {
        return None;
    }
    let choices = certs::cut_choices(body);
    if choices.is_empty() {
        None
    } else {
        Some(choices[choose_index(rng, choices.len())].clone())
    }
}

fn maybe_split<R: Rng>(
    rng: &mut R,
    body: &Compressionbody,
    surface_genus: u32,
) -> Option<SplitData> {
    // Whole (non-separating disc) only works with genus; otherwise split.
    if surface_genus >= 1 && rng.random_bool(0.4) {
        return None;
    }
    let comps = certs::ghost_components(body);
    let mut minus0 = BTreeSet::new();
    for c in &comps {
        if rng.random_bool(0.5) {
            minus0.extend(c.iter().cloned());
        }
    }
    let bridges0 = if body.bridge_arcs > 0 {
        rng.random_range(0..=body.bridge_arcs)
    } else {
        0
    };
    let loops0 = if body.core_loops > 0 {
        rng.random_range(0..=body.core_loops)
    } else {
        0
    };
    let genus0 = rng.random_range(0..=surface_genus);
    Some(SplitData {
        minus0,
        bridges0,
        loops0,
        genus0,
    })
}

/// A random valid untelescope certificate on the diagram, or None if
/// sampling fails to find one.
pub fn random_untelescope<R: Rng>(d: &Diagram, rng: &mut R) -> Option<UntelescopeSpec> {
    let thicks: Vec<SurfaceId> = d.thick_surfaces().map(|s| s.id.clone()).collect();
    if thicks.is_empty() {
        return None;
    }
    for _ in 0..60 {
        let thick = &thicks[choose_index(rng, thicks.len())];
        let h = &d.surfaces[thick];
        let adjacent = d.bodies_at_thick(thick);
        if adjacent.len() != 2 {
            continue;
        }
        let plus_side = adjacent[choose_index(rng, 2)].clone();
        let down_id = if *adjacent[0] == plus_side {
            adjacent[1].clone()
        } else {
            adjacent[0].clone()
        };
        let up_cut = maybe_cut(rng, &d.bodies[&plus_side]);
        let down_cut = maybe_cut(rng, &d.bodies[&down_id]);
        let up_body = match &up_cut {
            Some(c) => match certs::preview_cut(&d.bodies[&plus_side], c) {
                Ok(b) => b,
                Err(_) => continue,
            },
            None => d.bodies[&plus_side].clone(),
        };
        let down_body = match &down_cut {
            Some(c) => match certs::preview_cut(&d.bodies[&down_id], c) {
                Ok(b) => b,
                Err(_) => continue,
            },
            None => d.bodies[&down_id].clone(),
        };
        let up_split = maybe_split(rng, &up_body, h.genus);
        let down_split = maybe_split(rng, &down_body, h.genus);
        let Ok(spec) =
            certs::build_untelescope(d, thick, &plus_side, up_cut, down_cut, up_split, down_split)
        else {
            continue;
        };
        if moves::apply_move(d, &MoveSpec::Untelescope(Box::new(spec.clone()))).is_ok() {
            return Some(spec);
        }
    }
    None
}

/// A random extended-thinning script: one untelescope plus a few
/// follow-up moves that validate on the evolving diagram.
pub fn random_extended_script<R: Rng>(d: &Diagram, rng: &mut R) -> Option<Vec<MoveSpec>> {
    let first = random_untelescope(d, rng)?;
    let mut script = vec![MoveSpec::Untelescope(Box::new(first.clone()))];
    let mut cur = moves::elementary_thinning_opts(d, &first, moves::width_hypothesis(d)).ok()?;
    let extra = rng.random_range(0..3usize);
    for _ in 0..extra {
        let mut cands: Vec<MoveSpec> = Vec::new();
        for (thin, thick) in moves::find_consolidations(&cur) {
            cands.push(MoveSpec::Consolidate { thin, thick });
        }
        for s in cur.thick_surfaces() {
            let bodies = cur.bodies_at_thick(&s.id);
            if bodies.len() != 2 {
                continue;
            }
            for side in &bodies {
                if cur.bodies[*side].bridge_arcs > 0 {
                    let other = if bodies[0] == *side {
                        bodies[1]
                    } else {
                        bodies[0]
                    };
                    let ob = &cur.bodies[other];
                    if ob.bridge_arcs >= 2 {
                        cands.push(MoveSpec::Unperturb(UnperturbSpec {
                            thick: s.id.clone(),
                            disc_side: (*side).clone(),
                            merge: StrandMerge::TwoBridges,
                        }));
                    }
                    if ob.bridge_arcs >= 1 && ob.vertical_total() >= 1 {
                        cands.push(MoveSpec::Unperturb(UnperturbSpec {
                            thick: s.id.clone(),
                            disc_side: (*side).clone(),
                            merge: StrandMerge::BridgeVertical,
                        }));
                    }
                }
            }
        }
        if cands.is_empty() {
            break;
        }
        let pick = cands.swap_remove(choose_index(rng, cands.len()));
        match moves::apply_move_opts(&cur, &pick, false) {
            Ok(next) => {
                cur = next;
                script.push(pick);
            }
            Err(_) => continue,
        }
    }
    Some(script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfint::Half;
    use crate::invariant::{invariants, netext};

    #[test]
    fn named_builders_validate() {
        for d in [
            empty_ball_pair(),
            bridge_position(0, 1),
            bridge_position(2, 0),
            bridge_position(1, 3),
            solid_torus_pair(true),
            solid_torus_pair(false),
            knot_exterior(2, 1),
            theta_atom(0),
            theta_atom(2),
            width92_stack(),
            width74_stack(),
            circular_netext_zero(2),
            circular_netext_zero(4),
        ] {
            let rep = d.validate();
            assert!(rep.is_valid(), "{}", rep);
        }
    }

    #[test]
    fn circular_netext_zero_is_netext_zero() {
        for k in [2, 4, 6] {
            let d = circular_netext_zero(k);
            let r = invariants(&d).unwrap();
            assert_eq!(r.netext, Half::ZERO);
            assert!(r.all_identities_hold());
        }
    }

    #[test]
    fn theta_netext_half() {
        assert_eq!(netext(&theta_atom(0)), Half::halves(1));
        assert_eq!(netext(&theta_atom(1)), Half::halves(3));
    }

    #[test]
    fn corpus_all_valid() {
        for d in random_corpus(7, 60) {
            let rep = d.validate();
            assert!(rep.is_valid(), "{}", rep);
        }
    }

    #[test]
    fn random_untelescopes_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut found = 0;
        for d in random_corpus(3, 30) {
            if let Some(spec) = random_untelescope(&d, &mut rng) {
                let out =
                    moves::apply_move(&d, &MoveSpec::Untelescope(Box::new(spec))).expect("applies");
                assert!(out.validate().is_valid());
                found += 1;
            }
        }
        assert!(found > 10, "generator found only {} certificates", found);
    }
}
