//! Bounded exploration: a brute-force realizability oracle for small
//! compressionbody summaries, and best-effort minimization of net extent
//! and width over move scripts under a net-Euler-characteristic budget.
//!
//! Minimization results are upper bounds only: candidate certificates
//! are generated from the diagram's combinatorics and no claim is made
//! that each is geometrically realizable.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::certs::{self, CutChoice, SplitData};
use crate::halfint::Half;
use crate::handle::{HandlePresentation, OneHandle, ZeroHandle};
use crate::invariant::{invariants_unchecked, netchi, netext, width, InvariantReport};
use crate::model::{
    BodyId, Compressionbody, Diagram, GraphPairMeta, Role, SurfaceComp, SurfaceId, ValidationReport,
};
use crate::moves::{self, MoveError, MoveSpec, StrandMerge, UnperturbSpec};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("enumeration limits too large: genus ≤ 4, punctures ≤ 10, minus components ≤ 4")]
    LimitsTooLarge,
    #[error("input diagram invalid:\n{0}")]
    InvalidInput(ValidationReport),
    #[error("budget invalid: {0}")]
    BadBudget(String),
    #[error("move error: {0}")]
    Move(#[from] MoveError),
}

/// Budget for the minimization search.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub max_depth: u32,
    pub max_diagrams: usize,
    /// netχ cap x; None means ∞.
    pub netchi_cap: Option<i64>,
    /// Track width minima too; requires the width-hypothesis flags.
    pub width_tracking: bool,
}

impl SearchBudget {
    pub fn new(max_depth: u32, max_diagrams: usize) -> Self {
        SearchBudget {
            max_depth,
            max_diagrams,
            netchi_cap: None,
            width_tracking: false,
        }
    }
}

/// One enumerated body summary together with its realizing handle
/// presentation.
#[derive(Clone, Debug)]
pub struct EnumeratedBody {
    pub body: Compressionbody,
    pub plus: SurfaceComp,
    pub minus: Vec<SurfaceComp>,
    pub witness: HandlePresentation,
}

impl EnumeratedBody {
    /// Throwaway diagram context for validation and δ computation.
    pub fn context(&self) -> Diagram {
        let mut d = Diagram::new(GraphPairMeta::link());
        d.add_surface(self.plus.clone());
        for m in &self.minus {
            d.add_surface(m.clone());
        }
        d
    }
}

/// All distinct multigraphs on `deg.len()` vertices with the given
/// degree sequence (loops allowed), as sorted edge lists.
fn multigraphs(deg: &[u32]) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        deg: &mut Vec<u32>,
        acc: &mut Vec<(usize, usize)>,
        out: &mut BTreeSet<Vec<(usize, usize)>>,
    ) {
        let first = match deg.iter().position(|d| *d > 0) {
            None => {
                let mut edges = acc.clone();
                edges.sort_unstable();
                out.insert(edges);
                return;
            }
            Some(i) => i,
        };
        for j in first..deg.len() {
            let ok = if j == first {
                deg[first] >= 2
            } else {
                deg[j] >= 1
            };
            if !ok {
                continue;
            }
            deg[first] -= 1;
            deg[j] -= 1;
            acc.push((first, j));
            rec(deg, acc, out);
            acc.pop();
            deg[first] += 1;
            deg[j] += 1;
        }
    }
    let mut out = BTreeSet::new();
    let total: u32 = deg.iter().sum();
    if !total.is_multiple_of(2) {
        return Vec::new();
    }
    rec(&mut deg.to_vec(), &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Builds the witnessing handle presentation for a summary: products
/// per ∂₋ component, a ball-arc per bridge, a self-cored ball per core
/// loop, direct cored handles per ghost arc, a plain spanning tree, and
/// plain self-handles padding the genus up to the target.
fn build_witness(
    minus: &[SurfaceComp],
    verticals: &[u32],
    ghost_edges: &[(usize, usize)],
    bridges: u32,
    loops: u32,
    plus_genus: u32,
) -> HandlePresentation {
    let mut h = HandlePresentation::default();
    for (i, m) in minus.iter().enumerate() {
        h.zero_handles.push(ZeroHandle::Product {
            surface: m.id.clone(),
            genus: m.genus,
            strands: verticals[i]
                + ghost_edges
                    .iter()
                    .map(|(a, b)| u32::from(*a == i) + u32::from(*b == i))
                    .sum::<u32>(),
        });
    }
    let k = minus.len();
    // Ghost arcs: cored handles joining product slots, allocated after
    // the vertical slots.
    let mut next_slot: Vec<u32> = verticals.to_vec();
    for (a, b) in ghost_edges {
        let sa = next_slot[*a];
        next_slot[*a] += 1;
        let sb = next_slot[*b];
        next_slot[*b] += 1;
        h.one_handles.push(OneHandle::cored(*a, sa, *b, sb));
    }
    for bball in 0..bridges {
        let _ = bball;
        h.zero_handles.push(ZeroHandle::TrivialBallArc);
    }
    for l in 0..loops {
        let idx = k + bridges as usize + l as usize;
        h.zero_handles.push(ZeroHandle::TrivialBallArc);
        h.one_handles.push(OneHandle::cored(idx, 0, idx, 1));
    }
    if h.zero_handles.is_empty() {
        h.zero_handles.push(ZeroHandle::TrivialBallEmpty);
    }
    // Spanning tree over the current components.
    let n = h.zero_handles.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for one in &h.one_handles {
        let (a, b) = (
            find(&mut parent, one.ends.0.zero_handle),
            find(&mut parent, one.ends.1.zero_handle),
        );
        if a != b {
            parent[a] = b;
        }
    }
    let mut extra: Vec<OneHandle> = Vec::new();
    for i in 1..n {
        let (a, b) = (find(&mut parent, 0), find(&mut parent, i));
        if a != b {
            parent[a] = b;
            extra.push(OneHandle::plain(0, i));
        }
    }
    h.one_handles.extend(extra);
    // Genus padding.
    let minus_genus: u32 = minus.iter().map(|m| m.genus).sum();
    let idx: BTreeMap<usize, usize> = (0..k).map(|i| (i, i)).collect();
    let _ = idx;
    let comp = {
        // Cycle rank of the ghost multigraph over k product vertices.
        let mut parent: Vec<usize> = (0..k.max(1)).collect();
        for (a, b) in ghost_edges {
            let (x, y) = (find(&mut parent, *a), find(&mut parent, *b));
            if x != y {
                parent[x] = y;
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..k {
            roots.insert(find(&mut parent, i));
        }
        roots.len()
    };
    let cycle_rank = if k == 0 {
        0
    } else {
        ghost_edges.len() as i64 - k as i64 + comp as i64
    };
    let base = i64::from(minus_genus) + cycle_rank + i64::from(loops);
    let padding = i64::from(plus_genus) - base;
    debug_assert!(padding >= 0);
    for _ in 0..padding {
        h.one_handles.push(OneHandle::plain(0, 0));
    }
    h
}

/// Enumerates every compressionbody summary passing `validate_body`
/// within the limits, each paired with a witnessing handle presentation.
pub fn enumerate_bodies(
    max_genus: u32,
    max_punctures: u32,
    max_minus: usize,
) -> Result<Vec<EnumeratedBody>, SearchError> {
    if max_genus > 4 || max_punctures > 10 || max_minus > 4 {
        return Err(SearchError::LimitsTooLarge);
    }
    // ∂₋ component shapes; once-punctured spheres are excluded by the
    // validator's hypotheses.
    let mut shapes: Vec<(u32, u32)> = Vec::new();
    for g in 0..=max_genus {
        for p in 0..=max_punctures {
            if g == 0 && p == 1 {
                continue;
            }
            shapes.push((g, p));
        }
    }
    // Multisets of shapes up to max_minus.
    let mut minus_sets: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
    for size in 1..=max_minus {
        let mut level: Vec<Vec<(u32, u32)>> = Vec::new();
        fn fill(
            shapes: &[(u32, u32)],
            start: usize,
            left: usize,
            acc: &mut Vec<(u32, u32)>,
            out: &mut Vec<Vec<(u32, u32)>>,
        ) {
            if left == 0 {
                out.push(acc.clone());
                return;
            }
            for s in start..shapes.len() {
                acc.push(shapes[s]);
                fill(shapes, s, left - 1, acc, out);
                acc.pop();
            }
        }
        fill(&shapes, 0, size, &mut Vec::new(), &mut level);
        minus_sets.extend(level);
    }

    let mut out = Vec::new();
    for minus_shapes in &minus_sets {
        let _k = minus_shapes.len();
        let minus: Vec<SurfaceComp> = minus_shapes
            .iter()
            .enumerate()
            .map(|(i, (g, p))| SurfaceComp::new(format!("f{}", i), Role::Thin, *g, *p))
            .collect();
        // Vertical arc distributions.
        let mut vchoices: Vec<Vec<u32>> = vec![Vec::new()];
        for (_, p) in minus_shapes {
            let mut next = Vec::new();
            for v in &vchoices {
                for x in 0..=*p {
                    let mut vv = v.clone();
                    vv.push(x);
                    next.push(vv);
                }
            }
            vchoices = next;
        }
        for verticals in &vchoices {
            let vtotal: u32 = verticals.iter().sum();
            if vtotal > max_punctures {
                continue;
            }
            let deg: Vec<u32> = minus_shapes
                .iter()
                .zip(verticals)
                .map(|((_, p), v)| p - v)
                .collect();
            for ghost_edges in multigraphs(&deg) {
                for loops in 0..=max_genus {
                    for bridges in 0..=(max_punctures - vtotal) / 2 {
                        let plus_punct = 2 * bridges + vtotal;
                        // Genus from the handle bound up to the cap.
                        let minus_genus: u32 = minus_shapes.iter().map(|(g, _)| *g).sum();
                        let mut probe = Compressionbody::new("body", "plus");
                        probe.minus = minus.iter().map(|m| m.id.clone()).collect();
                        probe.bridge_arcs = bridges;
                        probe.core_loops = loops;
                        for (i, v) in verticals.iter().enumerate() {
                            if *v > 0 {
                                probe.vertical_arcs.insert(minus[i].id.clone(), *v);
                            }
                        }
                        for (a, b) in &ghost_edges {
                            probe
                                .ghost_arcs
                                .push((minus[*a].id.clone(), minus[*b].id.clone()));
                        }
                        let base = i64::from(minus_genus) + probe.genus_lower_bound();
                        if base < 0 || base > i64::from(max_genus) {
                            continue;
                        }
                        for plus_genus in (base as u32)..=max_genus {
                            let plus =
                                SurfaceComp::new("plus", Role::Thick, plus_genus, plus_punct);
                            let eb = EnumeratedBody {
                                body: probe.clone(),
                                plus,
                                minus: minus.clone(),
                                witness: build_witness(
                                    &minus,
                                    verticals,
                                    &ghost_edges,
                                    bridges,
                                    loops,
                                    plus_genus,
                                ),
                            };
                            // The contract: everything emitted passes the
                            // validator.
                            let mut ctx = eb.context();
                            ctx.add_body(eb.body.clone());
                            if ctx.validate_body(&eb.body).is_valid() {
                                out.push(eb);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Classifies an enumerated body by its witness structure alone — the
/// independent route the δ = 0 classifier is checked against. A witness
/// built by the enumerator has δ = 0 exactly when it is a lone ball-arc,
/// a once-padded empty ball, a self-closed ball-arc, or a union of
/// products joined purely by cored handles; anything carrying a plain
/// 1-handle (padding or connector) or extra pieces sits strictly above.
pub fn witness_class(eb: &EnumeratedBody) -> crate::invariant::DeltaZeroClass {
    use crate::invariant::DeltaZeroClass as C;
    let h = &eb.witness;
    let mut ball_arcs = 0usize;
    let mut ball_empties = 0usize;
    let mut products = 0usize;
    for z in &h.zero_handles {
        match z {
            ZeroHandle::TrivialBallArc => ball_arcs += 1,
            ZeroHandle::TrivialBallEmpty => ball_empties += 1,
            ZeroHandle::Product { .. } => products += 1,
        }
    }
    let cored = h.one_handles.iter().filter(|o| o.cored).count();
    let plain = h.one_handles.len() - cored;
    if products == 0 && ball_empties == 0 && ball_arcs == 1 && h.one_handles.is_empty() {
        return C::BallArc;
    }
    if products == 0 && ball_arcs == 0 && ball_empties == 1 && cored == 0 && plain == 1 {
        return C::SolidTorusEmpty;
    }
    if products == 0 && ball_empties == 0 && ball_arcs == 1 && plain == 0 && cored == 1 {
        return C::SolidTorusCore;
    }
    if ball_arcs == 0 && ball_empties == 0 && products >= 1 && plain == 0 {
        return C::VerticalGhostType4;
    }
    C::NotDeltaZero
}

fn hash_one<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Stable isomorphism-invariant colors for surfaces and bodies via
/// iterative refinement.
fn refine_colors(d: &Diagram) -> (BTreeMap<SurfaceId, u64>, BTreeMap<BodyId, u64>) {
    let mut scol: BTreeMap<SurfaceId, u64> = d
        .surfaces
        .values()
        .map(|s| {
            (
                s.id.clone(),
                hash_one(&(s.role as u8, s.genus, s.punctures, s.drilled)),
            )
        })
        .collect();
    let mut bcol: BTreeMap<BodyId, u64> = d
        .bodies
        .values()
        .map(|b| {
            (
                b.id.clone(),
                hash_one(&(b.bridge_arcs, b.core_loops, b.pocket_trees)),
            )
        })
        .collect();
    for _ in 0..(d.surfaces.len() + d.bodies.len() + 2) {
        let mut next_b: BTreeMap<BodyId, u64> = BTreeMap::new();
        for b in d.bodies.values() {
            let mut minus_sig: Vec<(u64, u32, u32)> = b
                .minus
                .iter()
                .map(|m| (scol[m], b.vertical_at(m), b.ghost_degree(m)))
                .collect();
            minus_sig.sort_unstable();
            let mut ghost_sig: Vec<(u64, u64)> = b
                .ghost_arcs
                .iter()
                .map(|(x, y)| {
                    let (a, c) = (scol[x], scol[y]);
                    if a <= c {
                        (a, c)
                    } else {
                        (c, a)
                    }
                })
                .collect();
            ghost_sig.sort_unstable();
            let upward = d.body_upward(b);
            next_b.insert(
                b.id.clone(),
                hash_one(&(bcol[&b.id], scol[&b.plus], minus_sig, ghost_sig, upward)),
            );
        }
        let mut next_s: BTreeMap<SurfaceId, u64> = BTreeMap::new();
        for s in d.surfaces.values() {
            let mut inc: Vec<(u8, u64)> = Vec::new();
            for b in d.bodies.values() {
                if b.plus == s.id {
                    inc.push((0, next_b[&b.id]));
                }
                for m in &b.minus {
                    if *m == s.id {
                        inc.push((1, next_b[&b.id]));
                    }
                }
            }
            inc.sort_unstable();
            next_s.insert(s.id.clone(), hash_one(&(scol[&s.id], inc)));
        }
        if next_s == scol && next_b == bcol {
            break;
        }
        scol = next_s;
        bcol = next_b;
    }
    (scol, bcol)
}

/// Isomorphism-invariant signature used for deduplication.
pub fn canonical_signature(d: &Diagram) -> u64 {
    let (scol, bcol) = refine_colors(d);
    let mut ss: Vec<u64> = scol.values().copied().collect();
    ss.sort_unstable();
    let mut bs: Vec<u64> = bcol.values().copied().collect();
    bs.sort_unstable();
    hash_one(&(d.meta.t_kind as u8, &d.meta.vertex_valences, ss, bs))
}

/// Exact-enough isomorphism test: backtracking over color-respecting
/// body bijections, verifying every surface class between mapped body
/// pairs as multisets of local signatures.
pub fn isomorphic(a: &Diagram, b: &Diagram) -> bool {
    if a.surfaces.len() != b.surfaces.len() || a.bodies.len() != b.bodies.len() {
        return false;
    }
    if canonical_signature(a) != canonical_signature(b) {
        return false;
    }
    let (_, acol) = refine_colors(a);
    let (_, bcol) = refine_colors(b);
    let mut a_ids: Vec<BodyId> = a.bodies.keys().cloned().collect();
    a_ids.sort_by_key(|id| acol[id]);
    let b_ids: Vec<BodyId> = b.bodies.keys().cloned().collect();

    // Local surface signature between a body pair (or single body).
    fn pair_sig(d: &Diagram, s: &SurfaceComp, bodies: &[&BodyId]) -> Vec<(u32, u32)> {
        bodies
            .iter()
            .map(|bid| {
                let body = &d.bodies[*bid];
                (body.vertical_at(&s.id), body.ghost_degree(&s.id))
            })
            .collect()
    }

    struct Ctx<'x> {
        a: &'x Diagram,
        b: &'x Diagram,
        acol: &'x BTreeMap<BodyId, u64>,
        bcol: &'x BTreeMap<BodyId, u64>,
        steps: usize,
    }
    fn consistent(ctx: &Ctx, map: &BTreeMap<BodyId, BodyId>) -> bool {
        // Check every a-surface whose incident bodies are all mapped.
        for s in ctx.a.surfaces.values() {
            let incident: Vec<&BodyId> = match s.role {
                Role::Thick => ctx.a.bodies_at_thick(&s.id),
                _ => ctx.a.bodies_at_minus(&s.id),
            };
            if !incident.iter().all(|i| map.contains_key(*i)) {
                continue;
            }
            let mapped: Vec<&BodyId> = incident.iter().map(|i| &map[*i]).collect();
            // Count a-surfaces with this shape between `incident` and
            // b-surfaces with the shape between `mapped`; the multisets
            // of local signatures must agree.
            let key = |d: &Diagram, t: &SurfaceComp, inc: &[&BodyId]| {
                let dir = d
                    .orientation
                    .get(&t.id)
                    .map(|(src, _)| inc.iter().position(|x| **x == *src));
                (
                    t.role as u8,
                    t.genus,
                    t.punctures,
                    t.drilled,
                    pair_sig(d, t, inc),
                    dir,
                )
            };
            let want = key(ctx.a, s, &incident);
            let count_a = ctx
                .a
                .surfaces
                .values()
                .filter(|t| {
                    let inc_t: Vec<&BodyId> = match t.role {
                        Role::Thick => ctx.a.bodies_at_thick(&t.id),
                        _ => ctx.a.bodies_at_minus(&t.id),
                    };
                    let mut sa: Vec<_> = inc_t.iter().map(|x| (*x).clone()).collect();
                    let mut sb: Vec<_> = incident.iter().map(|x| (*x).clone()).collect();
                    sa.sort();
                    sb.sort();
                    sa == sb && key(ctx.a, t, &inc_t) == want
                })
                .count();
            let count_b = ctx
                .b
                .surfaces
                .values()
                .filter(|t| {
                    let inc_t: Vec<&BodyId> = match t.role {
                        Role::Thick => ctx.b.bodies_at_thick(&t.id),
                        _ => ctx.b.bodies_at_minus(&t.id),
                    };
                    let mut sa: Vec<_> = inc_t.iter().map(|x| (*x).clone()).collect();
                    let mut sb: Vec<_> = mapped.iter().map(|x| (*x).clone()).collect();
                    sa.sort();
                    sb.sort();
                    if sa != sb {
                        return false;
                    }
                    // Local signature must match under the mapped order.
                    let inc_in_order: Vec<&BodyId> = incident.iter().map(|i| &map[*i]).collect();
                    key(ctx.b, t, &inc_in_order) == want
                })
                .count();
            if count_a != count_b {
                return false;
            }
        }
        true
    }
    fn backtrack(
        ctx: &mut Ctx,
        order: &[BodyId],
        pos: usize,
        used: &mut BTreeSet<BodyId>,
        map: &mut BTreeMap<BodyId, BodyId>,
        pool: &[BodyId],
    ) -> bool {
        ctx.steps += 1;
        if ctx.steps > 100_000 {
            return false;
        }
        if pos == order.len() {
            return consistent(ctx, map);
        }
        let aid = &order[pos];
        for bid in pool {
            if used.contains(bid) || ctx.acol[aid] != ctx.bcol[bid] {
                continue;
            }
            map.insert(aid.clone(), bid.clone());
            used.insert(bid.clone());
            if consistent(ctx, map) && backtrack(ctx, order, pos + 1, used, map, pool) {
                return true;
            }
            used.remove(bid);
            map.remove(aid);
        }
        false
    }
    let mut ctx = Ctx {
        a,
        b,
        acol: &acol,
        bcol: &bcol,
        steps: 0,
    };
    backtrack(
        &mut ctx,
        &a_ids,
        0,
        &mut BTreeSet::new(),
        &mut BTreeMap::new(),
        &b_ids,
    )
}

/// Generates candidate moves from the diagram's combinatorics:
/// consolidations, unperturbations, plain and meridional
/// destabilizations, and (as elementary thinnings) untelescope
/// certificates enumerated up to a size cap.
pub fn candidate_moves(d: &Diagram, cap: usize) -> Vec<MoveSpec> {
    let mut out: Vec<MoveSpec> = Vec::new();
    for (thin, thick) in moves::find_consolidations(d) {
        out.push(MoveSpec::Consolidate { thin, thick });
    }
    let thick_ids: Vec<SurfaceId> = d.thick_surfaces().map(|s| s.id.clone()).collect();
    for tid in &thick_ids {
        let bodies = d.bodies_at_thick(tid);
        if bodies.len() != 2 {
            continue;
        }
        // Unperturbations.
        for side in 0..2 {
            let (sb, ob) = (&d.bodies[bodies[side]], &d.bodies[bodies[1 - side]]);
            if sb.bridge_arcs == 0 {
                continue;
            }
            let mut merges: Vec<StrandMerge> = Vec::new();
            if ob.bridge_arcs >= 2 {
                merges.push(StrandMerge::TwoBridges);
            }
            if ob.bridge_arcs >= 1 {
                merges.push(StrandMerge::SameBridge);
                if ob.vertical_total() >= 1 {
                    merges.push(StrandMerge::BridgeVertical);
                }
            }
            let vkeys: Vec<SurfaceId> = ob
                .vertical_arcs
                .iter()
                .filter(|(_, n)| **n > 0)
                .map(|(k, _)| k.clone())
                .collect();
            for (xi, x) in vkeys.iter().enumerate() {
                for y in &vkeys[xi..] {
                    if x == y && ob.vertical_at(x) < 2 {
                        continue;
                    }
                    merges.push(StrandMerge::TwoVerticals(x.clone(), y.clone()));
                }
            }
            for m in merges {
                out.push(MoveSpec::Unperturb(UnperturbSpec {
                    thick: tid.clone(),
                    disc_side: bodies[side].clone(),
                    merge: m,
                }));
            }
        }
        // Plain and meridional destabilizations.
        let h = &d.surfaces[tid];
        if h.genus >= 1 {
            let plain = crate::moves::DestabilizeSpec {
                kind: crate::moves::DestabKind::Plain,
                thick: tid.clone(),
                disc_side: bodies[0].clone(),
                discard: None,
                new_bodies: vec![d.bodies[bodies[0]].clone(), d.bodies[bodies[1]].clone()],
            };
            out.push(MoveSpec::Destabilize(plain));
            for side in 0..2 {
                let sb = &d.bodies[bodies[side]];
                for cut in certs::cut_choices(sb) {
                    if let Ok(cutb) = certs::preview_cut(sb, &cut) {
                        let mut other = d.bodies[bodies[1 - side]].clone();
                        other.bridge_arcs += 1;
                        out.push(MoveSpec::Destabilize(crate::moves::DestabilizeSpec {
                            kind: crate::moves::DestabKind::Meridional,
                            thick: tid.clone(),
                            disc_side: bodies[side].clone(),
                            discard: None,
                            new_bodies: vec![cutb, other],
                        }));
                    }
                }
            }
        }
        // Untelescope certificates.
        for plus_side in 0..2 {
            if out.len() >= cap {
                break;
            }
            let up_id = bodies[plus_side].clone();
            let down_id = bodies[1 - plus_side].clone();
            let up = &d.bodies[&up_id];
            let down = &d.bodies[&down_id];
            let mut up_cuts: Vec<Option<CutChoice>> = vec![None];
            up_cuts.extend(certs::cut_choices(up).into_iter().map(Some).take(2));
            let mut down_cuts: Vec<Option<CutChoice>> = vec![None];
            down_cuts.extend(certs::cut_choices(down).into_iter().map(Some).take(2));
            for up_cut in &up_cuts {
                for down_cut in &down_cuts {
                    let up_body = match up_cut {
                        Some(c) => match certs::preview_cut(up, c) {
                            Ok(b) => b,
                            Err(_) => continue,
                        },
                        None => up.clone(),
                    };
                    let down_body = match down_cut {
                        Some(c) => match certs::preview_cut(down, c) {
                            Ok(b) => b,
                            Err(_) => continue,
                        },
                        None => down.clone(),
                    };
                    let mut up_splits = split_options(&up_body, h.genus);
                    let mut down_splits = split_options(&down_body, h.genus);
                    up_splits.truncate(10);
                    down_splits.truncate(10);
                    for us in &up_splits {
                        for ds in &down_splits {
                            if out.len() >= cap {
                                break;
                            }
                            if let Ok(spec) = certs::build_untelescope(
                                d,
                                tid,
                                &up_id,
                                up_cut.clone(),
                                down_cut.clone(),
                                us.clone(),
                                ds.clone(),
                            ) {
                                out.push(MoveSpec::Untelescope(Box::new(spec)));
                            }
                        }
                    }
                }
            }
        }
    }
    out.truncate(cap);
    out
}

/// Split options for one side of an untelescope: the whole surface
/// (non-separating disc, genus permitting) plus separating splits over
/// the ghost components, bridges, loops, and genus.
fn split_options(body: &Compressionbody, surface_genus: u32) -> Vec<Option<SplitData>> {
    let mut out: Vec<Option<SplitData>> = Vec::new();
    if surface_genus >= 1 {
        out.push(None);
    }
    let comps = certs::ghost_components(body);
    let subset_cap = 8usize;
    let n_subsets = 1usize << comps.len().min(3);
    for mask in 0..n_subsets.min(subset_cap) {
        let mut minus0 = BTreeSet::new();
        for (ci, c) in comps.iter().enumerate().take(3) {
            if mask & (1 << ci) != 0 {
                minus0.extend(c.iter().cloned());
            }
        }
        for bridges0 in 0..=body.bridge_arcs.min(5) {
            for loops0 in 0..=body.core_loops.min(1) {
                for genus0 in 0..=surface_genus.min(2) {
                    out.push(Some(SplitData {
                        minus0: minus0.clone(),
                        bridges0,
                        loops0,
                        genus0,
                    }));
                }
            }
        }
    }
    out
}

/// Result of a minimization run.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub best: Diagram,
    pub report: InvariantReport,
    /// Script reaching `best` from the input; untelescope entries stand
    /// for elementary thinnings.
    pub script: Vec<MoveSpec>,
    /// True when the max_diagrams budget ran out with frontier left.
    pub exhausted: bool,
    pub explored: usize,
}

/// Replays a minimization script: untelescope entries run as elementary
/// thinnings, everything else as a plain move. Returns the trajectory.
pub fn replay(d0: &Diagram, script: &[MoveSpec]) -> Result<Vec<Diagram>, MoveError> {
    let mut out = vec![d0.clone()];
    for m in script {
        let cur = out.last().unwrap();
        let next = match m {
            MoveSpec::Untelescope(u) => moves::elementary_thinning(cur, u)?,
            other => moves::apply_move(cur, other)?,
        };
        out.push(next);
    }
    Ok(out)
}

/// Breadth-limited search over move certificates, minimizing net extent
/// (and width when tracked). The result is an upper-bound certificate
/// for the pair the input diagram certifies.
pub fn minimize(d0: &Diagram, budget: &SearchBudget) -> Result<Minimized, SearchError> {
    let rep = d0.validate();
    if !rep.is_valid() {
        return Err(SearchError::InvalidInput(rep));
    }
    if budget.max_depth == 0 || budget.max_diagrams == 0 {
        return Err(SearchError::BadBudget("limits must be positive".into()));
    }
    if let (Some(cap), Some(g)) = (budget.netchi_cap, d0.meta.heegaard_genus_bound) {
        if cap < 2 * i64::from(g) - 2 {
            return Err(SearchError::BadBudget(format!(
                "netχ cap {} below 2g(M) − 2 = {}",
                cap,
                2 * i64::from(g) - 2
            )));
        }
    }
    if let Some(cap) = budget.netchi_cap {
        if netchi(d0) > cap {
            return Err(SearchError::BadBudget(format!(
                "input diagram has netχ {} above the cap {}",
                netchi(d0),
                cap
            )));
        }
    }
    if budget.width_tracking && !moves::width_hypothesis(d0) {
        return Err(SearchError::BadBudget(
            "width tracking requires the width-hypothesis flags".into(),
        ));
    }

    let score = |d: &Diagram| -> (Half, Half) {
        if budget.width_tracking {
            (netext(d), width(d))
        } else {
            (netext(d), Half::ZERO)
        }
    };

    let mut seen: HashMap<u64, Vec<Diagram>> = HashMap::new();
    let push_seen = |d: &Diagram, seen: &mut HashMap<u64, Vec<Diagram>>| -> bool {
        let sig = canonical_signature(d);
        let bucket = seen.entry(sig).or_default();
        if bucket.iter().any(|x| isomorphic(x, d)) {
            return false;
        }
        bucket.push(d.clone());
        true
    };

    let mut best = d0.clone();
    let mut best_score = score(d0);
    let mut best_script: Vec<MoveSpec> = Vec::new();
    let mut explored = 0usize;
    let mut exhausted = false;

    let mut frontier: VecDeque<(Diagram, Vec<MoveSpec>, u32)> = VecDeque::new();
    push_seen(d0, &mut seen);
    frontier.push_back((d0.clone(), Vec::new(), 0));

    while let Some((cur, script, depth)) = frontier.pop_front() {
        explored += 1;
        if explored > budget.max_diagrams {
            exhausted = true;
            break;
        }
        let s = score(&cur);
        if s < best_score {
            best_score = s;
            best = cur.clone();
            best_script = script.clone();
        }
        if depth >= budget.max_depth {
            continue;
        }
        for cand in candidate_moves(&cur, 160) {
            let applied = match &cand {
                MoveSpec::Untelescope(u) => {
                    moves::elementary_thinning_opts(&cur, u, budget.width_tracking)
                }
                other => moves::apply_move_opts(&cur, other, budget.width_tracking),
            };
            let Ok(next) = applied else { continue };
            if let Some(cap) = budget.netchi_cap {
                if netchi(&next) > cap {
                    continue;
                }
            }
            if !push_seen(&next, &mut seen) {
                continue;
            }
            let mut ns = script.clone();
            ns.push(cand);
            frontier.push_back((next, ns, depth + 1));
        }
    }

    Ok(Minimized {
        report: invariants_unchecked(&best),
        best,
        script: best_script,
        exhausted,
        explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::handle::derive_summary;
    use crate::invariant::{classify_delta_zero, delta, DeltaZeroClass};

    #[test]
    fn small_enumeration_contains_the_ball_bodies() {
        let bodies = enumerate_bodies(0, 2, 0).unwrap();
        // Ball-like summaries with no ∂₋: (B³, ∅) and (B³, arc) among
        // spheres; no others with δ < 0.
        let mut saw_empty = false;
        let mut saw_arc = false;
        for eb in &bodies {
            let mut ctx = eb.context();
            ctx.add_body(eb.body.clone());
            let dl = delta(&ctx, &eb.body);
            if eb.plus.genus == 0 && eb.plus.punctures == 0 && eb.body.bridge_arcs == 0 {
                saw_empty = true;
                assert_eq!(dl, Half::from_int(-1));
            }
            if eb.plus.genus == 0 && eb.plus.punctures == 2 && eb.body.bridge_arcs == 1 {
                saw_arc = true;
                assert_eq!(dl, Half::ZERO);
            }
        }
        assert!(saw_empty && saw_arc);
    }

    #[test]
    fn witnesses_trace_back_to_their_summaries() {
        let bodies = enumerate_bodies(1, 4, 2).unwrap();
        assert!(!bodies.is_empty());
        for eb in &bodies {
            let derived = derive_summary(&eb.witness).expect("witness realizes");
            assert_eq!(derived.plus.genus, eb.plus.genus, "{:?}", eb.witness);
            assert_eq!(derived.plus.punctures, eb.plus.punctures);
            assert_eq!(derived.body.bridge_arcs, eb.body.bridge_arcs);
            assert_eq!(derived.body.core_loops, eb.body.core_loops);
            assert_eq!(derived.body.vertical_arcs, eb.body.vertical_arcs);
            assert_eq!(derived.body.ghost_arcs, eb.body.ghost_arcs);
        }
    }

    #[test]
    fn delta_nonnegative_in_small_range() {
        for eb in enumerate_bodies(1, 4, 2).unwrap() {
            let mut ctx = eb.context();
            ctx.add_body(eb.body.clone());
            let dl = delta(&ctx, &eb.body);
            let empty_ball = eb.body.looks_like_empty_ball(&eb.plus);
            if empty_ball {
                assert_eq!(dl, Half::from_int(-1));
            } else {
                assert!(dl >= Half::ZERO, "δ = {} for {:?}", dl, eb.body);
            }
            if dl == Half::ZERO {
                let class = classify_delta_zero(&ctx, &eb.body).unwrap();
                assert_ne!(class, DeltaZeroClass::NotDeltaZero, "{:?}", eb.body);
            }
        }
    }

    #[test]
    fn signature_invariant_under_relabeling() {
        let d = corpus::width92_stack();
        let text = crate::textfmt::print(&d);
        // Relabel by parsing a textually renamed copy.
        let renamed = text
            .replace("h1", "x1")
            .replace("h2", "x2")
            .replace("h3", "x3")
            .replace("w1", "q1");
        let d2 = crate::textfmt::parse(&renamed).unwrap();
        assert_eq!(canonical_signature(&d), canonical_signature(&d2));
        assert!(isomorphic(&d, &d2));
        // A genuinely different diagram does not collide.
        let other = corpus::width74_stack();
        assert!(!isomorphic(&d, &other));
    }

    #[test]
    fn minimize_unknot_finds_nothing_better() {
        let d = corpus::bridge_position(0, 1);
        let m = minimize(&d, &SearchBudget::new(2, 500)).unwrap();
        assert_eq!(m.report.netext, Half::ZERO);
    }

    #[test]
    fn minimize_respects_netchi_cap() {
        let d = corpus::width92_stack();
        let mut budget = SearchBudget::new(2, 300);
        budget.netchi_cap = Some(netchi(&d));
        let m = minimize(&d, &budget).unwrap();
        assert!(netchi(&m.best) <= netchi(&d));
        // Replay and re-check monotonicity along the script.
        let traj = replay(&d, &m.script).unwrap();
        for w in traj.windows(2) {
            assert!(netext(&w[1]) <= netext(&w[0]));
            assert!(netchi(&w[1]) <= netchi(&w[0]));
        }
    }
}

#[cfg(test)]
mod regression_tests {
    use super::*;
    use crate::corpus;
    use crate::sums::{glue, SumAttach, SumPoint};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Subadditivity direction: with an equal total move budget (the
    /// whole gets the sum of the part depths), the glued diagram never
    /// minimizes above the sum of the factor minima.
    #[test]
    fn minimize_subadditive_over_gluings() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let part_budget = SearchBudget::new(1, 250);
        let whole_budget = SearchBudget::new(2, 500);
        for _ in 0..6 {
            let d1 = corpus::random_atom(&mut rng);
            let d2 = corpus::random_atom(&mut rng);
            let point = |d: &Diagram| SumPoint {
                body: d
                    .bodies
                    .values()
                    .find(|b| b.bridge_arcs > 0)
                    .unwrap()
                    .id
                    .clone(),
                attach: SumAttach::OnBridge,
            };
            let whole = glue(&d1, &point(&d1), &d2, &point(&d2)).expect("atoms glue");
            let mw = minimize(&whole, &whole_budget).unwrap().report.netext;
            let m1 = minimize(&d1, &part_budget).unwrap().report.netext;
            let m2 = minimize(&d2, &part_budget).unwrap().report.netext;
            assert!(
                mw <= m1 + m2,
                "minimize(glue) = {} exceeds {} + {}",
                mw,
                m1,
                m2
            );
        }
    }

    #[test]
    fn guards_reject_bad_inputs() {
        assert!(matches!(
            enumerate_bodies(5, 6, 3),
            Err(SearchError::LimitsTooLarge)
        ));
        // x must be at least 2·g(M) − 2 when the genus bound is asserted.
        let mut d = corpus::bridge_position(1, 2);
        d.meta.heegaard_genus_bound = Some(3);
        let mut budget = SearchBudget::new(1, 10);
        budget.netchi_cap = Some(1);
        assert!(matches!(
            minimize(&d, &budget),
            Err(SearchError::BadBudget(_))
        ));
        assert!(matches!(
            minimize(&d, &SearchBudget::new(0, 10)),
            Err(SearchError::BadBudget(_))
        ));
    }

    #[test]
    fn ball_enumeration_at_tiny_limits() {
        // limits (0, 2, 0): among ball-like summaries only (B³, ∅) and
        // (B³, arc) appear.
        let bodies = enumerate_bodies(0, 2, 0).unwrap();
        let mut shapes: Vec<(u32, u32, u32, u32)> = bodies
            .iter()
            .map(|eb| {
                (
                    eb.plus.genus,
                    eb.plus.punctures,
                    eb.body.bridge_arcs,
                    eb.body.core_loops,
                )
            })
            .collect();
        shapes.sort_unstable();
        assert_eq!(shapes, vec![(0, 0, 0, 0), (0, 2, 1, 0)]);
    }

    /// The width-92 stack searches down to at most 74 within depth 2.
    #[test]
    fn width92_depth2_reaches_74() {
        let mut d = corpus::width92_stack();
        d.meta.irreducible = true;
        d.meta.every_sphere_separates = true;
        let budget = SearchBudget {
            max_depth: 2,
            max_diagrams: 1500,
            netchi_cap: None,
            width_tracking: true,
        };
        let m = minimize(&d, &budget).unwrap();
        assert!(
            m.report.width <= Half::from_int(74),
            "found {}",
            m.report.width
        );
        // Unperturbations may legitimately lower netext below the input's.
        assert!(m.report.netext <= netext(&d));
    }
}
