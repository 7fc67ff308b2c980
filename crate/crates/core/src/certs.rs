//! Construction of untelescope certificates from high-level choices.
//!
//! A full [`UntelescopeSpec`] spells out every new surface and body. This
//! module derives all of that from the geometric-style choices: which
//! decoration each disc punctures, and how each side splits when its
//! disc separates. The region bookkeeping (which f-parts exist, where
//! the disc-remnant ghost arcs run, how verticals distribute) follows
//! from those choices.

use std::collections::BTreeSet;

use crate::model::{BodyId, Compressionbody, Diagram, Role, SurfaceId};
use crate::moves::{MoveError, PartSpec, UntelescopeSpec};

/// Which decoration of a body a disc punctures (i or j = 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutChoice {
    Bridge,
    Vertical(SurfaceId),
    /// Index into the body's ghost arc list.
    Ghost(usize),
    Loop,
}

/// How a side splits under a separating disc: the part listed here is
/// the one *not* containing the other disc's remnant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitData {
    pub minus0: BTreeSet<SurfaceId>,
    pub bridges0: u32,
    pub loops0: u32,
    pub genus0: u32,
}

/// All cut choices a body offers, one per decoration kind and target.
pub fn cut_choices(body: &Compressionbody) -> Vec<CutChoice> {
    let mut out = Vec::new();
    if body.bridge_arcs > 0 {
        out.push(CutChoice::Bridge);
    }
    for (sid, n) in &body.vertical_arcs {
        if *n > 0 {
            out.push(CutChoice::Vertical(sid.clone()));
        }
    }
    for idx in 0..body.ghost_arcs.len() {
        out.push(CutChoice::Ghost(idx));
    }
    if body.core_loops > 0 {
        out.push(CutChoice::Loop);
    }
    out
}

/// Applies a disc cut to a body's decorations without touching the
/// diagram: the punctured strand is severed, gaining two endpoints on
/// the compressed surface.
pub fn preview_cut(body: &Compressionbody, cut: &CutChoice) -> Result<Compressionbody, MoveError> {
    cut_body(body, cut)
}

/// Applies a disc cut to a body's decorations: the punctured strand is
/// severed, gaining two endpoints on the compressed surface.
fn cut_body(body: &Compressionbody, cut: &CutChoice) -> Result<Compressionbody, MoveError> {
    let mut b = body.clone();
    match cut {
        CutChoice::Bridge => {
            if b.bridge_arcs == 0 {
                return Err(MoveError::BadCertificate("no bridge arc to cut".into()));
            }
            b.bridge_arcs += 1;
        }
        CutChoice::Vertical(f) => {
            if b.vertical_at(f) == 0 {
                return Err(MoveError::BadCertificate(format!(
                    "no vertical arc into {}",
                    f
                )));
            }
            b.bridge_arcs += 1;
        }
        CutChoice::Ghost(idx) => {
            if *idx >= b.ghost_arcs.len() {
                return Err(MoveError::BadCertificate("ghost index out of range".into()));
            }
            let (x, y) = b.ghost_arcs.remove(*idx);
            *b.vertical_arcs.entry(x).or_insert(0) += 1;
            *b.vertical_arcs.entry(y).or_insert(0) += 1;
        }
        CutChoice::Loop => {
            if b.core_loops == 0 {
                return Err(MoveError::BadCertificate("no core loop to cut".into()));
            }
            b.core_loops -= 1;
            b.bridge_arcs += 1;
        }
    }
    Ok(b)
}

/// Splits a (post-cut) body into part 0 (per the split data) and part 1
/// (the rest). Ghost arcs must not straddle the parts.
/// One split part: the body decorations plus the part's genus and
/// punctures.
type SplitPart = (Compressionbody, u32, u32);

fn split_body(
    body: &Compressionbody,
    split: &SplitData,
    surface_genus: impl Fn(&SurfaceId) -> u32,
    total_genus: u32,
) -> Result<(SplitPart, SplitPart), MoveError> {
    if split.bridges0 > body.bridge_arcs
        || split.loops0 > body.core_loops
        || split.genus0 > total_genus
    {
        return Err(MoveError::BadCertificate("split exceeds the body".into()));
    }
    for m in &split.minus0 {
        if !body.minus.iter().any(|x| x == m) {
            return Err(MoveError::BadCertificate(format!(
                "{} not in ∂₋ of the body",
                m
            )));
        }
    }
    let mut part0 = Compressionbody::new("part0", "p0");
    let mut part1 = Compressionbody::new("part1", "p1");
    part0.bridge_arcs = split.bridges0;
    part1.bridge_arcs = body.bridge_arcs - split.bridges0;
    part0.core_loops = split.loops0;
    part1.core_loops = body.core_loops - split.loops0;
    for m in &body.minus {
        if split.minus0.contains(m) {
            part0.minus.push(m.clone());
        } else {
            part1.minus.push(m.clone());
        }
    }
    for (sid, n) in &body.vertical_arcs {
        if split.minus0.contains(sid) {
            part0.vertical_arcs.insert(sid.clone(), *n);
        } else {
            part1.vertical_arcs.insert(sid.clone(), *n);
        }
    }
    for (a, b) in &body.ghost_arcs {
        match (split.minus0.contains(a), split.minus0.contains(b)) {
            (true, true) => part0.ghost_arcs.push((a.clone(), b.clone())),
            (false, false) => part1.ghost_arcs.push((a.clone(), b.clone())),
            _ => {
                return Err(MoveError::BadCertificate(
                    "split cuts a ghost arc across the parts".into(),
                ))
            }
        }
    }
    // Genus and punctures of the two surface parts; validity of the
    // per-part genus bound is left to the engine.
    let p0 = 2 * part0.bridge_arcs + part0.vertical_total();
    let p1 = 2 * part1.bridge_arcs + part1.vertical_total();
    let _ = surface_genus;
    Ok((
        (part0, split.genus0, p0),
        (part1, total_genus - split.genus0, p1),
    ))
}

/// Derives a complete untelescope certificate from the side choices.
///
/// `up_cut`/`down_cut` give i and j (`Some` = 1). `up_split`/`down_split`
/// select separating discs; `None` is a non-separating compression and
/// needs positive genus on the thick surface.
#[allow(clippy::too_many_arguments)]
pub fn build_untelescope(
    d: &Diagram,
    thick: &SurfaceId,
    plus_side: &BodyId,
    up_cut: Option<CutChoice>,
    down_cut: Option<CutChoice>,
    up_split: Option<SplitData>,
    down_split: Option<SplitData>,
) -> Result<UntelescopeSpec, MoveError> {
    let h = d
        .surfaces
        .get(thick)
        .ok_or_else(|| MoveError::UnknownSurface(thick.clone()))?;
    if h.role != Role::Thick {
        return Err(MoveError::WrongRole(thick.clone()));
    }
    let adjacent = d.bodies_at_thick(thick);
    if adjacent.len() != 2 {
        return Err(MoveError::BadCertificate(
            "thick surface needs two bodies".into(),
        ));
    }
    if !adjacent.contains(&plus_side) {
        return Err(MoveError::UnknownBody(plus_side.clone()));
    }
    let down_id = if adjacent[0] == plus_side {
        adjacent[1].clone()
    } else {
        adjacent[0].clone()
    };
    let up = &d.bodies[plus_side];
    let down = &d.bodies[&down_id];

    let i = u8::from(up_cut.is_some());
    let j = u8::from(down_cut.is_some());
    let up_cutbody = match &up_cut {
        Some(c) => cut_body(up, c)?,
        None => up.clone(),
    };
    let down_cutbody = match &down_cut {
        Some(c) => cut_body(down, c)?,
        None => down.clone(),
    };

    let genus_of = |sid: &SurfaceId| d.surfaces.get(sid).map_or(0, |s| s.genus);

    // Fresh ids. Stems keep the certificate readable in traces.
    let mut taken: BTreeSet<String> = d.surfaces.keys().map(|s| s.0.clone()).collect();
    let mut fresh_sid = |stem: &str| -> SurfaceId {
        let mut n = 0;
        loop {
            let cand = format!("{}{}", stem, n);
            if !taken.contains(&cand) {
                taken.insert(cand.clone());
                return SurfaceId(cand);
            }
            n += 1;
        }
    };
    let mut taken_b: BTreeSet<String> = d.bodies.keys().map(|b| b.0.clone()).collect();
    let mut fresh_bid = |stem: &str| -> BodyId {
        let mut n = 0;
        loop {
            let cand = format!("{}{}", stem, n);
            if !taken_b.contains(&cand) {
                taken_b.insert(cand.clone());
                return BodyId(cand);
            }
            n += 1;
        }
    };

    // Plus side parts and outer bodies.
    struct Side {
        parts: Vec<PartSpec>,
        outer: Vec<Compressionbody>,
        /// (genus, punctures) of the non-host part copy in F, if split.
        nonhost: Option<(u32, u32)>,
    }
    let build_side = |cutbody: &Compressionbody,
                      split: &Option<SplitData>,
                      extra_p: u8,
                      part_stem: &str,
                      body_stem: &str,
                      fresh_sid: &mut dyn FnMut(&str) -> SurfaceId,
                      fresh_bid: &mut dyn FnMut(&str) -> BodyId|
     -> Result<Side, MoveError> {
        match split {
            None => {
                if h.genus == 0 {
                    return Err(MoveError::BadCertificate(
                        "non-separating compression needs genus ≥ 1".into(),
                    ));
                }
                let pid = fresh_sid(part_stem);
                let punct = h.punctures + 2 * u32::from(extra_p);
                let mut outer = cutbody.clone();
                outer.id = fresh_bid(body_stem);
                outer.plus = pid.clone();
                Ok(Side {
                    parts: vec![PartSpec {
                        id: pid,
                        genus: h.genus - 1,
                        punctures: punct,
                    }],
                    outer: vec![outer],
                    nonhost: None,
                })
            }
            Some(sd) => {
                if cutbody.pocket_trees > 0 {
                    return Err(MoveError::BadCertificate(
                        "cannot split a pocket-tree body".into(),
                    ));
                }
                let ((b0, g0, p0), (b1, g1, p1)) = split_body(cutbody, sd, genus_of, h.genus)?;
                let id0 = fresh_sid(part_stem);
                let id1 = fresh_sid(part_stem);
                let mut outer0 = b0;
                outer0.id = fresh_bid(body_stem);
                outer0.plus = id0.clone();
                let mut outer1 = b1;
                outer1.id = fresh_bid(body_stem);
                outer1.plus = id1.clone();
                Ok(Side {
                    parts: vec![
                        PartSpec {
                            id: id0,
                            genus: g0,
                            punctures: p0,
                        },
                        PartSpec {
                            id: id1,
                            genus: g1,
                            punctures: p1,
                        },
                    ],
                    outer: vec![outer0, outer1],
                    nonhost: Some((g0, p0)),
                })
            }
        }
    };
    let plus = build_side(
        &up_cutbody,
        &up_split,
        i,
        "hp",
        "bp",
        &mut fresh_sid,
        &mut fresh_bid,
    )?;
    let minus = build_side(
        &down_cutbody,
        &down_split,
        j,
        "hm",
        "bm",
        &mut fresh_sid,
        &mut fresh_bid,
    )?;

    // F parts and inner bodies, by region configuration.
    let iu = u32::from(i);
    let ju = u32::from(j);
    let total_f_p = h.punctures + 2 * iu + 2 * ju;
    let mut f_parts: Vec<PartSpec> = Vec::new();
    let mut inner_plus: Vec<Compressionbody> = Vec::new();
    let mut inner_minus: Vec<Compressionbody> = Vec::new();

    let vertical_body = |id: BodyId, plus: &SurfaceId, f: &SurfaceId, v: u32| {
        let mut b = Compressionbody::new("x", "x");
        b.id = id;
        b.plus = plus.clone();
        b.minus = vec![f.clone()];
        if v > 0 {
            b.vertical_arcs.insert(f.clone(), v);
        }
        b
    };

    match (&plus.nonhost, &minus.nonhost) {
        (None, None) => {
            // Both discs non-separating, jointly non-separating: F is one
            // component of genus g − 2.
            if h.genus < 2 {
                return Err(MoveError::BadCertificate(
                    "connected F needs genus ≥ 2".into(),
                ));
            }
            let fid = fresh_sid("f");
            f_parts.push(PartSpec {
                id: fid.clone(),
                genus: h.genus - 2,
                punctures: total_f_p,
            });
            let mut ip = vertical_body(
                fresh_bid("ip"),
                &plus.parts[0].id,
                &fid,
                h.punctures + 2 * iu,
            );
            for _ in 0..ju {
                ip.ghost_arcs.push((fid.clone(), fid.clone()));
            }
            inner_plus.push(ip);
            let mut im = vertical_body(
                fresh_bid("im"),
                &minus.parts[0].id,
                &fid,
                h.punctures + 2 * ju,
            );
            for _ in 0..iu {
                im.ghost_arcs.push((fid.clone(), fid.clone()));
            }
            inner_minus.push(im);
        }
        (Some((ga, pa)), None) => {
            // D₊ separating, D₋ non-separating in the host plus part.
            let (g_host, p_host) = (plus.parts[1].genus, plus.parts[1].punctures);
            if g_host == 0 {
                return Err(MoveError::BadCertificate(
                    "host part needs genus ≥ 1 for the non-separating lower disc".into(),
                ));
            }
            if *pa < iu || p_host + 2 * ju < iu {
                return Err(MoveError::BadCertificate(
                    "non-host part lacks disc punctures".into(),
                ));
            }
            let fa = fresh_sid("f");
            let fb = fresh_sid("f");
            f_parts.push(PartSpec {
                id: fa.clone(),
                genus: *ga,
                punctures: *pa,
            });
            f_parts.push(PartSpec {
                id: fb.clone(),
                genus: g_host - 1,
                punctures: p_host + 2 * ju,
            });
            // Inner plus: trivial product over the non-host part; the host
            // part compresses along the lower disc remnant.
            inner_plus.push(vertical_body(fresh_bid("ip"), &plus.parts[0].id, &fa, *pa));
            let mut ip_host = vertical_body(fresh_bid("ip"), &plus.parts[1].id, &fb, p_host);
            for _ in 0..ju {
                ip_host.ghost_arcs.push((fb.clone(), fb.clone()));
            }
            inner_plus.push(ip_host);
            // Inner minus: one body over the whole lower part, seeing both
            // f-parts; the upper disc remnant runs between them.
            let mut im = Compressionbody::new("x", "x");
            im.id = fresh_bid("im");
            im.plus = minus.parts[0].id.clone();
            im.minus = vec![fa.clone(), fb.clone()];
            let va = pa - iu;
            let vb = p_host + 2 * ju - iu;
            if va > 0 {
                im.vertical_arcs.insert(fa.clone(), va);
            }
            if vb > 0 {
                im.vertical_arcs.insert(fb.clone(), vb);
            }
            for _ in 0..iu {
                im.ghost_arcs.push((fa.clone(), fb.clone()));
            }
            inner_minus.push(im);
        }
        (None, Some((ga, pa))) => {
            // Mirror case: D₋ separating, D₊ non-separating.
            let (g_host, p_host) = (minus.parts[1].genus, minus.parts[1].punctures);
            if g_host == 0 {
                return Err(MoveError::BadCertificate(
                    "host part needs genus ≥ 1 for the non-separating upper disc".into(),
                ));
            }
            if *pa < ju || p_host + 2 * iu < ju {
                return Err(MoveError::BadCertificate(
                    "non-host part lacks disc punctures".into(),
                ));
            }
            let fa = fresh_sid("f");
            let fb = fresh_sid("f");
            f_parts.push(PartSpec {
                id: fa.clone(),
                genus: *ga,
                punctures: *pa,
            });
            f_parts.push(PartSpec {
                id: fb.clone(),
                genus: g_host - 1,
                punctures: p_host + 2 * iu,
            });
            inner_minus.push(vertical_body(fresh_bid("im"), &minus.parts[0].id, &fa, *pa));
            let mut im_host = vertical_body(fresh_bid("im"), &minus.parts[1].id, &fb, p_host);
            for _ in 0..iu {
                im_host.ghost_arcs.push((fb.clone(), fb.clone()));
            }
            inner_minus.push(im_host);
            let mut ip = Compressionbody::new("x", "x");
            ip.id = fresh_bid("ip");
            ip.plus = plus.parts[0].id.clone();
            ip.minus = vec![fa.clone(), fb.clone()];
            let va = pa - ju;
            let vb = p_host + 2 * iu - ju;
            if va > 0 {
                ip.vertical_arcs.insert(fa.clone(), va);
            }
            if vb > 0 {
                ip.vertical_arcs.insert(fb.clone(), vb);
            }
            for _ in 0..ju {
                ip.ghost_arcs.push((fa.clone(), fb.clone()));
            }
            inner_plus.push(ip);
        }
        (Some((ga, pa)), Some((gb, pb))) => {
            // Both discs separating: three f-parts (copies of the two
            // non-host parts and the middle region between the discs).
            if h.genus < ga + gb {
                return Err(MoveError::BadCertificate(
                    "split genera exceed the surface".into(),
                ));
            }
            let g_mid = h.genus - ga - gb;
            if total_f_p < pa + pb {
                return Err(MoveError::BadCertificate(
                    "split punctures exceed the surface".into(),
                ));
            }
            let p_mid = total_f_p - pa - pb;
            if *pa < iu || *pb < ju || p_mid < iu.max(ju) {
                return Err(MoveError::BadCertificate(
                    "disc punctures cannot reach the middle region".into(),
                ));
            }
            let f_a = fresh_sid("f");
            let f_mid = fresh_sid("f");
            let f_b = fresh_sid("f");
            f_parts.push(PartSpec {
                id: f_a.clone(),
                genus: *ga,
                punctures: *pa,
            });
            f_parts.push(PartSpec {
                id: f_mid.clone(),
                genus: g_mid,
                punctures: p_mid,
            });
            f_parts.push(PartSpec {
                id: f_b.clone(),
                genus: *gb,
                punctures: *pb,
            });

            inner_plus.push(vertical_body(fresh_bid("ip"), &plus.parts[0].id, &f_a, *pa));
            let mut ip_host = Compressionbody::new("x", "x");
            ip_host.id = fresh_bid("ip");
            ip_host.plus = plus.parts[1].id.clone();
            ip_host.minus = vec![f_mid.clone(), f_b.clone()];
            let v_mid = p_mid - ju;
            let v_b = pb - ju;
            if v_mid > 0 {
                ip_host.vertical_arcs.insert(f_mid.clone(), v_mid);
            }
            if v_b > 0 {
                ip_host.vertical_arcs.insert(f_b.clone(), v_b);
            }
            for _ in 0..ju {
                ip_host.ghost_arcs.push((f_mid.clone(), f_b.clone()));
            }
            inner_plus.push(ip_host);

            inner_minus.push(vertical_body(
                fresh_bid("im"),
                &minus.parts[0].id,
                &f_b,
                *pb,
            ));
            let mut im_host = Compressionbody::new("x", "x");
            im_host.id = fresh_bid("im");
            im_host.plus = minus.parts[1].id.clone();
            im_host.minus = vec![f_a.clone(), f_mid.clone()];
            let w_mid = p_mid - iu;
            let w_a = pa - iu;
            if w_a > 0 {
                im_host.vertical_arcs.insert(f_a.clone(), w_a);
            }
            if w_mid > 0 {
                im_host.vertical_arcs.insert(f_mid.clone(), w_mid);
            }
            for _ in 0..iu {
                im_host.ghost_arcs.push((f_a.clone(), f_mid.clone()));
            }
            inner_minus.push(im_host);
        }
    }

    let separating = up_split.is_some() || down_split.is_some();
    Ok(UntelescopeSpec {
        thick: thick.clone(),
        plus_side: plus_side.clone(),
        disc_plus_punctures: i,
        disc_minus_punctures: j,
        plus_parts: plus.parts,
        minus_parts: minus.parts,
        f_parts,
        outer_plus: plus.outer,
        inner_plus,
        inner_minus,
        outer_minus: minus.outer,
        separating_disc: separating,
        joint_nonseparating: !separating,
    })
}

/// Connected groups of a body's ∂₋ surfaces under ghost arcs, plus the
/// constraint tokens a separating split may distribute freely.
pub fn ghost_components(body: &Compressionbody) -> Vec<BTreeSet<SurfaceId>> {
    let g = body.ghost_graph();
    let mut groups: Vec<BTreeSet<SurfaceId>> = Vec::new();
    let mut placed: BTreeSet<SurfaceId> = BTreeSet::new();
    for v in &g.vertices {
        if placed.contains(v) {
            continue;
        }
        // Flood fill over ghost edges.
        let mut group = BTreeSet::new();
        let mut stack = vec![v.clone()];
        while let Some(x) = stack.pop() {
            if !group.insert(x.clone()) {
                continue;
            }
            for (a, b) in &g.edges {
                if *a == x && !group.contains(b) {
                    stack.push(b.clone());
                }
                if *b == x && !group.contains(a) {
                    stack.push(a.clone());
                }
            }
        }
        placed.extend(group.iter().cloned());
        groups.push(group);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::invariant::invariants;
    use crate::moves::elementary_thinning;

    #[test]
    fn end_block_thinning_reduces_width() {
        // Untelescope the top thick sphere of the width-92 diagram with
        // both discs separating: 2 bridges cut off above, the bridge
        // block cut off below.
        let d = corpus::width92_stack();
        let up = SplitData {
            minus0: BTreeSet::new(),
            bridges0: 2,
            loops0: 0,
            genus0: 0,
        };
        let down = SplitData {
            minus0: BTreeSet::new(),
            bridges0: 3,
            loops0: 0,
            genus0: 0,
        };
        let spec = build_untelescope(
            &d,
            &SurfaceId("h3".into()),
            &BodyId("bt".into()),
            None,
            None,
            Some(up),
            Some(down),
        )
        .unwrap();
        let out = elementary_thinning(&d, &spec).unwrap();
        let before = invariants(&d).unwrap();
        let after = invariants(&out).unwrap();
        assert_eq!(after.netext, before.netext);
        assert_eq!(after.netchi, before.netchi);
        assert!(
            after.width < before.width,
            "{} < {}",
            after.width,
            before.width
        );
        assert!(after.all_identities_hold());
    }

    #[test]
    fn cut_ghost_turns_into_verticals() {
        let d = corpus::circular_netext_zero(2);
        let body = d
            .bodies
            .values()
            .find(|b| !b.ghost_arcs.is_empty())
            .unwrap();
        let cut = cut_body(body, &CutChoice::Ghost(0)).unwrap();
        assert_eq!(cut.ghost_arcs.len(), body.ghost_arcs.len() - 1);
        assert_eq!(cut.vertical_total(), body.vertical_total() + 2);
    }
}
