//! Self-verifying demo cases: each builds its diagrams, computes the
//! expected values, and prints PASS or FAIL.

use std::collections::BTreeSet;

use anyhow::{anyhow, Result};

use vpbridge_core::bounds::{morimoto_bounds, tunnel_bounds, SummandProfile};
use vpbridge_core::certs::{build_untelescope, SplitData};
use vpbridge_core::corpus;
use vpbridge_core::halfint::Half;
use vpbridge_core::invariant::{classify_delta_zero, delta, invariants, DeltaZeroClass};
use vpbridge_core::model::{BodyId, SurfaceId};
use vpbridge_core::moves::elementary_thinning;
use vpbridge_core::search::{minimize, SearchBudget};
use vpbridge_core::sums::{additivity_check, glue, split_prime, SumAttach, SumPoint};

struct Outcome {
    label: String,
    pass: bool,
}

fn check(outcomes: &mut Vec<Outcome>, label: impl Into<String>, pass: bool) {
    outcomes.push(Outcome {
        label: label.into(),
        pass,
    });
}

fn case_widths(quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let wide = corpus::width92_stack();
    let thin = corpus::width74_stack();
    let rw = invariants(&wide).map_err(|e| anyhow!("{}", e))?;
    let rt = invariants(&thin).map_err(|e| anyhow!("{}", e))?;
    if !quiet {
        println!("{}", rw.width);
        println!("{}", rt.width);
    }
    check(
        &mut out,
        "width of the wide diagram is 92",
        rw.width == Half::from_int(92),
    );
    check(
        &mut out,
        "width of the thinned diagram is 74",
        rt.width == Half::from_int(74),
    );
    check(
        &mut out,
        "identities hold on both",
        rw.all_identities_hold() && rt.all_identities_hold(),
    );
    Ok(out)
}

fn case_thinning(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let wide = corpus::width92_stack();
    let before = invariants(&wide).map_err(|e| anyhow!("{}", e))?;
    // One elementary thinning on the top thick sphere with both discs
    // separating: bridges split 2|3 above, the whole bridge block cut
    // off below.
    let spec = build_untelescope(
        &wide,
        &SurfaceId("h3".into()),
        &BodyId("bt".into()),
        None,
        None,
        Some(SplitData {
            minus0: BTreeSet::new(),
            bridges0: 2,
            loops0: 0,
            genus0: 0,
        }),
        Some(SplitData {
            minus0: BTreeSet::new(),
            bridges0: 3,
            loops0: 0,
            genus0: 0,
        }),
    )
    .map_err(|e| anyhow!("{}", e))?;
    let thinned = elementary_thinning(&wide, &spec).map_err(|e| anyhow!("{}", e))?;
    let after = invariants(&thinned).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "elementary thinning preserves netext",
        after.netext == before.netext,
    );
    check(
        &mut out,
        "elementary thinning preserves netchi",
        after.netchi == before.netchi,
    );
    check(&mut out, "width decreased", after.width < before.width);
    // Depth-2 search certifies width ≤ 74.
    let mut wide_flagged = wide.clone();
    wide_flagged.meta.irreducible = true;
    wide_flagged.meta.every_sphere_separates = true;
    let budget = SearchBudget {
        max_depth: 2,
        max_diagrams: 1500,
        netchi_cap: None,
        width_tracking: true,
    };
    let m = minimize(&wide_flagged, &budget).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        format!("search finds width {} <= 74", m.report.width),
        m.report.width <= Half::from_int(74),
    );
    Ok(out)
}

fn case_circular(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let d = corpus::circular_netext_zero(4);
    let r = invariants(&d).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "circular diagram has netext 0",
        r.netext == Half::ZERO,
    );
    check(&mut out, "global identities hold", r.all_identities_hold());
    Ok(out)
}

fn case_gabai(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let d = corpus::bridge_position(0, 2);
    let r = invariants(&d).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "2-bridge position has netext 1",
        r.netext == Half::from_int(1),
    );
    check(
        &mut out,
        "2-bridge position has Gabai width 8",
        r.gabai_width == Some(Half::from_int(8)),
    );
    Ok(out)
}

fn case_delta(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let d = corpus::empty_ball_pair();
    let b = d.bodies.values().next().unwrap();
    check(
        &mut out,
        "delta(B3, empty) = -1",
        delta(&d, b) == Half::from_int(-1),
    );

    let d = corpus::bridge_position(0, 1);
    let b = d.bodies.values().next().unwrap();
    check(&mut out, "delta(B3, arc) = 0", delta(&d, b) == Half::ZERO);
    check(
        &mut out,
        "classified as ball_arc",
        classify_delta_zero(&d, b).map_err(|e| anyhow!("{}", e))? == DeltaZeroClass::BallArc,
    );

    let d = corpus::solid_torus_pair(true);
    let b = d.bodies.values().find(|b| b.core_loops == 1).unwrap();
    check(
        &mut out,
        "delta(solid torus, core) = 0",
        delta(&d, b) == Half::ZERO,
    );
    check(
        &mut out,
        "classified as solid_torus_core",
        classify_delta_zero(&d, b).map_err(|e| anyhow!("{}", e))? == DeltaZeroClass::SolidTorusCore,
    );
    Ok(out)
}

fn case_morimoto(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let a = morimoto_bounds(0, 3).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "(0,3) -> max=2 min11=2 min2bridge=2",
        a == (2, 2, 2),
    );
    let b = morimoto_bounds(1, 2).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "(1,2) -> max=2 min11=2 min2bridge=1",
        b == (2, 2, 1),
    );
    Ok(out)
}

fn case_norwood(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let p = SummandProfile::tunnels(1, 1, &[1]);
    let (lo, hi) = tunnel_bounds(&p).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "tunnel-number-1: bounds pin t(K) = 1, so K is prime",
        (lo, hi) == (1, 1),
    );
    Ok(out)
}

fn case_additivity(_quiet: bool) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    let d1 = corpus::assert_irreducible(corpus::bridge_position(0, 2));
    let d2 = corpus::assert_irreducible(corpus::bridge_position(0, 3));
    let point = |d: &vpbridge_core::model::Diagram| SumPoint {
        body: d
            .bodies
            .values()
            .find(|b| b.bridge_arcs > 0)
            .unwrap()
            .id
            .clone(),
        attach: SumAttach::OnBridge,
    };
    let whole = glue(&d1, &point(&d1), &d2, &point(&d2)).map_err(|e| anyhow!("{}", e))?;
    let r = invariants(&whole).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "glued netext is 1 + 2",
        r.netext == Half::from_int(3),
    );
    let fac = split_prime(&whole).map_err(|e| anyhow!("{}", e))?;
    check(
        &mut out,
        "factorization finds two factors",
        fac.factors.len() == 2,
    );
    let add = additivity_check(&fac.factors, &whole, fac.p2, fac.p3);
    check(&mut out, "additivity identities exact", add.all_ok());
    Ok(out)
}

type Case = fn(bool) -> Result<Vec<Outcome>>;

const CASES: &[(&str, Case)] = &[
    ("widths", case_widths),
    ("thinning", case_thinning),
    ("circular", case_circular),
    ("gabai", case_gabai),
    ("delta", case_delta),
    ("morimoto", case_morimoto),
    ("norwood", case_norwood),
    ("additivity", case_additivity),
];

pub fn run(case: &str, quiet: bool) -> Result<u8> {
    let selected: Vec<&(&str, Case)> = if case == "all" {
        CASES.iter().collect()
    } else {
        let found: Vec<_> = CASES.iter().filter(|(n, _)| *n == case).collect();
        if found.is_empty() {
            return Err(anyhow!(
                "unknown demo case {:?}; available: {} or all",
                case,
                CASES.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
            ));
        }
        found
    };
    let mut all_pass = true;
    for (name, f) in selected {
        let outcomes = f(quiet)?;
        let pass = outcomes.iter().all(|o| o.pass);
        all_pass &= pass;
        if !quiet {
            for o in &outcomes {
                println!("  [{}] {}", if o.pass { "ok" } else { "FAIL" }, o.label);
            }
        }
        println!("{}: {}", name, if pass { "PASS" } else { "FAIL" });
    }
    Ok(u8::from(!all_pass))
}
