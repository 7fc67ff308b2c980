//! Closed-form consequences for classical invariants: tunnel number
//! bounds under connected sum, Morimoto-style bounds for composite
//! (g,b)-knots, and bridge-number superadditivity.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("profile invalid: {0}")]
    BadProfile(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

/// Profile of a connected sum: n prime factors, the first j of them
/// m-small, with per-factor tunnel numbers and genera.
#[derive(Clone, Debug)]
pub struct SummandProfile {
    pub n: usize,
    pub j: usize,
    pub tunnel_numbers: Vec<u32>,
    pub genera: Vec<u32>,
    pub bridge_numbers: Option<Vec<u32>>,
}

impl SummandProfile {
    pub fn tunnels(n: usize, j: usize, t: &[u32]) -> Self {
        SummandProfile {
            n,
            j,
            tunnel_numbers: t.to_vec(),
            genera: vec![0; n],
            bridge_numbers: None,
        }
    }

    fn check(&self) -> Result<(), BoundsError> {
        if self.j > self.n {
            return Err(BoundsError::BadProfile(format!(
                "j={} > n={}",
                self.j, self.n
            )));
        }
        if self.tunnel_numbers.len() != self.n {
            return Err(BoundsError::BadProfile(format!(
                "{} tunnel numbers for n={}",
                self.tunnel_numbers.len(),
                self.n
            )));
        }
        if self.n == 0 {
            return Err(BoundsError::BadProfile("empty profile".into()));
        }
        Ok(())
    }
}

/// Tunnel number of the sum: (n−j) + t(K₁) + ⋯ + t(K_j) ≤ t(K) ≤
/// (n−1) + Σ t(K_i). The m-small factors are listed first.
pub fn tunnel_bounds(p: &SummandProfile) -> Result<(u64, u64), BoundsError> {
    p.check()?;
    let lower = (p.n - p.j) as u64
        + p.tunnel_numbers[..p.j]
            .iter()
            .map(|t| u64::from(*t))
            .sum::<u64>();
    let upper = (p.n - 1) as u64 + p.tunnel_numbers.iter().map(|t| u64::from(*t)).sum::<u64>();
    Ok((lower, upper))
}

/// For a composite (g,b)-knot: the number of prime summands is at most
/// g + b − 1; when that count is attained, at least ⌈g/2 + (b−1)⌉
/// summands have (1,1)-decompositions and at least b − 1 of those are
/// 2-bridge. Returns (max_summands, min_11, min_2bridge).
pub fn morimoto_bounds(g: u32, b: u32) -> Result<(u32, u32, u32), BoundsError> {
    if g == 0 && b == 0 {
        return Err(BoundsError::Degenerate("(g,b) = (0,0)".into()));
    }
    let max_summands = g + b - 1;
    // ⌈g/2 + (b−1)⌉ clamped at zero.
    let min_11_twice = i64::from(g) + 2 * (i64::from(b) - 1);
    let min_11 = if min_11_twice <= 0 {
        0
    } else {
        ((min_11_twice + 1) / 2) as u32
    };
    let min_2bridge = b.saturating_sub(1);
    Ok((max_summands, min_11, min_2bridge))
}

/// One evaluated superadditivity instance.
#[derive(Clone, Debug)]
pub struct BridgeSuperadditivityReport {
    /// Σ (g_i + b_{g_i} − 1) ≤ g + b_g − 1.
    pub superadditive_ok: bool,
    pub lhs: i64,
    pub rhs: i64,
    /// For two summands with t(K_i) ≥ g_i: b_g = b_{g₁} + b_{g₂} − 1.
    pub equality: Option<bool>,
}

/// Checks the bridge-number superadditivity inequality for small,
/// m-small summands, and the two-summand equality when the
/// tunnel-number hypothesis flag is set.
pub fn bridge_superadditivity_check(
    g: u32,
    b_g: u32,
    parts: &[(u32, u32)],
    tunnel_ge_genus: bool,
) -> Result<BridgeSuperadditivityReport, BoundsError> {
    let genus_sum: u32 = parts.iter().map(|(gi, _)| *gi).sum();
    if genus_sum > g {
        return Err(BoundsError::BadProfile(format!(
            "Σ g_i = {} exceeds g = {}",
            genus_sum, g
        )));
    }
    let lhs: i64 = parts
        .iter()
        .map(|(gi, bi)| i64::from(*gi) + i64::from(*bi) - 1)
        .sum();
    let rhs = i64::from(g) + i64::from(b_g) - 1;
    let equality = if parts.len() == 2 && tunnel_ge_genus {
        let want = i64::from(parts[0].1) + i64::from(parts[1].1) - 1;
        Some(i64::from(b_g) == want)
    } else {
        None
    };
    Ok(BridgeSuperadditivityReport {
        superadditive_ok: lhs <= rhs,
        lhs,
        rhs,
        equality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tunnel_examples() {
        // Two m-small tunnel-number-1 knots.
        let p = SummandProfile::tunnels(2, 2, &[1, 1]);
        assert_eq!(tunnel_bounds(&p).unwrap(), (2, 3));
        // A single knot: tunnel-number-1 knots are prime.
        let p = SummandProfile::tunnels(1, 1, &[1]);
        assert_eq!(tunnel_bounds(&p).unwrap(), (1, 1));
        let p = SummandProfile::tunnels(1, 0, &[1]);
        assert_eq!(tunnel_bounds(&p).unwrap(), (1, 1));
        // No m-small factors.
        let p = SummandProfile::tunnels(3, 0, &[2, 2, 2]);
        assert_eq!(tunnel_bounds(&p).unwrap(), (3, 8));
    }

    #[test]
    fn tunnel_lower_never_exceeds_upper() {
        // Prime knots that are not m-small have t ≥ 1 (a prime pair with
        // t = 0 is a core loop, which is m-small); under that hypothesis
        // the two bounds always nest.
        for n in 1..6usize {
            for j in 0..=n {
                for t_small in 0..4u32 {
                    for t_other in 1..4u32 {
                        let mut ts = vec![t_small; j];
                        ts.extend(vec![t_other; n - j]);
                        let p = SummandProfile::tunnels(n, j, &ts);
                        let (lo, hi) = tunnel_bounds(&p).unwrap();
                        assert!(lo <= hi, "n={} j={} ts={:?}", n, j, ts);
                    }
                }
            }
        }
    }

    #[test]
    fn morimoto_examples() {
        assert_eq!(morimoto_bounds(0, 3).unwrap(), (2, 2, 2));
        assert_eq!(morimoto_bounds(1, 2).unwrap(), (2, 2, 1));
        assert_eq!(morimoto_bounds(2, 0).unwrap(), (1, 0, 0));
        assert_eq!(
            morimoto_bounds(0, 0),
            Err(BoundsError::Degenerate("(g,b) = (0,0)".into()))
        );
    }

    #[test]
    fn morimoto_monotone_in_g_and_b() {
        for g in 0..6 {
            for b in 0..6 {
                if g == 0 && b == 0 {
                    continue;
                }
                let (m, _, _) = morimoto_bounds(g, b).unwrap();
                if g + 1 > 0 {
                    let (m2, _, _) = morimoto_bounds(g + 1, b).unwrap();
                    assert!(m2 >= m);
                }
                let (m3, _, _) = morimoto_bounds(g, b + 1).unwrap();
                assert!(m3 >= m);
            }
        }
    }

    #[test]
    fn bridge_superadditivity_examples() {
        // g = 2 from g₁ = g₂ = 1, b-values (1,1), b_g = 1: equality.
        let r = bridge_superadditivity_check(2, 1, &[(1, 1), (1, 1)], true).unwrap();
        assert!(r.superadditive_ok);
        assert_eq!(r.equality, Some(true));
        // Violating data reported false.
        let r = bridge_superadditivity_check(2, 1, &[(1, 3), (1, 3)], false).unwrap();
        assert!(!r.superadditive_ok);
        // Σ g_i > g is a precondition failure.
        assert!(bridge_superadditivity_check(1, 1, &[(1, 1), (1, 1)], false).is_err());
    }
}
