//! The closed-orbit census: periodic points in an exact length window,
//! weighted lattice sums, loop counts at a vertex, and growth tables
//! comparing the simple-orbit count against `e^{hT} / T`.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};

use crate::enumerate::for_each_closed_walk;
use crate::error::{Error, Result};
use crate::flow::{length_spectrum, LengthSpectrum};
use crate::graph::{Graph, VertexId};
use crate::point::SeqPoint;
use crate::rational::{exp_neg, int, matrix_power, rational_floor, to_f64, Rational};
use crate::roof::{Cylinder, RoofFunction, ScaledRoof};

fn check_epsilon(roof: &RoofFunction, eps: &Rational) -> Result<()> {
    // eps up to inf(r)/10 inclusive; the window-disjointness argument only
    // needs eps small against inf(r), not strict inequality at 1/10.
    if !eps.is_positive() || eps * int(10) > *roof.inf() {
        return Err(Error::EpsilonTooLarge);
    }
    Ok(())
}

/// Periodic points `y` of period `n` with `y` in the cylinder and
/// `|r_n(y) - T| < 2 eps`, in lexicographic word order.
pub fn upsilon(
    graph: &Graph,
    roof: &RoofFunction,
    cylinder: &Cylinder,
    t: &Rational,
    n: usize,
    eps: &Rational,
) -> Result<Vec<SeqPoint>> {
    check_epsilon(roof, eps)?;
    if n == 0 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    let Some(req) = cylinder.periodic_constraints(n) else {
        return Ok(Vec::new());
    };
    let (scaled, bounds) = ScaledRoof::new(graph, roof, &[t, eps]);
    let (t_s, eps_s) = (bounds[0], bounds[1]);
    let mut points = Vec::new();
    for_each_closed_walk(graph, n, &req, &mut |word| {
        if (scaled.cycle_weight(word) - t_s).abs() < 2 * eps_s {
            points.push(SeqPoint::periodic(graph, word).expect("admissible"));
        }
    });
    Ok(points)
}

fn s_terms(roof: &RoofFunction, t: &Rational, eps: &Rational) -> Result<Vec<usize>> {
    check_epsilon(roof, eps)?;
    // r_n >= n inf(r), so n beyond (T + 2 eps)/inf(r) contributes nothing;
    // the truncation is exact, not an approximation.
    let cap = rational_floor(&((t + int(2) * eps) / roof.inf()))
        .to_usize()
        .unwrap_or(0);
    Ok((1..=cap).collect())
}

fn s_term(
    graph: &Graph,
    scaled: &ScaledRoof,
    cylinder: &Cylinder,
    t_s: i128,
    eps_s: i128,
    h: f64,
    n: usize,
) -> f64 {
    let Some(req) = cylinder.periodic_constraints(n) else {
        return 0.0;
    };
    let mut sum = 0.0;
    for_each_closed_walk(graph, n, &req, &mut |word| {
        let weight = scaled.cycle_weight(word);
        if (weight - t_s).abs() < 2 * eps_s {
            sum += exp_neg(h, &scaled.to_rational(weight));
        }
    });
    sum
}

/// The lattice sum
/// `S(T) = sum_n sum_{sigma^n y = y} 1_A(y) 1_{(-2eps, 2eps)}(r_n(y) - T) e^{-h r_n(y)}`,
/// evaluated exactly over the finite truncation `n <= (T + 2 eps)/inf r`.
pub fn s_of_t(
    graph: &Graph,
    roof: &RoofFunction,
    cylinder: &Cylinder,
    t: &Rational,
    eps: &Rational,
    h: f64,
) -> Result<f64> {
    let ns = s_terms(roof, t, eps)?;
    let (scaled, bounds) = ScaledRoof::new(graph, roof, &[t, eps]);
    let parts = crate::par::map_ordered(ns, |n| {
        s_term(graph, &scaled, cylinder, bounds[0], bounds[1], h, n)
    });
    Ok(parts.into_iter().sum())
}

/// Sequential reference implementation of [`s_of_t`].
pub fn s_of_t_serial(
    graph: &Graph,
    roof: &RoofFunction,
    cylinder: &Cylinder,
    t: &Rational,
    eps: &Rational,
    h: f64,
) -> Result<f64> {
    let ns = s_terms(roof, t, eps)?;
    let (scaled, bounds) = ScaledRoof::new(graph, roof, &[t, eps]);
    let parts = crate::par::map_ordered_serial(ns, |n| {
        s_term(graph, &scaled, cylinder, bounds[0], bounds[1], h, n)
    });
    Ok(parts.into_iter().sum())
}

/// Number of closed walks of length `n` through `v`: `(A^n)_{vv}`.
pub fn gurevich_count(graph: &Graph, v: VertexId, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be >= 1".into()));
    }
    if (v as usize) >= graph.vertex_count() {
        return Err(Error::UnknownEndpoint(format!("vertex id {v}")));
    }
    let p = matrix_power(&graph.adjacency(), n);
    Ok(p[v as usize][v as usize].clone())
}

/// One row of the orbit-growth table.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    /// Length cutoff.
    pub t: Rational,
    /// Exact count of simple orbit classes with length <= t.
    pub pi: u64,
    /// The growth predictor `e^{hT} / T`.
    pub predictor: f64,
    /// `pi * T * e^{-hT}`: bounded away from 0 and infinity when the
    /// lower bound holds with matching order.
    pub ratio: f64,
}

/// Growth table on the grid `T = t_max * i / steps`, `i = 1..=steps`.
/// The flow entropy `h` must come from a successful `mme_flow`.
pub fn growth_table(
    graph: &Graph,
    roof: &RoofFunction,
    h: f64,
    t_max: &Rational,
    steps: usize,
) -> Result<Vec<GrowthRow>> {
    if steps == 0 || !t_max.is_positive() {
        return Err(Error::InvalidArgument("need steps >= 1 and t_max > 0".into()));
    }
    let spectrum = length_spectrum(graph, roof, t_max)?;
    Ok((1..=steps)
        .map(|i| {
            let t = t_max * crate::rational::ratio(i as i64, steps as i64);
            growth_row(&spectrum, h, t)
        })
        .collect())
}

fn growth_row(spectrum: &LengthSpectrum, h: f64, t: Rational) -> GrowthRow {
    let pi: u64 = spectrum
        .iter()
        .take_while(|(len, _)| **len <= t)
        .map(|(_, count)| count)
        .sum();
    let tf = to_f64(&t);
    let decay = exp_neg(h, &t); // e^{-hT}
    GrowthRow {
        t,
        pi,
        predictor: if tf > 0.0 { 1.0 / (decay * tf) } else { 0.0 },
        ratio: pi as f64 * tf * decay,
    }
}

/// One row of the full census: growth data plus the lattice sum.
#[derive(Debug, Clone)]
pub struct CensusRow {
    pub growth: GrowthRow,
    pub s: f64,
}

/// Growth table augmented with `S(T)` per row.
pub fn census(
    graph: &Graph,
    roof: &RoofFunction,
    h: f64,
    cylinder: &Cylinder,
    eps: &Rational,
    t_max: &Rational,
    steps: usize,
) -> Result<Vec<CensusRow>> {
    check_epsilon(roof, eps)?;
    let rows = growth_table(graph, roof, h, t_max, steps)?;
    let ts: Vec<Rational> = rows.iter().map(|r| r.t.clone()).collect();
    let sums = crate::par::map_ordered(ts, |t| {
        s_of_t_serial(graph, roof, cylinder, &t, eps, h).expect("eps already validated")
    });
    Ok(rows
        .into_iter()
        .zip(sums)
        .map(|(growth, s)| CensusRow { growth, s })
        .collect())
}

/// CSV rendering of a census (exact rational T column, shortest
/// round-trip floats elsewhere).
pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("T,pi,predictor,ratio,S\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            crate::rational::format_rational(&row.growth.t),
            row.growth.pi,
            row.growth.predictor,
            row.growth.ratio,
            row.s
        ));
    }
    out
}

/// CSV rendering of a growth table.
pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from("T,pi,predictor,ratio\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::rational::format_rational(&row.t),
            row.pi,
            row.predictor,
            row.ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::g2;
    use crate::rational::ratio;

    fn r1(graph: &Graph) -> RoofFunction {
        RoofFunction::constant(graph, int(1)).unwrap()
    }

    fn r12(graph: &Graph) -> RoofFunction {
        let table = [(vec![0], int(1)), (vec![1], int(2))].into_iter().collect();
        RoofFunction::new(graph, 1, table).unwrap()
    }

    fn cyl_a(graph: &Graph) -> Cylinder {
        Cylinder::parse(graph, "a").unwrap()
    }

    #[test]
    fn upsilon_window_hits_and_misses() {
        let g = g2();
        let r = r1(&g);
        let a = cyl_a(&g);
        let eps = ratio(1, 100);
        let hits = upsilon(&g, &r, &a, &int(2), 2, &eps).unwrap();
        assert_eq!(hits.len(), 2); // a^inf and (ab)^inf start with a
        let misses = upsilon(&g, &r, &a, &ratio(5, 2), 2, &eps).unwrap();
        assert!(misses.is_empty());
    }

    #[test]
    fn upsilon_with_uneven_roof() {
        let g = g2();
        let r = r12(&g);
        let a = cyl_a(&g);
        let hits = upsilon(&g, &r, &a, &int(3), 2, &ratio(1, 100)).unwrap();
        assert_eq!(hits.len(), 1); // only (ab)^inf: r_2 = 3
        assert_eq!(hits[0], SeqPoint::periodic(&g, &[0, 1]).unwrap());
    }

    #[test]
    fn epsilon_guard() {
        let g = g2();
        let r = r1(&g);
        let a = cyl_a(&g);
        assert!(upsilon(&g, &r, &a, &int(1), 1, &ratio(1, 10)).is_ok());
        assert!(matches!(
            upsilon(&g, &r, &a, &int(1), 1, &ratio(1, 9)),
            Err(Error::EpsilonTooLarge)
        ));
    }

    #[test]
    fn lattice_sum_is_exactly_half_on_integers() {
        let g = g2();
        let r = r1(&g);
        let a = cyl_a(&g);
        let eps = ratio(1, 11);
        let h = std::f64::consts::LN_2;
        for t in 1..=12i64 {
            let s = s_of_t(&g, &r, &a, &int(t), &eps, h).unwrap();
            assert_eq!(s, 0.5, "T = {t}");
            let s_half = s_of_t(&g, &r, &a, &(int(t) + ratio(1, 2)), &eps, h).unwrap();
            assert_eq!(s_half, 0.0);
            assert_eq!(s_of_t_serial(&g, &r, &a, &int(t), &eps, h).unwrap(), s);
        }
    }

    #[test]
    fn lattice_sum_with_uneven_roof() {
        // (G2, R12), A = [a], h = ln(phi), T = 3: solutions of r_n(y) = 3
        // with y_0 = a are (ab)^inf (n = 2, one rotation in A) and a^3
        // at n = 3... r_3(a^inf) = 3: contributes e^{-3h} too.
        let g = g2();
        let r = r12(&g);
        let a = cyl_a(&g);
        let h = 1.6180339887498949_f64.ln();
        let s = s_of_t(&g, &r, &a, &int(3), &ratio(1, 11), h).unwrap();
        let phi: f64 = 1.6180339887498949;
        let expected = 2.0 * phi.powi(-3);
        assert!((s - expected).abs() < 1e-12);
    }

    #[test]
    fn gurevich_counts_on_the_full_shift() {
        let g = g2();
        for n in 1..=24usize {
            let count = gurevich_count(&g, 0, n).unwrap();
            // (A^n)_{aa} = 2^{n-1} exactly.
            assert_eq!(count << 1, BigUint::from(1u8) << n);
        }
        let gm = crate::graph::fixtures::gm();
        assert_eq!(gurevich_count(&gm, 0, 2).unwrap(), BigUint::from(2u8));
    }

    #[test]
    fn growth_table_matches_necklace_partial_sums() {
        let g = g2();
        let r = r1(&g);
        let h = std::f64::consts::LN_2;
        let rows = growth_table(&g, &r, h, &int(12), 12).unwrap();
        let expected_pi = [2u64, 3, 5, 8, 14, 23, 41, 71, 127, 226, 412, 747];
        for (row, want) in rows.iter().zip(expected_pi) {
            assert_eq!(row.pi, want, "T = {}", row.t);
        }
        // pi nondecreasing, ratio sane at the tail.
        for w in rows.windows(2) {
            assert!(w[1].pi >= w[0].pi);
        }
        let last = rows.last().unwrap();
        assert!((last.ratio - 747.0 * 12.0 / 4096.0).abs() < 1e-12);
    }

    #[test]
    fn census_rows_carry_lattice_sums() {
        let g = g2();
        let r = r1(&g);
        let h = std::f64::consts::LN_2;
        let rows = census(&g, &r, h, &cyl_a(&g), &ratio(1, 11), &int(6), 6).unwrap();
        for row in &rows {
            assert_eq!(row.s, 0.5);
        }
        let csv = census_csv(&rows);
        assert!(csv.starts_with("T,pi,predictor,ratio,S\n"));
        assert!(csv.lines().count() == 7);
        assert!(csv.contains("6,23,"));
    }

    #[test]
    fn below_inf_everything_is_empty() {
        let g = g2();
        let r = r12(&g);
        let rows = growth_table(&g, &r, 0.5, &ratio(1, 2), 1).unwrap();
        assert_eq!(rows[0].pi, 0);
        assert_eq!(rows[0].ratio, 0.0);
    }
}
