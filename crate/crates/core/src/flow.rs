//! The suspension flow over the shift: exact flow evolution through roof
//! crossings, closed orbits with exact rational lengths, and the
//! simple-orbit length spectrum.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::enumerate::primitive_classes_of_period;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::point::{CycleClass, SeqPoint};
use crate::rational::{int, rational_floor, Rational};
use crate::roof::RoofFunction;

/// A point of the suspension space: a base point together with a height
/// `0 <= t < r(base)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPoint {
    base: SeqPoint,
    height: Rational,
}

impl FlowPoint {
    /// Validate the height against the roof.
    pub fn new(roof: &RoofFunction, base: SeqPoint, height: Rational) -> Result<FlowPoint> {
        let top = roof.evaluate(&base)?;
        if height.is_negative() || height >= top {
            return Err(Error::InvalidArgument(format!(
                "height {height} outside [0, {top})"
            )));
        }
        Ok(FlowPoint { base, height })
    }

    /// The base point.
    pub fn base(&self) -> &SeqPoint {
        &self.base
    }

    /// The height above the base.
    pub fn height(&self) -> &Rational {
        &self.height
    }

    /// Split into parts.
    pub fn into_parts(self) -> (SeqPoint, Rational) {
        (self.base, self.height)
    }
}

/// Flow the point by time `tau`: find the unique crossing count `n` with
/// `0 <= t + tau - r_n(x) < r(shift^n x)` by exact accumulation of roof
/// values, forward or backward.
pub fn flow(roof: &RoofFunction, z: &FlowPoint, tau: &Rational) -> Result<FlowPoint> {
    let mut target = &z.height + tau;
    let mut base = z.base.clone();
    if target >= Rational::zero() {
        loop {
            let top = roof.evaluate(&base)?;
            if target < top {
                return Ok(FlowPoint { base, height: target });
            }
            target -= top;
            base = base.shift(1);
        }
    } else {
        loop {
            base = base.shift(-1);
            let top = roof.evaluate(&base)?;
            target += top;
            if target >= Rational::zero() {
                return Ok(FlowPoint { base, height: target });
            }
        }
    }
}

/// A closed orbit of the flow: a primitive cycle class traversed
/// `multiplicity` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedOrbit {
    pub cycle: CycleClass,
    pub multiplicity: u64,
    /// Flow length: multiplicity times the Birkhoff weight of one period.
    pub length: Rational,
}

impl ClosedOrbit {
    /// Simple orbits are exactly those of multiplicity 1.
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

/// The closed orbit tracing `cycle` with the given multiplicity.
pub fn orbit_of_cycle(
    roof: &RoofFunction,
    cycle: &CycleClass,
    multiplicity: u64,
) -> Result<ClosedOrbit> {
    if multiplicity == 0 {
        return Err(Error::InvalidArgument("multiplicity must be >= 1".into()));
    }
    let primitive = roof.weight_of_cycle(cycle.word())?;
    Ok(ClosedOrbit {
        cycle: cycle.clone(),
        multiplicity,
        length: int(multiplicity as i64) * primitive,
    })
}

/// Power multiplicity of a periodic point: `n / p` with `p` the primitive
/// period. In this symbolic model the coding is injective, so this equals
/// the orbit multiplicity `N(y, n)`.
pub fn orbit_multiplicity(y: &SeqPoint, n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::NotPeriodic(n));
    }
    match y.period() {
        Some(p) if n % p == 0 => Ok((n / p) as u64),
        _ => Err(Error::NotPeriodic(n)),
    }
}

/// Exact multiset of simple closed-orbit lengths up to `t_max`, as
/// (length, class count) pairs in increasing length order.
pub type LengthSpectrum = BTreeMap<Rational, u64>;

fn spectrum_period_bound(roof: &RoofFunction, t_max: &Rational) -> usize {
    if t_max.is_negative() || t_max.is_zero() {
        return 0;
    }
    // length >= p * inf(r), so p <= t_max / inf(r).
    let bound = rational_floor(&(t_max / roof.inf()));
    use num_traits::ToPrimitive;
    bound.to_usize().unwrap_or(0)
}

fn spectrum_for_period(
    graph: &Graph,
    roof: &RoofFunction,
    t_max: &Rational,
    n: usize,
) -> LengthSpectrum {
    let mut out = LengthSpectrum::new();
    for class in primitive_classes_of_period(graph, n) {
        let length = roof
            .weight_of_cycle(class.word())
            .expect("admissible cycle words");
        if length <= *t_max {
            *out.entry(length).or_insert(0) += 1;
        }
    }
    out
}

fn merge_spectra(parts: Vec<LengthSpectrum>) -> LengthSpectrum {
    let mut total = LengthSpectrum::new();
    for part in parts {
        for (len, count) in part {
            *total.entry(len).or_insert(0) += count;
        }
    }
    total
}

/// The simple-orbit length spectrum up to `t_max`.
pub fn length_spectrum(
    graph: &Graph,
    roof: &RoofFunction,
    t_max: &Rational,
) -> Result<LengthSpectrum> {
    if roof.graph_fingerprint() != graph.fingerprint() {
        return Err(Error::GraphMismatch);
    }
    let n_max = spectrum_period_bound(roof, t_max);
    let parts = crate::par::map_ordered((1..=n_max).collect(), |n| {
        spectrum_for_period(graph, roof, t_max, n)
    });
    Ok(merge_spectra(parts))
}

/// Sequential reference implementation of [`length_spectrum`].
pub fn length_spectrum_serial(
    graph: &Graph,
    roof: &RoofFunction,
    t_max: &Rational,
) -> Result<LengthSpectrum> {
    if roof.graph_fingerprint() != graph.fingerprint() {
        return Err(Error::GraphMismatch);
    }
    let n_max = spectrum_period_bound(roof, t_max);
    let parts = crate::par::map_ordered_serial((1..=n_max).collect(), |n| {
        spectrum_for_period(graph, roof, t_max, n)
    });
    Ok(merge_spectra(parts))
}

/// Number of simple closed-orbit classes of length at most `t_max`.
pub fn pi_count(spectrum: &LengthSpectrum) -> u64 {
    spectrum.values().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{g2, gm};
    use crate::rational::ratio;
    use crate::test_support::{random_point, Rng64};

    fn r1(graph: &Graph) -> RoofFunction {
        RoofFunction::constant(graph, int(1)).unwrap()
    }

    fn r12(graph: &Graph) -> RoofFunction {
        let table = [(vec![0], int(1)), (vec![1], int(2))].into_iter().collect();
        RoofFunction::new(graph, 1, table).unwrap()
    }

    #[test]
    fn unit_roof_flow_arithmetic() {
        let g = g2();
        let r = r1(&g);
        let x = SeqPoint::parse(&g, "a|.ba|b").unwrap();
        let z = FlowPoint::new(&r, x.clone(), ratio(1, 4)).unwrap();
        let moved = flow(&r, &z, &ratio(5, 2)).unwrap();
        assert_eq!(*moved.base(), x.shift(2));
        assert_eq!(*moved.height(), ratio(3, 4));
        // tau = 0 is the identity.
        assert_eq!(flow(&r, &z, &int(0)).unwrap(), z);
    }

    #[test]
    fn crossing_accumulation_with_uneven_roof() {
        let g = g2();
        let r = r12(&g);
        let x = SeqPoint::periodic(&g, &[0, 1]).unwrap();
        let z = FlowPoint::new(&r, x.clone(), int(0)).unwrap();
        let moved = flow(&r, &z, &ratio(7, 2)).unwrap();
        assert_eq!(*moved.base(), x.shift(2));
        assert_eq!(*moved.height(), ratio(1, 2));
        // Backward flow inverts exactly.
        let back = flow(&r, &moved, &ratio(-7, 2)).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn section_return_identity() {
        let g = gm();
        let r = r12(&g);
        let mut rng = Rng64::new(3);
        for _ in 0..50 {
            let x = random_point(&g, &mut rng);
            let z = FlowPoint::new(&r, x.clone(), int(0)).unwrap();
            let tau = r.evaluate(&x).unwrap();
            let moved = flow(&r, &z, &tau).unwrap();
            assert_eq!(*moved.base(), x.shift(1));
            assert!(moved.height().is_zero());
        }
    }

    #[test]
    fn flow_group_law_randomized() {
        let g = g2();
        let r = r12(&g);
        let mut rng = Rng64::new(17);
        for _ in 0..200 {
            let x = random_point(&g, &mut rng);
            let h = {
                let top = r.evaluate(&x).unwrap();
                // height = top * u with u in [0, 1) rational
                top * ratio(rng.range_i64(0, 7), 8)
            };
            let z = FlowPoint::new(&r, x, h).unwrap();
            let t1 = rng.signed_ratio(100, 8);
            let t2 = rng.signed_ratio(100, 8);
            let lhs = flow(&r, &z, &(&t1 + &t2)).unwrap();
            let rhs = flow(&r, &flow(&r, &z, &t2).unwrap(), &t1).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn orbit_lengths() {
        let g = g2();
        let r = r12(&g);
        let a = CycleClass::new(&g, &[0]).unwrap();
        let ab = CycleClass::new(&g, &[0, 1]).unwrap();
        assert_eq!(orbit_of_cycle(&r1(&g), &a, 1).unwrap().length, int(1));
        let o = orbit_of_cycle(&r, &ab, 1).unwrap();
        assert_eq!(o.length, int(3));
        assert!(o.is_simple());
        let o2 = orbit_of_cycle(&r, &ab, 2).unwrap();
        assert_eq!(o2.length, int(6));
        assert!(!o2.is_simple());
    }

    #[test]
    fn multiplicity_is_the_power_index() {
        let g = g2();
        let ab = SeqPoint::periodic(&g, &[0, 1]).unwrap();
        assert_eq!(orbit_multiplicity(&ab, 4).unwrap(), 2);
        let a = SeqPoint::periodic(&g, &[0]).unwrap();
        assert_eq!(orbit_multiplicity(&a, 1).unwrap(), 1);
        let aab = SeqPoint::periodic(&g, &[0, 0, 1]).unwrap();
        assert_eq!(orbit_multiplicity(&aab, 3).unwrap(), 1);
        assert!(orbit_multiplicity(&ab, 3).is_err());
        let nonper = SeqPoint::parse(&g, "a|.b|a").unwrap();
        assert!(orbit_multiplicity(&nonper, 2).is_err());
    }

    #[test]
    fn spectrum_of_the_unit_full_shift() {
        let g = g2();
        let spec = length_spectrum(&g, &r1(&g), &int(3)).unwrap();
        let as_pairs: Vec<(Rational, u64)> = spec.into_iter().collect();
        assert_eq!(
            as_pairs,
            vec![(int(1), 2), (int(2), 1), (int(3), 2)]
        );
    }

    #[test]
    fn spectrum_respects_lengths_not_periods() {
        let g = g2();
        let r = r12(&g);
        // T = 2: orbit a (length 1) and b (length 2); ab has length 3.
        let spec = length_spectrum(&g, &r, &int(2)).unwrap();
        assert_eq!(pi_count(&spec), 2);
        let spec3 = length_spectrum(&g, &r, &int(3)).unwrap();
        assert_eq!(pi_count(&spec3), 3);
    }

    #[test]
    fn empty_below_inf() {
        let g = g2();
        assert!(length_spectrum(&g, &r12(&g), &ratio(1, 2)).unwrap().is_empty());
    }

    #[test]
    fn pi_is_nondecreasing_and_matches_serial() {
        let g = g2();
        let r = r1(&g);
        let mut last = 0;
        for t in 1..=9 {
            let spec = length_spectrum(&g, &r, &int(t)).unwrap();
            let serial = length_spectrum_serial(&g, &r, &int(t)).unwrap();
            assert_eq!(spec, serial);
            let pi = pi_count(&spec);
            assert!(pi >= last);
            last = pi;
        }
    }

    #[test]
    fn orbit_length_window() {
        let g = gm();
        let r = r12(&g);
        for class in crate::enumerate::primitive_cycles(&g, 6).unwrap() {
            let o = orbit_of_cycle(&r, &class, 1).unwrap();
            let p = int(class.len() as i64);
            assert!(o.length >= &p * r.inf());
            assert!(o.length <= &p * r.sup());
        }
    }
}
