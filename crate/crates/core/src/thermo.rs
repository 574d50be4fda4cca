//! Thermodynamic formalism for the base shift: pressure of locally constant
//! potentials, equilibrium Markov measures from Perron eigendata, entropy,
//! and the measure of maximal entropy of the flow via the root of
//! `P(-h r) = 0` together with Abramov's formula.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rational::to_f64;
use crate::recode::{higher_block, BlockConjugacy};
use crate::roof::{EdgeSystem, RoofFunction};

/// A locally constant potential: real values on admissible k-blocks.
#[derive(Debug, Clone)]
pub struct Potential {
    range: usize,
    table: BTreeMap<Vec<VertexId>, f64>,
}

impl Potential {
    /// Build from a block table. Totality over admissible blocks is checked
    /// when the potential is reduced against a graph.
    pub fn new(range: usize, table: BTreeMap<Vec<VertexId>, f64>) -> Result<Potential> {
        if range == 0 {
            return Err(Error::InvalidArgument("potential range must be >= 1".into()));
        }
        Ok(Potential { range, table })
    }

    /// The zero potential.
    pub fn zero(graph: &Graph) -> Potential {
        let table = (0..graph.vertex_count() as VertexId)
            .map(|v| (vec![v], 0.0))
            .collect();
        Potential { range: 1, table }
    }

    /// The potential `factor * r` for a rational roof.
    pub fn scaled_roof(roof: &RoofFunction, factor: f64) -> Potential {
        let table = roof
            .table()
            .map(|(block, value)| (block.clone(), factor * to_f64(value)))
            .collect();
        Potential {
            range: roof.range(),
            table,
        }
    }

    /// Locally constant range.
    pub fn range(&self) -> usize {
        self.range
    }
}

/// A potential reduced to edge values on a (possibly block-recoded) graph.
#[derive(Debug, Clone)]
pub struct EdgePotential {
    pub graph: Graph,
    pub values: BTreeMap<(VertexId, VertexId), f64>,
    pub conjugacy: Option<BlockConjugacy>,
}

impl EdgePotential {
    /// Reduce a potential against its graph.
    pub fn reduce(graph: &Graph, phi: &Potential) -> Result<EdgePotential> {
        let lookup = |table: &BTreeMap<Vec<VertexId>, f64>, block: &[VertexId]| -> Result<f64> {
            table
                .get(block)
                .copied()
                .ok_or_else(|| Error::MissingBlock(format!("{block:?}")))
        };
        match phi.range {
            1 => {
                let mut values = BTreeMap::new();
                for (u, v) in graph.edges() {
                    values.insert((u, v), lookup(&phi.table, &[u])?);
                }
                Ok(EdgePotential {
                    graph: graph.clone(),
                    values,
                    conjugacy: None,
                })
            }
            2 => {
                let mut values = BTreeMap::new();
                for (u, v) in graph.edges() {
                    values.insert((u, v), lookup(&phi.table, &[u, v])?);
                }
                Ok(EdgePotential {
                    graph: graph.clone(),
                    values,
                    conjugacy: None,
                })
            }
            k => {
                let conj = higher_block(graph, k - 1)?;
                let target = conj.target().clone();
                let mut values = BTreeMap::new();
                for (u, v) in target.edges() {
                    let mut block = conj.block(u).to_vec();
                    block.push(conj.block(v)[k - 2]);
                    values.insert((u, v), lookup(&phi.table, &block)?);
                }
                Ok(EdgePotential {
                    graph: target,
                    values,
                    conjugacy: Some(conj),
                })
            }
        }
    }

    /// Edge potential from rational edge values scaled by `factor`.
    pub fn from_edge_system(sys: &EdgeSystem, factor: f64) -> EdgePotential {
        let values = sys
            .edge_values
            .iter()
            .map(|(&e, v)| (e, factor * to_f64(v)))
            .collect();
        EdgePotential {
            graph: sys.graph.clone(),
            values,
            conjugacy: sys.conjugacy.clone(),
        }
    }
}

/// Dominant eigendata of a nonnegative irreducible matrix.
#[derive(Debug, Clone)]
struct PerronData {
    lambda: f64,
    right: Vec<f64>,
    left: Vec<f64>,
}

/// Power iteration on `M + I` (primitive for irreducible nonnegative `M`),
/// deterministic all-ones start, relative tolerance 1e-13 on the eigenvalue.
fn perron(matrix: &[Vec<f64>]) -> PerronData {
    let n = matrix.len();
    let transpose: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| matrix[j][i]).collect())
        .collect();
    let dominant = |m: &[Vec<f64>]| -> (f64, Vec<f64>) {
        let mut v = vec![1.0 / n as f64; n];
        let mut lambda_shifted = 1.0;
        for _ in 0..200_000 {
            let next: Vec<f64> = (0..n)
                .map(|i| v[i] + (0..n).map(|j| m[i][j] * v[j]).sum::<f64>())
                .collect();
            let norm: f64 = next.iter().map(|x| x.abs()).sum::<f64>();
            let next: Vec<f64> = next.into_iter().map(|x| x / norm).collect();
            let done = (norm - lambda_shifted).abs() <= 1e-14 * norm.abs().max(1.0)
                && next
                    .iter()
                    .zip(&v)
                    .all(|(a, b)| (a - b).abs() <= 1e-15 + 1e-14 * a.abs());
            v = next;
            lambda_shifted = norm;
            if done {
                break;
            }
        }
        (lambda_shifted - 1.0, v)
    };
    let (lambda, right) = dominant(matrix);
    let (_, left) = dominant(&transpose);
    PerronData { lambda, right, left }
}

/// Transfer matrix `M(u, v) = exp(phi(u, v))` on edges, 0 elsewhere.
fn transfer_matrix(phi: &EdgePotential) -> Vec<Vec<f64>> {
    let n = phi.graph.vertex_count();
    let mut m = vec![vec![0.0; n]; n];
    for (&(u, v), &val) in &phi.values {
        m[u as usize][v as usize] = val.exp();
    }
    m
}

/// Topological pressure of a locally constant potential on a transitive
/// graph: the log of the spectral radius of the transfer matrix.
pub fn pressure(graph: &Graph, phi: &Potential) -> Result<f64> {
    let edge = EdgePotential::reduce(graph, phi)?;
    pressure_edge(&edge)
}

/// Pressure from an already reduced potential.
pub fn pressure_edge(phi: &EdgePotential) -> Result<f64> {
    if !phi.graph.is_transitive() {
        return Err(Error::NotTransitive);
    }
    Ok(perron(&transfer_matrix(phi)).lambda.ln())
}

/// A stationary Markov chain supported exactly on the edges of a graph.
#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    graph: Graph,
    probs: BTreeMap<(VertexId, VertexId), f64>,
    pi: Vec<f64>,
    /// Perron value of the transfer matrix behind an equilibrium measure;
    /// 1.0 for measures built from raw transition rows.
    lambda: f64,
    right: Vec<f64>,
}

impl MarkovMeasure {
    /// Stationary chain from explicit transition rows (must be supported on
    /// edges and row-stochastic within 1e-9). The stationary distribution
    /// is recovered by power iteration.
    pub fn from_transitions(
        graph: &Graph,
        probs: BTreeMap<(VertexId, VertexId), f64>,
    ) -> Result<MarkovMeasure> {
        if !graph.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let n = graph.vertex_count();
        for (&(u, v), &p) in &probs {
            if !graph.has_edge(u, v) {
                return Err(Error::InvalidArgument(format!(
                    "transition off an edge: {} -> {}",
                    graph.label(u),
                    graph.label(v)
                )));
            }
            if !(0.0..=1.0 + 1e-12).contains(&p) {
                return Err(Error::InvalidArgument("probability outside [0,1]".into()));
            }
        }
        for u in 0..n as VertexId {
            let row: f64 = graph
                .out_neighbors(u)
                .iter()
                .map(|&v| probs.get(&(u, v)).copied().unwrap_or(0.0))
                .sum();
            if (row - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "row {} sums to {row}, not 1",
                    graph.label(u)
                )));
            }
        }
        // pi P = pi via power iteration on the transpose.
        let mut m = vec![vec![0.0; n]; n];
        for (&(u, v), &p) in &probs {
            m[v as usize][u as usize] = p;
        }
        let data = perron(&m);
        let total: f64 = data.right.iter().sum();
        let pi = data.right.iter().map(|x| x / total).collect();
        Ok(MarkovMeasure {
            graph: graph.clone(),
            probs,
            pi,
            lambda: 1.0,
            right: vec![1.0; n],
        })
    }

    /// The underlying graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Transition probability along an edge.
    pub fn prob(&self, u: VertexId, v: VertexId) -> f64 {
        self.probs.get(&(u, v)).copied().unwrap_or(0.0)
    }

    /// Stationary distribution in canonical vertex order.
    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    /// Perron value of the transfer matrix behind an equilibrium measure.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Right Perron eigenvector components (all ones for raw chains).
    pub fn right_vector(&self) -> &[f64] {
        &self.right
    }

    /// Measure of the cylinder `[word]` based at 0:
    /// `pi(w0) p(w0, w1) ... p(w_{n-1}, w_n)`.
    pub fn cylinder_measure(&self, word: &[VertexId]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        let mut m = self.pi[word[0] as usize];
        for pair in word.windows(2) {
            m *= self.prob(pair[0], pair[1]);
        }
        m
    }

    /// Kolmogorov-Sinai entropy: `-sum_u pi(u) sum_v p(u,v) log p(u,v)`.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (&(u, _v), &p) in &self.probs {
            if p > 0.0 {
                h -= self.pi[u as usize] * p * p.ln();
            }
        }
        h
    }

    /// Integral of an edge-valued function against the measure.
    pub fn integrate_edges<F: Fn(VertexId, VertexId) -> f64>(&self, f: F) -> f64 {
        self.probs
            .iter()
            .map(|(&(u, v), &p)| self.pi[u as usize] * p * f(u, v))
            .sum()
    }

    /// Integral of a reduced potential (must live on the same graph).
    pub fn integrate(&self, phi: &EdgePotential) -> Result<f64> {
        if phi.graph.fingerprint() != self.graph.fingerprint() {
            return Err(Error::GraphMismatch);
        }
        Ok(self.integrate_edges(|u, v| phi.values[&(u, v)]))
    }
}

/// The equilibrium measure of a locally constant potential: the Markov
/// measure built from the Perron eigendata of the transfer matrix,
/// `p(u,v) = M(u,v) right(v) / (lambda right(u))`, stationary distribution
/// proportional to `left(u) right(u)`.
pub fn equilibrium(graph: &Graph, phi: &Potential) -> Result<MarkovMeasure> {
    let edge = EdgePotential::reduce(graph, phi)?;
    equilibrium_edge(&edge)
}

/// Equilibrium measure from an already reduced potential.
pub fn equilibrium_edge(phi: &EdgePotential) -> Result<MarkovMeasure> {
    if !phi.graph.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let m = transfer_matrix(phi);
    let data = perron(&m);
    let n = phi.graph.vertex_count();
    let mut probs = BTreeMap::new();
    for (u, v) in phi.graph.edges() {
        let p = m[u as usize][v as usize] * data.right[v as usize]
            / (data.lambda * data.right[u as usize]);
        probs.insert((u, v), p);
    }
    let mut pi: Vec<f64> = (0..n).map(|i| data.left[i] * data.right[i]).collect();
    let total: f64 = pi.iter().sum();
    for x in &mut pi {
        *x /= total;
    }
    Ok(MarkovMeasure {
        graph: phi.graph.clone(),
        probs,
        pi,
        lambda: data.lambda,
        right: data.right,
    })
}

/// Result of the flow measure-of-maximal-entropy computation.
#[derive(Debug, Clone)]
pub struct FlowMme {
    /// Topological entropy of the flow: the root of `P(-h r) = 0`.
    pub entropy: f64,
    /// Bracketing interval of the bisection at termination.
    pub bracket: (f64, f64),
    /// Equilibrium measure of `-h r` on the (reduced) base.
    pub base_measure: MarkovMeasure,
    /// Mean roof `∫ r dν` under the base measure.
    pub mean_roof: f64,
    /// The reduced system the measure lives on.
    pub system: EdgeSystem,
}

/// Measure of maximal entropy of the suspension flow: bisect
/// `h -> P(-h r)` on `[0, P(0)/inf r]` to 1e-12, then build the
/// equilibrium measure of `-h r`. The bracket is valid because
/// `P(-h' r) <= P(-h r) - (h' - h) inf r` makes the pressure strictly
/// decreasing in `h`.
pub fn mme_flow(graph: &Graph, roof: &RoofFunction) -> Result<FlowMme> {
    let sys = EdgeSystem::reduce(graph, roof)?;
    if !sys.graph.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let pressure_at = |h: f64| -> f64 {
        let phi = EdgePotential::from_edge_system(&sys, -h);
        pressure_edge(&phi).expect("transitivity already checked")
    };
    let p0 = pressure_at(0.0);
    let inf_r = to_f64(&sys.inf());
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    if p0 > 0.0 {
        hi = p0 / inf_r;
        debug_assert!(pressure_at(hi) <= 1e-9);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if pressure_at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let h = 0.5 * (lo + hi);
    let phi = EdgePotential::from_edge_system(&sys, -h);
    let base_measure = equilibrium_edge(&phi)?;
    let mean_roof = base_measure.integrate_edges(|u, v| to_f64(sys.value(u, v)));
    Ok(FlowMme {
        entropy: h,
        bracket: (lo, hi),
        base_measure,
        mean_roof,
        system: sys,
    })
}

impl FlowMme {
    /// Abramov consistency: `entropy(nu) / ∫ r dnu` reproduces the
    /// bisection root up to numerics; returns the discrepancy.
    pub fn abramov_gap(&self) -> f64 {
        if self.mean_roof == 0.0 {
            return f64::INFINITY;
        }
        (self.base_measure.entropy() / self.mean_roof - self.entropy).abs()
    }
}

/// Helper used by tests and the acceptance suite: a seeded random Markov
/// measure supported on the graph's edges.
#[doc(hidden)]
pub fn random_markov_measure(
    graph: &Graph,
    rng: &mut crate::test_support::Rng64,
) -> MarkovMeasure {
    let mut probs = BTreeMap::new();
    for u in 0..graph.vertex_count() as VertexId {
        let outs = graph.out_neighbors(u);
        let weights: Vec<f64> = outs.iter().map(|_| 0.05 + rng.below(1000) as f64).collect();
        let total: f64 = weights.iter().sum();
        for (&v, w) in outs.iter().zip(&weights) {
            probs.insert((u, v), w / total);
        }
    }
    MarkovMeasure::from_transitions(graph, probs).expect("rows are stochastic on edges")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{g2, gm};
    use crate::rational::{int, ratio};
    use crate::test_support::Rng64;

    fn r1(graph: &Graph) -> RoofFunction {
        RoofFunction::constant(graph, int(1)).unwrap()
    }

    fn r12(graph: &Graph) -> RoofFunction {
        let table = [(vec![0], int(1)), (vec![1], int(2))].into_iter().collect();
        RoofFunction::new(graph, 1, table).unwrap()
    }

    const PHI: f64 = 1.618033988749894848;

    #[test]
    fn pressure_closed_forms() {
        let g = g2();
        let p = pressure(&g, &Potential::zero(&g)).unwrap();
        assert!((p - 2.0f64.ln()).abs() < 1e-12);
        let p_gm = pressure(&gm(), &Potential::zero(&gm())).unwrap();
        assert!((p_gm - PHI.ln()).abs() < 1e-12);
        // Golden root: P(-h R12) = 0 at h = ln(phi).
        let phi_pot = Potential::scaled_roof(&r12(&g), -PHI.ln());
        assert!(pressure(&g, &phi_pot).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pressure_requires_transitivity() {
        let disjoint = Graph::new(&["a", "b"], &[("a", "a"), ("b", "b")]).unwrap();
        assert!(matches!(
            pressure(&disjoint, &Potential::zero(&disjoint)),
            Err(Error::NotTransitive)
        ));
    }

    #[test]
    fn equilibrium_of_zero_is_bernoulli_or_parry() {
        let g = g2();
        let m = equilibrium(&g, &Potential::zero(&g)).unwrap();
        for (u, v) in g.edges() {
            assert!((m.prob(u, v) - 0.5).abs() < 1e-12);
        }
        assert!((m.entropy() - 2.0f64.ln()).abs() < 1e-12);

        let gm = gm();
        let parry = equilibrium(&gm, &Potential::zero(&gm)).unwrap();
        assert!((parry.prob(0, 0) - 1.0 / PHI).abs() < 1e-11);
        assert!((parry.prob(0, 1) - 1.0 / (PHI * PHI)).abs() < 1e-11);
        assert!((parry.prob(1, 0) - 1.0).abs() < 1e-12);
        assert!((parry.entropy() - PHI.ln()).abs() < 1e-11);
    }

    #[test]
    fn golden_equilibrium_on_the_full_shift() {
        let g = g2();
        let phi = Potential::scaled_roof(&r12(&g), -PHI.ln());
        let m = equilibrium(&g, &phi).unwrap();
        assert!((m.prob(0, 0) - 0.6180339887).abs() < 1e-9);
        assert!((m.prob(1, 0) - 0.6180339887).abs() < 1e-9);
        assert!((m.prob(0, 1) - 0.3819660113).abs() < 1e-9);
        let r_pot = EdgePotential::reduce(&g, &Potential::scaled_roof(&r12(&g), 1.0)).unwrap();
        let mean = m.integrate(&r_pot).unwrap();
        assert!((mean - (3.0 - PHI)).abs() < 1e-9); // pi_a + 2 pi_b = 3 - phi
    }

    #[test]
    fn entropy_of_degenerate_chain_is_zero() {
        let g = Graph::new(&["a"], &[("a", "a")]).unwrap();
        let m = equilibrium(&g, &Potential::zero(&g)).unwrap();
        assert_eq!(m.prob(0, 0), 1.0);
        assert!(m.entropy().abs() < 1e-15);
    }

    #[test]
    fn integrate_normalizes() {
        let g = g2();
        let m = equilibrium(&g, &Potential::zero(&g)).unwrap();
        let one = m.integrate_edges(|_, _| 1.0);
        assert!((one - 1.0).abs() < 1e-12);
        let r = EdgePotential::reduce(&g, &Potential::scaled_roof(&r12(&g), 1.0)).unwrap();
        assert!((m.integrate(&r).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn mme_flow_closed_forms() {
        let g = g2();
        let unit = mme_flow(&g, &r1(&g)).unwrap();
        assert!((unit.entropy - 2.0f64.ln()).abs() < 1e-9);
        assert!(unit.abramov_gap() < 1e-9);

        let uneven = mme_flow(&g, &r12(&g)).unwrap();
        assert!((uneven.entropy - PHI.ln()).abs() < 1e-9);
        assert!(uneven.abramov_gap() < 1e-9);

        let loop_graph = Graph::new(&["a"], &[("a", "a")]).unwrap();
        let c = RoofFunction::constant(&loop_graph, ratio(7, 2)).unwrap();
        let single = mme_flow(&loop_graph, &c).unwrap();
        assert_eq!(single.entropy, 0.0);
    }

    #[test]
    fn mme_flow_on_wide_roof_recodes() {
        let g = gm();
        let table = [
            (vec![0, 0], int(1)),
            (vec![0, 1], int(2)),
            (vec![1, 0], ratio(3, 2)),
        ]
        .into_iter()
        .collect();
        let r = RoofFunction::new(&g, 2, table).unwrap();
        let mme = mme_flow(&g, &r).unwrap();
        assert!(mme.entropy > 0.0);
        assert!(mme.abramov_gap() < 1e-9);
    }

    #[test]
    fn variational_inequality_random_measures() {
        let g = gm();
        let phi = Potential::scaled_roof(&r12(&g), -0.3);
        let edge = EdgePotential::reduce(&g, &phi).unwrap();
        let p = pressure_edge(&edge).unwrap();
        let eq = equilibrium_edge(&edge).unwrap();
        let attained = eq.entropy() + eq.integrate(&edge).unwrap();
        assert!((attained - p).abs() < 1e-9);

        let mut rng = Rng64::new(23);
        for _ in 0..50 {
            let m = random_markov_measure(&g, &mut rng);
            let value = m.entropy() + m.integrate(&edge).unwrap();
            assert!(value <= p + 1e-9, "variational inequality violated");
        }
    }

    #[test]
    fn gibbs_ratios_have_one_constant() {
        // For the flow MME on (G2, R12): nu[word] * exp(h * r_n(y)) depends
        // only on the first symbol once the last symbol is fixed, so the
        // eigendata bound covers every cylinder with one constant.
        let g = g2();
        let mme = mme_flow(&g, &r12(&g)).unwrap();
        let nu = &mme.base_measure;
        let h = mme.entropy;
        let mut ratios: Vec<f64> = Vec::new();
        for len in 2..=10usize {
            collect_words(&g, len, &mut |word: &[VertexId]| {
                if *word.last().unwrap() != 0 {
                    return; // estimate fixes the final symbol
                }
                let rn: f64 = word[..word.len() - 1]
                    .iter()
                    .map(|&v| if v == 0 { 1.0 } else { 2.0 })
                    .sum();
                ratios.push(nu.cylinder_measure(word) * (h * rn).exp());
            });
        }
        let c_bound = {
            let pi_max = nu.stationary().iter().cloned().fold(0.0, f64::max);
            let pi_min = nu.stationary().iter().cloned().fold(f64::INFINITY, f64::min);
            let r_max = nu.right.iter().cloned().fold(0.0, f64::max);
            let r_min = nu.right.iter().cloned().fold(f64::INFINITY, f64::min);
            (pi_max * r_max / r_min).max(r_max / (pi_min * r_min)) * 1.0000001
        };
        assert!(!ratios.is_empty());
        for ratio in ratios {
            assert!(ratio <= c_bound && ratio >= 1.0 / c_bound, "ratio {ratio}");
        }
    }

    fn collect_words(graph: &Graph, len: usize, f: &mut impl FnMut(&[VertexId])) {
        fn rec(
            graph: &Graph,
            len: usize,
            word: &mut Vec<VertexId>,
            f: &mut impl FnMut(&[VertexId]),
        ) {
            if word.len() == len {
                f(word);
                return;
            }
            let last = *word.last().unwrap();
            for &next in graph.out_neighbors(last) {
                word.push(next);
                rec(graph, len, word, f);
                word.pop();
            }
        }
        for v in 0..graph.vertex_count() as VertexId {
            let mut word = vec![v];
            rec(graph, len, &mut word, f);
        }
    }
}
