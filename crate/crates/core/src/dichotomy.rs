//! Lattice structure of cycle weights and recoding to a constant roof.
//!
//! With rational roof values the group generated by periodic Birkhoff
//! weights is always a lattice `c Z`, so the weak-mixing alternative never
//! occurs and the flow can be recoded, up to topological conjugacy, to a
//! suspension with constant roof `c`. The pipeline normalizes the roof by a
//! coboundary built on a spanning tree, discretizes vertices into unit-time
//! chains, and splices out the zero-roof vertices the normalization leaves
//! behind.
//!
//! Splicing needs care: two distinct zero-roof paths between the same
//! positive vertices are distinct orbits of the source flow, so the spliced
//! system is a multigraph in general. When parallel edges occur the result
//! is presented on the line graph, which is again a simple graph carrying
//! the same flow.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::flow::length_spectrum;
use crate::graph::{Graph, VertexId};
use crate::point::CycleClass;
use crate::rational::{divides, format_rational, rational_gcd, rational_mod, Rational};
use crate::recode::BlockConjugacy;
use crate::roof::{EdgeSystem, RoofFunction};

/// All simple directed cycles (elementary circuits) of the graph, each as
/// the vertex word starting at its smallest vertex, ordered by start vertex
/// and then discovery order. Self-loops are included.
pub fn simple_cycles(graph: &Graph) -> Vec<Vec<VertexId>> {
    let n = graph.vertex_count();
    let mut cycles = Vec::new();
    for start in 0..n as VertexId {
        // Johnson-style search restricted to vertices >= start, with
        // blocking lists to avoid re-exploring dead subtrees.
        let mut blocked = vec![false; n];
        let mut b_lists: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut path = vec![start];
        blocked[start as usize] = true;
        circuit(
            graph, start, start, &mut path, &mut blocked, &mut b_lists, &mut cycles,
        );
    }
    return cycles;

    fn unblock(v: VertexId, blocked: &mut [bool], b_lists: &mut [Vec<VertexId>]) {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if blocked[u as usize] {
                blocked[u as usize] = false;
                stack.extend(std::mem::take(&mut b_lists[u as usize]));
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn circuit(
        graph: &Graph,
        start: VertexId,
        v: VertexId,
        path: &mut Vec<VertexId>,
        blocked: &mut Vec<bool>,
        b_lists: &mut Vec<Vec<VertexId>>,
        cycles: &mut Vec<Vec<VertexId>>,
    ) -> bool {
        let mut found = false;
        for &w in graph.out_neighbors(v) {
            if w < start {
                continue;
            }
            if w == start {
                cycles.push(path.clone());
                found = true;
            } else if !blocked[w as usize] {
                path.push(w);
                blocked[w as usize] = true;
                if circuit(graph, start, w, path, blocked, b_lists, cycles) {
                    found = true;
                }
                path.pop();
            }
        }
        if found {
            unblock(v, blocked, b_lists);
        } else {
            for &w in graph.out_neighbors(v) {
                if w >= start && !b_lists[w as usize].contains(&v) {
                    b_lists[w as usize].push(v);
                }
            }
        }
        found
    }
}

/// The group generated by the simple-cycle weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeConstant {
    /// All periodic weights lie in `c Z`, with `c` maximal.
    Lattice(Rational),
    /// The weights generate a dense subgroup. Unreachable for rational
    /// roofs: a finitely generated subgroup of the rationals is cyclic.
    Dense,
}

/// Lattice data of the cycle-weight group.
#[derive(Debug, Clone)]
pub struct LatticeReport {
    pub constant: LatticeConstant,
    /// Distinct simple-cycle weights, ascending; these generate the group.
    pub weights: Vec<Rational>,
    /// Number of simple cycles enumerated.
    pub cycle_count: usize,
}

impl LatticeReport {
    /// The lattice constant, when the group is a lattice.
    pub fn c(&self) -> Option<&Rational> {
        match &self.constant {
            LatticeConstant::Lattice(c) => Some(c),
            LatticeConstant::Dense => None,
        }
    }

    /// The rotation number `theta = 2 pi / c` implied by the lattice.
    pub fn theta(&self) -> Option<f64> {
        self.c()
            .map(|c| 2.0 * std::f64::consts::PI / crate::rational::to_f64(c))
    }
}

pub(crate) fn lattice_of_system(sys: &EdgeSystem) -> Result<LatticeReport> {
    if !sys.graph.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let cycles = simple_cycles(&sys.graph);
    let mut c = Rational::zero();
    let mut weights: Vec<Rational> = Vec::new();
    for cycle in &cycles {
        let w = sys.weight_of_cycle(cycle);
        c = rational_gcd(&c, &w);
        if !weights.contains(&w) {
            weights.push(w);
        }
    }
    weights.sort();
    debug_assert!(c.is_positive(), "transitive graphs have cycles");
    Ok(LatticeReport {
        constant: LatticeConstant::Lattice(c),
        weights,
        cycle_count: cycles.len(),
    })
}

/// Detect the lattice constant of the cycle-weight group: the gcd of all
/// simple-cycle weights. Every closed-walk weight is then certified to lie
/// in `c Z`, since closed walks decompose into simple cycles.
pub fn cycle_lattice(graph: &Graph, roof: &RoofFunction) -> Result<LatticeReport> {
    let sys = EdgeSystem::reduce(graph, roof)?;
    lattice_of_system(&sys)
}

/// A transfer function `U`: vertex values with
/// `r(u,v) + U(v) - U(u) in c Z` on every edge, normalized into `[0, c)`.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    values: Vec<Rational>,
    c: Rational,
}

impl TransferFunction {
    /// Value at a vertex of the reduced graph.
    pub fn value(&self, v: VertexId) -> &Rational {
        &self.values[v as usize]
    }

    /// All values in canonical vertex order.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// The lattice constant the function was solved against.
    pub fn c(&self) -> &Rational {
        &self.c
    }
}

/// Solve for the transfer function on a spanning tree: `U(root) = 0` at the
/// first vertex, and along BFS tree edges `U(v) = (U(u) - r(u,v)) mod c`.
/// The lattice property guarantees every non-tree edge satisfies the
/// cocycle condition; it is verified explicitly and a failure signals a
/// lattice-detection bug.
pub fn solve_transfer(sys: &EdgeSystem, c: &Rational) -> Result<TransferFunction> {
    if !sys.graph.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if !c.is_positive() {
        return Err(Error::InvalidArgument(
            "lattice constant must be positive".into(),
        ));
    }
    let n = sys.graph.vertex_count();
    let mut values: Vec<Option<Rational>> = vec![None; n];
    values[0] = Some(Rational::zero());
    let mut queue = std::collections::VecDeque::from([0 as VertexId]);
    while let Some(u) = queue.pop_front() {
        let u_val = values[u as usize].clone().expect("queued after assignment");
        for &v in sys.graph.out_neighbors(u) {
            if values[v as usize].is_none() {
                let raw = &u_val - sys.value(u, v);
                values[v as usize] = Some(rational_mod(&raw, c));
                queue.push_back(v);
            }
        }
    }
    let values: Vec<Rational> = values
        .into_iter()
        .map(|v| v.expect("transitive graphs reach every vertex"))
        .collect();
    for (u, v) in sys.graph.edges() {
        let residue = sys.value(u, v) + &values[v as usize] - &values[u as usize];
        if !divides(c, &residue) {
            return Err(Error::ConsistencyFailure(
                sys.graph.label(u).to_string(),
                sys.graph.label(v).to_string(),
            ));
        }
    }
    Ok(TransferFunction {
        values,
        c: c.clone(),
    })
}

/// One pipeline stage of a recoding, for reporting.
#[derive(Debug, Clone)]
pub struct StageInfo {
    pub name: &'static str,
    pub detail: String,
    /// Vertex-level mapping description (source -> target).
    pub map: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SpliceEdge {
    from: usize,
    to: usize,
    /// Zero-roof interior vertices travelled by this edge (empty for chain
    /// edges and direct connections).
    interior: Vec<VertexId>,
    chain: bool,
}

/// A conjugacy certificate from a Markov flow to a constant-roof Markov
/// flow: the target graph, the constant, per-stage descriptions, and a
/// cycle-level map used to verify the orbit spectrum.
#[derive(Debug, Clone)]
pub struct RecodingResult {
    /// The recoded graph carrying the constant roof.
    pub target: Graph,
    /// The constant roof value `c`.
    pub roof_value: Rational,
    /// Pipeline stages in order, with vertex maps.
    pub stages: Vec<StageInfo>,
    /// Whether the result is presented on the line graph of the spliced
    /// multigraph (true exactly when parallel spliced edges occurred).
    pub line_presentation: bool,
    reduce_conj: Option<BlockConjugacy>,
    pair_conj: Option<BlockConjugacy>,
    counts: Vec<usize>,
    slot_base: Vec<Option<usize>>,
    edges: Vec<SpliceEdge>,
    edge_index: BTreeMap<(usize, usize, Vec<VertexId>), usize>,
}

impl RecodingResult {
    /// Map a source cycle class to the corresponding class of the target
    /// flow. Flow lengths are preserved:
    /// `weight(source cycle) = |target word| * c`.
    pub fn map_cycle(&self, class: &CycleClass) -> Result<CycleClass> {
        let mut word: Vec<VertexId> = class.word().to_vec();
        if let Some(conj) = &self.reduce_conj {
            word = conj.map_cycle_word(&word);
        }
        if let Some(conj) = &self.pair_conj {
            word = conj.map_cycle_word(&word);
        }
        // Rotate to start at a positive-roof vertex.
        let first_positive = word
            .iter()
            .position(|&v| self.counts[v as usize] > 0)
            .ok_or_else(|| {
                Error::ConsistencyFailure("cycle".into(), "has no positive vertex".into())
            })?;
        word.rotate_left(first_positive);
        // Expand positive vertices into their slot chains and resolve each
        // zero interior into the spliced edge that compresses it.
        let mut slots: Vec<usize> = Vec::new();
        let mut edge_word: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let p = word[i];
            let base = self.slot_base[p as usize].expect("positive vertex has slots");
            for k in 0..self.counts[p as usize] {
                slots.push(base + k);
                if k + 1 < self.counts[p as usize] {
                    edge_word.push(self.edge_index[&(base + k, base + k + 1, Vec::new())]);
                }
            }
            let mut j = i + 1;
            let mut interior = Vec::new();
            while j < word.len() && self.counts[word[j] as usize] == 0 {
                interior.push(word[j]);
                j += 1;
            }
            let q = if j < word.len() { word[j] } else { word[0] };
            let q_base = self.slot_base[q as usize].expect("positive");
            let from = base + self.counts[p as usize] - 1;
            let key = (from, q_base, interior);
            let idx = *self.edge_index.get(&key).ok_or_else(|| {
                Error::ConsistencyFailure(format!("slot {from}"), format!("slot {q_base}"))
            })?;
            edge_word.push(idx);
            i = j;
        }
        let target_word: Vec<VertexId> = if self.line_presentation {
            edge_word.into_iter().map(|e| e as VertexId).collect()
        } else {
            slots.into_iter().map(|s| s as VertexId).collect()
        };
        CycleClass::new(&self.target, &target_word)
    }

    /// JSON value describing the pipeline, embedded in recoded model files.
    pub fn provenance_json(&self) -> serde_json::Value {
        serde_json::json!({
            "constant_roof": format_rational(&self.roof_value),
            "line_presentation": self.line_presentation,
            "stages": self.stages.iter().map(|s| serde_json::json!({
                "name": s.name,
                "detail": s.detail,
                "map": s.map.iter().map(|(a, b)| serde_json::json!([a, b])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn uniquify(labels: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    labels
        .into_iter()
        .map(|mut label| {
            while !seen.insert(label.clone()) {
                label.push('\'');
            }
            label
        })
        .collect()
}

/// Recode a transitive Markov flow with rational roof to a topologically
/// conjugate constant-roof flow. Stages: reduce the roof to edge range,
/// solve the transfer function, replace `r` by the cohomologous
/// `r* = r + U∘σ - U` (valued in `c Z`, nonnegative), move to vertex range
/// (pairing only when needed), splice out zero-roof vertices, and split
/// each remaining vertex into `r*(v)/c` unit-time slots.
pub fn recode_constant(graph: &Graph, roof: &RoofFunction) -> Result<RecodingResult> {
    let sys = EdgeSystem::reduce(graph, roof)?;
    let lattice = lattice_of_system(&sys)?;
    let c = lattice
        .c()
        .ok_or_else(|| Error::InvalidArgument("dense cycle-weight group".into()))?
        .clone();
    let transfer = solve_transfer(&sys, &c)?;
    let mut stages: Vec<StageInfo> = Vec::new();
    if let Some(conj) = &sys.conjugacy {
        stages.push(StageInfo {
            name: "edge_reduce",
            detail: format!(
                "{}-block recoding to make the roof edge-valued",
                conj.block_len()
            ),
            map: (0..conj.target().vertex_count() as VertexId)
                .map(|v| {
                    (
                        crate::graph::join_block(graph.labels(), conj.block(v)),
                        conj.target().label(v).to_string(),
                    )
                })
                .collect(),
        });
    }
    stages.push(StageInfo {
        name: "cocycle_adjust",
        detail: format!(
            "r* = r + U∘σ - U with U from a BFS spanning tree, c = {}",
            format_rational(&c)
        ),
        map: (0..sys.graph.vertex_count() as VertexId)
            .map(|v| {
                (
                    sys.graph.label(v).to_string(),
                    format!("U = {}", format_rational(transfer.value(v))),
                )
            })
            .collect(),
    });

    // r* on edges of the reduced graph.
    let mut star: BTreeMap<(VertexId, VertexId), Rational> = BTreeMap::new();
    for (u, v) in sys.graph.edges() {
        let val = sys.value(u, v) + transfer.value(v) - transfer.value(u);
        debug_assert!(divides(&c, &val) && !val.is_negative());
        star.insert((u, v), val);
    }

    // Vertex range: directly when r* only depends on the source vertex,
    // otherwise through one pairing recoding.
    let source_constant = (0..sys.graph.vertex_count() as VertexId).all(|u| {
        let mut vals = sys.graph.out_neighbors(u).iter().map(|&v| &star[&(u, v)]);
        match vals.next() {
            None => true,
            Some(first) => vals.all(|v| v == first),
        }
    });
    let (h_graph, vertex_values, pair_conj) = if source_constant {
        let values: Vec<Rational> = (0..sys.graph.vertex_count() as VertexId)
            .map(|u| star[&(u, sys.graph.out_neighbors(u)[0])].clone())
            .collect();
        (sys.graph.clone(), values, None)
    } else {
        let pair = crate::recode::higher_block(&sys.graph, 2)?;
        let values: Vec<Rational> = (0..pair.target().vertex_count() as VertexId)
            .map(|v| {
                let block = pair.block(v);
                star[&(block[0], block[1])].clone()
            })
            .collect();
        stages.push(StageInfo {
            name: "pairing",
            detail: "2-block recoding to make r* vertex-valued".into(),
            map: (0..pair.target().vertex_count() as VertexId)
                .map(|v| {
                    let block = pair.block(v);
                    (
                        format!(
                            "({},{})",
                            sys.graph.label(block[0]),
                            sys.graph.label(block[1])
                        ),
                        pair.target().label(v).to_string(),
                    )
                })
                .collect(),
        });
        (pair.target().clone(), values, Some(pair))
    };

    // Split counts r*(v)/c; zero-roof vertices get no slots and are spliced
    // out. An all-zero cycle is impossible because cycle weights are
    // cohomology invariants of the positive source roof.
    let counts: Vec<usize> = vertex_values
        .iter()
        .map(|v| {
            let q = v / &c;
            debug_assert!(q.is_integer());
            q.to_integer().to_usize().expect("desk-scale split count")
        })
        .collect();
    if counts.iter().all(|&k| k == 0) {
        return Err(Error::ConsistencyFailure(
            "splice".into(),
            "every vertex has zero adjusted roof".into(),
        ));
    }
    let zero_labels: Vec<String> = (0..h_graph.vertex_count() as VertexId)
        .filter(|&v| counts[v as usize] == 0)
        .map(|v| h_graph.label(v).to_string())
        .collect();

    // Slots.
    let mut slot_base: Vec<Option<usize>> = vec![None; h_graph.vertex_count()];
    let mut slot_labels: Vec<String> = Vec::new();
    let mut slot_count = 0usize;
    for v in 0..h_graph.vertex_count() {
        if counts[v] > 0 {
            slot_base[v] = Some(slot_count);
            for k in 0..counts[v] {
                if counts[v] == 1 {
                    slot_labels.push(h_graph.label(v as VertexId).to_string());
                } else {
                    slot_labels.push(format!("{}:{}", h_graph.label(v as VertexId), k));
                }
            }
            slot_count += counts[v];
        }
    }
    let slot_labels = uniquify(slot_labels);

    // Edges: chains inside each split vertex, plus one spliced edge per
    // path positive -> (zero interior) -> positive. Distinct interiors give
    // distinct, possibly parallel, edges.
    let mut edges: Vec<SpliceEdge> = Vec::new();
    for v in 0..h_graph.vertex_count() {
        if counts[v] == 0 {
            continue;
        }
        let base = slot_base[v].unwrap();
        for k in 0..counts[v] - 1 {
            edges.push(SpliceEdge {
                from: base + k,
                to: base + k + 1,
                interior: Vec::new(),
                chain: true,
            });
        }
        let from = base + counts[v] - 1;
        let mut interior: Vec<VertexId> = Vec::new();
        splice_from(
            &h_graph,
            &counts,
            &slot_base,
            v as VertexId,
            from,
            &mut interior,
            &mut edges,
        )?;
    }
    edges.sort();
    edges.dedup();
    let mut edge_index = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        edge_index.insert((e.from, e.to, e.interior.clone()), i);
    }
    let parallel = {
        let mut endpoint_counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &edges {
            *endpoint_counts.entry((e.from, e.to)).or_insert(0) += 1;
        }
        endpoint_counts.values().any(|&k| k > 1)
    };

    stages.push(StageInfo {
        name: "zero_splice",
        detail: if zero_labels.is_empty() {
            "no zero-roof vertices".into()
        } else {
            format!("spliced out zero-roof vertices: {}", zero_labels.join(", "))
        },
        map: Vec::new(),
    });
    stages.push(StageInfo {
        name: "vertex_split",
        detail: format!(
            "each vertex becomes r*(v)/c unit-time slots, c = {}",
            format_rational(&c)
        ),
        map: (0..h_graph.vertex_count() as VertexId)
            .map(|v| {
                let k = counts[v as usize];
                (
                    h_graph.label(v).to_string(),
                    if k == 0 {
                        "(spliced)".to_string()
                    } else {
                        format!("{k} slot(s)")
                    },
                )
            })
            .collect(),
    });

    let (target, line_presentation) = if parallel {
        let mut labels: Vec<String> = edges
            .iter()
            .map(|e| format!("{}>{}", slot_labels[e.from], slot_labels[e.to]))
            .collect();
        labels = uniquify(labels);
        let mut line_edges: Vec<(String, String)> = Vec::new();
        for (i, e1) in edges.iter().enumerate() {
            for (j, e2) in edges.iter().enumerate() {
                if e1.to == e2.from {
                    line_edges.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        stages.push(StageInfo {
            name: "line_graph",
            detail: "parallel spliced edges: presenting the edge shift".into(),
            map: Vec::new(),
        });
        (Graph::new(&labels, &line_edges)?, true)
    } else {
        let pairs: Vec<(String, String)> = edges
            .iter()
            .map(|e| (slot_labels[e.from].clone(), slot_labels[e.to].clone()))
            .collect();
        (Graph::new(&slot_labels, &pairs)?, false)
    };

    return Ok(RecodingResult {
        target,
        roof_value: c,
        stages,
        line_presentation,
        reduce_conj: sys.conjugacy.clone(),
        pair_conj,
        counts,
        slot_base,
        edges,
        edge_index,
    });

    fn splice_from(
        h: &Graph,
        counts: &[usize],
        slot_base: &[Option<usize>],
        cur: VertexId,
        from_slot: usize,
        interior: &mut Vec<VertexId>,
        edges: &mut Vec<SpliceEdge>,
    ) -> Result<()> {
        for &w in h.out_neighbors(cur) {
            if counts[w as usize] > 0 {
                edges.push(SpliceEdge {
                    from: from_slot,
                    to: slot_base[w as usize].unwrap(),
                    interior: interior.clone(),
                    chain: false,
                });
            } else {
                if interior.contains(&w) {
                    return Err(Error::ConsistencyFailure(
                        h.label(w).to_string(),
                        "zero-roof cycle".into(),
                    ));
                }
                interior.push(w);
                splice_from(h, counts, slot_base, w, from_slot, interior, edges)?;
                interior.pop();
            }
        }
        Ok(())
    }
}

/// Compare the simple-orbit length spectra of the source flow and the
/// recoded constant-roof flow up to `t_max`. Exact multiset equality.
pub fn verify_spectrum(
    graph: &Graph,
    roof: &RoofFunction,
    recoding: &RecodingResult,
    t_max: &Rational,
) -> Result<bool> {
    let src = length_spectrum(graph, roof, t_max)?;
    let dst_roof = RoofFunction::constant(&recoding.target, recoding.roof_value.clone())?;
    let dst = length_spectrum(&recoding.target, &dst_roof, t_max)?;
    Ok(src == dst)
}

/// Largest deviation of the lattice eigenfunction from flow equivariance
/// over seeded sample points: `F(x, t) = exp(i theta (U(x_0) - t))`
/// satisfies `F(flow^tau z) = exp(-i theta tau) F(z)`, and with exact
/// transfer data the angle defect is a multiple of 2 pi, so the measured
/// deviation is float noise.
pub fn eigenfunction_deviation(
    sys: &EdgeSystem,
    transfer: &TransferFunction,
    samples: usize,
    tau: &Rational,
    seed: u64,
) -> Result<f64> {
    let roof = sys.to_roof()?;
    let theta = 2.0 * std::f64::consts::PI / crate::rational::to_f64(transfer.c());
    let mut rng = crate::test_support::Rng64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = crate::test_support::random_point(&sys.graph, &mut rng);
        let top = roof.evaluate(&x)?;
        let t = &top * crate::rational::ratio(rng.range_i64(0, 7), 8);
        let z = crate::flow::FlowPoint::new(&roof, x.clone(), t.clone())?;
        let moved = crate::flow::flow(&roof, &z, tau)?;
        let angle_before = theta
            * (crate::rational::to_f64(transfer.value(x.coord(0))) - crate::rational::to_f64(&t));
        let angle_after = theta
            * (crate::rational::to_f64(transfer.value(moved.base().coord(0)))
                - crate::rational::to_f64(moved.height()));
        // exp(i angle_after) * exp(i theta tau) should equal exp(i angle_before).
        let defect = angle_after + theta * crate::rational::to_f64(tau) - angle_before;
        let deviation = (defect.sin().powi(2) + (defect.cos() - 1.0).powi(2)).sqrt();
        worst = worst.max(deviation);
    }
    Ok(worst)
}
