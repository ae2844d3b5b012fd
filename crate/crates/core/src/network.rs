//! Quantum networks with unit-capacity links: how many protocol rounds each
//! approach fits into one network use, and a state-vector check of GHZ
//! distribution through a router by network coding.
//!
//! The GHZ protocol is limited by the multicast capacity `min_i maxflow(A →
//! B_i)`. Bipartite links need one Bell pair per Bob and round, so their rate
//! is `min_S mincut(A → S) / |S|` over non-empty sets `S` of Bobs.

use std::collections::{HashMap, HashSet, VecDeque};

use num_complex::Complex64;
use petgraph::algo::ford_fulkerson;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::dense::{check_cap, hadamard, DensityMatrix, Pauli, StateVector};
use crate::error::{Error, Result};
use crate::keyrate::{
    nqkd_channel_input, nqkd_gate_input, secret_fraction, twoqkd_channel_links,
    twoqkd_conference_rate, twoqkd_gate_links, RateReport,
};
use crate::ghz::ghz_state;
use crate::noise::{GateNoise, NoiseConfig, Topology};

/// Largest number of Bobs for the subset enumeration behind bipartite rates.
pub const MAX_SUBSET_BOBS: usize = 20;

const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Alice,
    Bob,
    Router,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub role: Role,
}

/// Directed link carrying one qubit per use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    /// Symbol sent along the link by a fixed network code, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "nqkd")]
    Nqkd,
    #[serde(rename = "2qkd")]
    TwoQkd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLoad {
    pub from: String,
    pub to: String,
    /// Qubits sent per network use, averaged over the schedule's period.
    pub qubits_per_use: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub protocol: Protocol,
    /// Protocol rounds completed per network use (GHZ states or full sets of
    /// Bell pairs).
    pub rounds_per_use: f64,
    /// Seconds per round at one network use per second.
    pub t_rep: f64,
    /// Number of network uses after which the schedule repeats.
    pub period_uses: u64,
    pub edge_loads: Vec<EdgeLoad>,
}

impl Schedule {
    fn new(protocol: Protocol, rounds_per_use: f64, period_uses: u64, edge_loads: Vec<EdgeLoad>) -> Self {
        Self {
            protocol,
            rounds_per_use,
            t_rep: 1.0 / rounds_per_use,
            period_uses,
            edge_loads,
        }
    }

    /// True when no link carries more than one qubit per use.
    pub fn respects_capacity(&self) -> bool {
        self.edge_loads.iter().all(|e| e.qubits_per_use <= 1.0 + TOL)
    }
}

fn node(id: &str, role: Role) -> Node {
    Node {
        id: id.to_string(),
        role,
    }
}

fn edge(from: &str, to: &str) -> Edge {
    Edge {
        from: from.to_string(),
        to: to.to_string(),
        label: None,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl NetworkModel {
    pub fn from_json(s: &str) -> Result<Self> {
        let model: NetworkModel = serde_json::from_str(s)?;
        model.validate()?;
        Ok(model)
    }

    /// Alice linked directly to each of `N-1` Bobs.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n, "at least two parties are required"));
        }
        let mut nodes = vec![node("A", Role::Alice)];
        let mut edges = Vec::new();
        for k in 1..n {
            let b = format!("B{k}");
            nodes.push(node(&b, Role::Bob));
            edges.push(edge("A", &b));
        }
        Ok(Self { nodes, edges })
    }

    /// Alice linked to a router `C`, which is linked to every Bob.
    pub fn router(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n, "at least two parties are required"));
        }
        let mut nodes = vec![node("A", Role::Alice), node("C", Role::Router)];
        let mut edges = vec![edge("A", "C")];
        for k in 1..n {
            let b = format!("B{k}");
            nodes.push(node(&b, Role::Bob));
            edges.push(edge("C", &b));
        }
        Ok(Self { nodes, edges })
    }

    /// Butterfly network with two Bobs and its XOR code.
    pub fn butterfly() -> Self {
        let nodes = vec![
            node("A", Role::Alice),
            node("R1", Role::Router),
            node("R2", Role::Router),
            node("R3", Role::Router),
            node("R4", Role::Router),
            node("B1", Role::Bob),
            node("B2", Role::Bob),
        ];
        let coded = [
            ("A", "R1", "a"),
            ("A", "R2", "b"),
            ("R1", "B1", "a"),
            ("R1", "R3", "a"),
            ("R2", "R3", "b"),
            ("R2", "B2", "b"),
            ("R3", "R4", "a+b"),
            ("R4", "B1", "a+b"),
            ("R4", "B2", "a+b"),
        ];
        let edges = coded
            .iter()
            .map(|&(f, t, l)| Edge {
                from: f.to_string(),
                to: t.to_string(),
                label: Some(l.to_string()),
            })
            .collect();
        Self { nodes, edges }
    }

    pub fn alice(&self) -> Result<&Node> {
        let mut it = self.nodes.iter().filter(|n| n.role == Role::Alice);
        match (it.next(), it.next()) {
            (Some(a), None) => Ok(a),
            (None, _) => Err(Error::InvalidNetwork("no node has role alice".into())),
            _ => Err(Error::InvalidNetwork("more than one node has role alice".into())),
        }
    }

    pub fn bobs(&self) -> Vec<&Node> {
        self.nodes.iter().filter(|n| n.role == Role::Bob).collect()
    }

    /// Alice plus the Bobs.
    pub fn n_parties(&self) -> usize {
        1 + self.bobs().len()
    }

    pub fn has_router(&self) -> bool {
        self.nodes.iter().any(|n| n.role == Role::Router)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate node id `{}`", n.id)));
            }
        }
        let alice = self.alice()?;
        if self.bobs().is_empty() {
            return Err(Error::InvalidNetwork("no node has role bob".into()));
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !ids.contains(end.as_str()) {
                    return Err(Error::InvalidNetwork(format!("edge refers to unknown node `{end}`")));
                }
            }
            if e.from == e.to {
                return Err(Error::InvalidNetwork(format!("self-loop at `{}`", e.from)));
            }
        }
        // breadth-first reachability from Alice
        let mut seen = HashSet::from([alice.id.as_str()]);
        let mut queue = VecDeque::from([alice.id.as_str()]);
        while let Some(v) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.from == v) {
                if seen.insert(e.to.as_str()) {
                    queue.push_back(e.to.as_str());
                }
            }
        }
        if let Some(b) = self.bobs().iter().find(|b| !seen.contains(b.id.as_str())) {
            return Err(Error::InvalidNetwork(format!("Alice has no path to `{}`", b.id)));
        }
        Ok(())
    }

    /// Flow graph with edge capacity `cap`, plus a super sink fed by the
    /// given Bobs with capacity `demand` each.
    fn flow_graph(&self, sinks: &[&str], cap: u64, demand: u64) -> (DiGraph<(), u64>, NodeIndex, NodeIndex) {
        let mut g = DiGraph::new();
        let idx: HashMap<&str, NodeIndex> = self
            .nodes
            .iter()
            .map(|n| (n.id.as_str(), g.add_node(())))
            .collect();
        for e in &self.edges {
            g.add_edge(idx[e.from.as_str()], idx[e.to.as_str()], cap);
        }
        let sink = g.add_node(());
        for s in sinks {
            g.add_edge(idx[s], sink, demand);
        }
        let source = idx[self.alice().expect("validated").id.as_str()];
        (g, source, sink)
    }

    /// Maximum number of qubits per use from Alice to the set of Bobs.
    pub fn max_flow_to(&self, bobs: &[&str]) -> Result<u64> {
        self.validate()?;
        let demand = self.edges.len() as u64 + 1;
        let (g, s, t) = self.flow_graph(bobs, 1, demand);
        Ok(ford_fulkerson(&g, s, t).0)
    }

    /// GHZ states per use achievable by network coding: `min_i maxflow(A → B_i)`.
    pub fn multicast_capacity(&self) -> Result<u64> {
        self.validate()?;
        let mut best = u64::MAX;
        for b in self.bobs() {
            best = best.min(self.max_flow_to(&[b.id.as_str()])?);
        }
        Ok(best)
    }

    /// Bipartite rounds per use as the fraction `(cut, |S|)` in lowest terms.
    pub fn bipartite_rate(&self) -> Result<(u64, u64)> {
        self.validate()?;
        let bobs: Vec<&str> = self.bobs().iter().map(|b| b.id.as_str()).collect();
        if bobs.len() > MAX_SUBSET_BOBS {
            return Err(Error::InvalidNetwork(format!(
                "subset enumeration supports at most {MAX_SUBSET_BOBS} Bobs"
            )));
        }
        let mut best = (u64::MAX, 1u64);
        for mask in 1usize..1 << bobs.len() {
            let subset: Vec<&str> = (0..bobs.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| bobs[i])
                .collect();
            let cut = self.max_flow_to(&subset)?;
            let size = subset.len() as u64;
            // cut/size < best.0/best.1
            if (cut as u128) * (best.1 as u128) < (best.0 as u128) * (size as u128) {
                best = (cut, size);
            }
        }
        let g = gcd(best.0, best.1);
        Ok((best.0 / g, best.1 / g))
    }

    fn loads_from_flow(&self, g: &DiGraph<(), u64>, flows: &[u64], per: f64) -> Vec<EdgeLoad> {
        self.edges
            .iter()
            .zip(g.edge_indices())
            .map(|(e, ei)| EdgeLoad {
                from: e.from.clone(),
                to: e.to.clone(),
                qubits_per_use: flows[ei.index()] as f64 / per,
            })
            .collect()
    }

    /// Schedule of the given protocol on this network at one use per second.
    pub fn schedule(&self, protocol: Protocol) -> Result<Schedule> {
        self.validate()?;
        match protocol {
            Protocol::Nqkd => {
                let n = self.multicast_capacity()?;
                if n == 0 {
                    return Err(Error::InvalidNetwork("zero multicast capacity".into()));
                }
                // a network code reuses each link for all Bobs, so a link's
                // load is the largest of the per-Bob flows
                let mut loads = vec![0.0f64; self.edges.len()];
                for b in self.bobs() {
                    let (g, s, t) = self.flow_graph(&[b.id.as_str()], 1, n);
                    let (_, flows) = ford_fulkerson(&g, s, t);
                    for (l, ei) in loads.iter_mut().zip(g.edge_indices()) {
                        *l = l.max(flows[ei.index()] as f64);
                    }
                }
                let edge_loads = self
                    .edges
                    .iter()
                    .zip(loads)
                    .map(|(e, q)| EdgeLoad {
                        from: e.from.clone(),
                        to: e.to.clone(),
                        qubits_per_use: q,
                    })
                    .collect();
                Ok(Schedule::new(protocol, n as f64, 1, edge_loads))
            }
            Protocol::TwoQkd => {
                // over `size` uses each Bob receives `cut` Bell-pair halves
                let (cut, size) = self.bipartite_rate()?;
                if cut == 0 {
                    return Err(Error::InvalidNetwork("a Bob cannot be reached".into()));
                }
                let bobs: Vec<&str> = self.bobs().iter().map(|b| b.id.as_str()).collect();
                let (g, s, t) = self.flow_graph(&bobs, size, cut);
                let (total, flows) = ford_fulkerson(&g, s, t);
                debug_assert_eq!(total, cut * bobs.len() as u64);
                let loads = self.loads_from_flow(&g, &flows, size as f64);
                Ok(Schedule::new(protocol, cut as f64 / size as f64, size, loads))
            }
        }
    }
}

/// Router network schedule: one use per GHZ state, `N-1` uses per set of
/// Bell pairs.
pub fn schedule_star_router(n: usize, protocol: Protocol) -> Result<Schedule> {
    NetworkModel::router(n)?.schedule(protocol)
}

/// Butterfly schedule: two GHZ states per use against one set of Bell pairs.
pub fn schedule_butterfly(protocol: Protocol) -> Result<Schedule> {
    NetworkModel::butterfly().schedule(protocol)
}

/// Schedule from a multicast capacity alone: `n` GHZ rounds per use against
/// `n/(N-1)` bipartite rounds. No link loads are implied.
pub fn schedule_multicast(multicast: u64, n: usize, protocol: Protocol) -> Result<Schedule> {
    if multicast == 0 {
        return Err(Error::param("multicast", 0, "must be positive"));
    }
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    let rounds = match protocol {
        Protocol::Nqkd => multicast as f64,
        Protocol::TwoQkd => multicast as f64 / (n - 1) as f64,
    };
    Ok(Schedule::new(protocol, rounds, 1, Vec::new()))
}

/// Outcome of the router distribution for one measurement result of `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    /// `+1` or `-1`.
    pub outcome: i8,
    pub probability: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouterDistribution {
    pub n: usize,
    /// State of Alice and the Bobs after the `+1` outcome.
    pub state: StateVector,
    pub branches: Vec<BranchReport>,
    /// Fidelity when the correction is a controlled gate and `C` is traced out.
    pub coherent_fidelity: f64,
}

/// Distributes a GHZ state through the router by network coding and checks
/// the result against `H^⊗N |GHZ⟩ = (|+...+⟩ + |-...-⟩)/√2`.
///
/// Qubits: `C` (sent to the router), `A`, then `B_1..B_{N-1}`. Alice makes a
/// Bell pair from `|+⟩_C|+⟩_A` with a controlled-Z; the router entangles
/// fresh `|+⟩` qubits with `C` by controlled-Z gates, measures `C` in the X
/// basis and applies `X` to `B_1` on outcome `-1`.
pub fn distribute_ghz_via_router(n: usize) -> Result<RouterDistribution> {
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    let total = n + 1;
    check_cap(total)?;
    let c = 0;
    let mut psi = StateVector::zero(total)?;
    for q in 0..total {
        psi.apply_1q(q, &hadamard());
    }
    for b in 1..total {
        psi.cz(c, b);
    }

    let mut target = ghz_state(n)?;
    for q in 0..n {
        target.apply_1q(q, &hadamard());
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
    let minus = [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)];
    let mut branches = Vec::new();
    let mut plus_state = None;
    for (outcome, onto) in [(1i8, plus), (-1i8, minus)] {
        let (p, mut rest) = psi.measure_qubit(c, onto);
        if outcome == -1 {
            // B_1 is qubit 1 of the remaining A, B_1, ... register
            rest.apply_pauli(1, Pauli::X);
        }
        branches.push(BranchReport {
            outcome,
            probability: p,
            fidelity: rest.fidelity(&target),
        });
        if outcome == 1 {
            plus_state = Some(rest);
        }
    }

    // H on C turns |±⟩ into |0⟩/|1⟩; a CNOT from C onto B_1 then applies the
    // correction before C is discarded
    let mut coherent = psi;
    coherent.apply_1q(c, &hadamard());
    coherent.cnot(c, 2);
    let reduced = coherent.to_density().partial_trace(c);
    let coherent_fidelity = reduced.fidelity_with_pure(&target);

    Ok(RouterDistribution {
        n,
        state: plus_state.expect("the +1 branch is always evaluated"),
        branches,
        coherent_fidelity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementBound {
    pub n: usize,
    /// `E_{A|B}` that one transmitted qubit can create.
    pub bound: f64,
    /// `E_{A|B}` of `N-1` Bell pairs between Alice and the Bobs.
    pub bell_pairs_entropy: f64,
    /// `E_{A|B}` of the GHZ state across Alice versus all Bobs.
    pub ghz_entropy: f64,
    /// Network uses the bipartite approach needs through a single link.
    pub uses_required: u64,
    pub single_use_suffices: bool,
}

fn trace_out_from(rho: &DensityMatrix, keep: usize) -> DensityMatrix {
    let mut r = rho.clone();
    while r.n_qubits() > keep {
        r = r.partial_trace(r.n_qubits() - 1);
    }
    r
}

/// Entanglement entropy across the Alice | rest cut: one qubit through the
/// bottleneck carries at most 1 ebit, while `N-1` Bell pairs need `N-1`.
pub fn entanglement_bound_check(n: usize) -> Result<EntanglementBound> {
    if n < 2 {
        return Err(Error::param("n", n, "at least two parties are required"));
    }
    let pairs = n - 1;
    check_cap(2 * pairs)?;
    // qubits 0..pairs stay with Alice, qubit pairs+k goes to Bob k
    let mut bell = StateVector::zero(2 * pairs)?;
    for k in 0..pairs {
        bell.apply_1q(k, &hadamard());
        bell.cnot(k, pairs + k);
    }
    let bell_pairs_entropy = trace_out_from(&bell.to_density(), pairs).entropy();
    let ghz_entropy = trace_out_from(&ghz_state(n)?.to_density(), 1).entropy();
    let bound = 1.0;
    Ok(EntanglementBound {
        n,
        bound,
        bell_pairs_entropy,
        ghz_entropy,
        uses_required: (bell_pairs_entropy / bound - 1e-9).ceil() as u64,
        single_use_suffices: bell_pairs_entropy <= bound + 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateComparison {
    pub n: usize,
    pub nqkd: RateReport,
    pub twoqkd: RateReport,
    pub nqkd_schedule: Schedule,
    pub twoqkd_schedule: Schedule,
    /// GHZ protocol has the strictly larger key rate.
    pub advantage: bool,
    /// `R_nqkd / R_2qkd` when the latter is positive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

/// Key rates of both approaches on `network` under `noise` (perfect devices
/// when `None`). Gate noise uses the router preparation model whenever the
/// network has router nodes.
pub fn compare_rates(network: &NetworkModel, noise: Option<&NoiseConfig>) -> Result<RateComparison> {
    network.validate()?;
    let n = network.n_parties();
    let nqkd_schedule = network.schedule(Protocol::Nqkd)?;
    let twoqkd_schedule = network.schedule(Protocol::TwoQkd)?;
    let topology = if network.has_router() {
        Topology::Router
    } else {
        Topology::Star
    };
    let noise = noise.copied().unwrap_or(NoiseConfig::Gate {
        f_g: 0.0,
        topology,
    });
    noise.validate()?;
    let (input, links) = match noise {
        NoiseConfig::Gate { f_g, .. } => (
            nqkd_gate_input(&GateNoise::new(f_g, topology)?, n, nqkd_schedule.t_rep)?,
            twoqkd_gate_links(f_g, n)?,
        ),
        NoiseConfig::Channel { f_c, .. } => (
            nqkd_channel_input(f_c, n, nqkd_schedule.t_rep)?,
            twoqkd_channel_links(f_c, n)?,
        ),
    };
    let nqkd = secret_fraction(&input)?;
    let twoqkd = twoqkd_conference_rate(&links, twoqkd_schedule.t_rep)?;
    let ratio = (twoqkd.rate > 0.0).then(|| nqkd.rate / twoqkd.rate);
    Ok(RateComparison {
        n,
        advantage: nqkd.rate > twoqkd.rate,
        ratio,
        nqkd,
        twoqkd,
        nqkd_schedule,
        twoqkd_schedule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keyrate::nqkd_gate_threshold;

    #[test]
    fn router_schedules() {
        for n in 2..=8 {
            let nq = schedule_star_router(n, Protocol::Nqkd).unwrap();
            let tw = schedule_star_router(n, Protocol::TwoQkd).unwrap();
            assert_eq!(nq.t_rep, 1.0);
            assert!((tw.t_rep - (n - 1) as f64).abs() < 1e-12);
            assert_eq!(tw.period_uses, (n - 1) as u64);
            assert!(nq.respects_capacity() && tw.respects_capacity());
        }
    }

    #[test]
    fn star_schedules() {
        let net = NetworkModel::star(5).unwrap();
        assert_eq!(net.schedule(Protocol::Nqkd).unwrap().t_rep, 1.0);
        assert_eq!(net.schedule(Protocol::TwoQkd).unwrap().t_rep, 1.0);
    }

    #[test]
    fn butterfly_schedules() {
        let nq = schedule_butterfly(Protocol::Nqkd).unwrap();
        let tw = schedule_butterfly(Protocol::TwoQkd).unwrap();
        assert_eq!(nq.rounds_per_use, 2.0);
        assert_eq!(nq.t_rep, 0.5);
        assert_eq!(tw.rounds_per_use, 1.0);
        assert!(nq.respects_capacity() && tw.respects_capacity());
        // every link of the butterfly carries its coded symbol
        assert!(nq.edge_loads.iter().all(|e| e.qubits_per_use == 1.0));
    }

    #[test]
    fn generalized_multicast() {
        for n in 3..=6 {
            let nq = schedule_multicast(4, n, Protocol::Nqkd).unwrap();
            let tw = schedule_multicast(4, n, Protocol::TwoQkd).unwrap();
            assert_eq!(nq.rounds_per_use, 4.0);
            assert!((tw.rounds_per_use - 4.0 / (n - 1) as f64).abs() < 1e-15);
        }
        assert!(schedule_multicast(0, 3, Protocol::Nqkd).is_err());
    }

    #[test]
    fn flows_and_cuts() {
        let r = NetworkModel::router(4).unwrap();
        assert_eq!(r.multicast_capacity().unwrap(), 1);
        assert_eq!(r.bipartite_rate().unwrap(), (1, 3));
        assert_eq!(r.max_flow_to(&["B1", "B2"]).unwrap(), 1);
        let b = NetworkModel::butterfly();
        assert_eq!(b.multicast_capacity().unwrap(), 2);
        assert_eq!(b.bipartite_rate().unwrap(), (1, 1));
        assert_eq!(b.max_flow_to(&["B1", "B2"]).unwrap(), 2);
    }

    #[test]
    fn validation() {
        let bad = r#"{"nodes":[{"id":"A","role":"alice"},{"id":"B","role":"bob"}],"edges":[]}"#;
        assert!(NetworkModel::from_json(bad).is_err());
        let unknown = r#"{"nodes":[{"id":"A","role":"alice"},{"id":"B","role":"bob"}],"edges":[{"from":"A","to":"X"}]}"#;
        assert!(NetworkModel::from_json(unknown).is_err());
        let two_alices = r#"{"nodes":[{"id":"A","role":"alice"},{"id":"A2","role":"alice"},{"id":"B","role":"bob"}],"edges":[{"from":"A","to":"B"}]}"#;
        assert!(NetworkModel::from_json(two_alices).is_err());
        let ok = r#"{"nodes":[{"id":"A","role":"alice"},{"id":"C","role":"router"},{"id":"B1","role":"bob"},{"id":"B2","role":"bob"}],
                    "edges":[{"from":"A","to":"C"},{"from":"C","to":"B1"},{"from":"C","to":"B2"}]}"#;
        let net = NetworkModel::from_json(ok).unwrap();
        assert_eq!(net, NetworkModel {
            nodes: net.nodes.clone(),
            edges: NetworkModel::router(3).unwrap().edges,
        });
        assert_eq!(net.n_parties(), 3);
    }

    #[test]
    fn router_distribution_fidelity() {
        for n in 2..=8 {
            let d = distribute_ghz_via_router(n).unwrap();
            assert_eq!(d.branches.len(), 2);
            for b in &d.branches {
                assert!((b.probability - 0.5).abs() < 1e-12);
                assert!((b.fidelity - 1.0).abs() < 1e-12, "n={n} outcome={}", b.outcome);
            }
            assert!((d.coherent_fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uncorrected_minus_branch_is_wrong() {
        // without the X correction the -1 branch is orthogonal to the target
        let n = 4;
        let mut psi = StateVector::zero(n + 1).unwrap();
        for q in 0..=n {
            psi.apply_1q(q, &hadamard());
        }
        for b in 1..=n {
            psi.cz(0, b);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (_, rest) = psi.measure_qubit(0, [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]);
        let mut target = ghz_state(n).unwrap();
        for q in 0..n {
            target.apply_1q(q, &hadamard());
        }
        assert!(rest.fidelity(&target) < 1e-12);
    }

    #[test]
    fn entanglement_bounds() {
        let e2 = entanglement_bound_check(2).unwrap();
        assert!(e2.single_use_suffices);
        assert_eq!(e2.uses_required, 1);
        for n in 3..=6 {
            let e = entanglement_bound_check(n).unwrap();
            assert!((e.bell_pairs_entropy - (n - 1) as f64).abs() < 1e-12);
            assert!((e.ghz_entropy - 1.0).abs() < 1e-12);
            assert!(!e.single_use_suffices);
            assert_eq!(e.uses_required, (n - 1) as u64);
        }
    }

    #[test]
    fn ideal_ratios() {
        for n in 3..=8 {
            let c = compare_rates(&NetworkModel::router(n).unwrap(), None).unwrap();
            assert!((c.ratio.unwrap() - (n - 1) as f64).abs() < 1e-12);
            assert!(c.advantage);
        }
        let c = compare_rates(&NetworkModel::butterfly(), None).unwrap();
        assert!((c.ratio.unwrap() - 2.0).abs() < 1e-12);
        let c = compare_rates(&NetworkModel::star(4).unwrap(), None).unwrap();
        assert!((c.ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(!c.advantage);
    }

    #[test]
    fn gate_noise_brackets_threshold() {
        for n in [3, 5, 9] {
            let t = nqkd_gate_threshold(n).unwrap();
            let net = NetworkModel::router(n).unwrap();
            let at = |f: f64| {
                compare_rates(&net, Some(&NoiseConfig::Gate { f_g: f, topology: Topology::Router }))
                    .unwrap()
                    .advantage
            };
            assert!(at(t - 1e-5));
            assert!(!at(t + 1e-5));
        }
        let net = NetworkModel::router(3).unwrap();
        let cfg = |f| NoiseConfig::Gate { f_g: f, topology: Topology::Router };
        assert!(compare_rates(&net, Some(&cfg(0.05))).unwrap().advantage);
        assert!(!compare_rates(&net, Some(&cfg(0.10))).unwrap().advantage);
    }

    #[test]
    fn rate_scaling_with_parties() {
        let f = 0.02;
        let cfg = NoiseConfig::Gate { f_g: f, topology: Topology::Router };
        let mut prev = f64::INFINITY;
        for n in 3..=10 {
            let c = compare_rates(&NetworkModel::router(n).unwrap(), Some(&cfg)).unwrap();
            assert!(c.nqkd.rate < prev);
            prev = c.nqkd.rate;
            // bipartite rate scales as 1/(N-1)
            let single = c.twoqkd.r_inf;
            assert!((c.twoqkd.rate * (n - 1) as f64 - single).abs() < 1e-15);
        }
    }
}
