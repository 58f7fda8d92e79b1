//! Switch-network topologies as component graphs, with static cost metrics.
//!
//! An n-mode GMZI expands to coupler → n active phase shifters → coupler,
//! so every path through it crosses exactly one active element.  Networks
//! that reuse hardware over several time bins (storage loops) are unrolled;
//! unrolled copies share a `physical` id and are counted once.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use petgraph::Direction;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComponentKind {
    /// Passive mode mixer (the DFT stages of a GMZI, or an MZI's couplers).
    Coupler,
    ActivePhase,
    PassivePhase,
    /// A crossing network realised as `count` pairwise waveguide crossings.
    Crossing { count: u64 },
    /// Delay line of `bins` time bins.
    Delay { bins: u32 },
    DetectorPort,
    Input { port: usize },
    Output { port: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    #[serde(flatten)]
    pub kind: ComponentKind,
    /// Number of modes the component acts on.
    pub ports: usize,
    /// Hardware identity; unrolled copies of one device share it.
    pub physical: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub from_port: usize,
    pub to_port: usize,
}

/// A network as a DAG of components joined port to port.
#[derive(Clone, Debug)]
pub struct SwitchNetwork {
    pub name: String,
    pub graph: DiGraph<Component, Link>,
    pub inputs: Vec<NodeIndex>,
    pub outputs: Vec<NodeIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMetrics {
    pub active_count: u64,
    pub active_depth_min: u64,
    pub active_depth_max: u64,
    pub crossings: u64,
    /// Durations of the physical delay lines, ascending, with repeats.
    pub delay_inventory: Vec<u32>,
    /// Number of physical GMZI-style switch blocks.
    pub switch_blocks: u64,
}

type Port = (NodeIndex, usize);

/// Open ports of a GMZI block.
struct Block {
    ins: Vec<Port>,
    outs: Vec<Port>,
}

struct Builder {
    g: DiGraph<Component, Link>,
    next_physical: usize,
    inputs: Vec<NodeIndex>,
    outputs: Vec<NodeIndex>,
}

impl Builder {
    fn new() -> Self {
        Self { g: DiGraph::new(), next_physical: 0, inputs: Vec::new(), outputs: Vec::new() }
    }

    fn fresh(&mut self) -> usize {
        self.next_physical += 1;
        self.next_physical - 1
    }

    fn node(&mut self, kind: ComponentKind, ports: usize, physical: usize) -> NodeIndex {
        self.g.add_node(Component { kind, ports, physical })
    }

    fn link(&mut self, a: Port, b: Port) {
        self.g.add_edge(a.0, b.0, Link { from_port: a.1, to_port: b.1 });
    }

    fn input(&mut self) -> Port {
        let p = self.inputs.len();
        let id = self.fresh();
        let n = self.node(ComponentKind::Input { port: p }, 1, id);
        self.inputs.push(n);
        (n, 0)
    }

    fn output(&mut self, from: Port) {
        let p = self.outputs.len();
        let id = self.fresh();
        let n = self.node(ComponentKind::Output { port: p }, 1, id);
        self.outputs.push(n);
        self.link(from, (n, 0));
    }

    fn unused(&mut self, from: Port) {
        let id = self.fresh();
        let n = self.node(ComponentKind::DetectorPort, 1, id);
        self.link(from, (n, 0));
    }

    /// New physical GMZI of size `n`; `physical` reuses an existing
    /// device's ids (for unrolled copies).
    fn gmzi(&mut self, n: usize, physical: Option<usize>) -> Block {
        let base = physical.unwrap_or_else(|| {
            let b = self.next_physical;
            self.next_physical += n + 2;
            b
        });
        if n == 1 {
            // a size-1 "switch" is a plain waveguide
            let w = self.node(ComponentKind::PassivePhase, 1, base);
            return Block { ins: vec![(w, 0)], outs: vec![(w, 0)] };
        }
        let c_in = self.node(ComponentKind::Coupler, n, base);
        let c_out = self.node(ComponentKind::Coupler, n, base + 1);
        for s in 0..n {
            let a = self.node(ComponentKind::ActivePhase, 1, base + 2 + s);
            self.link((c_in, s), (a, 0));
            self.link((a, 0), (c_out, s));
        }
        Block { ins: (0..n).map(|s| (c_in, s)).collect(), outs: (0..n).map(|s| (c_out, s)).collect() }
    }

    fn delay(&mut self, bins: u32, physical: Option<usize>) -> (Port, Port) {
        let id = physical.unwrap_or_else(|| self.fresh());
        let d = self.node(ComponentKind::Delay { bins }, 1, id);
        ((d, 0), (d, 0))
    }

    fn finish(self, name: impl Into<String>) -> SwitchNetwork {
        SwitchNetwork { name: name.into(), graph: self.g, inputs: self.inputs, outputs: self.outputs }
    }
}

fn ceil_log(n: usize, base: usize) -> u32 {
    let mut d = 0;
    let mut p = 1usize;
    while p < n {
        p *= base;
        d += 1;
    }
    d
}

fn check_sizes(n_total: usize, n: usize) -> Result<()> {
    if n_total < 2 {
        return invalid(format!("network needs at least 2 inputs, got {n_total}"));
    }
    if n < 2 {
        return invalid(format!("switch size must be >= 2, got {n}"));
    }
    if n_total > 1 << 16 {
        return invalid(format!("network size {n_total} too large"));
    }
    Ok(())
}

/// N-to-1 tree of n-to-1 GMZIs with ⌈log_n N⌉ levels.
pub fn build_log_tree(n_inputs: usize, n: usize) -> Result<SwitchNetwork> {
    check_sizes(n_inputs, n)?;
    let depth = ceil_log(n_inputs, n);
    let mut b = Builder::new();
    // leaves first: level 0 GMZIs take the inputs
    let mut frontier: Vec<Port> = Vec::new();
    let leaves = n.pow(depth);
    for i in 0..leaves {
        if i < n_inputs {
            frontier.push(b.input());
        } else {
            // vacuum port
            let id = b.fresh();
            let v = b.node(ComponentKind::PassivePhase, 1, id);
            frontier.push((v, 0));
        }
    }
    while frontier.len() > 1 {
        let mut next = Vec::new();
        for chunk in frontier.chunks(n) {
            let g = b.gmzi(n, None);
            for (s, &p) in chunk.iter().enumerate() {
                b.link(p, g.ins[s]);
            }
            next.push(g.outs[0]);
            for &o in &g.outs[1..] {
                b.unused(o);
            }
        }
        frontier = next;
    }
    b.output(frontier[0]);
    Ok(b.finish(format!("log-tree(N={n_inputs}, n={n})")))
}

/// Linear cascade of n-mode GMZIs; each stage adds n−1 fresh inputs.
pub fn build_chain(n_inputs: usize, n: usize) -> Result<SwitchNetwork> {
    check_sizes(n_inputs, n)?;
    let stages = (n_inputs - 1).div_ceil(n - 1);
    let mut b = Builder::new();
    let mut carried: Option<Port> = None;
    let mut remaining = n_inputs;
    for _ in 0..stages {
        let g = b.gmzi(n, None);
        let mut slot = 0;
        if let Some(c) = carried {
            b.link(c, g.ins[0]);
            slot = 1;
        }
        while slot < n {
            if remaining > 0 {
                let i = b.input();
                b.link(i, g.ins[slot]);
                remaining -= 1;
            }
            slot += 1;
        }
        for &o in &g.outs[1..] {
            b.unused(o);
        }
        carried = Some(g.outs[0]);
    }
    b.output(carried.expect("at least one stage"));
    Ok(b.finish(format!("chain(N={n_inputs}, n={n})")))
}

/// Temporal N-to-1 mux: ⌈log_n N⌉+1 GMZIs on one line, with delays
/// `k·n^i` (k = 0..n−1) between GMZIs `i` and `i+1`.
pub fn build_binary_delay_network(n_inputs: usize, n: usize) -> Result<SwitchNetwork> {
    check_sizes(n_inputs, n)?;
    let d = ceil_log(n_inputs, n) as usize;
    let mut b = Builder::new();
    let src = b.input();
    let mut prev = b.gmzi(n, None);
    b.link(src, prev.ins[0]);
    // the other inputs of the first GMZI take vacuum
    for layer in 0..d {
        let next = b.gmzi(n, None);
        let unit = (n as u32).pow(layer as u32);
        for k in 0..n {
            if k == 0 {
                b.link(prev.outs[0], next.ins[0]);
            } else {
                let (din, dout) = b.delay(k as u32 * unit, None);
                b.link(prev.outs[k], din);
                b.link(dout, next.ins[k]);
            }
        }
        prev = next;
    }
    b.output(prev.outs[0]);
    for &o in &prev.outs[1..] {
        b.unused(o);
    }
    Ok(b.finish(format!("delay-network(N={n_inputs}, n={n})")))
}

/// One n-mode GMZI with a one-bin storage loop, unrolled over
/// ⌈N/(n−1)⌉ passes; each pass takes n−1 new inputs.
pub fn build_storage_loop(n_inputs: usize, n: usize) -> Result<SwitchNetwork> {
    check_sizes(n_inputs, n)?;
    let passes = n_inputs.div_ceil(n - 1);
    let mut b = Builder::new();
    let phys = b.next_physical;
    b.next_physical += n + 2;
    let loop_id = b.fresh();
    let mut carried: Option<Port> = None;
    let mut remaining = n_inputs;
    for pass in 0..passes {
        let g = b.gmzi(n, Some(phys));
        if let Some(c) = carried {
            b.link(c, g.ins[0]);
        }
        for slot in 1..n {
            if remaining > 0 {
                let i = b.input();
                b.link(i, g.ins[slot]);
                remaining -= 1;
            }
        }
        if pass + 1 == passes {
            b.output(g.outs[0]);
        } else {
            let (din, dout) = b.delay(1, Some(loop_id));
            b.link(g.outs[0], din);
            carried = Some(dout);
        }
        for &o in &g.outs[1..] {
            b.unused(o);
        }
    }
    Ok(b.finish(format!("storage-loop(N={n_inputs}, n={n})")))
}

/// Number of pairwise crossings in the shuffle that connects output `j` of
/// input switch `i` to input `i` of output switch `j`, counted as
/// inversions.
pub fn shuffle_crossings(links: &[(usize, usize)]) -> u64 {
    // links sorted by source position; count inversions of destinations
    let mut inv = 0u64;
    for a in 0..links.len() {
        for c in a + 1..links.len() {
            if links[a].1 > links[c].1 {
                inv += 1;
            }
        }
    }
    inv
}

/// N-to-M Spanke network: N 1-to-M switches, a shuffle, M N-to-1 GMZIs.
/// With `reduced`, input `i < M` only gets a 1-to-(i+1) switch and output
/// GMZI `j` only sees inputs `i ≥ j`.
pub fn build_spanke(n_inputs: usize, m: usize, reduced: bool) -> Result<SwitchNetwork> {
    if m == 0 || n_inputs < m {
        return invalid(format!("Spanke network needs N >= M >= 1, got N={n_inputs}, M={m}"));
    }
    if n_inputs > 4096 {
        return invalid("network too large");
    }
    let fan = |i: usize| if reduced { (i + 1).min(m) } else { m };
    let mut b = Builder::new();
    let mut first = Vec::new();
    for i in 0..n_inputs {
        let inp = b.input();
        let g = b.gmzi(fan(i), None);
        b.link(inp, g.ins[0]);
        first.push(g);
    }
    // second layer: GMZI j collects from every input that reaches it
    let sources: Vec<Vec<usize>> = (0..m).map(|j| (0..n_inputs).filter(|&i| j < fan(i)).collect()).collect();
    let seconds: Vec<Block> = sources.iter().map(|s| b.gmzi(s.len(), None)).collect();
    let mut order = Vec::new();
    for i in 0..n_inputs {
        for j in 0..fan(i) {
            let slot = sources[j].iter().position(|&x| x == i).expect("source listed");
            order.push((i * m + j, j * n_inputs + slot));
        }
    }
    let count = shuffle_crossings(&order);
    let id = b.fresh();
    let total: usize = order.len();
    let cross = b.node(ComponentKind::Crossing { count }, total, id);
    for (k, &(src, _)) in order.iter().enumerate() {
        let (i, j) = (src / m, src % m);
        b.link(first[i].outs[j], (cross, k));
    }
    // the crossing component's output port k feeds the destination slot
    let mut by_dest: Vec<(usize, usize)> = order.iter().enumerate().map(|(k, &(_, dst))| (dst, k)).collect();
    by_dest.sort_unstable();
    for (out_port, &(dst, _)) in by_dest.iter().enumerate() {
        let (j, slot) = (dst / n_inputs, dst % n_inputs);
        b.link((cross, out_port), seconds[j].ins[slot]);
    }
    for g in &first {
        for &o in &g.outs[g.outs.len().min(m)..] {
            b.unused(o);
        }
    }
    for g in &seconds {
        b.output(g.outs[0]);
        for &o in &g.outs[1..] {
            b.unused(o);
        }
    }
    Ok(b.finish(format!("spanke(N={n_inputs}, M={m}{})", if reduced { ", reduced" } else { "" })))
}

/// M GMZIs of sizes N, N−1, …, N−M+1; each keeps one output and passes
/// the rest on.
pub fn build_concatenated_gmzi(n_inputs: usize, m: usize) -> Result<SwitchNetwork> {
    if m == 0 || m >= n_inputs {
        return invalid(format!("concatenated GMZIs need N > M >= 1 (N >= 2), got N={n_inputs}, M={m}"));
    }
    let mut b = Builder::new();
    let mut feed: Vec<Port> = (0..n_inputs).map(|_| b.input()).collect();
    for j in 0..m {
        let g = b.gmzi(n_inputs - j, None);
        for (s, &p) in feed.iter().enumerate() {
            b.link(p, g.ins[s]);
        }
        b.output(g.outs[0]);
        feed = g.outs[1..].to_vec();
    }
    for p in feed {
        b.unused(p);
    }
    Ok(b.finish(format!("concatenated-gmzi(N={n_inputs}, M={m})")))
}

impl SwitchNetwork {
    pub fn is_acyclic(&self) -> bool {
        toposort(&self.graph, None).is_ok()
    }

    /// Per-port fan checks: no port of any component is used twice and no
    /// port index exceeds the component's mode count.
    pub fn check_ports(&self) -> Result<()> {
        for n in self.graph.node_indices() {
            let c = &self.graph[n];
            let mut ins = BTreeSet::new();
            for e in self.graph.edges_directed(n, Direction::Incoming) {
                let p = e.weight().to_port;
                if p >= c.ports || !ins.insert(p) {
                    return Err(Error::Internal(format!("input port {p} of node {} misused", n.index())));
                }
            }
            let mut outs = BTreeSet::new();
            for e in self.graph.edges_directed(n, Direction::Outgoing) {
                let p = e.weight().from_port;
                if p >= c.ports || !outs.insert(p) {
                    return Err(Error::Internal(format!("output port {p} of node {} misused", n.index())));
                }
            }
        }
        Ok(())
    }

    /// Minimum and maximum number of active elements on any path from an
    /// input to an output, by dynamic programming over a topological order.
    pub fn depth_range(&self) -> Result<(u64, u64)> {
        let order = toposort(&self.graph, None).map_err(|_| Error::Internal("network has a cycle".into()))?;
        let mut best: Vec<Option<(u64, u64)>> = vec![None; self.graph.node_count()];
        for &n in &self.inputs {
            best[n.index()] = Some((0, 0));
        }
        for n in order {
            let Some((lo, hi)) = best[n.index()] else { continue };
            let own = u64::from(self.graph[n].kind == ComponentKind::ActivePhase);
            // `best` holds the depth on entry; add the node itself on exit
            let (lo, hi) = (lo + own, hi + own);
            for e in self.graph.edges_directed(n, Direction::Outgoing) {
                let t = e.target().index();
                best[t] = Some(match best[t] {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        let reached: Vec<(u64, u64)> = self.outputs.iter().filter_map(|o| best[o.index()]).collect();
        if reached.is_empty() {
            return Ok((0, 0));
        }
        Ok((reached.iter().map(|r| r.0).min().unwrap_or(0), reached.iter().map(|r| r.1).max().unwrap_or(0)))
    }

    pub fn metrics(&self) -> Result<CostMetrics> {
        let (lo, hi) = self.depth_range()?;
        let mut actives = BTreeSet::new();
        let mut crossings = BTreeMap::new();
        let mut delays = BTreeMap::new();
        let mut couplers = BTreeSet::new();
        for c in self.graph.node_weights() {
            match c.kind {
                ComponentKind::ActivePhase => {
                    actives.insert(c.physical);
                }
                ComponentKind::Crossing { count } => {
                    crossings.insert(c.physical, count);
                }
                ComponentKind::Delay { bins } => {
                    delays.insert(c.physical, bins);
                }
                ComponentKind::Coupler => {
                    couplers.insert(c.physical);
                }
                _ => {}
            }
        }
        let mut delay_inventory: Vec<u32> = delays.into_values().collect();
        delay_inventory.sort_unstable();
        Ok(CostMetrics {
            active_count: actives.len() as u64,
            active_depth_min: lo,
            active_depth_max: hi,
            crossings: crossings.values().sum(),
            delay_inventory,
            switch_blocks: couplers.len() as u64 / 2,
        })
    }

    /// Component list and edge list, for JSON export.
    pub fn to_record(&self) -> NetworkRecord {
        NetworkRecord {
            name: self.name.clone(),
            components: self.graph.node_weights().cloned().collect(),
            edges: self
                .graph
                .edge_references()
                .map(|e| EdgeRecord { from: e.source().index(), from_port: e.weight().from_port, to: e.target().index(), to_port: e.weight().to_port })
                .collect(),
            inputs: self.inputs.iter().map(|n| n.index()).collect(),
            outputs: self.outputs.iter().map(|n| n.index()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from: usize,
    pub from_port: usize,
    pub to: usize,
    pub to_port: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub name: String,
    pub components: Vec<Component>,
    pub edges: Vec<EdgeRecord>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

/// Topologies selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    LogTree,
    Chain,
    DelayNetwork,
    StorageLoop,
    Spanke,
    SpankeReduced,
    ConcatenatedGmzi,
}

impl std::str::FromStr for Topology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "log-tree" => Self::LogTree,
            "chain" => Self::Chain,
            "delay-network" | "binary-delay" => Self::DelayNetwork,
            "storage-loop" => Self::StorageLoop,
            "spanke" => Self::Spanke,
            "spanke-reduced" => Self::SpankeReduced,
            "concatenated-gmzi" => Self::ConcatenatedGmzi,
            _ => return invalid(format!("unknown topology {s:?}")),
        })
    }
}

/// Build a topology; `n` is the switch size or, for the N-to-M families,
/// the output count M.
pub fn build(topology: Topology, size: usize, n: usize) -> Result<SwitchNetwork> {
    match topology {
        Topology::LogTree => build_log_tree(size, n),
        Topology::Chain => build_chain(size, n),
        Topology::DelayNetwork => build_binary_delay_network(size, n),
        Topology::StorageLoop => build_storage_loop(size, n),
        Topology::Spanke => build_spanke(size, n, false),
        Topology::SpankeReduced => build_spanke(size, n, true),
        Topology::ConcatenatedGmzi => build_concatenated_gmzi(size, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mzi_tree() {
        let m = build_log_tree(2, 2).unwrap().metrics().unwrap();
        assert_eq!((m.active_count, m.active_depth_min, m.active_depth_max), (2, 1, 1));
    }

    #[test]
    fn empty_network_has_zero_metrics() {
        let net = SwitchNetwork { name: "empty".into(), graph: DiGraph::new(), inputs: vec![], outputs: vec![] };
        let m = net.metrics().unwrap();
        assert_eq!(m, CostMetrics { active_count: 0, active_depth_min: 0, active_depth_max: 0, crossings: 0, delay_inventory: vec![], switch_blocks: 0 });
    }

    #[test]
    fn gmzi_as_network_has_depth_one() {
        let m = build_concatenated_gmzi(8, 1).unwrap().metrics().unwrap();
        assert_eq!((m.active_count, m.active_depth_min, m.active_depth_max), (8, 1, 1));
    }

    #[test]
    fn shuffle_of_two_by_two() {
        // input 0 → (0,1), input 1 → (0,1): one crossing
        assert_eq!(shuffle_crossings(&[(0, 0), (1, 2), (2, 1), (3, 3)]), 1);
    }

    #[test]
    fn parse_topologies() {
        assert_eq!("log-tree".parse::<Topology>().unwrap(), Topology::LogTree);
        assert!("mesh".parse::<Topology>().is_err());
    }
}
