//! Lumped RLC model of a shared multi-chiplet power delivery network.
//!
//! A [`PdnNetwork`] is an undirected graph of two-terminal elements over
//! named nodes, with one designated ground and a region tag per node
//! (VRM, board, package, interposer, or a numbered chiplet). Networks are
//! immutable after construction; tamper application clones and re-validates.
//!
//! [`build_reference_network`] parameterizes the usual board-to-die ladder:
//! a VRM branch, bulk and ceramic decoupling capacitors with their parasitic
//! series R-L, a package branch, an interposer spine with per-chiplet TSV
//! taps and per-link SLL parasitics, and per-chiplet power grids loaded with
//! narrow-band series-RC branches.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a node inside its owning [`PdnNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

/// Region tag of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Vrm,
    Board,
    Package,
    Interposer,
    Chiplet(u32),
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Vrm => write!(f, "vrm"),
            Region::Board => write!(f, "board"),
            Region::Package => write!(f, "package"),
            Region::Interposer => write!(f, "interposer"),
            Region::Chiplet(k) => write!(f, "chiplet({k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Resistor,
    Inductor,
    Capacitor,
    CurrentSource,
}

/// Two-terminal circuit element. `value` is in ohms, henries, farads or
/// amperes depending on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub value: f64,
    pub node_a: NodeId,
    pub node_b: NodeId,
}

/// Per-link SLL parasitic values, kept on the network so tamper events can
/// add or remove links with the same electrical footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SllParasitics {
    pub resistance_ohm: f64,
    pub inductance_h: f64,
    pub capacitance_f: f64,
}

/// Immutable lumped-element PDN graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdnNetwork {
    names: Vec<String>,
    regions: Vec<Region>,
    ground: NodeId,
    elements: Vec<Element>,
    chiplet_count: u32,
    /// Nodes per chiplet power grid (used to resolve grid positions).
    grid_nodes: u32,
    sll_links: u32,
    sll_parasitics: SllParasitics,
    #[serde(skip)]
    index: HashMap<String, NodeId>,
}

impl PdnNetwork {
    /// Start an empty network with just the ground node.
    pub(crate) fn new(chiplet_count: u32, grid_nodes: u32, sll: SllParasitics) -> Self {
        let mut net = PdnNetwork {
            names: Vec::new(),
            regions: Vec::new(),
            ground: NodeId(0),
            elements: Vec::new(),
            chiplet_count,
            grid_nodes,
            sll_links: 0,
            sll_parasitics: sll,
            index: HashMap::new(),
        };
        net.add_node("gnd", Region::Board).expect("fresh network");
        net
    }

    pub(crate) fn add_node(&mut self, name: &str, region: Region) -> Result<NodeId> {
        if self.index.contains_key(name) {
            return Err(Error::invalid("node", format!("duplicate node name `{name}`")));
        }
        let id = NodeId(self.names.len());
        self.names.push(name.to_string());
        self.regions.push(region);
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub(crate) fn add_element(
        &mut self,
        kind: ElementKind,
        value: f64,
        node_a: NodeId,
        node_b: NodeId,
    ) -> Result<()> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::invalid(
                "element.value",
                format!("{kind:?} value must be finite and > 0, got {value}"),
            ));
        }
        if node_a == node_b {
            return Err(Error::invalid("element.nodes", "node_a == node_b"));
        }
        if node_a.0 >= self.names.len() || node_b.0 >= self.names.len() {
            return Err(Error::invalid("element.nodes", "node id out of range"));
        }
        self.elements.push(Element { kind, value, node_a, node_b });
        Ok(())
    }

    pub(crate) fn set_sll_links(&mut self, links: u32) {
        self.sll_links = links;
    }

    pub fn ground(&self) -> NodeId {
        self.ground
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub(crate) fn elements_mut(&mut self) -> &mut [Element] {
        &mut self.elements
    }

    pub fn chiplet_count(&self) -> u32 {
        self.chiplet_count
    }

    pub fn grid_nodes(&self) -> u32 {
        self.grid_nodes
    }

    pub fn sll_links(&self) -> u32 {
        self.sll_links
    }

    pub fn sll_parasitics(&self) -> SllParasitics {
        self.sll_parasitics
    }

    pub fn region(&self, node: NodeId) -> Region {
        self.regions[node.0]
    }

    pub fn node_name(&self, node: NodeId) -> &str {
        &self.names[node.0]
    }

    /// Look a node up by name.
    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Grid node `i` of chiplet `k` (the node actuators/sensors attach to).
    pub fn chiplet_grid_node(&self, chiplet: u32, grid_index: u32) -> Result<NodeId> {
        if chiplet >= self.chiplet_count {
            return Err(Error::UnknownRegion(format!("chiplet({chiplet})")));
        }
        if grid_index >= self.grid_nodes {
            return Err(Error::invalid(
                "grid_index",
                format!("{grid_index} >= grid size {}", self.grid_nodes),
            ));
        }
        self.node(&grid_node_name(chiplet, grid_index))
    }

    /// All node ids whose region matches `region`.
    pub fn nodes_in_region(&self, region: Region) -> Vec<NodeId> {
        (0..self.names.len())
            .filter(|&i| self.regions[i] == region)
            .map(NodeId)
            .collect()
    }

    /// Number of grid-attachment nodes rebuilt from names after deserialization.
    pub(crate) fn rebuild_index(&mut self) {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NodeId(i)))
            .collect();
    }

    /// Check every structural invariant: single ground, element values,
    /// graph connectivity, and at least one on-die RC branch per chiplet.
    pub fn validate(&self) -> Result<()> {
        if self.chiplet_count < 2 {
            return Err(Error::invalid("chiplet_count", "must be >= 2"));
        }
        for el in &self.elements {
            if !(el.value > 0.0) || !el.value.is_finite() {
                return Err(Error::invalid("element.value", format!("{el:?}")));
            }
            if el.node_a == el.node_b {
                return Err(Error::invalid("element.nodes", format!("{el:?}")));
            }
        }
        // Connectivity over element edges.
        let n = self.names.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for el in &self.elements {
            adj[el.node_a.0].push(el.node_b.0);
            adj[el.node_b.0].push(el.node_a.0);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.ground.0];
        seen[self.ground.0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(
                "network",
                format!("node `{}` is not connected to ground", self.names[i]),
            ));
        }
        // Every chiplet region carries at least one RC branch (a capacitor
        // touching a node tagged with that region).
        for k in 0..self.chiplet_count {
            let has_rc = self.elements.iter().any(|el| {
                el.kind == ElementKind::Capacitor
                    && (self.regions[el.node_a.0] == Region::Chiplet(k)
                        || self.regions[el.node_b.0] == Region::Chiplet(k))
            });
            if !has_rc {
                return Err(Error::invalid(
                    "network",
                    format!("chiplet({k}) has no on-die RC branch"),
                ));
            }
        }
        Ok(())
    }

    /// Content fingerprint (used to key solve caches and to compare
    /// structural equality in tests).
    pub fn fingerprint(&self) -> u64 {
        use crate::rng::splitmix64;
        let mut h = splitmix64(self.names.len() as u64 ^ 0x706e_6477);
        for el in &self.elements {
            h = splitmix64(h ^ el.kind as u64);
            h = splitmix64(h ^ el.value.to_bits());
            h = splitmix64(h ^ el.node_a.0 as u64);
            h = splitmix64(h ^ (el.node_b.0 as u64) << 1);
        }
        h
    }
}

fn grid_node_name(chiplet: u32, grid_index: u32) -> String {
    format!("c{chiplet}_g{grid_index}")
}

// ---------------------------------------------------------------------------
// Declarative JSON configuration
// ---------------------------------------------------------------------------

/// Series R-L segment (interconnect parasitics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRl {
    pub resistance_ohm: f64,
    pub inductance_h: f64,
}

/// Decoupling capacitor with parasitic ESR and ESL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapBranch {
    pub capacitance_f: f64,
    pub esr_ohm: f64,
    pub esl_h: f64,
}

/// One on-die narrow-band series-RC branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcBranch {
    pub resistance_ohm: f64,
    pub capacitance_f: f64,
}

/// Per-chiplet power grid description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipletConfig {
    /// Number of grid nodes per chiplet (actuators/sensors attach here).
    pub grid_nodes: u32,
    /// Grid interconnect parasitics between consecutive grid nodes.
    pub segment: SeriesRl,
    /// On-die RC branches, attached round-robin to grid nodes.
    pub rc_branches: Vec<RcBranch>,
}

/// SLL (inter-chiplet interconnect) parasitic description. Each link adds
/// one branch triple in the interposer region: series R-L spanning two
/// adjacent spine taps with the link's shunt C to ground at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SllConfig {
    pub links: u32,
    pub resistance_ohm: f64,
    pub inductance_h: f64,
    pub capacitance_f: f64,
    /// Links bridge the spine taps of chiplets `attach_chiplet - 1` and
    /// `attach_chiplet` (SLR0 <-> SLR1 by default).
    pub attach_chiplet: u32,
}

/// Declarative description of the reference PDN, readable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    pub chiplet_count: u32,
    /// VRM output branch from the board node to ground.
    pub vrm: SeriesRl,
    pub bulk_caps: Vec<CapBranch>,
    pub ceramic_caps: Vec<CapBranch>,
    pub board_to_package: SeriesRl,
    pub package_to_interposer: SeriesRl,
    /// Interposer spine segment between adjacent chiplet taps.
    pub interposer_segment: SeriesRl,
    pub tsv: SeriesRl,
    pub sll: SllConfig,
    pub chiplet: ChipletConfig,
}

impl Default for NetworkConfig {
    /// Defaults model the evaluation platform shape: three FPGA chiplets in
    /// a row on one interposer, fed from a single board-level VRM. Values
    /// are simulation parameters, overridable per deployment.
    fn default() -> Self {
        NetworkConfig {
            chiplet_count: 3,
            vrm: SeriesRl { resistance_ohm: 1e-3, inductance_h: 10e-9 },
            bulk_caps: vec![CapBranch { capacitance_f: 100e-6, esr_ohm: 5e-3, esl_h: 5e-9 }],
            ceramic_caps: vec![CapBranch { capacitance_f: 1e-6, esr_ohm: 2e-3, esl_h: 0.5e-9 }],
            board_to_package: SeriesRl { resistance_ohm: 2e-3, inductance_h: 0.5e-9 },
            package_to_interposer: SeriesRl { resistance_ohm: 2e-3, inductance_h: 100e-12 },
            interposer_segment: SeriesRl { resistance_ohm: 20e-3, inductance_h: 50e-12 },
            tsv: SeriesRl { resistance_ohm: 10e-3, inductance_h: 10e-12 },
            sll: SllConfig {
                links: 129,
                resistance_ohm: 1.0,
                inductance_h: 50e-12,
                capacitance_f: 2e-12,
                attach_chiplet: 1,
            },
            chiplet: ChipletConfig {
                grid_nodes: 8,
                segment: SeriesRl { resistance_ohm: 10e-3, inductance_h: 20e-12 },
                rc_branches: vec![
                    RcBranch { resistance_ohm: 0.30, capacitance_f: 0.10e-9 },
                    RcBranch { resistance_ohm: 0.24, capacitance_f: 0.15e-9 },
                    RcBranch { resistance_ohm: 0.18, capacitance_f: 0.22e-9 },
                    RcBranch { resistance_ohm: 0.15, capacitance_f: 0.33e-9 },
                ],
            },
        }
    }
}

impl NetworkConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: NetworkConfig = serde_json::from_str(json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chiplet_count < 2 {
            return Err(Error::invalid("chiplet_count", "must be >= 2"));
        }
        let rl = |name: &str, s: &SeriesRl| -> Result<()> {
            if !(s.resistance_ohm > 0.0 && s.resistance_ohm.is_finite()) {
                return Err(Error::invalid(name, "resistance_ohm must be > 0"));
            }
            if !(s.inductance_h > 0.0 && s.inductance_h.is_finite()) {
                return Err(Error::invalid(name, "inductance_h must be > 0"));
            }
            Ok(())
        };
        rl("vrm", &self.vrm)?;
        rl("board_to_package", &self.board_to_package)?;
        rl("package_to_interposer", &self.package_to_interposer)?;
        rl("interposer_segment", &self.interposer_segment)?;
        rl("tsv", &self.tsv)?;
        rl("chiplet.segment", &self.chiplet.segment)?;
        for (i, c) in self.bulk_caps.iter().chain(&self.ceramic_caps).enumerate() {
            if !(c.capacitance_f > 0.0 && c.esr_ohm > 0.0 && c.esl_h > 0.0) {
                return Err(Error::invalid("caps", format!("cap branch {i} has a non-positive value")));
            }
        }
        if self.bulk_caps.is_empty() && self.ceramic_caps.is_empty() {
            return Err(Error::invalid("caps", "at least one decoupling capacitor is required"));
        }
        if self.chiplet.grid_nodes == 0 {
            return Err(Error::invalid("chiplet.grid_nodes", "must be >= 1"));
        }
        if self.chiplet.rc_branches.is_empty() {
            return Err(Error::invalid("chiplet.rc_branches", "each chiplet needs >= 1 RC branch"));
        }
        for (i, b) in self.chiplet.rc_branches.iter().enumerate() {
            if !(b.resistance_ohm > 0.0 && b.capacitance_f > 0.0) {
                return Err(Error::invalid(
                    "chiplet.rc_branches",
                    format!("branch {i} has a non-positive value"),
                ));
            }
        }
        if self.sll.attach_chiplet == 0 || self.sll.attach_chiplet >= self.chiplet_count {
            return Err(Error::invalid(
                "sll.attach_chiplet",
                format!(
                    "links bridge chiplet taps (attach_chiplet - 1, attach_chiplet); got {} of {}",
                    self.sll.attach_chiplet, self.chiplet_count
                ),
            ));
        }
        if self.sll.links > 0
            && !(self.sll.resistance_ohm > 0.0 && self.sll.inductance_h > 0.0 && self.sll.capacitance_f > 0.0)
        {
            return Err(Error::invalid("sll", "parasitic values must be > 0"));
        }
        Ok(())
    }
}

/// Append one SLL parasitic branch triple. Each link is an interconnect
/// spanning two interposer spine taps: series R then L bridging `from` to
/// `to`, with the link's shunt C to ground at the midpoint node. Shared by
/// the builder and tamper events.
pub(crate) fn add_sll_branch(net: &mut PdnNetwork, from: NodeId, to: NodeId, link_index: u32) -> Result<()> {
    let p = net.sll_parasitics;
    let m = net.add_node(&format!("sll{link_index}_m"), Region::Interposer)?;
    net.add_element(ElementKind::Resistor, p.resistance_ohm, from, m)?;
    net.add_element(ElementKind::Inductor, p.inductance_h, m, to)?;
    net.add_element(ElementKind::Capacitor, p.capacitance_f, m, net.ground())?;
    Ok(())
}

/// Build the reference network for a configuration.
///
/// Deterministic: identical configs produce identical networks (same node
/// order, same element order).
pub fn build_reference_network(config: &NetworkConfig) -> Result<PdnNetwork> {
    config.validate()?;
    let sll = SllParasitics {
        resistance_ohm: config.sll.resistance_ohm,
        inductance_h: config.sll.inductance_h,
        capacitance_f: config.sll.capacitance_f,
    };
    let mut net = PdnNetwork::new(config.chiplet_count, config.chiplet.grid_nodes, sll);
    let gnd = net.ground();

    let board = net.add_node("board", Region::Board)?;
    // VRM output impedance: board -R- vrm -L- gnd.
    let vrm = net.add_node("vrm", Region::Vrm)?;
    net.add_element(ElementKind::Resistor, config.vrm.resistance_ohm, board, vrm)?;
    net.add_element(ElementKind::Inductor, config.vrm.inductance_h, vrm, gnd)?;

    for (i, cap) in config.bulk_caps.iter().enumerate() {
        let a = net.add_node(&format!("bulk{i}_a"), Region::Board)?;
        let b = net.add_node(&format!("bulk{i}_b"), Region::Board)?;
        net.add_element(ElementKind::Resistor, cap.esr_ohm, board, a)?;
        net.add_element(ElementKind::Inductor, cap.esl_h, a, b)?;
        net.add_element(ElementKind::Capacitor, cap.capacitance_f, b, gnd)?;
    }

    let pkg = net.add_node("package", Region::Package)?;
    {
        let m = net.add_node("board_pkg", Region::Package)?;
        net.add_element(ElementKind::Resistor, config.board_to_package.resistance_ohm, board, m)?;
        net.add_element(ElementKind::Inductor, config.board_to_package.inductance_h, m, pkg)?;
    }

    for (i, cap) in config.ceramic_caps.iter().enumerate() {
        let a = net.add_node(&format!("cer{i}_a"), Region::Package)?;
        let b = net.add_node(&format!("cer{i}_b"), Region::Package)?;
        net.add_element(ElementKind::Resistor, cap.esr_ohm, pkg, a)?;
        net.add_element(ElementKind::Inductor, cap.esl_h, a, b)?;
        net.add_element(ElementKind::Capacitor, cap.capacitance_f, b, gnd)?;
    }

    // Interposer spine: package feeds the chiplet-0 tap, then a chain of
    // segments runs along the chiplet row (ip0 - ip1 - ip2 - ...), so
    // higher-numbered chiplets sit electrically farther from the verifier.
    let mut taps = Vec::with_capacity(config.chiplet_count as usize);
    let ip0 = net.add_node("ip0", Region::Interposer)?;
    {
        let m = net.add_node("pkg_ip", Region::Interposer)?;
        net.add_element(ElementKind::Resistor, config.package_to_interposer.resistance_ohm, pkg, m)?;
        net.add_element(ElementKind::Inductor, config.package_to_interposer.inductance_h, m, ip0)?;
    }
    taps.push(ip0);
    for k in 1..config.chiplet_count {
        let ip = net.add_node(&format!("ip{k}"), Region::Interposer)?;
        let m = net.add_node(&format!("spine{k}"), Region::Interposer)?;
        net.add_element(ElementKind::Resistor, config.interposer_segment.resistance_ohm, taps[(k - 1) as usize], m)?;
        net.add_element(ElementKind::Inductor, config.interposer_segment.inductance_h, m, ip)?;
        taps.push(ip);
    }

    for k in 0..config.chiplet_count {
        // TSV from the spine tap up into the die grid.
        let entry = net.add_node(&grid_node_name(k, 0), Region::Chiplet(k))?;
        let m = net.add_node(&format!("tsv{k}"), Region::Interposer)?;
        net.add_element(ElementKind::Resistor, config.tsv.resistance_ohm, taps[k as usize], m)?;
        net.add_element(ElementKind::Inductor, config.tsv.inductance_h, m, entry)?;

        let mut prev = entry;
        for i in 1..config.chiplet.grid_nodes {
            let node = net.add_node(&grid_node_name(k, i), Region::Chiplet(k))?;
            let seg = net.add_node(&format!("c{k}_s{i}"), Region::Chiplet(k))?;
            net.add_element(ElementKind::Resistor, config.chiplet.segment.resistance_ohm, prev, seg)?;
            net.add_element(ElementKind::Inductor, config.chiplet.segment.inductance_h, seg, node)?;
            prev = node;
        }

        for (j, branch) in config.chiplet.rc_branches.iter().enumerate() {
            let at = net.chiplet_grid_node(k, j as u32 % config.chiplet.grid_nodes)?;
            let m = net.add_node(&format!("c{k}_b{j}"), Region::Chiplet(k))?;
            net.add_element(ElementKind::Resistor, branch.resistance_ohm, at, m)?;
            net.add_element(ElementKind::Capacitor, branch.capacitance_f, m, gnd)?;
        }
    }

    // SLL interconnects bridge the spine taps of `attach_chiplet` and its
    // predecessor (SLR0 <-> SLR1 by default).
    let to = taps[config.sll.attach_chiplet as usize];
    let from = taps[config.sll.attach_chiplet as usize - 1];
    for l in 0..config.sll.links {
        add_sll_branch(&mut net, from, to, l)?;
    }
    net.set_sll_links(config.sll.links);

    net.validate()?;
    Ok(net)
}

/// Deserialize a network (restores the name index skipped by serde).
pub fn network_from_json(json: &str) -> Result<PdnNetwork> {
    let mut net: PdnNetwork = serde_json::from_str(json)?;
    net.rebuild_index();
    net.validate()?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_builds_three_chiplets() {
        let net = build_reference_network(&NetworkConfig::default()).unwrap();
        assert_eq!(net.chiplet_count(), 3);
        assert_eq!(net.sll_links(), 129);
        net.validate().unwrap();
        // One RC branch = one capacitor touching the region.
        for k in 0..3 {
            let caps = net
                .elements()
                .iter()
                .filter(|el| {
                    el.kind == ElementKind::Capacitor
                        && (net.region(el.node_a) == Region::Chiplet(k)
                            || net.region(el.node_b) == Region::Chiplet(k))
                })
                .count();
            assert_eq!(caps, 4, "chiplet {k} should carry 4 RC branches");
        }
    }

    #[test]
    fn branch_count_echoes_config() {
        let mut cfg = NetworkConfig::default();
        cfg.chiplet.rc_branches = vec![RcBranch { resistance_ohm: 0.5, capacitance_f: 1e-9 }; 4];
        let net = build_reference_network(&cfg).unwrap();
        for k in 0..cfg.chiplet_count {
            let caps = net
                .elements()
                .iter()
                .filter(|el| {
                    el.kind == ElementKind::Capacitor && net.region(el.node_b) == Region::Chiplet(k)
                })
                .count()
                + net
                    .elements()
                    .iter()
                    .filter(|el| {
                        el.kind == ElementKind::Capacitor && net.region(el.node_a) == Region::Chiplet(k)
                    })
                    .count();
            assert_eq!(caps, 4);
        }
    }

    #[test]
    fn minimal_two_chiplet_network_is_connected() {
        let mut cfg = NetworkConfig::default();
        cfg.chiplet_count = 2;
        cfg.chiplet.grid_nodes = 1;
        cfg.chiplet.rc_branches = vec![RcBranch { resistance_ohm: 0.5, capacitance_f: 1e-9 }];
        cfg.sll.links = 0;
        let net = build_reference_network(&cfg).unwrap();
        net.validate().unwrap();
        assert_eq!(net.chiplet_count(), 2);
    }

    #[test]
    fn rejects_single_chiplet_and_bad_values() {
        let mut cfg = NetworkConfig::default();
        cfg.chiplet_count = 1;
        assert!(build_reference_network(&cfg).is_err());

        let mut cfg = NetworkConfig::default();
        cfg.vrm.resistance_ohm = 0.0;
        assert!(build_reference_network(&cfg).is_err());

        let mut cfg = NetworkConfig::default();
        cfg.chiplet.rc_branches[0].capacitance_f = -1e-9;
        assert!(build_reference_network(&cfg).is_err());
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_reference_network(&NetworkConfig::default()).unwrap();
        let b = build_reference_network(&NetworkConfig::default()).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.node_count(), b.node_count());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = NetworkConfig::default();
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back = NetworkConfig::from_json(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn sll_attach_bounds_checked() {
        let mut cfg = NetworkConfig::default();
        cfg.sll.attach_chiplet = 7;
        assert!(cfg.validate().is_err());
    }
}
