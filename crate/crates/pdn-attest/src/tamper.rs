//! Parameterized physical tamper events.
//!
//! A [`TamperEvent`] turns a trusted [`PdnNetwork`] into the network an
//! attacker left behind: swapped designs load the die with different RC
//! profiles, interposer rewiring changes the inter-chiplet link count,
//! re-placement moves an on-die branch, and a dormant Trojan adds a tiny
//! parasitic footprint. Application is pure: the input network is cloned,
//! mutated, and re-validated.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{
    add_sll_branch, build_reference_network, ElementKind, NetworkConfig, PdnNetwork, Region,
};
use crate::solver::{default_band, solve_impedance};

/// Largest total capacitance a Trojan insertion may add (dormant-Trojan
/// premise: the payload is tiny). Overridable via [`TamperLimits`].
pub const DEFAULT_TROJAN_CAP_F: f64 = 100e-12;

/// Relative |Z| change floor every catalog preset must clear at at least
/// one swept frequency.
pub const DETECTABILITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct TamperLimits {
    pub trojan_cap_f: f64,
}

impl Default for TamperLimits {
    fn default() -> Self {
        TamperLimits { trojan_cap_f: DEFAULT_TROJAN_CAP_F }
    }
}

/// Kind-specific magnitude parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TamperKind {
    /// Replace the deployed design on a chiplet: adds `branch_count` RC
    /// branches totalling `total_capacitance_f`, round-robin over the grid.
    DesignSwap {
        total_capacitance_f: f64,
        branch_count: u32,
        branch_resistance_ohm: f64,
    },
    /// Change the number of inter-chiplet links routed on the interposer.
    /// Each added link contributes one parasitic branch triple (series R-L,
    /// shunt C) with the network's per-link values.
    InterposerSllChange { from_links: u32, to_links: u32 },
    /// Re-place one on-die RC branch: detach it from its grid node and
    /// re-attach at another. Element values are untouched.
    FarReplacement { branch_index: u32, to_grid_node: u32 },
    /// Dormant hardware-Trojan footprint: `total_capacitance_f` of added
    /// gate/routing capacitance split exactly across `branch_count`
    /// series-RC branches.
    TrojanInsert {
        total_capacitance_f: f64,
        branch_count: u32,
        series_resistance_ohm: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TamperEvent {
    pub kind: TamperKind,
    pub target_region: Region,
    pub label: String,
}

impl TamperEvent {
    pub fn from_json(json: &str) -> Result<Self> {
        let ev: TamperEvent = serde_json::from_str(json)?;
        Ok(ev)
    }

    /// Chiplet index of the target region, if it is one.
    fn target_chiplet(&self, net: &PdnNetwork) -> Result<u32> {
        match self.target_region {
            Region::Chiplet(k) if k < net.chiplet_count() => Ok(k),
            Region::Chiplet(k) => Err(Error::UnknownRegion(format!("chiplet({k})"))),
            other => Err(Error::invalid(
                "target_region",
                format!("{other} is not a chiplet region"),
            )),
        }
    }

    /// Validate the event against a network without applying it.
    pub fn validate(&self, net: &PdnNetwork, limits: &TamperLimits) -> Result<()> {
        match &self.kind {
            TamperKind::DesignSwap { total_capacitance_f, branch_count, branch_resistance_ohm } => {
                self.target_chiplet(net)?;
                if !(*total_capacitance_f > 0.0) {
                    return Err(Error::invalid("total_capacitance_f", "must be > 0"));
                }
                if *branch_count == 0 {
                    return Err(Error::invalid("branch_count", "must be >= 1"));
                }
                if !(*branch_resistance_ohm > 0.0) {
                    return Err(Error::invalid("branch_resistance_ohm", "must be > 0"));
                }
            }
            TamperKind::InterposerSllChange { from_links, to_links } => {
                if self.target_region != Region::Interposer {
                    return Err(Error::invalid("target_region", "SLL changes target the interposer"));
                }
                if net.sll_links() != *from_links {
                    return Err(Error::invalid(
                        "from_links",
                        format!("network has {} links, event expects {from_links}", net.sll_links()),
                    ));
                }
                if to_links <= from_links {
                    return Err(Error::invalid(
                        "to_links",
                        "link removal is not supported; build the lower count as the reference",
                    ));
                }
            }
            TamperKind::FarReplacement { branch_index, to_grid_node } => {
                let k = self.target_chiplet(net)?;
                if *to_grid_node >= net.grid_nodes() {
                    return Err(Error::invalid(
                        "to_grid_node",
                        format!("{to_grid_node} >= grid size {}", net.grid_nodes()),
                    ));
                }
                let (_, current) = find_branch_resistor(net, k, *branch_index)?;
                let target = net.chiplet_grid_node(k, *to_grid_node)?;
                if current == target {
                    return Err(Error::invalid(
                        "to_grid_node",
                        "branch already attached there; the event would be a no-op",
                    ));
                }
            }
            TamperKind::TrojanInsert { total_capacitance_f, branch_count, series_resistance_ohm } => {
                self.target_chiplet(net)?;
                if !(*total_capacitance_f > 0.0) {
                    return Err(Error::invalid("total_capacitance_f", "must be > 0"));
                }
                if *total_capacitance_f > limits.trojan_cap_f {
                    return Err(Error::invalid(
                        "total_capacitance_f",
                        format!(
                            "{total_capacitance_f} F exceeds the dormant-Trojan cap {} F",
                            limits.trojan_cap_f
                        ),
                    ));
                }
                if *branch_count == 0 {
                    return Err(Error::invalid("branch_count", "must be >= 1"));
                }
                if !(*series_resistance_ohm > 0.0) {
                    return Err(Error::invalid("series_resistance_ohm", "must be > 0"));
                }
            }
        }
        Ok(())
    }
}

/// Locate the series resistor of on-die RC branch `branch_index` on chiplet
/// `k`. Returns (element index, grid node it attaches to).
fn find_branch_resistor(net: &PdnNetwork, chiplet: u32, branch_index: u32) -> Result<(usize, crate::network::NodeId)> {
    let mid_name = format!("c{chiplet}_b{branch_index}");
    let mid = net
        .node(&mid_name)
        .map_err(|_| Error::invalid("branch_index", format!("chiplet({chiplet}) has no branch {branch_index}")))?;
    for (i, el) in net.elements().iter().enumerate() {
        if el.kind == ElementKind::Resistor {
            if el.node_a == mid {
                return Ok((i, el.node_b));
            }
            if el.node_b == mid {
                return Ok((i, el.node_a));
            }
        }
    }
    Err(Error::invalid(
        "branch_index",
        format!("branch {branch_index} of chiplet({chiplet}) has no series resistor"),
    ))
}

/// Split `total` across `n` strictly positive parts whose *sequential* f64
/// sum reconstructs `total` exactly (cumulative-fraction differences).
fn split_exact(total: f64, n: u32) -> Vec<f64> {
    let n = n as usize;
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0.0f64;
    for i in 1..=n {
        let cum = if i == n { total } else { total * i as f64 / n as f64 };
        parts.push(cum - prev);
        prev = cum;
    }
    parts
}

/// Apply a tamper event, producing a new validated network. The original
/// network is untouched.
pub fn apply(net: &PdnNetwork, event: &TamperEvent) -> Result<PdnNetwork> {
    apply_with_limits(net, event, &TamperLimits::default())
}

pub fn apply_with_limits(
    net: &PdnNetwork,
    event: &TamperEvent,
    limits: &TamperLimits,
) -> Result<PdnNetwork> {
    event.validate(net, limits)?;
    let mut out = net.clone();
    let gnd = out.ground();
    // Suffix from the pre-application node count keeps generated names
    // unique across stacked events, deterministically.
    let base = out.node_count();

    match &event.kind {
        TamperKind::DesignSwap { total_capacitance_f, branch_count, branch_resistance_ohm } => {
            let k = event.target_chiplet(net)?;
            let caps = split_exact(*total_capacitance_f, *branch_count);
            for (j, c) in caps.iter().enumerate() {
                let at = out.chiplet_grid_node(k, j as u32 % out.grid_nodes())?;
                let mid = out.add_node(&format!("ds{base}_{j}"), Region::Chiplet(k))?;
                out.add_element(ElementKind::Resistor, *branch_resistance_ohm, at, mid)?;
                out.add_element(ElementKind::Capacitor, *c, mid, gnd)?;
            }
        }
        TamperKind::InterposerSllChange { from_links, to_links } => {
            // New links span the same taps as the existing ones; recover the
            // endpoints from link 0's midpoint, falling back to ip0/ip1.
            let (from, to) = if *from_links > 0 {
                let m = out.node("sll0_m")?;
                let mut r_end = None;
                let mut l_end = None;
                for el in out.elements() {
                    let other = if el.node_a == m {
                        Some(el.node_b)
                    } else if el.node_b == m {
                        Some(el.node_a)
                    } else {
                        None
                    };
                    match (el.kind, other) {
                        (ElementKind::Resistor, Some(n)) => r_end = Some(n),
                        (ElementKind::Inductor, Some(n)) => l_end = Some(n),
                        _ => {}
                    }
                }
                match (r_end, l_end) {
                    (Some(f), Some(t)) => (f, t),
                    _ => return Err(Error::invalid("network", "sll0 branch endpoints not found")),
                }
            } else {
                (out.node("ip0")?, out.node("ip1")?)
            };
            for l in *from_links..*to_links {
                add_sll_branch(&mut out, from, to, l)?;
            }
            out.set_sll_links(*to_links);
        }
        TamperKind::FarReplacement { branch_index, to_grid_node } => {
            let k = event.target_chiplet(net)?;
            let (el_idx, from_node) = find_branch_resistor(&out, k, *branch_index)?;
            let target = out.chiplet_grid_node(k, *to_grid_node)?;
            let el = &mut out.elements_mut()[el_idx];
            if el.node_a == from_node {
                el.node_a = target;
            } else {
                el.node_b = target;
            }
        }
        TamperKind::TrojanInsert { total_capacitance_f, branch_count, series_resistance_ohm } => {
            let k = event.target_chiplet(net)?;
            let caps = split_exact(*total_capacitance_f, *branch_count);
            let g = out.grid_nodes();
            for (j, c) in caps.iter().enumerate() {
                // Spread from the far end of the grid, where a payload
                // would hide away from the power entry.
                let at = out.chiplet_grid_node(k, (g - 1).saturating_sub(j as u32 % g))?;
                let mid = out.add_node(&format!("ht{base}_{j}"), Region::Chiplet(k))?;
                out.add_element(ElementKind::Resistor, *series_resistance_ohm, at, mid)?;
                out.add_element(ElementKind::Capacitor, *c, mid, gnd)?;
            }
        }
    }

    out.validate()?;
    Ok(out)
}

/// Maximum relative driving-point |Z| change the event causes at the
/// verifier node across the band. Used to enforce the detectability floor.
pub fn detectability(net: &PdnNetwork, event: &TamperEvent, band: &[f64]) -> Result<f64> {
    let tampered = apply(net, event)?;
    let probe = net.chiplet_grid_node(0, 0)?;
    let before = solve_impedance(net, probe, probe, band)?;
    let after = solve_impedance(&tampered, probe, probe, band)?;
    let mut worst = 0.0f64;
    for i in 0..band.len() {
        let a = before.values[0][i].norm();
        let b = after.values[0][i].norm();
        if a > 0.0 {
            worst = worst.max((b - a).abs() / a);
        }
    }
    Ok(worst)
}

/// Named preset scenario.
#[derive(Debug, Clone)]
pub struct ScenarioPreset {
    /// Case-study family (1: design swap, 2: interposer SLL change,
    /// 3: far-chiplet re-placement, 4: dormant Trojan).
    pub family: u8,
    pub name: &'static str,
    pub description: &'static str,
    pub event: TamperEvent,
}

fn preset_list() -> Vec<ScenarioPreset> {
    let swap = |name: &'static str, desc: &'static str, cap: f64| ScenarioPreset {
        family: 1,
        name,
        description: desc,
        event: TamperEvent {
            kind: TamperKind::DesignSwap {
                total_capacitance_f: cap,
                branch_count: 4,
                branch_resistance_ohm: 0.1,
            },
            target_region: Region::Chiplet(1),
            label: name.to_string(),
        },
    };
    vec![
        swap("design-swap-aes", "AES core loading profile on the adjacent chiplet", 2.0e-9),
        swap("design-swap-fft", "FFT core loading profile on the adjacent chiplet", 3.5e-9),
        swap("design-swap-cnn", "CNN core loading profile on the adjacent chiplet", 5.0e-9),
        ScenarioPreset {
            family: 2,
            name: "sll-129-to-133",
            description: "interposer rewiring: inter-chiplet link count 129 -> 133",
            event: TamperEvent {
                kind: TamperKind::InterposerSllChange { from_links: 129, to_links: 133 },
                target_region: Region::Interposer,
                label: "sll-129-to-133".to_string(),
            },
        },
        ScenarioPreset {
            family: 3,
            name: "far-replacement-config2",
            description: "same design, different placement on the far chiplet",
            event: TamperEvent {
                kind: TamperKind::FarReplacement { branch_index: 0, to_grid_node: 7 },
                target_region: Region::Chiplet(2),
                label: "far-replacement-config2".to_string(),
            },
        },
        ScenarioPreset {
            family: 4,
            name: "trojan-aes-t1100",
            description: "dormant AES-T1100-style Trojan footprint: 10 pF over 2 branches",
            event: TamperEvent {
                kind: TamperKind::TrojanInsert {
                    total_capacitance_f: 10e-12,
                    branch_count: 2,
                    series_resistance_ohm: 0.5,
                },
                target_region: Region::Chiplet(1),
                label: "trojan-aes-t1100".to_string(),
            },
        },
    ]
}

static CATALOG: OnceLock<std::result::Result<Vec<ScenarioPreset>, String>> = OnceLock::new();

/// The four case-study preset families, validated once against the default
/// reference network: every preset must move the verifier's driving-point
/// |Z| by at least [`DETECTABILITY_FLOOR`] somewhere in the default band.
pub fn scenario_catalog() -> Result<&'static [ScenarioPreset]> {
    let cached = CATALOG.get_or_init(|| {
        let presets = preset_list();
        let net = build_reference_network(&NetworkConfig::default())
            .map_err(|e| format!("reference network: {e}"))?;
        let band = default_band();
        for p in &presets {
            let worst = detectability(&net, &p.event, &band).map_err(|e| format!("{}: {e}", p.name))?;
            if worst < DETECTABILITY_FLOOR {
                return Err(format!(
                    "preset {} moves |Z| by only {worst:.3e} (< {DETECTABILITY_FLOOR:.0e})",
                    p.name
                ));
            }
        }
        Ok(presets)
    });
    match cached {
        Ok(v) => Ok(v.as_slice()),
        Err(msg) => Err(Error::invalid("scenario_catalog", msg.clone())),
    }
}

/// Look a preset up by name.
pub fn preset(name: &str) -> Result<&'static ScenarioPreset> {
    scenario_catalog()?
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkConfig;

    fn reference() -> PdnNetwork {
        build_reference_network(&NetworkConfig::default()).unwrap()
    }

    #[test]
    fn trojan_adds_one_branch_per_count() {
        let net = reference();
        let ev = TamperEvent {
            kind: TamperKind::TrojanInsert {
                total_capacitance_f: 10e-12,
                branch_count: 1,
                series_resistance_ohm: 0.5,
            },
            target_region: Region::Chiplet(1),
            label: "t".into(),
        };
        let out = apply(&net, &ev).unwrap();
        assert_eq!(out.elements().len(), net.elements().len() + 2);
        assert_eq!(out.node_count(), net.node_count() + 1);
        // Original untouched.
        assert_eq!(net.elements().len(), reference().elements().len());
    }

    #[test]
    fn trojan_capacitance_sums_exactly() {
        let net = reference();
        for count in [1u32, 2, 3, 5, 7] {
            let total = 10e-12;
            let ev = TamperEvent {
                kind: TamperKind::TrojanInsert {
                    total_capacitance_f: total,
                    branch_count: count,
                    series_resistance_ohm: 0.5,
                },
                target_region: Region::Chiplet(1),
                label: "t".into(),
            };
            let out = apply(&net, &ev).unwrap();
            let added: f64 = out.elements()[net.elements().len()..]
                .iter()
                .filter(|el| el.kind == ElementKind::Capacitor)
                .map(|el| el.value)
                .sum();
            assert_eq!(added, total, "count={count}");
        }
    }

    #[test]
    fn trojan_cap_limit_enforced() {
        let net = reference();
        let ev = TamperEvent {
            kind: TamperKind::TrojanInsert {
                total_capacitance_f: 200e-12,
                branch_count: 2,
                series_resistance_ohm: 0.5,
            },
            target_region: Region::Chiplet(1),
            label: "t".into(),
        };
        assert!(apply(&net, &ev).is_err());
    }

    #[test]
    fn sll_change_adds_branch_triples() {
        let net = reference();
        assert_eq!(net.sll_links(), 129);
        let ev = TamperEvent {
            kind: TamperKind::InterposerSllChange { from_links: 129, to_links: 133 },
            target_region: Region::Interposer,
            label: "sll".into(),
        };
        let out = apply(&net, &ev).unwrap();
        assert_eq!(out.sll_links(), 133);
        assert_eq!(out.elements().len(), net.elements().len() + 4 * 3);
        assert_eq!(out.node_count(), net.node_count() + 4 * 2);
    }

    #[test]
    fn sll_change_requires_matching_baseline() {
        let net = reference();
        let ev = TamperEvent {
            kind: TamperKind::InterposerSllChange { from_links: 100, to_links: 104 },
            target_region: Region::Interposer,
            label: "sll".into(),
        };
        assert!(apply(&net, &ev).is_err());
    }

    #[test]
    fn far_replacement_moves_impedance() {
        let net = reference();
        let ev = TamperEvent {
            kind: TamperKind::FarReplacement { branch_index: 0, to_grid_node: 7 },
            target_region: Region::Chiplet(2),
            label: "far".into(),
        };
        let out = apply(&net, &ev).unwrap();
        assert_eq!(out.elements().len(), net.elements().len());
        assert_eq!(out.node_count(), net.node_count());
        // Driving-point |Z| at the verifier must move at >= 1 frequency.
        let worst = detectability(&net, &ev, &default_band()).unwrap();
        assert!(worst > 0.0, "re-placement changed nothing");
    }

    #[test]
    fn unknown_region_rejected() {
        let net = reference();
        let ev = TamperEvent {
            kind: TamperKind::TrojanInsert {
                total_capacitance_f: 1e-12,
                branch_count: 1,
                series_resistance_ohm: 0.5,
            },
            target_region: Region::Chiplet(9),
            label: "t".into(),
        };
        assert!(matches!(apply(&net, &ev), Err(Error::UnknownRegion(_))));
    }

    #[test]
    fn application_is_idempotent_in_structure() {
        let net = reference();
        let ev = &preset("trojan-aes-t1100").unwrap().event;
        let a = apply(&net, ev).unwrap();
        let b = apply(&net, ev).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn catalog_has_four_families_and_valid_magnitudes() {
        let catalog = scenario_catalog().unwrap();
        let mut families: Vec<u8> = catalog.iter().map(|p| p.family).collect();
        families.sort_unstable();
        families.dedup();
        assert_eq!(families, vec![1, 2, 3, 4]);

        // Preset 4 honors the dormant-Trojan cap.
        let trojan = preset("trojan-aes-t1100").unwrap();
        match trojan.event.kind {
            TamperKind::TrojanInsert { total_capacitance_f, .. } => {
                assert!(total_capacitance_f <= DEFAULT_TROJAN_CAP_F);
            }
            _ => panic!("preset 4 must be a trojan insertion"),
        }

        // Preset 2 is +4 links.
        let sll = preset("sll-129-to-133").unwrap();
        match sll.event.kind {
            TamperKind::InterposerSllChange { from_links, to_links } => {
                assert_eq!((from_links, to_links), (129, 133));
            }
            _ => panic!("preset 2 must be an SLL change"),
        }
    }

    #[test]
    fn event_round_trips_through_json() {
        let ev = preset("design-swap-aes").unwrap().event.clone();
        let json = serde_json::to_string(&ev).unwrap();
        let back = TamperEvent::from_json(&json).unwrap();
        assert_eq!(ev, back);
    }

    #[test]
    fn split_exact_is_positive_and_exact() {
        for n in 1..=9u32 {
            let parts = split_exact(10e-12, n);
            assert!(parts.iter().all(|&p| p > 0.0));
            let sum = parts.iter().fold(0.0f64, |acc, &p| acc + p);
            assert_eq!(sum, 10e-12, "n={n}");
        }
    }
}
