//! Frequency-domain solves over a [`PdnNetwork`].
//!
//! Complex nodal analysis: every element is stamped as an admittance at the
//! target frequency, a unit AC current is injected at the source node(s),
//! and the node-voltage system is solved by dense LU with partial pivoting.
//! The transfer impedance is the observed voltage per injected ampere.
//!
//! Stored current sources are independent sources and are deactivated
//! (opened) for impedance solves, as usual for small-signal analysis.
//!
//! Before factorization, internal series chains (degree-2 nodes that are
//! neither ground nor requested nodes) are merged by exact impedance
//! addition. This keeps the dense system small even when the network
//! carries hundreds of three-element parasitic branches.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;


use crate::error::{Error, Result};
use crate::network::{ElementKind, NodeId, PdnNetwork};

/// Condition-estimate cap above which a solve is reported as singular
/// rather than silently returned.
pub const CONDITION_CAP: f64 = 1e12;

/// Transfer impedance samples for one or more (source, observe) node pairs.
#[derive(Debug, Clone)]
pub struct ImpedanceProfile {
    /// Strictly increasing probe frequencies.
    pub frequencies_hz: Vec<f64>,
    /// (source node name, observe node name) per pair.
    pub pairs: Vec<(String, String)>,
    /// `values[pair][freq]`, ohms.
    pub values: Vec<Vec<Complex64>>,
}

impl ImpedanceProfile {
    pub fn magnitude(&self, pair: usize) -> Vec<f64> {
        self.values[pair].iter().map(|z| z.norm()).collect()
    }

    /// CSV rows: `frequency_hz,re_ohm,im_ohm,source,observe`, with a
    /// versioned schema comment up front.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# impedance-profile-v1\n");
        out.push_str("frequency_hz,re_ohm,im_ohm,source,observe\n");
        for (p, (src, obs)) in self.pairs.iter().enumerate() {
            for (i, f) in self.frequencies_hz.iter().enumerate() {
                let z = self.values[p][i];
                out.push_str(&format!("{f},{},{},{src},{obs}\n", z.re, z.im));
            }
        }
        out
    }
}

impl fmt::Display for ImpedanceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ImpedanceProfile({} pairs x {} freqs)",
            self.pairs.len(),
            self.frequencies_hz.len()
        )
    }
}

/// Element impedance at angular frequency `omega` (> 0).
fn element_impedance(kind: ElementKind, value: f64, omega: f64) -> Option<Complex64> {
    match kind {
        ElementKind::Resistor => Some(Complex64::new(value, 0.0)),
        ElementKind::Inductor => Some(Complex64::new(0.0, omega * value)),
        ElementKind::Capacitor => Some(Complex64::new(0.0, -1.0 / (omega * value))),
        // Independent sources are opened for impedance analysis.
        ElementKind::CurrentSource => None,
    }
}

/// Reduced edge list: (node_a, node_b, impedance).
struct ReducedGraph {
    edges: Vec<(usize, usize, Complex64)>,
    /// Map network node -> dense matrix row, `usize::MAX` for eliminated
    /// nodes and ground.
    row_of: Vec<usize>,
    rows: usize,
}

/// Merge internal series chains. A node is eliminated when it has exactly
/// two incident element edges, is not ground, and is not in `keep`; its two
/// impedances are replaced by their sum between the outer endpoints.
/// Elimination is skipped when the sum cancels (series resonance) to avoid
/// manufacturing a near-short with catastrophic rounding.
fn reduce(net: &PdnNetwork, omega: f64, keep: &[NodeId]) -> ReducedGraph {
    let n = net.node_count();
    let mut keep_mask = vec![false; n];
    keep_mask[net.ground().0] = true;
    for k in keep {
        keep_mask[k.0] = true;
    }

    // Live edge store with per-node incidence lists.
    struct Edge {
        a: usize,
        b: usize,
        z: Complex64,
        alive: bool,
    }
    let mut edges: Vec<Edge> = Vec::with_capacity(net.elements().len());
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for el in net.elements() {
        if let Some(z) = element_impedance(el.kind, el.value, omega) {
            let idx = edges.len();
            edges.push(Edge { a: el.node_a.0, b: el.node_b.0, z, alive: true });
            incident[el.node_a.0].push(idx);
            incident[el.node_b.0].push(idx);
        }
    }

    let live_degree = |node: usize, edges: &[Edge], incident: &[Vec<usize>]| {
        incident[node].iter().filter(|&&e| edges[e].alive).count()
    };

    let mut stack: Vec<usize> = (0..n)
        .filter(|&v| !keep_mask[v] && live_degree(v, &edges, &incident) == 2)
        .collect();

    while let Some(v) = stack.pop() {
        if keep_mask[v] {
            continue;
        }
        let live: Vec<usize> = incident[v].iter().copied().filter(|&e| edges[e].alive).collect();
        if live.len() != 2 {
            continue;
        }
        let (e1, e2) = (live[0], live[1]);
        let other = |e: usize| if edges[e].a == v { edges[e].b } else { edges[e].a };
        let (x, y) = (other(e1), other(e2));
        let z = edges[e1].z + edges[e2].z;
        if z.norm() < 1e-18 * (edges[e1].z.norm() + edges[e2].z.norm()) {
            // Series resonance: keep the node, stamp both elements as-is.
            continue;
        }
        edges[e1].alive = false;
        edges[e2].alive = false;
        if x == y {
            // Dangling loop through v; carries no current, drop it.
            if !keep_mask[x] && live_degree(x, &edges, &incident) == 2 {
                stack.push(x);
            }
            continue;
        }
        let idx = edges.len();
        edges.push(Edge { a: x, b: y, z, alive: true });
        incident[x].push(idx);
        incident[y].push(idx);
        for w in [x, y] {
            if !keep_mask[w] && live_degree(w, &edges, &incident) == 2 {
                stack.push(w);
            }
        }
    }

    let mut row_of = vec![usize::MAX; n];
    let mut rows = 0usize;
    let gnd = net.ground().0;
    let mut out = Vec::new();
    for e in edges.iter().filter(|e| e.alive) {
        for v in [e.a, e.b] {
            if v != gnd && row_of[v] == usize::MAX {
                row_of[v] = rows;
                rows += 1;
            }
        }
        out.push((e.a, e.b, e.z));
    }
    // Kept nodes might be isolated from every live edge (caller error paths
    // report that as singular); still give them rows so indexing is total.
    for k in keep {
        if k.0 != gnd && row_of[k.0] == usize::MAX {
            row_of[k.0] = rows;
            rows += 1;
        }
    }
    ReducedGraph { edges: out, row_of, rows }
}

/// Dense complex LU with partial pivoting. Returns the factored matrix,
/// the permutation, and a pivot-ratio condition estimate.
struct Lu {
    m: Vec<Complex64>,
    perm: Vec<usize>,
    n: usize,
    condition: f64,
}

fn lu_factor(mut m: Vec<Complex64>, n: usize) -> Option<Lu> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        // Pivot search.
        let mut best = col;
        let mut best_mag = m[perm[col] * n + col].norm();
        for row in (col + 1)..n {
            let mag = m[perm[row] * n + col].norm();
            if mag > best_mag {
                best_mag = mag;
                best = row;
            }
        }
        if best_mag == 0.0 || !best_mag.is_finite() {
            return None;
        }
        perm.swap(col, best);
        max_piv = max_piv.max(best_mag);
        min_piv = min_piv.min(best_mag);
        let piv = m[perm[col] * n + col];
        for row in (col + 1)..n {
            let r = perm[row] * n;
            let factor = m[r + col] / piv;
            m[r + col] = factor;
            if factor != Complex64::new(0.0, 0.0) {
                let p = perm[col] * n;
                for k in (col + 1)..n {
                    let sub = factor * m[p + k];
                    m[r + k] -= sub;
                }
            }
        }
    }
    let condition = if min_piv > 0.0 { max_piv / min_piv } else { f64::INFINITY };
    Some(Lu { m, perm, n, condition })
}

impl Lu {
    fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = rhs[self.perm[i]];
            let r = self.perm[i] * n;
            for k in 0..i {
                acc -= self.m[r + k] * y[k];
            }
            y[i] = acc;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let r = self.perm[i] * n;
            let mut acc = y[i];
            for k in (i + 1)..n {
                acc -= self.m[r + k] * x[k];
            }
            x[i] = acc / self.m[r + i];
        }
        x
    }
}

/// Solve node voltages for a set of current injections at one frequency.
///
/// `injections` are (node, amperes) pairs, `observe` the nodes whose
/// voltages are wanted. Pure function of its arguments.
pub fn solve_injection(
    net: &PdnNetwork,
    injections: &[(NodeId, Complex64)],
    observe: &[NodeId],
    frequency_hz: f64,
) -> Result<Vec<Complex64>> {
    if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
        return Err(Error::invalid("frequency", format!("{frequency_hz} Hz (must be > 0)")));
    }
    let gnd = net.ground();
    for (node, _) in injections {
        if *node == gnd {
            return Err(Error::invalid("source", "cannot inject at the ground node"));
        }
    }
    for node in observe {
        if *node == gnd {
            return Err(Error::invalid("observe", "ground is the reference node"));
        }
    }

    let omega = 2.0 * PI * frequency_hz;
    let mut keep: Vec<NodeId> = injections.iter().map(|(n, _)| *n).collect();
    keep.extend_from_slice(observe);
    let graph = reduce(net, omega, &keep);
    let n = graph.rows;
    if n == 0 {
        return Err(Error::SingularSystem { frequency_hz, condition: f64::INFINITY });
    }

    let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
    let gnd_idx = gnd.0;
    for &(a, b, z) in &graph.edges {
        let y = Complex64::new(1.0, 0.0) / z;
        if !y.re.is_finite() || !y.im.is_finite() {
            return Err(Error::SingularSystem { frequency_hz, condition: f64::INFINITY });
        }
        let ra = if a == gnd_idx { None } else { Some(graph.row_of[a]) };
        let rb = if b == gnd_idx { None } else { Some(graph.row_of[b]) };
        if let Some(i) = ra {
            matrix[i * n + i] += y;
        }
        if let Some(j) = rb {
            matrix[j * n + j] += y;
        }
        if let (Some(i), Some(j)) = (ra, rb) {
            matrix[i * n + j] -= y;
            matrix[j * n + i] -= y;
        }
    }

    let lu = lu_factor(matrix, n)
        .ok_or(Error::SingularSystem { frequency_hz, condition: f64::INFINITY })?;
    if lu.condition > CONDITION_CAP {
        return Err(Error::SingularSystem { frequency_hz, condition: lu.condition });
    }

    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for (node, amps) in injections {
        rhs[graph.row_of[node.0]] += amps;
    }
    let x = lu.solve(&rhs);
    let result: Vec<Complex64> = observe.iter().map(|o| x[graph.row_of[o.0]]).collect();
    for v in &result {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::SingularSystem { frequency_hz, condition: lu.condition });
        }
    }
    Ok(result)
}

/// Transfer impedance `Z(f) = V(observe) / I(source)` over a frequency list.
///
/// `source == observe` gives the driving-point impedance. Frequencies must
/// be strictly increasing and positive.
pub fn solve_impedance(
    net: &PdnNetwork,
    source: NodeId,
    observe: NodeId,
    frequencies_hz: &[f64],
) -> Result<ImpedanceProfile> {
    if frequencies_hz.is_empty() {
        return Err(Error::invalid("frequencies", "empty sweep"));
    }
    for w in frequencies_hz.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid("frequencies", "must be strictly increasing"));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut values = Vec::with_capacity(frequencies_hz.len());
    for &f in frequencies_hz {
        let v = solve_injection(net, &[(source, one)], &[observe], f)?;
        values.push(v[0]);
    }
    Ok(ImpedanceProfile {
        frequencies_hz: frequencies_hz.to_vec(),
        pairs: vec![(
            net.node_name(source).to_string(),
            net.node_name(observe).to_string(),
        )],
        values: vec![values],
    })
}

/// Default verification sweep: 64 log-spaced points over 1 MHz - 1 GHz,
/// spanning the regulator/board-dominated low end through the on-die and
/// interposer anti-resonances where tamper sensitivity concentrates.
pub fn default_band() -> Vec<f64> {
    log_spaced(1e6, 1e9, 64)
}

/// Log-spaced frequency grid, inclusive of both endpoints.
pub fn log_spaced(lo_hz: f64, hi_hz: f64, points: usize) -> Vec<f64> {
    assert!(lo_hz > 0.0 && hi_hz > lo_hz && points >= 2);
    let (a, b) = (lo_hz.ln(), hi_hz.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_reference_network, NetworkConfig, PdnNetwork, Region, SllParasitics};
    use approx::assert_relative_eq;

    fn empty_net() -> PdnNetwork {
        PdnNetwork::new(
            2,
            1,
            SllParasitics { resistance_ohm: 1.0, inductance_h: 1e-9, capacitance_f: 1e-12 },
        )
    }

    #[test]
    fn single_resistor_is_frequency_flat() {
        let mut net = empty_net();
        let n = net.add_node("n", Region::Board).unwrap();
        net.add_element(ElementKind::Resistor, 1.0, n, net.ground()).unwrap();
        let freqs = log_spaced(1e3, 1e9, 25);
        let prof = solve_impedance(&net, n, n, &freqs).unwrap();
        for z in &prof.values[0] {
            assert_relative_eq!(z.norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn series_rlc_minimum_at_resonance() {
        // R = 0.1 ohm, L = 1 nH, C = 1 uF -> f0 = 1/(2*pi*sqrt(LC)) ~ 5.033 MHz
        let (r, l, c) = (0.1, 1e-9, 1e-6);
        let mut net = empty_net();
        let top = net.add_node("top", Region::Board).unwrap();
        let m1 = net.add_node("m1", Region::Board).unwrap();
        let m2 = net.add_node("m2", Region::Board).unwrap();
        net.add_element(ElementKind::Resistor, r, top, m1).unwrap();
        net.add_element(ElementKind::Inductor, l, m1, m2).unwrap();
        net.add_element(ElementKind::Capacitor, c, m2, net.ground()).unwrap();

        let f0 = 1.0 / (2.0 * PI * (l * c).sqrt());
        assert_relative_eq!(f0, 5.0329e6, max_relative = 1e-4);

        // Closed-form oracle across a sweep.
        let freqs = log_spaced(1e5, 1e8, 100);
        let prof = solve_impedance(&net, top, top, &freqs).unwrap();
        for (i, &f) in freqs.iter().enumerate() {
            let w = 2.0 * PI * f;
            let expect = Complex64::new(r, w * l - 1.0 / (w * c));
            let got = prof.values[0][i];
            assert_relative_eq!(got.re, expect.re, max_relative = 1e-9);
            assert_relative_eq!(got.im, expect.im, max_relative = 1e-9);
        }

        // |Z| at resonance equals R.
        let z0 = solve_impedance(&net, top, top, &[f0]).unwrap().values[0][0];
        assert_relative_eq!(z0.norm(), r, max_relative = 1e-6);
    }

    #[test]
    fn disconnected_node_reports_singular() {
        let mut net = empty_net();
        let a = net.add_node("a", Region::Board).unwrap();
        let b = net.add_node("b", Region::Board).unwrap();
        net.add_element(ElementKind::Resistor, 1.0, a, net.ground()).unwrap();
        // b floats: driving it must fail and name the frequency.
        let err = solve_impedance(&net, b, b, &[1e6]).unwrap_err();
        match err {
            Error::SingularSystem { frequency_hz, .. } => assert_eq!(frequency_hz, 1e6),
            other => panic!("expected SingularSystem, got {other:?}"),
        }
    }

    #[test]
    fn ground_injection_rejected() {
        let net = build_reference_network(&NetworkConfig::default()).unwrap();
        let gnd = net.ground();
        assert!(solve_impedance(&net, gnd, gnd, &[1e6]).is_err());
    }

    #[test]
    fn reciprocity_on_reference_network() {
        let net = build_reference_network(&NetworkConfig::default()).unwrap();
        let a = net.chiplet_grid_node(0, 2).unwrap();
        let b = net.chiplet_grid_node(2, 5).unwrap();
        for &f in &[1e6, 3.7e7, 5.1e8] {
            let zab = solve_impedance(&net, a, b, &[f]).unwrap().values[0][0];
            let zba = solve_impedance(&net, b, a, &[f]).unwrap().values[0][0];
            assert_relative_eq!(zab.re, zba.re, max_relative = 1e-9);
            assert_relative_eq!(zab.im, zba.im, max_relative = 1e-9);
        }
    }

    #[test]
    fn passivity_at_driving_points() {
        let net = build_reference_network(&NetworkConfig::default()).unwrap();
        for k in 0..3 {
            let n = net.chiplet_grid_node(k, 0).unwrap();
            for &f in &[1e6, 1e7, 1e8, 1e9] {
                let z = solve_impedance(&net, n, n, &[f]).unwrap().values[0][0];
                assert!(
                    z.re >= -1e-12 * z.norm(),
                    "Re(Z)={} at {f} Hz on chiplet {k}",
                    z.re
                );
            }
        }
    }

    #[test]
    fn series_reduction_matches_unreduced_solve() {
        // Requesting the internal chain nodes forces them to be retained,
        // so the same solve runs with and without elimination.
        let (r, l, c) = (0.25, 2e-9, 3e-7);
        let mut net = empty_net();
        let top = net.add_node("top", Region::Board).unwrap();
        let m1 = net.add_node("m1", Region::Board).unwrap();
        let m2 = net.add_node("m2", Region::Board).unwrap();
        net.add_element(ElementKind::Resistor, r, top, m1).unwrap();
        net.add_element(ElementKind::Inductor, l, m1, m2).unwrap();
        net.add_element(ElementKind::Capacitor, c, m2, net.ground()).unwrap();

        let one = Complex64::new(1.0, 0.0);
        for &f in &[1e5, 6.5e6, 9e8] {
            let reduced = solve_injection(&net, &[(top, one)], &[top], f).unwrap()[0];
            let kept = solve_injection(&net, &[(top, one)], &[top, m1, m2], f).unwrap()[0];
            assert_relative_eq!(reduced.re, kept.re, max_relative = 1e-12);
            assert_relative_eq!(reduced.im, kept.im, max_relative = 1e-12);
        }
    }

    #[test]
    fn impedance_csv_schema_is_frozen() {
        let mut net = empty_net();
        let n = net.add_node("n", Region::Board).unwrap();
        net.add_element(ElementKind::Resistor, 2.0, n, net.ground()).unwrap();
        let prof = solve_impedance(&net, n, n, &[1e6, 2e6]).unwrap();
        let csv = prof.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# impedance-profile-v1"));
        assert_eq!(lines.next(), Some("frequency_hz,re_ohm,im_ohm,source,observe"));
        assert!(lines.next().unwrap().starts_with("1000000,2,"));
    }
}
