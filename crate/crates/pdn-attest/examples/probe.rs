// temporary diagnostic
use pdn_attest::network::{build_reference_network, NetworkConfig};
use pdn_attest::solver::{default_band, solve_impedance};
use pdn_attest::tamper::{apply, scenario_catalog};

fn main() {
    let net = build_reference_network(&NetworkConfig::default()).unwrap();
    let band = default_band();
    let probe = net.chiplet_grid_node(0, 0).unwrap();
    let base = solve_impedance(&net, probe, probe, &band).unwrap();
    println!("f_hz |Z|_ref then rel-change per preset");
    let catalog = scenario_catalog().unwrap();
    let mut tampered = Vec::new();
    for p in catalog {
        tampered.push((p.name, solve_impedance(&apply(&net, &p.event).unwrap(), probe, probe, &band).unwrap()));
    }
    // adjacent twin of far replacement for criterion 7
    let mut adj_ev = catalog.iter().find(|p| p.family == 3).unwrap().event.clone();
    adj_ev.target_region = pdn_attest::network::Region::Chiplet(1);
    tampered.push(("far-adjacent-twin", solve_impedance(&apply(&net, &adj_ev).unwrap(), probe, probe, &band).unwrap()));

    println!("{:>12} {:>10} {}", "f", "|Z|", tampered.iter().map(|(n,_)| format!("{:>18}", n)).collect::<String>());
    for i in 0..band.len() {
        let z0 = base.values[0][i].norm();
        let rels: String = tampered.iter().map(|(_, prof)| {
            let z = prof.values[0][i].norm();
            format!("{:>18.3e}", (z - z0).abs() / z0)
        }).collect();
        println!("{:>12.3e} {:>10.4} {}", band[i], z0, rels);
    }
    for (n, prof) in &tampered {
        let worst = (0..band.len()).map(|i| {
            let z0 = base.values[0][i].norm();
            (prof.values[0][i].norm() - z0).abs() / z0
        }).fold(0.0f64, f64::max);
        println!("max rel change {n}: {worst:.4}");
    }
}
