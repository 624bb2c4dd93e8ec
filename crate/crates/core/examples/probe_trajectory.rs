use tpc::code::CodeSpec;
use tpc::de::{run_de, DeConfig};

fn main() {
    let spec = CodeSpec::ebch(32, 1).unwrap();
    for ebn0 in [2.2f64, 2.3, 2.4, 2.45] {
        let mut cfg = DeConfig::new(100_000, 50, 2);
        cfg.master_seed = 1;
        let run = run_de(&spec, ebn0, &cfg).unwrap();
        let fr = run.error_fractions();
        let tail: Vec<String> = fr.iter().map(|v| format!("{v:.1e}")).collect();
        println!("{ebn0} dB conv={} traj: {}", run.converged, tail.join(" "));
        let last = run.stats.last().unwrap();
        println!("  last theta=({:.3},{:.3}) gmi={:.4}", last.gamma, last.delta, last.gmi);
    }
}
