use tpc::code::CodeSpec;
use tpc::de::{find_threshold, DeConfig};

fn main() {
    let spec = CodeSpec::ebch(32, 1).unwrap();
    for p in [2usize, 3] {
        let mut cfg = DeConfig::new(100_000, 50, p);
        cfg.master_seed = 1;
        let t = std::time::Instant::now();
        let res = find_threshold(&spec, &cfg, (1.3, 2.6), 0.05).unwrap();
        println!(
            "p={p}: threshold {:.4} dB bracket ({:.4}, {:.4}) in {:.1}s, {} probes",
            res.ebn0_star_db,
            res.bracket.0,
            res.bracket.1,
            t.elapsed().as_secs_f64(),
            res.trajectory.len()
        );
    }
}
