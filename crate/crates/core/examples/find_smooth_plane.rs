//! Searches for a rational positive 3-plane whose orthogonal complement
//! carries no roots, i.e. a smooth period point. Such planes are dense but
//! small integer bases tend to hit roots, so this samples noise pulled into
//! the positive cone and keeps the first hit.
//!
//!     cargo run --release -p k3period --example find_smooth_plane

use rand::rngs::StdRng;
use rand::SeedableRng;

use k3period::grassmann::sample_positive_plane;
use k3period::io;
use k3period::lattice::Lattice;
use k3period::period::period_check;
use k3period::test_seed;

fn main() {
    let k3 = Lattice::k3();
    let mut rng = StdRng::seed_from_u64(test_seed());
    for attempt in 1..=10_000 {
        let plane = match sample_positive_plane(&k3, &mut rng) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("sampling failed: {e}");
                continue;
            }
        };
        let verdict = period_check(&plane).expect("verdict on a sampled plane");
        eprintln!(
            "attempt {attempt}: {} roots ({} nodes, {} swaps)",
            verdict.root_count(),
            verdict.stats.nodes_visited,
            verdict.stats.lll_swaps
        );
        if verdict.in_t {
            println!(
                "{}",
                serde_json::to_string_pretty(&io::plane_to_json(&plane)).expect("serializable")
            );
            return;
        }
    }
    eprintln!("no smooth plane found in 10000 attempts");
    std::process::exit(1);
}
