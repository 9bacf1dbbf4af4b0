//! Abbreviated training run on the toy20 grid plus greedy rollouts.
//!
//! Uses a reduced episode budget so the demo finishes in roughly half a
//! minute; the bundled scenario's full budget (3000 episodes) is what the
//! acceptance runs use.
//!
//! ```text
//! cargo run --release --example train_toy20
//! ```

use rainsim::agent::{plan, train};
use rainsim::env::Environment;
use rainsim::radiomap::{build_rss_map, SirMap};
use rainsim::rng::Rng;
use rainsim::scenario::RunConfig;

fn main() {
    let config = RunConfig::load("toy20").expect("bundled scenario");
    let rss = build_rss_map(&config.scenario).expect("map builds");
    let sir = SirMap::from_rss(&rss).expect("sir derives");
    let env = Environment::new(config.episode, &sir).expect("env builds");

    let mut train_config = config.training_with_seed();
    train_config.episodes = 800;
    println!("training {} episodes...", train_config.episodes);
    let (net, log) = train(&env, &train_config).expect("training runs");
    for line in log.iter().step_by(100) {
        println!(
            "episode {:>4}: return {:>9.1}, moving avg {:>9.1}, eps {:.3}",
            line.episode, line.return_value, line.moving_avg_return, line.epsilon
        );
    }

    let mut rng = Rng::new(1);
    let mut reached = 0;
    let n = 20;
    for _ in 0..n {
        let start = env.reset(&mut rng);
        let trajectory = plan(&net, &env, start).expect("rollout runs");
        if trajectory.reached_destination() {
            reached += 1;
        }
    }
    println!("greedy rollouts reaching the destination: {reached}/{n}");
    println!("(the full 3000-episode budget reaches nearly all starts)");
}
