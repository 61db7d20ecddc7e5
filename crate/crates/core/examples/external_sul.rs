//! Learn a system that runs as a separate process and speaks the line
//! protocol. Here the process is this example itself, started with `serve`.

use std::io;

use delaylearn::mdm::{make_random_mdm, Simulator, SulSession};
use delaylearn::models;
use delaylearn::oracles::OracleConfig;
use delaylearn::pipeline::{run_experiment, serve, ExperimentConfig, ExternalSul};

fn main() -> delaylearn::Result<()> {
    let truth = make_random_mdm(&models::test_m1(), 5, (0.5, 20.0));
    if std::env::args().nth(1).as_deref() == Some("serve") {
        let mut sim = Simulator::new(truth, 5);
        return serve(&mut sim, io::stdin().lock(), io::stdout().lock());
    }

    let me = std::env::current_exe()?.to_string_lossy().into_owned();
    let sul = ExternalSul::spawn(&[me, "serve".into()], vec!["a".into(), "b".into()])?;
    let mut session = SulSession::new(sul);
    let cfg = ExperimentConfig {
        k: 300,
        d: 2,
        oracle: OracleConfig::WMethod { e: 2 },
        ..ExperimentConfig::default()
    };
    let r = run_experiment(&cfg, &mut session, None)?;
    println!(
        "learned {:?} states over the pipe with {} inputs and {} resets",
        r.size_final, r.inputs, r.resets
    );
    for e in r.estimates.iter().take(5) {
        println!("{}/{} -> {} rate {:.2} from {} samples", e.state, e.input, e.target, e.rate, e.samples);
    }
    Ok(())
}
