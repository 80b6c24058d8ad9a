//! Write the built-in device models as topology and calibration JSON.
//!
//! ```text
//! cargo run --example export_devices -- fixtures
//! ```
//!
//! Valencia keeps its hand-tuned calibration. The other layouts get error
//! rates drawn from a fixed seed, so repeated runs produce the same files.

use std::path::PathBuf;

use qmpc::devices;
use qmpc::HardwareModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2021);
    let mut noisy =
        |m: HardwareModel| devices::random_calibration(&m, &mut rng, 0.005..0.03, 0.01..0.05);
    let models = [
        ("line5", noisy(devices::line(5))),
        ("valencia", devices::valencia()),
        ("h7", noisy(devices::h7())),
        ("heavy_hex16", noisy(devices::heavy_hex16())),
        ("toronto", noisy(devices::toronto())),
        ("manhattan", noisy(devices::manhattan())),
    ];
    for (name, model) in &models {
        let topology = serde_json::to_string_pretty(&model.topology_file())?;
        let calibration = serde_json::to_string_pretty(&model.calibration_file())?;
        std::fs::write(dir.join(format!("{name}_topology.json")), topology + "\n")?;
        std::fs::write(
            dir.join(format!("{name}_calibration.json")),
            calibration + "\n",
        )?;
        println!(
            "{name}: {} qubits, {} edges",
            model.num_qubits(),
            model.edges().len()
        );
    }
    Ok(())
}
