//! Running a TOML experiment config through the library, as the binary does.

use confsphere::cli::{execute, parse_config};

const CONFIG: &str = r#"
command = "compare"
horizon = 20000
replications = 4
seed = 1
per_decade = 3

[[estimator]]
method = "eb"
d = 3
alpha = 0.05
B = 0.8661
schedule = "anytime_eb"

[[estimator]]
method = "stitched_eb"
d = 3
alpha = 0.05
B = 0.8661

[distribution]
kind = "beta_product"
a = 2.0
b = 2.0
recenter = true
"#;

fn main() -> confsphere::Result<()> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.output_path = std::env::temp_dir().join("confsphere_compare.csv");
    let outcome = execute(&cfg)?;
    for line in outcome.summary() {
        println!("{line}");
    }
    print!("{}", std::fs::read_to_string(&cfg.output_path)?);

    match parse_config(&CONFIG.replace("alpha = 0.05", "alpha = 2.0")) {
        Err(e) => println!("rejected as expected:\n{e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
