//! Parse a configuration document, print the fully defaulted form, and show
//! the key path reported for a bad value.
//!
//!     cargo run --example config_file [path.json]

use electroconv::config::parse_config;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable config"),
        None => r#"{"grid": {"n": 128}, "init": {"preset": "random"}, "seed": 3}"#.to_string(),
    };
    match parse_config(&text) {
        Ok(cfg) => println!("{}", cfg.to_json()),
        Err(e) => println!("{e}"),
    }
    match parse_config(r#"{"grid": {"n": 15}}"#) {
        Ok(_) => unreachable!(),
        Err(e) => println!("{e}"),
    }
}
