#![no_main]

use libfuzzer_sys::fuzz_target;
use qmacro_cli::args::apply_json;
use qmacro_cli::config::{Command, RunConfig};

const COMMANDS: [Command; 6] =
    [Command::Measure, Command::Modes, Command::SweepN, Command::SweepAxis, Command::Evolve, Command::Verify];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for command in COMMANDS {
        let mut c = RunConfig::defaults_for(command);
        if apply_json(&mut c, text).is_err() || c.validate().is_err() {
            continue;
        }
        // an accepted config must survive its own sidecar serialization
        let saved = serde_json::to_string(&c).expect("config serializes");
        let mut back = RunConfig::defaults_for(command);
        apply_json(&mut back, &saved).expect("sidecar config reloads");
        assert_eq!(back, c);
    }
});
