use std::sync::{Mutex, OnceLock};

use log::{Level, LevelFilter, Log, Metadata, Record};

/// Keeps warnings for the run summary; other records at or above the echo
/// level go to stderr.
struct Collector {
    echo: OnceLock<LevelFilter>,
    warnings: Mutex<Vec<String>>,
}

static COLLECTOR: Collector = Collector {
    echo: OnceLock::new(),
    warnings: Mutex::new(Vec::new()),
};

pub fn install(verbose: u8) {
    let echo = match verbose {
        0 => LevelFilter::Error,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    let _ = COLLECTOR.echo.set(echo);
    if log::set_logger(&COLLECTOR).is_ok() {
        log::set_max_level(echo.max(LevelFilter::Warn));
    }
}

/// Distinct warnings in the order first seen.
pub fn warnings() -> Vec<String> {
    COLLECTOR.warnings.lock().map(|w| w.clone()).unwrap_or_default()
}

impl Collector {
    fn echo(&self) -> LevelFilter {
        self.echo.get().copied().unwrap_or(LevelFilter::Error)
    }
}

impl Log for Collector {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= Level::Warn || metadata.level() <= self.echo()
    }

    fn log(&self, record: &Record) {
        if record.level() == Level::Warn {
            let msg = record.args().to_string();
            if let Ok(mut w) = self.warnings.lock() {
                if !w.contains(&msg) {
                    w.push(msg);
                }
            }
        } else if record.level() <= self.echo() {
            eprintln!("{}: {}", record.level().as_str().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}
