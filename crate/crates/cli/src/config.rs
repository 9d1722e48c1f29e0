//! Optional TOML configuration. Top-level keys apply to every subcommand;
//! a `[subcommand]` table overrides them. Keys are the long flag names.
//! Flags given on the command line always win.

use serde::de::DeserializeOwned;
use std::path::Path;
use toml::{Table, Value};

use ere_core::{Error, Result};

pub struct Config {
    table: Table,
}

impl Config {
    pub fn empty() -> Self {
        Config { table: Table::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        let table: Table = text
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))?;
        Ok(Config { table })
    }

    /// Settings for one subcommand: the top-level scalars overlaid by the
    /// subcommand's own table.
    pub fn section<T: DeserializeOwned>(&self, name: &str, keys: &[&str]) -> Result<T> {
        let mut merged = Table::new();
        for (k, v) in &self.table {
            if !v.is_table() && keys.contains(&k.as_str()) {
                merged.insert(k.clone(), v.clone());
            }
        }
        if let Some(Value::Table(sub)) = self.table.get(name) {
            for (k, v) in sub {
                merged.insert(k.clone(), v.clone());
            }
        }
        Value::Table(merged)
            .try_into()
            .map_err(|e| Error::InvalidArgument(format!("config section [{name}]: {e}")))
    }
}

/// Fill every unset option of `cli` from `cfg` and OR the flags.
macro_rules! merge {
    ($cli:expr, $cfg:expr; $($opt:ident),* ; $($flag:ident),*) => {{
        $( if $cli.$opt.is_none() { $cli.$opt = $cfg.$opt.clone(); } )*
        $( $cli.$flag |= $cfg.$flag; )*
    }};
}
pub(crate) use merge;
