use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_CART_TTL_SECS: u64 = 24 * 60 * 60;

/// Header carrying the shared secret when one is configured.
pub const SECRET_HEADER: &str = "x-sdskg-secret";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{key}: {reason}")]
    Value { key: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Snapshot directory; the store lives in memory only when absent.
    pub data_dir: Option<PathBuf>,
    /// Extra general hazard lists (`*.txt`), keyed by their header label.
    pub hgen_dir: Option<PathBuf>,
    /// Static assets served for paths no API route claims.
    pub static_dir: Option<PathBuf>,
    pub cart_ttl: Duration,
    pub shared_secret: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: DEFAULT_LISTEN.parse().expect("valid default address"),
            data_dir: None,
            hgen_dir: None,
            static_dir: None,
            cart_ttl: Duration::from_secs(DEFAULT_CART_TTL_SECS),
            shared_secret: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    listen: Option<String>,
    data_dir: Option<PathBuf>,
    hgen_dir: Option<PathBuf>,
    static_dir: Option<PathBuf>,
    cart_ttl_secs: Option<u64>,
    shared_secret: Option<String>,
}

/// Environment variables that override file settings.
pub const ENV_VARS: &[(&str, &str)] = &[
    ("SDSKG_LISTEN", "listen"),
    ("SDSKG_DATA_DIR", "data_dir"),
    ("SDSKG_HGEN_DIR", "hgen_dir"),
    ("SDSKG_STATIC_DIR", "static_dir"),
    ("SDSKG_CART_TTL_SECS", "cart_ttl_secs"),
    ("SDSKG_SHARED_SECRET", "shared_secret"),
];

impl ServiceConfig {
    /// Parses the TOML config format. Relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text)?;
        let mut config = ServiceConfig::default();
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        if let Some(listen) = file.listen {
            config.set("listen", &listen)?;
        }
        config.data_dir = file.data_dir.map(resolve);
        config.hgen_dir = file.hgen_dir.map(resolve);
        config.static_dir = file.static_dir.map(resolve);
        if let Some(secs) = file.cart_ttl_secs {
            config.set("cart_ttl_secs", &secs.to_string())?;
        }
        config.shared_secret = file.shared_secret.filter(|s| !s.is_empty());
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Applies `SDSKG_*` overrides from `lookup` (normally `std::env::var`).
    pub fn with_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        for (var, key) in ENV_VARS {
            if let Some(value) = lookup(var) {
                self.set(key, &value)?;
            }
        }
        Ok(self)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::Value {
            key: key.to_string(),
            reason,
        };
        match key {
            "listen" => self.listen = value.parse().map_err(|e| invalid(format!("{value:?}: {e}")))?,
            "data_dir" => self.data_dir = Some(PathBuf::from(value)),
            "hgen_dir" => self.hgen_dir = Some(PathBuf::from(value)),
            "static_dir" => self.static_dir = Some(PathBuf::from(value)),
            "cart_ttl_secs" => {
                let secs: u64 = value.parse().map_err(|e| invalid(format!("{value:?}: {e}")))?;
                if secs == 0 {
                    return Err(invalid("must be positive".into()));
                }
                self.cart_ttl = Duration::from_secs(secs);
            }
            "shared_secret" => self.shared_secret = Some(value.to_string()).filter(|s| !s.is_empty()),
            _ => return Err(invalid("unknown key".into())),
        }
        Ok(())
    }
}
