use kbm::{Error, ErrorKind};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Bad arguments or environment that never reached the library.
    Usage(String),
    Io(std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Domain => "domain",
                ErrorKind::Precision => "precision",
                ErrorKind::Resource => "resource",
                ErrorKind::Internal => "internal",
            },
            CliError::Usage(_) => "domain",
            CliError::Io(_) => "resource",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "domain" => EXIT_DOMAIN,
            "precision" => EXIT_PRECISION,
            "resource" => EXIT_RESOURCE,
            _ => EXIT_INTERNAL,
        }
    }

    /// The diagnostic object written on stdout in place of a result.
    pub fn to_json(&self) -> serde_json::Value {
        let variant = match self {
            CliError::Core(e) => variant_name(e),
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
        };
        json!({"error": {"kind": self.kind(), "variant": variant, "message": self.to_string()}})
    }
}

fn variant_name(e: &Error) -> &'static str {
    match e {
        Error::IndexBelowRange { .. } => "IndexBelowRange",
        Error::Domain(_) => "Domain",
        Error::DivisionByAmbiguousZero => "DivisionByAmbiguousZero",
        Error::Indeterminate { .. } => "Indeterminate",
        Error::PrecisionExhausted { .. } => "PrecisionExhausted",
        Error::ChainViolation { .. } => "ChainViolation",
        Error::NoPositiveEpsilon { .. } => "NoPositiveEpsilon",
        Error::ResourceLimit { .. } => "ResourceLimit",
        Error::OracleScaleExceeded(_) => "OracleScaleExceeded",
        Error::CorruptCheckpoint(_) => "CorruptCheckpoint",
        Error::Invariant(_) => "Invariant",
    }
}

/// Applies `KBM_PRECISION_CAP_BITS` and `KBM_MEMORY_CAP_BYTES` if set.
pub fn apply_env(env: &dyn Fn(&str) -> Option<String>) -> CliResult<()> {
    if let Some(v) = env("KBM_PRECISION_CAP_BITS") {
        let bits: u32 = v.trim().parse().map_err(|_| {
            CliError::Usage(format!("KBM_PRECISION_CAP_BITS: not a bit count: {v:?}"))
        })?;
        if bits < 64 {
            return Err(CliError::Usage(
                "KBM_PRECISION_CAP_BITS must be at least 64".into(),
            ));
        }
        kbm::precision::set_precision_cap(bits);
    }
    if let Some(v) = env("KBM_MEMORY_CAP_BYTES") {
        let bytes = crate::numarg::parse_u64(&v).map_err(|_| {
            CliError::Usage(format!("KBM_MEMORY_CAP_BYTES: not a byte count: {v:?}"))
        })?;
        kbm::meet::set_memory_cap_bytes(bytes);
    }
    Ok(())
}
