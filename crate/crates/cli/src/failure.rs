use serde::Serialize;
use serde_json::Value;

/// A fatal error, printed to stderr as one JSON line.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
            detail: None,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new("usage", message)
    }

    pub fn line(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

macro_rules! kind {
    ($ty:ty, $kind:literal) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::new($kind, e.to_string())
            }
        }
    };
}

kind!(csn_core::ingest::IngestError, "ingest");
kind!(csn_core::model::ModelError, "bundle");
kind!(csn_core::filters::FilterError, "filter");
kind!(csn_core::exports::ExportError, "export");
kind!(csn_core::dimred::DimredError, "projection");
kind!(csn_server::StartupError, "startup");
kind!(std::io::Error, "io");

impl From<csn_core::query::QueryError> for Failure {
    fn from(e: csn_core::query::QueryError) -> Self {
        use csn_core::query::QueryError;
        let detail = match &e {
            QueryError::Parse(p) => serde_json::to_value(p).ok(),
            QueryError::UnknownFields { unknown, valid } => {
                Some(serde_json::json!({ "unknown": unknown, "valid": valid }))
            }
        };
        Failure {
            kind: "query",
            message: e.to_string(),
            detail,
        }
    }
}
