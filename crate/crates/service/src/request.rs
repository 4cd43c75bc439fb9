//! Request validation. Bodies are parsed field by field so a bad request gets
//! a diagnostic for every offending field at once.

use serde::Serialize;
use serde_json::{Map, Value};
use umrahguard_core::corpus::AppRecord;
use umrahguard_core::features::MetadataStats;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// A validated verification request. Absent metadata stays `None` until
/// [`VerifyRequest::into_record`] fills it from the model's training means.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyRequest {
    pub name: String,
    pub description: String,
    pub permissions: Vec<String>,
    pub download_count: Option<u64>,
    pub rating: Option<f64>,
    pub size_mb: Option<f64>,
    pub days_since_update: Option<u64>,
}

fn field_error(field: &str, message: &str) -> FieldError {
    FieldError {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn optional_string(obj: &Map<String, Value>, key: &str, errors: &mut Vec<FieldError>) -> Option<String> {
    match obj.get(key) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            errors.push(field_error(key, "must be a string"));
            None
        }
    }
}

fn optional_count(obj: &Map<String, Value>, key: &str, errors: &mut Vec<FieldError>) -> Option<u64> {
    match obj.get(key) {
        None | Some(Value::Null) => None,
        Some(v) => match v.as_u64() {
            Some(n) => Some(n),
            None => {
                errors.push(field_error(key, "must be a non-negative integer"));
                None
            }
        },
    }
}

fn optional_real(obj: &Map<String, Value>, key: &str, range: (f64, f64), errors: &mut Vec<FieldError>) -> Option<f64> {
    match obj.get(key) {
        None | Some(Value::Null) => None,
        Some(v) => match v.as_f64() {
            Some(x) if x >= range.0 && x <= range.1 => Some(x),
            _ => {
                errors.push(field_error(
                    key,
                    &format!("must be a number in [{}, {}]", range.0, range.1),
                ));
                None
            }
        },
    }
}

impl VerifyRequest {
    pub fn parse(body: &[u8]) -> Result<Self, Vec<FieldError>> {
        let value: Value =
            serde_json::from_slice(body).map_err(|e| vec![field_error("body", &format!("invalid JSON: {e}"))])?;
        let Value::Object(obj) = value else {
            return Err(vec![field_error("body", "must be a JSON object")]);
        };
        let mut errors = Vec::new();
        let description = match obj.get("description") {
            Some(Value::String(s)) if !s.trim().is_empty() => s.clone(),
            Some(Value::String(_)) => {
                errors.push(field_error("description", "must not be blank"));
                String::new()
            }
            None | Some(Value::Null) => {
                errors.push(field_error("description", "missing required field"));
                String::new()
            }
            Some(_) => {
                errors.push(field_error("description", "must be a string"));
                String::new()
            }
        };
        let name = optional_string(&obj, "name", &mut errors).unwrap_or_default();
        let permissions = match obj.get("permissions") {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    match item.as_str() {
                        Some(s) => out.push(s.to_string()),
                        None => errors.push(field_error(&format!("permissions[{i}]"), "must be a string")),
                    }
                }
                out
            }
            Some(_) => {
                errors.push(field_error("permissions", "must be an array of strings"));
                Vec::new()
            }
        };
        let request = VerifyRequest {
            name,
            description,
            permissions,
            download_count: optional_count(&obj, "download_count", &mut errors),
            rating: optional_real(&obj, "rating", (0.0, 5.0), &mut errors),
            size_mb: optional_real(&obj, "size_mb", (0.0, f64::MAX), &mut errors),
            days_since_update: optional_count(&obj, "days_since_update", &mut errors),
        };
        if errors.is_empty() {
            Ok(request)
        } else {
            Err(errors)
        }
    }

    /// Builds the record the model sees, filling absent metadata with the
    /// training means.
    pub fn into_record(self, stats: &MetadataStats) -> AppRecord {
        let mean = |i: usize| stats.ranges[i].mean;
        AppRecord {
            app_id: "request".into(),
            name: self.name,
            developer_name: String::new(),
            developer_email_domain: String::new(),
            description: self.description,
            permissions: self.permissions.into_iter().collect(),
            download_count: self.download_count.unwrap_or(mean(0).round() as u64),
            rating: self.rating.unwrap_or(mean(1)),
            size_mb: self.size_mb.unwrap_or(mean(2)),
            days_since_update: self.days_since_update.unwrap_or(mean(3).round() as u64),
            label: None,
        }
    }
}
