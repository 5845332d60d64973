use std::fmt::Write;

use serde_json::Value;

use super::Certificate;

impl Certificate {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate fields are always serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate fields are always serializable")
    }

    /// Plain-text rendering, one line per JSON leaf in document order, so
    /// every number in the text also appears in the JSON.
    pub fn to_text(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        json_to_text(&format!("localization certificate: {verdict}"), &self.to_json())
    }
}

/// Renders any JSON document the way [`Certificate::to_text`] does, under a
/// `# title` line.
pub fn json_to_text(title: &str, value: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    render(&mut out, value, 0);
    out
}

fn render(out: &mut String, value: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) if !is_inline(v) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(out, v, depth + 1);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar(v));
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                if is_inline(v) {
                    let _ = writeln!(out, "{pad}[{i}] {}", scalar(v));
                } else {
                    let _ = writeln!(out, "{pad}[{i}]");
                    render(out, v, depth + 1);
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", scalar(value));
        }
    }
}

/// Scalars and short numeric arrays such as intervals and points fit on
/// one line.
fn is_inline(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| x.is_number() || x.is_null()) && items.len() <= 4,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{certify_shell_interval, CertifyOptions};
    use crate::expr::SamplingPolicy;
    use crate::presets;

    fn numbers(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Number(n) => out.push(n.to_string()),
            Value::Array(a) => a.iter().for_each(|x| numbers(x, out)),
            Value::Object(m) => m.values().for_each(|x| numbers(x, out)),
            _ => {}
        }
    }

    #[test]
    fn text_mirrors_json() {
        let (p, spec, bounds) = presets::numex();
        let opts = CertifyOptions {
            sampling: SamplingPolicy {
                samples_per_axis: 12,
                refinement_rounds: 1,
            },
            t_points: 129,
            check_kernels: false,
            ..CertifyOptions::default()
        };
        let cert = certify_shell_interval(&p, &spec, &bounds, &opts).unwrap();
        let text = cert.to_text();
        let json = cert.to_json();
        let mut nums = Vec::new();
        numbers(&json, &mut nums);
        for n in nums {
            assert!(text.contains(&n), "{n} missing from text");
        }
        assert!(text.starts_with("# localization certificate: PASS"));
        // same input, same bytes
        let again = certify_shell_interval(&p, &spec, &bounds, &opts).unwrap();
        assert_eq!(again.to_json_string(), cert.to_json_string());
    }
}
