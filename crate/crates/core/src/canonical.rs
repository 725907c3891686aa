//! Canonical JSON: object keys sorted, floats in shortest round-trip form.
//! Every payload shared by the CLI and the HTTP API goes through here so
//! both produce byte-identical bodies.

use serde::Serialize;

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    // serde_json::Value keeps object keys in a BTreeMap
    let value = serde_json::to_value(value).expect("payload types serialize to JSON");
    serde_json::to_string(&value).expect("JSON values always render")
}
