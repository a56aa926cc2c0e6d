//! Deterministic JSON: object keys sorted, floats written with 17
//! significant digits so that they round-trip exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// Pretty printer that writes every float as `d.ddddddddddddddddde±x`.
struct FullPrecision {
    inner: PrettyFormatter<'static>,
}

fn write_float<W: io::Write + ?Sized>(w: &mut W, value: f64) -> io::Result<()> {
    if value == 0.0 {
        // Keeps the sign of negative zero readable and the output short.
        return w.write_all(if value.is_sign_negative() { b"-0.0" } else { b"0.0" });
    }
    write!(w, "{value:.16e}")
}

impl Formatter for FullPrecision {
    fn write_f64<W: io::Write + ?Sized>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write_float(w, value)
    }

    fn write_f32<W: io::Write + ?Sized>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write_float(w, value as f64)
    }

    fn begin_array<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: io::Write + ?Sized>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: io::Write + ?Sized>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: io::Write + ?Sized>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` with sorted keys and full-precision floats.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    // Going through `Value` sorts object keys.
    let tree: Value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision { inner: PrettyFormatter::new() });
    tree.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_exact() {
        let x = 0.1 + 0.2;
        let s = to_string(&json!({"b": x, "a": 1, "c": [std::f64::consts::PI, 0.0]})).unwrap();
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(s.contains("3.0000000000000004e-1"), "{s}");
        assert!(s.contains("3.1415926535897931e0"), "{s}");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64().unwrap(), x);
    }
}
