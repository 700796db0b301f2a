//! Fixed 17-significant-digit float formatting for CSV and JSON output.

pub mod sig17 {
    use serde::Serializer;
    use serde_json::value::RawValue;

    /// `x` with 17 significant digits in scientific notation.
    pub fn fmt(x: f64) -> String {
        if x.is_finite() {
            format!("{x:.16e}")
        } else {
            format!("{x}")
        }
    }

    fn raw(x: f64) -> Box<RawValue> {
        let text = if x.is_finite() { fmt(x) } else { "null".to_string() };
        RawValue::from_string(text).expect("formatted float is valid JSON")
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_some(&raw(*x))
    }

    pub fn serialize_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&raw(*v)),
            None => s.serialize_none(),
        }
    }

    pub fn serialize_pair<S: Serializer>(x: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&raw(x.0))?;
        seq.serialize_element(&raw(x.1))?;
        seq.end()
    }

    pub fn serialize_opt_pair<S: Serializer>(
        x: &Option<(f64, f64)>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match x {
            Some(p) => serialize_pair(p, s),
            None => s.serialize_none(),
        }
    }
}
