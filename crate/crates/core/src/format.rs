//! The instance file format.
//!
//! An instance is a JSON object `{"items": [{"profit": <positive integer>,
//! "prob": <probability>}, ...]}`. A probability may be
//!
//! - a JSON number,
//! - a decimal string, parsed to the nearest double (round half to even), or
//! - an exact rational `{"num": k, "den": K}`, the form reduced instances
//!   use; readers convert it to the nearest double.
//!
//! Writers emit probabilities as decimal strings with 17 significant digits,
//! which round-trip doubles exactly. Unknown fields are ignored, so reduced
//! instance files (which carry an extra `reduction` block) parse as plain
//! instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Item};
use crate::reduction::ReducedInstance;

#[derive(Deserialize)]
struct InstanceFile {
    items: Vec<ItemFile>,
}

#[derive(Deserialize)]
struct ItemFile {
    profit: u64,
    prob: ProbField,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProbField {
    Rational { num: u64, den: u64 },
    Text(String),
    Number(f64),
}

const F64_EXACT_INT: u64 = 1 << 53;

impl ProbField {
    fn to_f64(&self) -> Result<f64> {
        match self {
            ProbField::Number(v) => Ok(*v),
            ProbField::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad probability string {s:?}"))),
            ProbField::Rational { num, den } => {
                if *den == 0 {
                    return Err(Error::Parse("probability denominator is zero".into()));
                }
                if *num > F64_EXACT_INT || *den > F64_EXACT_INT {
                    return Err(Error::Parse(
                        "rational probability terms exceed 2^53; not exactly convertible".into(),
                    ));
                }
                Ok(*num as f64 / *den as f64)
            }
        }
    }
}

/// Parses an instance from JSON text.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = file
        .items
        .iter()
        .map(|it| Ok(Item::new(it.profit, it.prob.to_f64()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance::new(items))
}

#[derive(Serialize)]
struct InstanceOut {
    items: Vec<ItemOut>,
}

#[derive(Serialize)]
struct ItemOut {
    profit: u64,
    #[serde(with = "serde_prob")]
    prob: ProbOut,
}

enum ProbOut {
    Double(f64),
    Rational { num: u64, den: u64 },
}

mod serde_prob {
    use super::ProbOut;
    use serde::ser::SerializeStruct;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(p: &ProbOut, s: S) -> std::result::Result<S::Ok, S::Error> {
        match p {
            // 17 significant digits round-trip any double exactly.
            ProbOut::Double(v) => s.serialize_str(&format!("{v:.16e}")),
            ProbOut::Rational { num, den } => {
                let mut st = s.serialize_struct("prob", 2)?;
                st.serialize_field("num", num)?;
                st.serialize_field("den", den)?;
                st.end()
            }
        }
    }
}

/// Renders an instance in the file format.
pub fn instance_to_json(instance: &Instance) -> String {
    let out = InstanceOut {
        items: instance
            .items
            .iter()
            .map(|it| ItemOut {
                profit: it.profit,
                prob: ProbOut::Double(it.prob),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("plain data serializes");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ReductionMeta<'a> {
    target: u64,
    denominator: u64,
    dropped: &'a [usize],
}

#[derive(Serialize)]
struct ReducedOut<'a> {
    items: Vec<ItemOut>,
    reduction: ReductionMeta<'a>,
}

/// Renders a reduced instance: the core format with exact rational
/// probabilities plus a `reduction` metadata block.
pub fn reduced_to_json(red: &ReducedInstance) -> String {
    let out = ReducedOut {
        items: red
            .profits
            .iter()
            .zip(&red.numerators)
            .map(|(&profit, &num)| ItemOut {
                profit,
                prob: ProbOut::Rational {
                    num,
                    den: red.denominator,
                },
            })
            .collect(),
        reduction: ReductionMeta {
            target: red.target,
            denominator: red.denominator,
            dropped: &red.dropped,
        },
    };
    let mut text = serde_json::to_string_pretty(&out).expect("plain data serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{reduce, SubsetSumInstance};

    #[test]
    fn parses_every_probability_form() {
        let inst = parse_instance(
            r#"{"items": [
                {"profit": 3, "prob": 0.5},
                {"profit": 4, "prob": "0.25"},
                {"profit": 5, "prob": {"num": 1, "den": 3}}
            ]}"#,
        )
        .unwrap();
        assert_eq!(inst.items[0].prob, 0.5);
        assert_eq!(inst.items[1].prob, 0.25);
        assert_eq!(inst.items[2].prob, 1.0 / 3.0);
    }

    #[test]
    fn decimal_strings_round_to_nearest_even() {
        let inst = parse_instance(r#"{"items": [{"profit": 1, "prob": "0.1"}]}"#).unwrap();
        assert_eq!(inst.items[0].prob, 0.1f64);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_instance("{").is_err());
        assert!(parse_instance(r#"{"items": [{"profit": 1}]}"#).is_err());
        assert!(parse_instance(r#"{"items": [{"profit": 1, "prob": "x"}]}"#).is_err());
        assert!(
            parse_instance(r#"{"items": [{"profit": 1, "prob": {"num": 1, "den": 0}}]}"#).is_err()
        );
    }

    #[test]
    fn writer_round_trips_doubles_exactly() {
        let original = Instance::new(vec![
            Item::new(3, 0.1),
            Item::new(7, 0.123_456_789_012_345_68),
            Item::new(1, 1.0),
            Item::new(2, 0.0),
            Item::new(9, f64::MIN_POSITIVE),
        ]);
        let text = instance_to_json(&original);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed, original);
    }

    #[test]
    fn reduced_file_parses_as_core_instance() {
        let red = reduce(&SubsetSumInstance::new(vec![1, 2, 3], 4)).unwrap();
        let text = reduced_to_json(&red);
        assert!(text.contains("\"den\": 288"));
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed.items.len(), 3);
        assert_eq!(parsed.items[0].prob, 224.0 / 288.0);
        assert!(parsed.validate().is_ok());
    }

    proptest::proptest! {
        #[test]
        fn any_double_probability_survives_a_round_trip(p in 0.0f64..=1.0) {
            let original = Instance::new(vec![Item::new(1, p)]);
            let parsed = parse_instance(&instance_to_json(&original)).unwrap();
            proptest::prop_assert_eq!(parsed.items[0].prob, p);
        }
    }
}
