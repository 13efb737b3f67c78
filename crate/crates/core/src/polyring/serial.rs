//! JSON form of sparse polynomials.
//!
//! Schema: `{"arity": n, "ring": "Z" | "Q" | {"Fp": p}, "terms": [[[e1,...,en],
//! "coeff"], ...]}` with terms in descending graded-lex order and
//! coefficients as decimal strings (or `num/den` over the rationals).

use serde_json::{json, Value};

use super::{parse_coefficient, Monomial, PolyError, RingTag, SparsePoly};

pub fn ring_to_json(ring: &RingTag) -> Value {
    match ring {
        RingTag::Integers => json!("Z"),
        RingTag::Rationals => json!("Q"),
        RingTag::PrimeField(p) => json!({ "Fp": p }),
    }
}

pub fn ring_from_json(v: &Value) -> Result<RingTag, String> {
    match v {
        Value::String(s) if s == "Z" => Ok(RingTag::Integers),
        Value::String(s) if s == "Q" => Ok(RingTag::Rationals),
        Value::Object(map) => {
            let p = map
                .get("Fp")
                .and_then(Value::as_u64)
                .ok_or_else(|| "ring object must be {\"Fp\": prime}".to_string())?;
            RingTag::prime_field(p).map_err(|e| e.to_string())
        }
        other => Err(format!("unrecognized ring {other}")),
    }
}

pub fn poly_to_json(poly: &SparsePoly) -> Value {
    let terms: Vec<Value> = poly
        .sorted_terms()
        .into_iter()
        .map(|(m, c)| json!([m.0, c.to_string()]))
        .collect();
    json!({
        "arity": poly.arity(),
        "ring": ring_to_json(&poly.ring()),
        "terms": terms,
    })
}

pub fn poly_from_json(v: &Value) -> Result<SparsePoly, String> {
    let arity = v
        .get("arity")
        .and_then(Value::as_u64)
        .ok_or("missing arity")? as usize;
    let ring = ring_from_json(v.get("ring").ok_or("missing ring")?)?;
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or("missing terms")?;
    let mut parsed = Vec::with_capacity(terms.len());
    for t in terms {
        let pair = t.as_array().filter(|a| a.len() == 2).ok_or("term must be [exponents, coeff]")?;
        let exps: Vec<u32> = pair[0]
            .as_array()
            .ok_or("exponents must be an array")?
            .iter()
            .map(|e| e.as_u64().map(|x| x as u32).ok_or("exponent must be a nonnegative integer"))
            .collect::<Result<_, _>>()?;
        let coeff_str = pair[1].as_str().ok_or("coefficient must be a string")?;
        let coeff = parse_coefficient(coeff_str, &ring)?;
        parsed.push((exps, coeff));
    }
    SparsePoly::from_terms(arity, ring, parsed).map_err(|e: PolyError| e.to_string())
}

/// Round-trip helper used by tests: canonical text form of one monomial.
pub fn monomial_to_json(m: &Monomial) -> Value {
    json!(m.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let z = RingTag::Integers;
        let poly = SparsePoly::from_terms(
            2,
            z,
            [
                (vec![2, 0], z.from_i64(1)),
                (vec![1, 1], z.from_i64(-2)),
                (vec![0, 2], z.from_i64(1)),
            ],
        )
        .unwrap();
        let v = poly_to_json(&poly);
        assert_eq!(v["arity"], 2);
        assert_eq!(v["ring"], "Z");
        assert_eq!(v["terms"][0], serde_json::json!([[2, 0], "1"]));
        let back = poly_from_json(&v).unwrap();
        assert_eq!(back, poly);
    }

    #[test]
    fn json_rational_and_field() {
        let q = RingTag::Rationals;
        let poly = SparsePoly::from_terms(
            1,
            q,
            [(vec![0], parse_coefficient("1/6", &q).unwrap())],
        )
        .unwrap();
        let v = poly_to_json(&poly);
        assert_eq!(v["terms"][0][1], "1/6");
        assert_eq!(poly_from_json(&v).unwrap(), poly);

        let f7 = RingTag::prime_field(7).unwrap();
        let poly = SparsePoly::from_terms(1, f7, [(vec![3], f7.from_i64(-2))]).unwrap();
        let v = poly_to_json(&poly);
        assert_eq!(v["ring"], serde_json::json!({"Fp": 7}));
        assert_eq!(v["terms"][0][1], "5");
        assert_eq!(poly_from_json(&v).unwrap(), poly);
    }

    #[test]
    fn json_rejects_bad_ring() {
        let v = serde_json::json!({"arity": 1, "ring": {"Fp": 6}, "terms": []});
        assert!(poly_from_json(&v).is_err());
    }
}
