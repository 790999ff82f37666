use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, saturate, snf, solve_integer_affine, IntMat};

/// A translate of a connected subtorus: `shift + span(directions)` mod `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSubtorus {
    pub n: usize,
    /// `n × r`, columns span the tangent lattice.
    pub directions: IntMat,
    pub shift: Vec<BigRational>,
}

impl AffineSubtorus {
    pub fn new(directions: IntMat, shift: Vec<BigRational>) -> Self {
        assert_eq!(directions.rows(), shift.len(), "shift length must equal the torus dimension");
        Self { n: shift.len(), directions, shift }
    }

    pub fn dim(&self) -> usize {
        self.directions.cols()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangementSpec {
    pub dim: usize,
    pub subtori: Vec<AffineSubtorus>,
}

impl ArrangementSpec {
    pub fn new(dim: usize, subtori: Vec<AffineSubtorus>) -> Self {
        Self { dim, subtori }
    }

    /// Parses the JSON arrangement format and normalizes every member.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let spec = parse_value(&v)?;
        let subtori = spec
            .subtori
            .iter()
            .enumerate()
            .map(|(i, t)| normalize_subtorus(t).map_err(|e| reindex(e, i)))
            .collect::<Result<_>>()?;
        Ok(Self { dim: spec.dim, subtori })
    }

    pub fn to_json(&self) -> Value {
        let subtori: Vec<Value> = self
            .subtori
            .iter()
            .map(|t| {
                let dirs: Vec<Vec<String>> =
                    (0..t.dim()).map(|j| t.directions.col(j).iter().map(ToString::to_string).collect()).collect();
                let dirs: Vec<Value> = dirs
                    .into_iter()
                    .map(|c| Value::Array(c.into_iter().map(|x| Value::Number(x.parse().unwrap())).collect()))
                    .collect();
                let shift: Vec<Value> = t.shift.iter().map(|x| Value::String(x.to_string())).collect();
                serde_json::json!({ "directions": dirs, "shift": shift })
            })
            .collect();
        serde_json::json!({ "dim": self.dim, "subtori": subtori })
    }

    pub fn k(&self) -> usize {
        self.subtori.len()
    }
}

fn reindex(e: Error, index: usize) -> Error {
    match e {
        Error::NonRationalShift { coord, value, .. } => Error::NonRationalShift { index, coord, value },
        Error::RankDeficientDirections { .. } => Error::RankDeficientDirections { index },
        other => other,
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

fn parse_value(v: &Value) -> Result<ArrangementSpec> {
    let obj = v.as_object().ok_or_else(|| invalid("top level must be an object".into()))?;
    for key in obj.keys() {
        if key != "dim" && key != "subtori" {
            return Err(invalid(format!("unknown field \"{key}\"")));
        }
    }
    let dim =
        obj.get("dim").and_then(Value::as_u64).ok_or_else(|| invalid("\"dim\" must be a nonnegative integer".into()))?
            as usize;
    let list = match obj.get("subtori") {
        None => return Err(invalid("missing field \"subtori\"".into())),
        Some(Value::Array(a)) => a,
        Some(_) => return Err(invalid("\"subtori\" must be an array".into())),
    };
    let mut subtori = Vec::with_capacity(list.len());
    for (i, t) in list.iter().enumerate() {
        subtori.push(parse_subtorus(t, i, dim)?);
    }
    Ok(ArrangementSpec { dim, subtori })
}

fn parse_subtorus(v: &Value, i: usize, n: usize) -> Result<AffineSubtorus> {
    let obj = v.as_object().ok_or_else(|| invalid(format!("subtori[{i}] must be an object")))?;
    for key in obj.keys() {
        if key != "directions" && key != "shift" {
            return Err(invalid(format!("subtori[{i}]: unknown field \"{key}\"")));
        }
    }
    let dirs = match obj.get("directions") {
        None => Vec::new(),
        Some(Value::Array(a)) => a.clone(),
        Some(_) => return Err(invalid(format!("subtori[{i}].directions must be an array of columns"))),
    };
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(dirs.len());
    for (j, c) in dirs.iter().enumerate() {
        let c = c.as_array().ok_or_else(|| invalid(format!("subtori[{i}].directions[{j}] must be an array")))?;
        if c.len() != n {
            return Err(invalid(format!("subtori[{i}].directions[{j}] has length {}, expected {n}", c.len())));
        }
        let col = c
            .iter()
            .enumerate()
            .map(|(r, x)| {
                x.as_i64().ok_or_else(|| invalid(format!("subtori[{i}].directions[{j}][{r}] must be an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        cols.push(col);
    }
    let mut directions = IntMat::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (r, x) in c.iter().enumerate() {
            directions.set(r, j, BigInt::from(*x));
        }
    }
    let shift = match obj.get("shift") {
        None => vec![BigRational::zero(); n],
        Some(Value::Array(a)) => {
            if a.len() != n {
                return Err(invalid(format!("subtori[{i}].shift has length {}, expected {n}", a.len())));
            }
            a.iter()
                .enumerate()
                .map(|(c, x)| {
                    parse_rational(x).ok_or_else(|| Error::NonRationalShift {
                        index: i,
                        coord: c,
                        value: x.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        Some(_) => return Err(invalid(format!("subtori[{i}].shift must be an array"))),
    };
    Ok(AffineSubtorus { n, directions, shift })
}

/// Accepts JSON integers and strings `"p"` or `"p/q"`.
pub fn parse_rational(v: &Value) -> Option<BigRational> {
    match v {
        Value::Number(x) if x.is_i64() || x.is_u64() => {
            Some(BigRational::from_integer(x.to_string().parse::<BigInt>().ok()?))
        }
        Value::String(s) => parse_rational_str(s),
        _ => None,
    }
}

pub fn parse_rational_str(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let int = |t: &str| -> Option<BigInt> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    match s.split_once('/') {
        None => Some(BigRational::from_integer(int(s)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(int(p)?, q))
        }
    }
}

/// Saturates the direction lattice and moves the shift to the canonical
/// point of the subtorus (smallest denominator, then lexicographically least
/// in `[0,1)^n`).
pub fn normalize_subtorus(raw: &AffineSubtorus) -> Result<AffineSubtorus> {
    let n = raw.n;
    let r = raw.dim();
    if snf(&raw.directions).rank() < r {
        return Err(Error::RankDeficientDirections { index: 0 });
    }
    let directions = if r == 0 { IntMat::zeros(n, 0) } else { saturate(&raw.directions.transpose()).transpose() };
    let forms = forms_of_directions(&directions);
    let rhs = forms_apply(&forms, &raw.shift);
    let shift = solve_integer_affine(&forms, &rhs).expect("a subtorus always contains its own shift");
    Ok(AffineSubtorus { n, directions, shift })
}

/// Basis of the integral forms vanishing on the tangent lattice, as rows.
pub fn forms_of(s: &AffineSubtorus) -> IntMat {
    forms_of_directions(&s.directions)
}

fn forms_of_directions(directions: &IntMat) -> IntMat {
    kernel_basis(&directions.transpose()).transpose()
}

/// `C x` for an integer matrix and a rational vector.
pub fn forms_apply(c: &IntMat, x: &[BigRational]) -> Vec<BigRational> {
    (0..c.rows()).map(|i| c.row(i).iter().zip(x).map(|(a, b)| BigRational::from_integer(a.clone()) * b).sum()).collect()
}

/// `true` if every entry is an integer.
pub fn is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Renders a rational as `p/q` or `p`.
pub fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_point(x: &[BigRational]) -> String {
    let parts: Vec<String> = x.iter().map(fmt_rational).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn saturates_directions() {
        let t = AffineSubtorus::new(IntMat::from_rows(&[[2], [2]]), vec![rat(0, 1), rat(0, 1)]);
        let t = normalize_subtorus(&t).unwrap();
        assert_eq!(t.directions, IntMat::from_rows(&[[1], [1]]));
    }

    #[test]
    fn reduces_shift_mod_z() {
        let t = AffineSubtorus::new(IntMat::zeros(2, 0), vec![rat(3, 2), rat(-1, 4)]);
        assert_eq!(normalize_subtorus(&t).unwrap().shift, vec![rat(1, 2), rat(3, 4)]);
    }

    #[test]
    fn canonical_point_on_circle() {
        let t = AffineSubtorus::new(IntMat::from_rows(&[[1], [1]]), vec![rat(1, 3), rat(0, 1)]);
        let t = normalize_subtorus(&t).unwrap();
        assert_eq!(t.shift, vec![rat(0, 1), rat(2, 3)]);
        let t = AffineSubtorus::new(IntMat::from_rows(&[[1], [1]]), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(normalize_subtorus(&t).unwrap().shift, vec![rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn forms_examples() {
        let diag = AffineSubtorus::new(IntMat::from_rows(&[[1], [1]]), vec![rat(0, 1); 2]);
        let f = forms_of(&diag);
        assert_eq!(f.rows(), 1);
        assert_eq!(f.row(0)[0], -f.row(0)[1].clone());
        let pt = AffineSubtorus::new(IntMat::zeros(2, 0), vec![rat(0, 1); 2]);
        assert_eq!(forms_of(&pt), IntMat::identity(2));
        let t = AffineSubtorus::new(IntMat::from_rows(&[[1], [2]]), vec![rat(0, 1); 2]);
        let f = forms_of(&t);
        let v: Vec<i64> = f.row(0).iter().map(|x| x.try_into().unwrap()).collect();
        assert!(v == vec![2, -1] || v == vec![-2, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = r#"{"dim": 2, "subtori": [{"directions": [[1, 0]], "shift": [0.5, 0]}]}"#;
        assert!(matches!(ArrangementSpec::from_json_str(bad), Err(Error::NonRationalShift { index: 0, coord: 0, .. })));
        let dep = r#"{"dim": 2, "subtori": [{}, {"directions": [[1, 1], [2, 2]], "shift": [0, 0]}]}"#;
        assert_eq!(ArrangementSpec::from_json_str(dep), Err(Error::RankDeficientDirections { index: 1 }));
        assert!(ArrangementSpec::from_json_str("{\"dim\": 2}").is_err());
        assert!(parse_rational_str("1/0").is_none());
        assert_eq!(parse_rational_str("-6/4"), Some(rat(-3, 2)));
    }
}
