use num_complex::Complex64;
use serde_json::{json, Value};

use super::{DensityMatrix, Ket, Operator};

/// A complex number as a `[re, im]` pair. Every complex quantity in the
/// JSON reports uses this shape.
pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// A ket as an array of `[re, im]` pairs.
pub fn ket_to_json(k: &Ket) -> Value {
    Value::Array(k.amps().iter().map(|&a| complex_to_json(a)).collect())
}

/// A matrix as an array of rows, each row an array of `[re, im]` pairs.
pub fn operator_to_json(m: &Operator) -> Value {
    Value::Array(
        (0..m.dim())
            .map(|i| {
                Value::Array(
                    (0..m.dim())
                        .map(|j| complex_to_json(m.entry(i, j)))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn density_to_json(rho: &DensityMatrix) -> Value {
    operator_to_json(rho.as_operator())
}
