//! Matrix exponential of small dense matrices by scaling and squaring with a
//! degree-13 Padé approximant (Higham 2005).

use nalgebra::Matrix4;

use crate::error::{Error, Result};

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled [13/13] approximant meets unit roundoff.
const THETA_13: f64 = 5.371920351148152;

fn norm_1(m: &Matrix4<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn expm(a: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix exponential of non-finite matrix".into()));
    }
    let norm = norm_1(a);
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a * 2f64.powi(-squarings);

    let b = &PADE_13;
    let id = Matrix4::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u = a * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] + id * b[1]);
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];

    let mut r = (v - u)
        .lu()
        .solve(&(v + u))
        .ok_or_else(|| Error::Numerical("singular denominator in Padé approximant".into()))?;
    for _ in 0..squarings {
        r = r * r;
    }
    Ok(r)
}
