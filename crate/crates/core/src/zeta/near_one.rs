//! Laurent expansion of ζ around its pole.

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Stieltjes constants γ_0..γ_24, 30 significant digits, computed with an
/// arbitrary-precision implementation of the Laurent coefficients.
pub const STIELTJES: [f64; 25] = [
    0.577215664901532860606512090082,
    -0.0728158454836767248605863758749,
    -0.00969036319287231848453038603521,
    0.00205383442030334586616004654275,
    0.00232537006546730005746817017753,
    0.000793323817301062701753334877444,
    -0.000238769345430199609872421841908,
    -0.000527289567057751046074097505479,
    -0.000352123353803039509602052165001,
    -0.0000343947744180880481779146237982,
    0.000205332814909064794683722289237,
    0.000270184439543903526672902082068,
    0.000167272912105140193353501543341,
    -0.0000274638066037601588600076036934,
    -0.000209209262059299945837139697345,
    -0.000283468655320241446642934474997,
    -0.000199696858308969774707784563203,
    0.0000262770371099183366994665976305,
    0.000307368408149252826592754751949,
    0.000503605453047355629055596437717,
    0.000466343561511559449400594824434,
    0.000104437769756000115810795674368,
    -0.000541599582203997701655196173174,
    -0.00124396209040824577929974159954,
    -0.00158851127890356156190619661152,
];

/// Value of ζ(1 + z) together with a bound on the series truncation.
#[derive(Clone, Copy, Debug)]
pub struct LaurentValue {
    pub value: Complex64,
    pub truncation_bound: f64,
}

/// ζ(1 + z) for `0 < |z| <= 1/2` via `1/z + Σ (-1)^m γ_m z^m / m!`.
///
/// The tail after γ_24 is bounded with Berndt's estimate
/// `|γ_m| <= 4 (m-1)! / π^m`.
pub fn zeta_near_one(z: Complex64, target_abs_err: f64) -> Result<LaurentValue> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(LabError::Pole);
    }
    if z.norm() > 0.5 {
        return Err(LabError::Domain(format!(
            "Laurent expansion used with |z| = {} > 1/2",
            z.norm()
        )));
    }
    let v = laurent_unchecked(z);
    if v.truncation_bound > target_abs_err {
        return Err(LabError::Accuracy {
            target: target_abs_err,
            achieved: v.truncation_bound,
            context: format!("Laurent series at z = {z}"),
        });
    }
    Ok(v)
}

pub(crate) fn laurent_unchecked(z: Complex64) -> LaurentValue {
    // Horner in z over c_m = (-1)^m γ_m / m!
    let mut coeffs = [0.0; 25];
    let mut fact = 1.0;
    for (m, g) in STIELTJES.iter().enumerate() {
        if m > 0 {
            fact *= m as f64;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[m] = sign * g / fact;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    let q = z.norm() / std::f64::consts::PI;
    let m0 = STIELTJES.len() as i32;
    let truncation_bound = 4.0 / m0 as f64 * q.powi(m0) / (1.0 - q);
    LaurentValue {
        value: z.inv() + acc,
        truncation_bound,
    }
}
