use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};

/// Extra Fock levels used when building `cos[η(a† + a)]` before cropping.
pub const COS_PADDING: usize = 8;

fn check_eta(eta: f64) -> Result<f64> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return invalid(format!("Lamb-Dicke parameter must be finite and ≥ 0, got {eta}"));
    }
    Ok(eta * eta)
}

/// `f(n) = ⟨n| e^{−η²/2} :J₀(2η√(a†a)): |n⟩ = e^{−η²/2} L_n(η²)`.
///
/// Uses the three-term Laguerre recurrence, which stays accurate where the
/// alternating sum `Σ_k (−η²)^k n!/((k!)²(n−k)!)` cancels catastrophically.
pub fn f_of_n(n: usize, eta: f64) -> Result<f64> {
    Ok(*f_table(n, eta)?.last().expect("table has n + 1 entries"))
}

/// `[f(0), …, f(n_max)]` in one recurrence pass.
pub fn f_table(n_max: usize, eta: f64) -> Result<Vec<f64>> {
    let x = check_eta(eta)?;
    let damp = (-x / 2.0).exp();
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(damp);
    for k in 0..n_max {
        let next = cur + (k as f64 * (cur - prev) - x * cur) / (k + 1) as f64;
        prev = cur;
        cur = next;
        out.push(damp * cur);
    }
    Ok(out)
}

/// Direct alternating-sum evaluation with the term ratio
/// `t_{k+1}/t_k = −η² (n−k) / (k+1)²`. Accurate for moderate `n η²` only.
pub fn f_of_n_series(n: usize, eta: f64) -> Result<f64> {
    let x = check_eta(eta)?;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        term *= -x * (n - k) as f64 / ((k + 1) * (k + 1)) as f64;
        sum += term;
    }
    Ok((-x / 2.0).exp() * sum)
}

/// `cos[η(a† + a)]` on Fock states `0..=n_max`, computed on a ladder padded
/// by `pad` levels and cropped.
pub fn cos_position_matrix(eta: f64, n_max: usize, pad: usize) -> Result<DMatrix<f64>> {
    check_eta(eta)?;
    let dim = n_max + 1 + pad;
    let mut x = DMatrix::<f64>::zeros(dim, dim);
    for n in 1..dim {
        let s = (n as f64).sqrt();
        x[(n - 1, n)] = s;
        x[(n, n - 1)] = s;
    }
    let eig = SymmetricEigen::new(x);
    let v = &eig.eigenvectors;
    let c = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (eta * l).cos()));
    let full = v * c * v.transpose();
    Ok(full.view((0, 0), (n_max + 1, n_max + 1)).into_owned())
}
