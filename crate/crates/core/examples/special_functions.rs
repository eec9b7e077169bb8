//! Bessel ratio, psi functions and the sub-Gamma inverse.

use confsphere::special::{bessel_ratio, psi_eval, psi_gamma_inverse, vmf_kl_bound};
use confsphere::PsiKind;

fn main() -> confsphere::Result<()> {
    println!("{:>9} {:>14} {:>12}", "d", "sqrt(d) A_d", "KL bound");
    for d in [2usize, 10, 100, 10_000, 1_000_000] {
        let s = (d as f64).sqrt();
        println!("{d:>9} {:>14.8} {:>12.6}", s * bessel_ratio(d, s)?, vmf_kl_bound(d, s)?);
    }
    for l in [0.1, 0.5, 0.68, 0.9] {
        println!("psi_E({l}) = {:.6}  (l^2 = {:.4})", psi_eval(PsiKind::Exponential, l)?, l * l);
    }
    let c = 0.5;
    let u = 0.02;
    let l = psi_gamma_inverse(c, u)?;
    println!("psi_G^-1({u}) = {l:.6}, round trip {:.6}", psi_eval(PsiKind::Gamma { c }, l)?);
    Ok(())
}
