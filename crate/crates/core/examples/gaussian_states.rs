//! Logarithmic negativity of textbook two-mode Gaussian states: the vacuum and
//! the two-mode squeezed vacuum, whose E_N is exactly 2r / ln 2.
//!
//! cargo run --release --example gaussian_states

use soliton_entanglement::{log_negativity_of, symplectic_eigenvalues, CovarianceMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vacuum = CovarianceMatrix::vacuum((0, 1));
    println!("vacuum: E_N = {}", log_negativity_of(&vacuum)?);

    println!("\n{:>6} {:>12} {:>12} {:>12}", "r", "E_N", "2r/ln2", "nu_min");
    for r in [0.1, 0.25, 0.5, 1.0, 1.5] {
        let sigma = CovarianceMatrix::two_mode_squeezed(r);
        let (nu_min, _) = symplectic_eigenvalues(&sigma.partial_transpose())?;
        let en = log_negativity_of(&sigma)?;
        println!("{r:>6.2} {en:>12.8} {:>12.8} {nu_min:>12.6}", 2.0 * r / std::f64::consts::LN_2);
    }
    Ok(())
}
