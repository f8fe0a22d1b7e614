//! Classical versus Bayesian parameter shift rules on two noisy readouts,
//! and the derivative variance as a function of the shift.

use std::f64::consts::PI;

use bayes_psr::psr::{bpsr_closed_form, bpsr_first_closed_form, psr_first, psr_general};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (sigma0_sq, gamma_sq) = (100.0, 9.0);
    let (y_minus, y_plus) = (-0.52, 0.61);
    println!("classical rule at pi/2: {:.4}", psr_first(y_minus, y_plus, PI / 2.0)?);
    for sigma_sq in [1e-6, 1e-2, 1.0, 100.0] {
        let (m, v) = bpsr_first_closed_form(y_minus, y_plus, PI / 2.0, sigma_sq, sigma0_sq, gamma_sq)?;
        println!("noise {sigma_sq:>6}: bayesian mean {m:.4}, sd {:.4}", v.sqrt());
    }

    println!("\nvariance against shift (noise 0.1):");
    for k in 1..8 {
        let alpha = k as f64 * PI / 8.0;
        let (_, v) = bpsr_first_closed_form(0.0, 0.0, alpha, 0.1, sigma0_sq, gamma_sq)?;
        println!("  alpha = {k}pi/8: {v:.5}{}", if k == 4 { "  <- minimum" } else { "" });
    }

    // equidistant design for a parameter shared by two gates
    let y = [0.3, 0.9, -0.2, -0.7];
    let classic = psr_general(&y, 2)?;
    let (m, v) = bpsr_closed_form(&y, 2, 1e-3, sigma0_sq, gamma_sq, 0.0)?;
    println!("\nV=2: classical {classic:.4}, bayesian {m:.4} (sd {:.4})", v.sqrt());
    let (m_off, _) = bpsr_closed_form(&y, 2, 1e-3, sigma0_sq, gamma_sq, 0.3)?;
    println!("derivative 0.3 away from the center: {m_off:.4}");
    Ok(())
}
