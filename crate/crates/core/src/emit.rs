//! CSV tables for plotting: samples of `G_lambda`, spectra, counting
//! functions against their lattice bounds, and zeros as functions of the flux.

use crate::bessel::{ab_spectrum, bessel_zero, count_in, Side, ZeroKind};
use crate::error::{Error, Result};
use crate::gfun::g_eval_float;
use crate::lattice::{p_dirichlet, p_neumann, q_count_float, Flux};

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_row(w: &mut csv::Writer<Vec<u8>>, row: &[String]) -> Result<()> {
    w.write_record(row).map_err(|e| Error::Parse(e.to_string()))
}

/// `z, G_lambda(z)` at `samples + 1` equally spaced points of `[0, lambda]`.
pub fn gfun_csv(lambda: f64, samples: usize) -> Result<String> {
    if !(lambda > 0.0) || samples == 0 {
        return Err(Error::Domain("need lambda > 0 and samples >= 1".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(&mut w, &["z".into(), "g".into()])?;
    for s in 0..=samples {
        let z = lambda * s as f64 / samples as f64;
        write_row(&mut w, &[z.to_string(), g_eval_float(lambda, z).to_string()])?;
    }
    finish(w)
}

/// Eigenvalues up to `lambda_max^2`, one row per `(i, k)`.
pub fn spectra_csv(side: Side, alphas: &[Flux], lambda_max: f64) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(&mut w, &["side", "alpha", "i", "k", "value"].map(String::from))?;
    for alpha in alphas {
        for e in ab_spectrum(side, alpha, lambda_max) {
            write_row(
                &mut w,
                &[side.to_string(), alpha.to_string(), e.i.to_string(), e.k.to_string(), e.value.to_string()],
            )?;
        }
    }
    finish(w)
}

/// Dirichlet: `lambda, alpha, N, P, lambda^2/4`. Neumann:
/// `lambda, alpha, N, P, Q, Q - lambda^2/4`, with `Q` on the float path.
pub fn counts_csv(side: Side, alphas: &[Flux], lambdas: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: &[&str] = match side {
        Side::Dirichlet => &["lambda", "alpha", "n", "p", "weyl"],
        Side::Neumann => &["lambda", "alpha", "n", "p", "q", "q_minus_weyl"],
    };
    write_row(&mut w, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>())?;
    let top = lambdas.iter().cloned().fold(0.0, f64::max);
    for alpha in alphas {
        let spec = ab_spectrum(side, alpha, top);
        for &lambda in lambdas {
            let n = count_in(&spec, lambda);
            let weyl = lambda * lambda / 4.0;
            let row = match side {
                Side::Dirichlet => vec![
                    lambda.to_string(),
                    alpha.to_string(),
                    n.to_string(),
                    p_dirichlet(lambda, alpha).to_string(),
                    weyl.to_string(),
                ],
                Side::Neumann => {
                    let q = q_count_float(lambda);
                    vec![
                        lambda.to_string(),
                        alpha.to_string(),
                        n.to_string(),
                        p_neumann(lambda, alpha).to_string(),
                        q.to_string(),
                        (q as f64 - weyl).to_string(),
                    ]
                }
            };
            write_row(&mut w, &row)?;
        }
    }
    finish(w)
}

/// Curves `alpha -> j_{m+alpha,k}` and `alpha -> j_{m-alpha,k}` on
/// `alpha = 0, 1/(2 steps), ..., 1/2`, for `m <= m_max`, `k <= k_max`.
pub fn zeros_vs_alpha_csv(kind: ZeroKind, k_max: usize, m_max: usize, steps: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_row(&mut w, &["alpha", "m", "branch", "nu", "k", "zero"].map(String::from))?;
    for s in 0..=steps {
        let alpha = 0.5 * s as f64 / steps as f64;
        for m in 0..=m_max {
            let mut branches = vec![("plus", m as f64 + alpha)];
            if m >= 1 {
                branches.push(("minus", m as f64 - alpha));
            }
            for (branch, nu) in branches {
                for k in 1..=k_max {
                    // j'_{0,1} = 0 is not a positive zero; report it as 0
                    let zero = if kind == ZeroKind::Derivative && nu == 0.0 {
                        if k == 1 {
                            0.0
                        } else {
                            bessel_zero(nu, k, kind)?
                        }
                    } else {
                        bessel_zero(nu, k, kind)?
                    };
                    write_row(
                        &mut w,
                        &[
                            alpha.to_string(),
                            m.to_string(),
                            branch.to_string(),
                            nu.to_string(),
                            k.to_string(),
                            zero.to_string(),
                        ],
                    )?;
                }
            }
        }
    }
    finish(w)
}
