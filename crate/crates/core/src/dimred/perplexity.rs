use super::DimredError;

const TOLERANCE: f64 = 1e-5;
const BISECTION_STEPS: usize = 50;
const MAX_BRACKET_STEPS: usize = 128;

/// Outcome of calibrating one conditional distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub sigma: f64,
    /// `2^H` of the distribution at `sigma`.
    pub perplexity: f64,
    /// The target could not be reached; `sigma` is the last bracket midpoint.
    pub clamped: bool,
}

/// Gaussian conditional distribution over the other points and its entropy
/// in nats. Distances are shifted by their minimum before exponentiating,
/// which leaves the normalized distribution unchanged.
pub fn conditional_distribution(sq_dists: &[f64], sigma: f64) -> (Vec<f64>, f64) {
    let beta = 1.0 / (2.0 * sigma * sigma);
    let d_min = sq_dists.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = sq_dists.iter().map(|&d| (-(d - d_min) * beta).exp()).collect();
    let z: f64 = weights.iter().sum();
    let weighted: f64 = weights
        .iter()
        .zip(sq_dists)
        .map(|(w, &d)| w * (d - d_min))
        .sum();
    let entropy = z.ln() + beta * weighted / z;
    (weights.into_iter().map(|w| w / z).collect(), entropy)
}

fn perplexity_at(sq_dists: &[f64], sigma: f64) -> f64 {
    conditional_distribution(sq_dists, sigma).1.exp()
}

/// Finds the Gaussian bandwidth whose conditional distribution has the
/// requested perplexity.
///
/// Starts at `sigma = 1`, doubles (or halves) until the target is
/// bracketed, then bisects for up to 50 steps. If the target is outside the
/// attainable range, which runs from the number of nearest ties up to
/// `sq_dists.len()`, the result is flagged `clamped`.
pub fn perplexity_calibration(sq_dists: &[f64], target: f64) -> Result<Calibration, DimredError> {
    if sq_dists.is_empty() {
        return Err(DimredError::Input(
            "perplexity calibration needs at least 2 points".into(),
        ));
    }
    if !(target >= 1.0) || !target.is_finite() {
        return Err(DimredError::Input(format!("target perplexity {target} must be >= 1")));
    }
    if sq_dists.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(DimredError::Input("distances must be finite and non-negative".into()));
    }

    let done = |sigma: f64, perp: f64| Calibration {
        sigma,
        perplexity: perp,
        clamped: false,
    };

    let mut sigma = 1.0;
    let mut perp = perplexity_at(sq_dists, sigma);
    if (perp - target).abs() <= TOLERANCE {
        return Ok(done(sigma, perp));
    }

    // Bracket [lo, hi] with perp(lo) < target < perp(hi).
    let (mut lo, mut hi);
    let mut bracketed = false;
    if perp < target {
        lo = sigma;
        hi = sigma;
        for _ in 0..MAX_BRACKET_STEPS {
            hi *= 2.0;
            perp = perplexity_at(sq_dists, hi);
            if (perp - target).abs() <= TOLERANCE {
                return Ok(done(hi, perp));
            }
            if perp > target {
                bracketed = true;
                break;
            }
            lo = hi;
        }
    } else {
        lo = sigma;
        hi = sigma;
        for _ in 0..MAX_BRACKET_STEPS {
            lo /= 2.0;
            perp = perplexity_at(sq_dists, lo);
            if (perp - target).abs() <= TOLERANCE {
                return Ok(done(lo, perp));
            }
            if perp < target {
                bracketed = true;
                break;
            }
            hi = lo;
        }
    }

    if !bracketed {
        sigma = (lo + hi) / 2.0;
        return Ok(Calibration {
            sigma,
            perplexity: perplexity_at(sq_dists, sigma),
            clamped: true,
        });
    }

    for _ in 0..BISECTION_STEPS {
        sigma = (lo + hi) / 2.0;
        perp = perplexity_at(sq_dists, sigma);
        if (perp - target).abs() <= TOLERANCE {
            return Ok(done(sigma, perp));
        }
        if perp < target {
            lo = sigma;
        } else {
            hi = sigma;
        }
    }
    sigma = (lo + hi) / 2.0;
    Ok(Calibration {
        sigma,
        perplexity: perplexity_at(sq_dists, sigma),
        clamped: true,
    })
}
