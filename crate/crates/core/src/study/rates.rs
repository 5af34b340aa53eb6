//! Convergence orders.

/// Orders between consecutive levels, `log(e_{i−1}/e_i) / log(h_{i−1}/h_i)`.
/// `None` where an error vanishes or is not finite.
pub fn pairwise_orders(errors: &[f64], hs: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), hs.len(), "one h per error");
    (1..errors.len())
        .map(|i| {
            let (e0, e1) = (errors[i - 1], errors[i]);
            let valid = e0 > 0.0 && e1 > 0.0 && e0.is_finite() && e1.is_finite();
            valid.then(|| (e0 / e1).ln() / (hs[i - 1] / hs[i]).ln())
        })
        .collect()
}

/// Slope of `log v` against `log h` by least squares.
pub fn least_squares_slope(hs: &[f64], values: &[f64]) -> Option<f64> {
    if hs.len() != values.len() || hs.len() < 2 || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub pairwise: Vec<Option<f64>>,
    pub slope: Option<f64>,
}

pub fn fit_order(errors: &[f64], hs: &[f64]) -> OrderFit {
    OrderFit {
        pairwise: pairwise_orders(errors, hs),
        slope: least_squares_slope(hs, errors),
    }
}
