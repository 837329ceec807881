//! Least-squares line fits with R²; every experiment constant is measured,
//! never assumed.

/// y ≈ intercept + slope·x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub r2: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y.iter()) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    finish(x, y, slope, intercept)
}

/// y ≈ slope·x (through the origin).
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(!x.is_empty());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    finish(x, y, slope, 0.0)
}

fn finish(x: &[f64], y: &[f64], slope: f64, intercept: f64) -> LineFit {
    let n = x.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (xi, yi) in x.iter().zip(y.iter()) {
        let e = yi - (intercept + slope * xi);
        ss_res += e * e;
        ss_tot += (yi - my) * (yi - my);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LineFit { slope, intercept, residual: (ss_res / n).sqrt(), r2 }
}
