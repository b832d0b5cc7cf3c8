use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson goodness-of-fit at level `alpha`. Cells with expected count below
/// 5 are pooled; any count in a zero-probability cell fails.
pub fn chi_squared_passes(counts: &[u64], probs: &[f64], alpha: f64) -> bool {
    assert_eq!(counts.len(), probs.len());
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * total as f64;
        if p == 0.0 {
            if c > 0 {
                return false;
            }
            continue;
        }
        if e < 5.0 {
            pooled_obs += c as f64;
            pooled_exp += e;
        } else {
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    if cells < 2 {
        return true;
    }
    let dist = ChiSquared::new((cells - 1) as f64).unwrap();
    1.0 - dist.cdf(stat) > alpha
}
