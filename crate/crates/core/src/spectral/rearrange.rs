use crate::error::SpectralError;

/// Smallest and largest value of `sum_i x_i * y_phi(i)` over all
/// permutations `phi`: opposite orders give the minimum, equal orders the
/// maximum.
pub fn rearrangement_extremes(x: &[f64], y: &[f64]) -> Result<(f64, f64), SpectralError> {
    if x.len() != y.len() {
        return Err(SpectralError::Length {
            expected: x.len(),
            found: y.len(),
        });
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let max_dot = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let min_dot = xs.iter().zip(ys.iter().rev()).map(|(a, b)| a * b).sum();
    Ok((min_dot, max_dot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(
            rearrangement_extremes(&[1., 2.], &[3., 4.]).unwrap(),
            (10., 11.)
        );
        assert_eq!(
            rearrangement_extremes(&[1., 2., 3.], &[1., 2., 3.]).unwrap(),
            (10., 14.)
        );
        let (lo, hi) = rearrangement_extremes(&[2., 2., 2.], &[1., 5., 3.]).unwrap();
        assert_eq!(lo, hi);
        assert!(rearrangement_extremes(&[1.], &[1., 2.]).is_err());
    }
}
