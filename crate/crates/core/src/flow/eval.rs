/// Energy distance between two samples, V-statistic form:
/// `2 E|X - Y| - E|X - X'| - E|Y - Y'|`, with within-sample means taken over
/// all ordered pairs including the diagonal. This keeps the estimate
/// nonnegative, so two resamples of the same distribution give a small
/// positive baseline.
pub fn energy_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "energy distance needs nonempty samples");
    fn mean_dist(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        let mut s = 0.0;
        for x in a {
            for y in b {
                s += x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
            }
        }
        s / (a.len() * b.len()) as f64
    }
    2.0 * mean_dist(a, b) - mean_dist(a, a) - mean_dist(b, b)
}
