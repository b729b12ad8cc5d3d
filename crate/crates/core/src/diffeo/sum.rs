/// Exactly rounded floating-point summation (Shewchuk's non-overlapping
/// partials). Offsets that cancel in exact arithmetic sum to exactly zero.
pub(crate) fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    partials.iter().rev().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancelling_offsets_are_exactly_zero() {
        let c = std::f64::consts::TAU / 3.0;
        let d = std::f64::consts::PI / 7.0;
        assert_eq!(exact_sum([d, c, -d, -c]), 0.0);
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum(std::iter::empty()), 0.0);
    }
}
