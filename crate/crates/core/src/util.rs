/// Formats a score so that it re-parses to the same `f64` and always shows at
/// least six decimal digits.
pub(crate) fn format_score(v: f64) -> String {
    let shortest = format!("{v}");
    let decimals = shortest.split_once('.').map_or(0, |(_, frac)| frac.len());
    if decimals >= 6 || shortest.contains(['e', 'E']) || !v.is_finite() {
        shortest
    } else {
        format!("{v:.6}")
    }
}
