/// Rounds in one rotation epoch, `ceil(1 / p)`.
///
/// A small slack keeps `p = 0.1` at exactly 10 despite binary rounding.
pub fn rounds_per_epoch(p: f64) -> u32 {
    ((1.0 / p) - 1e-9).ceil().max(1.0) as u32
}

/// LEACH self-election threshold for a node in round `r`.
///
/// Rises from `p` at the start of an epoch to 1 in its final round, so every
/// node still in the eligible set is forced to serve once per epoch.
pub fn leach_threshold(p: f64, r: u32, eligible: bool) -> f64 {
    if !eligible {
        return 0.0;
    }
    let pos = (r % rounds_per_epoch(p)) as f64;
    let denom = 1.0 - p * pos;
    if denom <= 0.0 {
        1.0
    } else {
        (p / denom).clamp(0.0, 1.0)
    }
}

/// Solar-aware distributed threshold: `sf * p / (1 - cheads / num_nodes)`
/// with `sf = 4` for solar nodes and `1/4` for battery nodes.
pub fn sleach_threshold(p: f64, is_solar: bool, cheads: u32, num_nodes: usize) -> f64 {
    let num_nodes = num_nodes.max(1);
    if cheads as usize >= num_nodes {
        return 1.0;
    }
    let sf = if is_solar { 4.0 } else { 0.25 };
    let denom = 1.0 - cheads as f64 / num_nodes as f64;
    (sf * p / denom).clamp(0.0, 1.0)
}
