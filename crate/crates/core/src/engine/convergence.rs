use super::EpisodeTrace;

/// First episode from which every temp path is the same destination-reaching
/// path through to the last episode. `None` when the final episode does not
/// reach the destination, or when only the final episode of a multi-episode
/// run is on that path (a one-episode suffix shows no stability).
pub fn detect_convergence(traces: &[EpisodeTrace]) -> Option<usize> {
    let last = traces.last()?;
    if !last.reached {
        return None;
    }
    let start = traces
        .iter()
        .rposition(|t| !t.reached || t.temp_path != last.temp_path)
        .map_or(0, |i| i + 1);
    if start + 1 == traces.len() && traces.len() > 1 {
        return None;
    }
    Some(traces[start].episode)
}
