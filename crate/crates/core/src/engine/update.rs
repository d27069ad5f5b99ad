use super::table::QTable;
use super::{EngineError, Hyperparameters};
use crate::rewards::RewardRecord;

/// One SARSA step: `(1 − α)·q + α·(reward + γ·q_next)`.
pub fn sarsa_update(q_sa: f64, reward: f64, q_next: f64, alpha: f64, gamma: f64) -> f64 {
    (1.0 - alpha) * q_sa + alpha * (reward + gamma * q_next)
}

/// Applies one episode's rewards in the order the actions were performed.
///
/// Every action but the last bootstraps from the stored value of the action
/// after it. Because the path is simple, that value has not been touched yet
/// in this pass. A failed last action accumulates its penalty instead of
/// being averaged in, so repeated failures keep pushing it down.
pub fn update_table(table: &mut QTable, rewards: &[RewardRecord], hyper: &Hyperparameters) -> Result<(), EngineError> {
    let (last, body) = rewards.split_last().ok_or(EngineError::EmptyRewards)?;
    for r in rewards {
        if table.is_absent(r.src_id, r.dst_id) {
            return Err(EngineError::AbsentEntry {
                state: r.src_id,
                action: r.dst_id,
            });
        }
    }

    for (i, r) in body.iter().enumerate() {
        let next = &rewards[i + 1];
        let q_next = table.get(next.src_id, next.dst_id).expect("checked above");
        let q = table.get(r.src_id, r.dst_id).expect("checked above");
        table.set(
            r.src_id,
            r.dst_id,
            sarsa_update(q, r.value, q_next, hyper.alpha, hyper.gamma),
        )?;
    }

    let q = table.get(last.src_id, last.dst_id).expect("checked above");
    let updated = if last.action_success {
        sarsa_update(q, last.value, hyper.terminal_q, hyper.alpha, hyper.gamma)
    } else {
        q + last.value
    };
    table.set(last.src_id, last.dst_id, updated)
}
