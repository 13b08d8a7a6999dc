//! Moth-flame optimization step.

use rand::Rng;

use super::{spiral, EngineConfig, EngineState, Flame, Schedule};

/// `round(N - l (N - 1) / T)`, at least one flame.
pub fn flame_count(population: usize, iteration: f64, horizon: f64) -> usize {
    let l = iteration.min(horizon);
    let n = population as f64;
    ((n - l * (n - 1.0) / horizon).round() as usize).max(1)
}

/// Lower bound of the spiral parameter `t`, falling linearly from -1 to -2.
pub fn convergence_r(iteration: f64, horizon: f64) -> f64 {
    -1.0 - iteration.min(horizon) / horizon
}

/// Merges the previous flames with the current moths, keeps the best `N`
/// as the new flames, and spirals every moth around its flame. Moths past
/// the active flame count share the last active flame.
pub fn mfo_step<R: Rng + ?Sized>(state: &mut EngineState, config: &EngineConfig, rng: &mut R) {
    state.iteration += 1;
    let horizon = config.horizon();
    let l = state.iteration as f64;
    let n = state.agents.len();
    let active = flame_count(n, l, horizon).min(n);
    let r = convergence_r(l, horizon);

    let mut pool: Vec<Flame> = match std::mem::replace(&mut state.schedule, Schedule::Initial) {
        Schedule::Mfo { flames, .. } => flames,
        _ => Vec::new(),
    };
    pool.extend(state.agents.iter().map(|a| Flame {
        position: a.position.clone(),
        fitness: a.fitness,
    }));
    // stable: ties keep previous flames first, then moths in index order
    pool.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
    pool.truncate(n);

    for (i, moth) in state.agents.iter_mut().enumerate() {
        let flame = &pool[i.min(active - 1)];
        for (x, &f) in moth.position.iter_mut().zip(&flame.position) {
            let t = (r - 1.0) * rng.gen::<f64>() + 1.0;
            *x = spiral((f - *x).abs(), config.spiral_b, t) + f;
        }
        moth.sync_genotype();
    }

    state.schedule = Schedule::Mfo {
        flames: pool,
        flame_count: active,
        r,
    };
}
