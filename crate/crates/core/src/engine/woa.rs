//! Whale optimization step.

use rand::Rng;

use super::{spiral, EngineConfig, EngineState, Schedule, WhaleDraw, WhaleMove};

/// Falls linearly from 2 to 0 over the horizon.
pub fn woa_a(iteration: f64, horizon: f64) -> f64 {
    2.0 - 2.0 * iteration.min(horizon) / horizon
}

/// Shrinking encirclement `X* - A |C X* - X|` for one coordinate.
pub fn encircle(target: f64, current: f64, a_coef: f64, c_coef: f64) -> f64 {
    target - a_coef * (c_coef * target - current).abs()
}

/// Spiral update `|X* - X| e^(b l) cos(2 pi l) + X*` for one coordinate.
pub fn spiral_toward(target: f64, current: f64, b: f64, l: f64) -> f64 {
    spiral((target - current).abs(), b, l) + target
}

/// Needs a best-so-far individual; the caller guarantees one exists.
pub fn woa_step<R: Rng + ?Sized>(state: &mut EngineState, config: &EngineConfig, rng: &mut R) {
    state.iteration += 1;
    let a = woa_a(state.iteration as f64, config.horizon());
    let leader = state
        .best
        .as_ref()
        .expect("whale step requires a best individual")
        .position
        .clone();
    let snapshot: Vec<Vec<f64>> = state.agents.iter().map(|w| w.position.clone()).collect();
    let n = state.agents.len();

    let mut draws = Vec::with_capacity(n);
    for whale in &mut state.agents {
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let p: f64 = rng.gen();
        let l: f64 = rng.gen_range(-1.0..=1.0);
        let a_coef = 2.0 * a * r1 - a;
        let c_coef = 2.0 * r2;

        let movement = if p < 0.5 {
            if a_coef.abs() < 1.0 {
                WhaleMove::Encircle
            } else {
                WhaleMove::Explore {
                    partner: rng.gen_range(0..n),
                }
            }
        } else {
            WhaleMove::Spiral
        };

        let target = match movement {
            WhaleMove::Explore { partner } => &snapshot[partner],
            WhaleMove::Encircle | WhaleMove::Spiral => &leader,
        };
        for (x, &t) in whale.position.iter_mut().zip(target) {
            *x = match movement {
                WhaleMove::Spiral => spiral_toward(t, *x, config.spiral_b, l),
                _ => encircle(t, *x, a_coef, c_coef),
            };
        }
        whale.sync_genotype();
        draws.push(WhaleDraw {
            a_coef,
            c_coef,
            l,
            p,
            movement,
        });
    }

    state.schedule = Schedule::Woa { a, draws };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Agent, Best, EngineKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coefficient_cases() {
        assert_eq!(encircle(42.0, 17.0, 0.0, 1.0), 42.0);
        assert_eq!(spiral_toward(100.0, 80.0, 1.0, 0.0), 120.0);
        assert_eq!(woa_a(0.0, 1000.0), 2.0);
        assert_eq!(woa_a(500.0, 1000.0), 1.0);
        assert_eq!(woa_a(1000.0, 1000.0), 0.0);
        assert_eq!(woa_a(4000.0, 1000.0), 0.0);
    }

    fn whales(n: usize, d: usize, horizon_iters: u64) -> (EngineState, EngineConfig) {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let agents: Vec<Agent> = (0..n)
            .map(|i| Agent {
                fitness: i as f64,
                ..Agent::random(d, &mut rng)
            })
            .collect();
        let best = Best {
            position: agents[0].position.clone(),
            genotype: agents[0].genotype.clone(),
            fitness: 0.0,
            program: String::new(),
        };
        let cfg = EngineConfig {
            population: n,
            dimension: d,
            max_fes: n as u64 * horizon_iters,
            ..EngineConfig::new(EngineKind::Woa)
        };
        let state = EngineState {
            agents,
            best: Some(best),
            fe_count: 0,
            invalid_count: 0,
            iteration: 0,
            schedule: Schedule::Initial,
        };
        (state, cfg)
    }

    #[test]
    fn no_exploration_once_a_reaches_zero() {
        let (mut state, cfg) = whales(8, 10, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            woa_step(&mut state, &cfg, &mut rng);
        }
        for _ in 0..20 {
            woa_step(&mut state, &cfg, &mut rng);
            let Schedule::Woa { a, draws } = &state.schedule else {
                panic!()
            };
            assert_eq!(*a, 0.0);
            for d in draws {
                assert_eq!(d.a_coef, 0.0);
                assert!(!matches!(d.movement, WhaleMove::Explore { .. }));
            }
        }
    }

    #[test]
    fn encircling_with_zero_a_collapses_onto_leader() {
        let (mut state, cfg) = whales(6, 12, 1);
        let leader = state.best.as_ref().unwrap().position.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        woa_step(&mut state, &cfg, &mut rng);
        let Schedule::Woa { draws, .. } = &state.schedule else {
            panic!()
        };
        for (w, d) in state.agents.iter().zip(draws) {
            if d.movement == WhaleMove::Encircle {
                assert_eq!(w.position, leader);
            }
        }
    }

    #[test]
    fn whales_stay_in_bounds() {
        let (mut state, cfg) = whales(10, 40, 50);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = [false; 3];
        for _ in 0..60 {
            woa_step(&mut state, &cfg, &mut rng);
            let Schedule::Woa { draws, .. } = &state.schedule else {
                panic!()
            };
            for d in draws {
                seen[match d.movement {
                    WhaleMove::Encircle => 0,
                    WhaleMove::Explore { .. } => 1,
                    WhaleMove::Spiral => 2,
                }] = true;
                assert!((-1.0..=1.0).contains(&d.l));
            }
            for w in &state.agents {
                assert!(w.position.iter().all(|&x| (0.0..=255.0).contains(&x)));
            }
        }
        assert_eq!(seen, [true; 3]);
    }
}
