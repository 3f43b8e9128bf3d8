use std::collections::VecDeque;

use super::Dpw;
use crate::games::{trim, AgentMove, AgentStrategy, EnvStrategy};
use crate::logic::{Action, EnvState};

/// Winning regions over DPW states (the environment's decision points) and
/// positional strategies for each winner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityRegions {
    pub agent: Vec<bool>,
    pub env: Vec<bool>,
    /// `agent_choice[q * |ℰ| + e]`, set where the agent wins after `e` in `q`.
    pub agent_choice: Vec<Option<Action>>,
    /// `env_choice[q]`, set where the environment wins from `q`.
    pub env_choice: Vec<Option<EnvState>>,
}

#[derive(Debug, Clone)]
pub struct ParitySolution<S> {
    pub realizable: bool,
    pub regions: ParityRegions,
    pub strategy: Option<S>,
}

/// Arena: vertex `q < n` is owned by the environment and has color
/// `col(q)`; vertex `n + q·|ℰ| + e` is owned by the agent, has color 0 and
/// moves to `T(q, e ∪ a)`.
struct Arena<'a> {
    m: &'a Dpw,
    n: usize,
    ke: usize,
    /// Player 0 wants the largest recurring color even.
    owner: Vec<u8>,
    priority: Vec<u32>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
}

impl<'a> Arena<'a> {
    fn new(m: &'a Dpw, agent_is_even: bool) -> Arena<'a> {
        let vars = m.vars();
        let n = m.num_states();
        let ke = vars.num_env_states();
        let total = n + n * ke;
        let (env_player, agent_player) = if agent_is_even { (1, 0) } else { (0, 1) };
        let mut owner = vec![env_player; n];
        owner.resize(total, agent_player);
        let mut priority: Vec<u32> = m.colors().to_vec();
        priority.resize(total, 0);
        let mut succ = vec![Vec::new(); total];
        for q in 0..n {
            for e in vars.env_states() {
                let v = n + q * ke + e.index();
                succ[q].push(v as u32);
                let mut targets: Vec<u32> = vars
                    .actions()
                    .map(|a| m.next(q, vars.join(e, a)) as u32)
                    .collect();
                targets.sort_unstable();
                targets.dedup();
                succ[v] = targets;
            }
        }
        let mut pred = vec![Vec::new(); total];
        for (v, ss) in succ.iter().enumerate() {
            for &s in ss {
                pred[s as usize].push(v as u32);
            }
        }
        Arena {
            m,
            n,
            ke,
            owner,
            priority,
            succ,
            pred,
        }
    }

    fn len(&self) -> usize {
        self.owner.len()
    }

    /// Attractor of `target` for `player` inside `sub`; records attractor
    /// moves for `player` in `strategy`.
    fn attractor(&self, player: u8, target: &[bool], sub: &[bool], strategy: &mut [u32]) -> Vec<bool> {
        let mut attr = target.to_vec();
        let mut count: Vec<u32> = vec![u32::MAX; self.len()];
        let mut queue: VecDeque<u32> = (0..self.len() as u32).filter(|&v| attr[v as usize]).collect();
        while let Some(u) = queue.pop_front() {
            for &p in &self.pred[u as usize] {
                let p = p as usize;
                if !sub[p] || attr[p] {
                    continue;
                }
                if self.owner[p] == player {
                    attr[p] = true;
                    strategy[p] = u;
                    queue.push_back(p as u32);
                } else {
                    if count[p] == u32::MAX {
                        count[p] = self.succ[p].iter().filter(|&&s| sub[s as usize]).count() as u32;
                    }
                    count[p] -= 1;
                    if count[p] == 0 {
                        attr[p] = true;
                        queue.push_back(p as u32);
                    }
                }
            }
        }
        attr
    }

    /// Recursive attractor decomposition on the subgame `sub`. Returns the
    /// vertices won by player 0; `strategy` holds a successor for every
    /// vertex whose owner wins it.
    fn solve(&self, sub: &[bool], strategy: &mut [u32]) -> Vec<bool> {
        let Some(p) = (0..self.len())
            .filter(|&v| sub[v])
            .map(|v| self.priority[v])
            .max()
        else {
            return vec![false; self.len()];
        };
        let i = (p % 2) as u8;
        let top: Vec<bool> = (0..self.len()).map(|v| sub[v] && self.priority[v] == p).collect();
        let a = self.attractor(i, &top, sub, strategy);
        let rest: Vec<bool> = (0..self.len()).map(|v| sub[v] && !a[v]).collect();
        let w0 = self.solve(&rest, strategy);
        let opp_rest: Vec<bool> = (0..self.len())
            .map(|v| rest[v] && (w0[v] != (i == 0)))
            .collect();
        if !opp_rest.iter().any(|&b| b) {
            // Player i wins everything; on top-priority vertices any move
            // staying in the subgame will do.
            for v in 0..self.len() {
                if top[v] && self.owner[v] == i {
                    strategy[v] = *self.succ[v]
                        .iter()
                        .find(|&&s| sub[s as usize])
                        .expect("subgames are traps with no dead ends");
                }
            }
            return if i == 0 { sub.to_vec() } else { vec![false; self.len()] };
        }
        let b = self.attractor(1 - i, &opp_rest, sub, strategy);
        let remaining: Vec<bool> = (0..self.len()).map(|v| sub[v] && !b[v]).collect();
        let w0_rem = self.solve(&remaining, strategy);
        (0..self.len())
            .map(|v| {
                if b[v] {
                    i == 1
                } else {
                    w0_rem[v]
                }
            })
            .collect()
    }

    /// Winning vertices of player 0 and a positional strategy.
    fn run(&self) -> (Vec<bool>, Vec<u32>) {
        let mut strategy = vec![u32::MAX; self.len()];
        let all = vec![true; self.len()];
        let w0 = self.solve(&all, &mut strategy);
        (w0, strategy)
    }

    fn regions(&self, agent_is_even: bool) -> ParityRegions {
        let (w0, strategy) = self.run();
        let vars = self.m.vars();
        let agent_wins = |v: usize| w0[v] == agent_is_even;
        let agent: Vec<bool> = (0..self.n).map(agent_wins).collect();
        let env = agent.iter().map(|w| !w).collect();
        let mut agent_choice = vec![None; self.n * self.ke];
        for q in 0..self.n {
            for e in vars.env_states() {
                let v = self.n + q * self.ke + e.index();
                if agent_wins(v) {
                    let target = strategy[v] as usize;
                    agent_choice[q * self.ke + e.index()] = vars
                        .actions()
                        .find(|&a| self.m.next(q, vars.join(e, a)) == target);
                }
            }
        }
        let env_choice = (0..self.n)
            .map(|q| (!agent_wins(q)).then(|| EnvState(((strategy[q] as usize - self.n) % self.ke) as u32)))
            .collect();
        ParityRegions {
            agent,
            env,
            agent_choice,
            env_choice,
        }
    }
}

/// Solve the game on `m` in which the agent wins iff the run of `m` is
/// accepting.
pub fn solve_parity_game(m: &Dpw) -> ParityRegions {
    Arena::new(m, true).regions(true)
}

fn agent_transducer(m: &Dpw, r: &ParityRegions) -> AgentStrategy {
    let vars = m.vars();
    let ke = vars.num_env_states();
    let rows: Vec<Vec<(AgentMove, u32)>> = (0..m.num_states())
        .map(|q| {
            vars.env_states()
                .map(|e| {
                    let a = r.agent_choice[q * ke + e.index()].unwrap_or(Action(0));
                    (AgentMove::Act(a), m.next(q, vars.join(e, a)) as u32)
                })
                .collect()
        })
        .collect();
    let table = trim(m.initial(), &rows).into_iter().flatten().collect();
    AgentStrategy::new(vars.clone(), 0, table).expect("well-formed by construction")
}

fn env_transducer(m: &Dpw, r: &ParityRegions) -> EnvStrategy {
    let vars = m.vars();
    let out = |q: usize| r.env_choice[q].unwrap_or(EnvState(0));
    let rows: Vec<Vec<(EnvState, u32)>> = (0..m.num_states())
        .map(|q| {
            vars.actions()
                .map(|a| {
                    let t = m.next(q, vars.join(out(q), a));
                    (out(t), t as u32)
                })
                .collect()
        })
        .collect();
    let table = trim(m.initial(), &rows).into_iter().flatten().collect();
    EnvStrategy::new(vars.clone(), 0, out(m.initial()), table).expect("well-formed by construction")
}

/// Agent realizability of `m`; the strategy never halts.
pub fn dpw_agent_realizable(m: &Dpw) -> ParitySolution<AgentStrategy> {
    let regions = solve_parity_game(m);
    let realizable = regions.agent[m.initial()];
    let strategy = realizable.then(|| agent_transducer(m, &regions));
    ParitySolution {
        realizable,
        regions,
        strategy,
    }
}

/// Environment realizability of `m`, solved on its own game in which the
/// environment is the player wanting `m` accepted.
pub fn dpw_env_realizable(m: &Dpw) -> ParitySolution<EnvStrategy> {
    let regions = Arena::new(m, false).regions(false);
    let realizable = regions.env[m.initial()];
    let strategy = realizable.then(|| env_transducer(m, &regions));
    ParitySolution {
        realizable,
        regions,
        strategy,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::games::EnvTransducer;
    use crate::logic::VarTable;
    use crate::parity::tests::random_dpw;

    fn ey() -> Arc<VarTable> {
        Arc::new(VarTable::new(["e"], ["a"]).unwrap())
    }

    /// Largest color on the cycle of the play fixed by two positional maps.
    fn outcome(m: &Dpw, q0: usize, agent: &[u32], env: &[u32]) -> bool {
        let vars = m.vars();
        let mut seen = vec![usize::MAX; m.num_states()];
        let mut path = Vec::new();
        let mut q = q0;
        while seen[q] == usize::MAX {
            seen[q] = path.len();
            path.push(q);
            let e = EnvState(env[q]);
            let a = Action(agent[q * 2 + e.index()]);
            q = m.next(q, vars.join(e, a));
        }
        path[seen[q]..].iter().map(|&p| m.color(p)).max().unwrap() % 2 == 0
    }

    /// Exhaustive positional-strategy oracle for 1+1 variables.
    fn oracle_agent_wins(m: &Dpw) -> Vec<bool> {
        let n = m.num_states();
        let agent_maps = 1usize << (2 * n);
        let env_maps = 1usize << n;
        (0..n)
            .map(|q0| {
                (0..agent_maps).any(|sa| {
                    let agent: Vec<u32> = (0..2 * n).map(|i| ((sa >> i) & 1) as u32).collect();
                    (0..env_maps).all(|se| {
                        let env: Vec<u32> = (0..n).map(|i| ((se >> i) & 1) as u32).collect();
                        outcome(m, q0, &agent, &env)
                    })
                })
            })
            .collect()
    }

    #[test]
    fn trivial_games() {
        let v = ey();
        assert!(dpw_agent_realizable(&Dpw::universal(v.clone())).realizable);
        assert!(!dpw_env_realizable(&Dpw::empty(v.clone())).realizable);
        assert!(dpw_env_realizable(&Dpw::universal(v.clone())).realizable);
        let r = solve_parity_game(&Dpw::universal(v));
        assert_eq!(r.agent, vec![true]);
    }

    #[test]
    fn regions_match_positional_oracle() {
        let v = ey();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let n = rng.gen_range(1..=5);
            let m = random_dpw(&mut rng, &v, n, 3);
            let r = solve_parity_game(&m);
            for q in 0..n {
                assert_ne!(r.agent[q], r.env[q]);
            }
            assert_eq!(r.agent, oracle_agent_wins(&m));
        }
    }

    #[test]
    fn extracted_strategies_win_against_positional_opponents() {
        let v = ey();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..60 {
            let n = rng.gen_range(1..=5);
            let m = random_dpw(&mut rng, &v, n, 4);
            let r = solve_parity_game(&m);
            for q0 in 0..n {
                if r.agent[q0] {
                    let agent: Vec<u32> = r.agent_choice.iter().map(|c| c.map_or(0, |a| a.0)).collect();
                    for se in 0..(1usize << n) {
                        let env: Vec<u32> = (0..n).map(|i| ((se >> i) & 1) as u32).collect();
                        assert!(outcome(&m, q0, &agent, &env));
                    }
                } else {
                    let env: Vec<u32> = r.env_choice.iter().map(|c| c.map_or(0, |e| e.0)).collect();
                    for sa in 0..(1usize << (2 * n)) {
                        let agent: Vec<u32> = (0..2 * n).map(|i| ((sa >> i) & 1) as u32).collect();
                        assert!(!outcome(&m, q0, &agent, &env));
                    }
                }
            }
        }
    }

    #[test]
    fn duality_and_env_transducer() {
        let v = ey();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let m = random_dpw(&mut rng, &v, n, 4);
            let env = dpw_env_realizable(&m);
            assert_eq!(env.realizable, !dpw_agent_realizable(&m.complement()).realizable);
            if let Some(s) = env.strategy {
                // Against every positional agent the induced run is accepted.
                for sa in 0..(1usize << (2 * n)) {
                    let (mut e, mut mem) = s.start();
                    let mut q = m.initial();
                    let mut states = Vec::new();
                    for _ in 0..4 * n + 4 {
                        let a = Action(((sa >> (q * 2 + e.index())) & 1) as u32);
                        q = m.next(q, v.join(e, a));
                        states.push((q, mem));
                        (e, mem) = s.respond(&mem, a);
                    }
                    // Memory equals the state, so the tail is periodic within n steps.
                    let tail = &states[states.len() - 2 * n..];
                    let max = tail.iter().map(|&(q, _)| m.color(q)).max().unwrap();
                    assert_eq!(max % 2, 0);
                }
            }
        }
    }
}
