//! Minimax square-loss regression games on finite action grids, solved by
//! backward induction over the adversary's histories.
//!
//! The learner's prediction never affects the state, so the value of a
//! history h is W(h) = min_ŷ max_y [(ŷ − y)² + W(h·y)] with terminal value
//! −min_f Σ_t (f(x_t) − y_t)². Online games add a max over contexts in front.

use num_integer::Integer;

use crate::error::{cap_check, Error, Result};
use crate::model::{fmt_rat, rat, FunctionClass, Rat, SampleDesign};
use crate::par;

/// Bound on the number of game states n · (branching)^n.
pub const MAX_GAME_STATES: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameOrder {
    /// Contexts fixed up front.
    Transductive(SampleDesign),
    /// Contexts chosen adversarially each round from this set of domain indices.
    Online(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub class: FunctionClass,
    pub horizon: usize,
    pub yhat_grid: Vec<Rat>,
    pub y_grid: Vec<Rat>,
    pub order: GameOrder,
}

/// {−2, −3/2, ..., 2}.
pub fn default_grid() -> Vec<Rat> {
    (-4..=4).map(|k| rat(k, 2)).collect()
}

fn check_grid(name: &str, g: &mut Vec<Rat>) -> Result<()> {
    g.sort();
    g.dedup();
    let two = rat(2, 1);
    if g.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} is empty")));
    }
    if let Some(v) = g.iter().find(|v| **v > two || **v < -two) {
        return Err(Error::InvalidParameter(format!("{name} value {} outside [-2, 2]", fmt_rat(v))));
    }
    if g.binary_search(&rat(0, 1)).is_err() {
        return Err(Error::InvalidParameter(format!("{name} must contain 0")));
    }
    Ok(())
}

impl GameConfig {
    /// Sorts and dedups the grids and validates everything.
    pub fn new(
        class: FunctionClass,
        horizon: usize,
        mut yhat_grid: Vec<Rat>,
        mut y_grid: Vec<Rat>,
        order: GameOrder,
    ) -> Result<Self> {
        check_grid("yhat grid", &mut yhat_grid)?;
        check_grid("y grid", &mut y_grid)?;
        let branching = match &order {
            GameOrder::Transductive(design) => {
                if design.len() != horizon {
                    return Err(Error::DimensionMismatch(format!(
                        "design length {} vs horizon {}",
                        design.len(),
                        horizon
                    )));
                }
                SampleDesign::new(design.indices().to_vec(), class.n_points())?;
                y_grid.len() as u64
            }
            GameOrder::Online(ctx) => {
                if ctx.is_empty() {
                    return Err(Error::InvalidParameter("context grid is empty".into()));
                }
                if let Some(&x) = ctx.iter().find(|&&x| x >= class.n_points()) {
                    return Err(Error::IndexOutOfRange {
                        what: "context",
                        index: x,
                        len: class.n_points(),
                    });
                }
                (ctx.len() * y_grid.len()) as u64
            }
        };
        let states = (horizon as u64).saturating_mul(branching.saturating_pow(horizon as u32));
        cap_check("game states", states, MAX_GAME_STATES)?;
        let order = match order {
            GameOrder::Online(mut ctx) => {
                ctx.sort_unstable();
                ctx.dedup();
                GameOrder::Online(ctx)
            }
            o => o,
        };
        Ok(Self {
            class,
            horizon,
            yhat_grid,
            y_grid,
            order,
        })
    }
}

/// Everything scaled by L = lcm of all denominators; squares carry L².
struct Scaled<'a> {
    cfg: &'a GameConfig,
    yhat: Vec<i128>,
    y: Vec<i128>,
    /// L / Q, multiplier for class numerators.
    fmul: i128,
    l: i128,
}

impl<'a> Scaled<'a> {
    fn new(cfg: &'a GameConfig) -> Self {
        let q = cfg.class.grid().q() as i128;
        let l = cfg
            .yhat_grid
            .iter()
            .chain(&cfg.y_grid)
            .fold(q, |acc, v| acc.lcm(v.denom()));
        let sc = |v: &Rat| v.numer() * (l / v.denom());
        Self {
            cfg,
            yhat: cfg.yhat_grid.iter().map(sc).collect(),
            y: cfg.y_grid.iter().map(sc).collect(),
            fmul: l / q,
            l,
        }
    }

    /// −min_f Σ (f(x_t) − y_t)² over a full history of (context, y index).
    fn terminal(&self, hist: &[(usize, usize)]) -> i128 {
        let class = &self.cfg.class;
        -(0..class.n_functions())
            .map(|f| {
                hist.iter()
                    .map(|&(x, yi)| {
                        let d = class.value(f, x) as i128 * self.fmul - self.y[yi];
                        d * d
                    })
                    .sum::<i128>()
            })
            .min()
            .expect("nonempty class")
    }

    /// min_ŷ max_y [(ŷ − y)² + next[y]].
    fn learner_round(&self, next: &[i128]) -> i128 {
        self.yhat
            .iter()
            .map(|&p| {
                self.y
                    .iter()
                    .zip(next)
                    .map(|(&y, &w)| (p - y) * (p - y) + w)
                    .max()
                    .expect("nonempty grid")
            })
            .min()
            .expect("nonempty grid")
    }

    fn contexts_at(&self, t: usize) -> Vec<usize> {
        match &self.cfg.order {
            GameOrder::Transductive(d) => vec![d.indices()[t]],
            GameOrder::Online(ctx) => ctx.clone(),
        }
    }

    fn value(&self, hist: &mut Vec<(usize, usize)>) -> i128 {
        let t = hist.len();
        if t == self.cfg.horizon {
            return self.terminal(hist);
        }
        self.contexts_at(t)
            .into_iter()
            .map(|x| {
                let next: Vec<i128> = (0..self.y.len())
                    .map(|yi| {
                        hist.push((x, yi));
                        let v = self.value(hist);
                        hist.pop();
                        v
                    })
                    .collect();
                self.learner_round(&next)
            })
            .max()
            .expect("nonempty contexts")
    }

    /// Root round with its subgames evaluated in parallel.
    fn root(&self) -> i128 {
        if self.cfg.horizon == 0 {
            return self.terminal(&[]);
        }
        let ctx = self.contexts_at(0);
        let ny = self.y.len();
        let subs = par::map_range(ctx.len() * ny, |i| {
            let mut hist = vec![(ctx[i / ny], i % ny)];
            self.value(&mut hist)
        });
        subs.chunks(ny)
            .map(|next| self.learner_round(next))
            .max()
            .expect("nonempty contexts")
    }
}

fn solve(cfg: &GameConfig) -> Rat {
    let s = Scaled::new(cfg);
    Rat::new(s.root(), s.l * s.l)
}

/// Value of the grid-restricted transductive game on a fixed design.
pub fn minimax_transductive(cfg: &GameConfig) -> Result<Rat> {
    if !matches!(cfg.order, GameOrder::Transductive(_)) {
        return Err(Error::InvalidParameter("expected a transductive configuration".into()));
    }
    Ok(solve(cfg))
}

/// Value of the grid-restricted online game with a per-round context choice.
pub fn minimax_online_seq(cfg: &GameConfig) -> Result<Rat> {
    if !matches!(cfg.order, GameOrder::Online(_)) {
        return Err(Error::InvalidParameter("expected an online configuration".into()));
    }
    Ok(solve(cfg))
}
