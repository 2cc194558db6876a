//! Trading-inspired segmentation.
//!
//! A positive series is treated as the price of a surrogate stock. A virtual
//! portfolio is either fully in cash or fully in stock and pays a linear
//! transaction cost `epsilon` on every switch. The a-posteriori
//! wealth-maximizing switch sequence is found by a two-state forward dynamic
//! program with parent backtracking; its switch instants are the changepoints.
//! Raising `epsilon` makes switching more expensive, so the segmenter sweeps
//! `epsilon = m * d_epsilon` upward until the changepoint count fits.

use crate::error::{Error, Result};
use crate::model::Segmentation;
use crate::preprocess::normalize_for_trading;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    Cash,
    Stock,
}

impl Position {
    /// `-1` for cash, `+1` for stock.
    pub fn flag(self) -> i8 {
        match self {
            Position::Cash => -1,
            Position::Stock => 1,
        }
    }
}

/// Portfolio state `[shares, cash, position, wealth]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeState {
    pub shares: f64,
    pub cash: f64,
    pub position: Position,
    pub wealth: f64,
}

impl TradeState {
    /// One share's worth of cash after paying the transaction cost.
    pub fn initial(price0: f64, epsilon: f64) -> Self {
        let cash = price0 / (1.0 - epsilon);
        Self {
            shares: 0.0,
            cash,
            position: Position::Cash,
            wealth: cash,
        }
    }

    /// Transition from `t` to `t + 1` under `control`, given the prices at
    /// `t` and `t + 1`.
    pub fn step(&self, control: Position, price: f64, next_price: f64, epsilon: f64) -> Self {
        match (self.position, control) {
            (Position::Cash, Position::Cash) => Self {
                shares: 0.0,
                cash: self.cash,
                position: Position::Cash,
                wealth: self.cash,
            },
            (Position::Cash, Position::Stock) => {
                let shares = self.cash * (1.0 - epsilon) / price;
                Self {
                    shares,
                    cash: 0.0,
                    position: Position::Stock,
                    wealth: shares * next_price,
                }
            }
            (Position::Stock, Position::Cash) => {
                let cash = self.shares * price * (1.0 - epsilon);
                Self {
                    shares: 0.0,
                    cash,
                    position: Position::Cash,
                    wealth: cash,
                }
            }
            (Position::Stock, Position::Stock) => Self {
                shares: self.shares,
                cash: 0.0,
                position: Position::Stock,
                wealth: self.shares * next_price,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeTrajectory {
    /// Optimal position at every time index `0..T`.
    pub positions: Vec<Position>,
    pub final_wealth: f64,
}

fn check_trade_inputs(prices: &[f64], epsilon: f64) -> Result<()> {
    if prices.is_empty() {
        return Err(Error::domain("price series is empty"));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::param(format!(
            "transaction cost must lie in [0, 1), got {epsilon}"
        )));
    }
    if let Some(t) = prices.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
        return Err(Error::domain(format!(
            "prices must be positive, got {} at t = {t}",
            prices[t]
        )));
    }
    Ok(())
}

/// Wealth-maximizing position sequence for strictly positive `prices`.
///
/// Keeps the best state per position at every step; on equal wealth the
/// parent in cash wins. At the final index the cash state is chosen only if
/// its wealth strictly exceeds the stock state's.
pub fn optimal_trade(prices: &[f64], epsilon: f64) -> Result<TradeTrajectory> {
    check_trade_inputs(prices, epsilon)?;
    let n = prices.len();
    let mut cash = TradeState::initial(prices[0], epsilon);
    let mut stock: Option<TradeState> = None;
    // parent position of the best cash / stock state at each t >= 1
    let mut cash_parent = vec![Position::Cash; n];
    let mut stock_parent = vec![Position::Cash; n];

    for t in 0..n - 1 {
        let (price, next) = (prices[t], prices[t + 1]);

        let mut best_cash = cash.step(Position::Cash, price, next, epsilon);
        let mut best_cash_parent = Position::Cash;
        let mut best_stock = cash.step(Position::Stock, price, next, epsilon);
        let mut best_stock_parent = Position::Cash;

        if let Some(s) = stock {
            let sell = s.step(Position::Cash, price, next, epsilon);
            if sell.wealth > best_cash.wealth {
                best_cash = sell;
                best_cash_parent = Position::Stock;
            }
            let hold = s.step(Position::Stock, price, next, epsilon);
            if hold.wealth > best_stock.wealth {
                best_stock = hold;
                best_stock_parent = Position::Stock;
            }
        }

        cash = best_cash;
        stock = Some(best_stock);
        cash_parent[t + 1] = best_cash_parent;
        stock_parent[t + 1] = best_stock_parent;
    }

    let (mut pos, final_wealth) = match stock {
        Some(s) if cash.wealth <= s.wealth => (Position::Stock, s.wealth),
        _ => (Position::Cash, cash.wealth),
    };
    let mut positions = vec![Position::Cash; n];
    for t in (1..n).rev() {
        positions[t] = pos;
        pos = match pos {
            Position::Cash => cash_parent[t],
            Position::Stock => stock_parent[t],
        };
    }
    positions[0] = pos;
    Ok(TradeTrajectory {
        positions,
        final_wealth,
    })
}

/// Replays a position sequence (`positions[0]` must be cash) and returns the
/// final wealth.
pub fn replay_wealth(prices: &[f64], positions: &[Position], epsilon: f64) -> Result<f64> {
    check_trade_inputs(prices, epsilon)?;
    if positions.len() != prices.len() {
        return Err(Error::Shape(format!(
            "{} positions for {} prices",
            positions.len(),
            prices.len()
        )));
    }
    if positions[0] != Position::Cash {
        return Err(Error::domain("trajectories start in cash"));
    }
    let mut state = TradeState::initial(prices[0], epsilon);
    for t in 0..prices.len() - 1 {
        state = state.step(positions[t + 1], prices[t], prices[t + 1], epsilon);
    }
    Ok(state.wealth)
}

/// Interior changepoints of the optimal trajectory at a fixed `epsilon`:
/// every `t` in `1..T - dtau_min` with a position switch between `t` and
/// `t + 1`. No cap on the count.
pub fn interior_changepoints(prices: &[f64], epsilon: f64, dtau_min: usize) -> Result<Vec<usize>> {
    let traj = optimal_trade(prices, epsilon)?;
    let end = prices.len().saturating_sub(dtau_min);
    Ok((1..end)
        .filter(|&t| traj.positions[t + 1] != traj.positions[t])
        .collect())
}

/// Segments `x` so that there are fewer than `s_max` segments and the final
/// segment spans at least `dtau_min` steps.
pub fn apts_segment(x: &[f64], s_max: usize, dtau_min: usize, d_epsilon: f64) -> Result<Segmentation> {
    if s_max <= 2 {
        return Err(Error::param(format!("s_max must exceed 2, got {s_max}")));
    }
    if dtau_min < 1 {
        return Err(Error::param("dtau_min must be at least 1"));
    }
    if !(d_epsilon > 0.0 && d_epsilon.is_finite()) {
        return Err(Error::param(format!("d_epsilon must be positive, got {d_epsilon}")));
    }
    let len = x.len();
    if len < dtau_min + 2 {
        return Err(Error::TooShort {
            len,
            min: dtau_min + 2,
        });
    }
    let prices = normalize_for_trading(x).values;
    let scan_end = len - dtau_min;

    let mut m = 0u64;
    loop {
        let epsilon = m as f64 * d_epsilon;
        if epsilon >= 1.0 {
            return Err(Error::NoConvergence {
                epsilon: (m - 1) as f64 * d_epsilon,
            });
        }
        let b = optimal_trade(&prices, epsilon)?.positions;

        let mut boundaries = vec![0usize];
        let mut t = 1;
        while t < scan_end && boundaries.len() < s_max - 1 {
            if b[t + 1] != b[t] {
                boundaries.push(t);
            }
            t += 1;
        }
        if t == scan_end {
            boundaries.push(len - 1);
            return Segmentation::new(boundaries);
        }
        m += 1;
    }
}
