use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::tree::{Message, ProtocolTree, RandomizedProtocol};
use super::{Execution, Output, Player, Protocol, TaskSpec};
use crate::combinatorics::BitString;
use crate::Result;

/// How claimed coordinates are checked before an output is made official.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStyle {
    /// Each player sends its bit at every claimed coordinate, then both send
    /// an accept bit: `2c + 2` bits for `c` claims.
    Explicit,
    /// Each player checks silently and sends one accept bit.
    Strict,
}

impl VerifyStyle {
    pub fn overhead(self, claims: usize) -> usize {
        match self {
            VerifyStyle::Explicit => 2 * claims + 2,
            VerifyStyle::Strict => 2,
        }
    }
}

/// What verification does with an output: pass it through untouched, turn
/// it into a rejection, or check the listed coordinates.
enum Plan {
    Pass,
    Reject,
    Check(Vec<usize>),
}

fn plan(task: &TaskSpec, out: &Output) -> Plan {
    if !task.is_search() {
        return Plan::Pass;
    }
    match out {
        Output::Reject => Plan::Pass,
        Output::Decisions(_) => Plan::Reject,
        Output::Coordinates(_) => match task.claimed_coords(out) {
            None => Plan::Reject,
            Some(c) if c.is_empty() => Plan::Pass,
            Some(c) => Plan::Check(c),
        },
    }
}

/// Wraps `inner` so that a search output is only kept when both players
/// confirm every claimed coordinate on their own input; otherwise the run
/// rejects.
pub struct VerifiedProtocol<P> {
    pub inner: P,
    pub task: TaskSpec,
    pub style: VerifyStyle,
}

pub fn make_verified<P: Protocol>(inner: P, task: TaskSpec, style: VerifyStyle) -> VerifiedProtocol<P> {
    VerifiedProtocol { inner, task, style }
}

impl<P: Protocol> Protocol for VerifiedProtocol<P> {
    fn input_len(&self) -> usize {
        self.inner.input_len()
    }
    fn coin_count(&self) -> u128 {
        self.inner.coin_count()
    }
    fn coin_probability(&self, coin: u128) -> BigRational {
        self.inner.coin_probability(coin)
    }
    fn cost(&self) -> usize {
        let claims = if self.task.is_search() { self.task.k } else { 0 };
        self.inner.cost() + self.style.overhead(claims)
    }
    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        let mut run = self.inner.execute(coin, x, y)?;
        match plan(&self.task, &run.output) {
            Plan::Pass => {}
            Plan::Reject => run.output = Output::Reject,
            Plan::Check(coords) => {
                let xa = coords.iter().all(|&c| c < x.len() && x.contains(c));
                let yb = coords.iter().all(|&c| c < y.len() && y.contains(c));
                match self.style {
                    VerifyStyle::Explicit => {
                        for &c in &coords {
                            run.transcript.push((Player::Alice, c < x.len() && x.contains(c)));
                        }
                        for &c in &coords {
                            run.transcript.push((Player::Bob, c < y.len() && y.contains(c)));
                        }
                        run.transcript.push((Player::Alice, xa && yb));
                        run.transcript.push((Player::Bob, xa && yb));
                    }
                    VerifyStyle::Strict => {
                        run.transcript.push((Player::Alice, xa));
                        run.transcript.push((Player::Bob, yb));
                    }
                }
                if !(xa && yb) {
                    run.output = Output::Reject;
                }
            }
        }
        Ok(run)
    }
    fn sample_coin(&self, rng: &mut dyn rand::RngCore) -> u128 {
        self.inner.sample_coin(rng)
    }
}

/// Tree form of [`make_verified`]: every leaf claiming coordinates grows a
/// check subtree.
pub fn verify_tree(tree: &ProtocolTree, task: &TaskSpec, style: VerifyStyle) -> ProtocolTree {
    tree.map_leaves(&|out| match plan(task, out) {
        Plan::Pass => ProtocolTree::leaf(out.clone()),
        Plan::Reject => ProtocolTree::leaf(Output::Reject),
        Plan::Check(coords) => {
            let steps: Vec<(Player, Message)> = match style {
                VerifyStyle::Explicit => coords
                    .iter()
                    .map(|&c| (Player::Alice, Message::Bit { coord: c }))
                    .chain(coords.iter().map(|&c| (Player::Bob, Message::Bit { coord: c })))
                    .collect(),
                VerifyStyle::Strict => vec![
                    (Player::Alice, Message::AllOnes { coords: coords.clone() }),
                    (Player::Bob, Message::AllOnes { coords: coords.clone() }),
                ],
            };
            check_subtree(&steps, true, style == VerifyStyle::Explicit, out)
        }
    })
}

fn check_subtree(steps: &[(Player, Message)], ok: bool, agree: bool, out: &Output) -> ProtocolTree {
    match steps.split_first() {
        Some(((owner, msg), rest)) => ProtocolTree::send(
            *owner,
            msg.clone(),
            check_subtree(rest, false, agree, out),
            check_subtree(rest, ok, agree, out),
        ),
        None if agree => {
            // Both accept bits are determined by the path so far.
            let verdict = if ok { out.clone() } else { Output::Reject };
            let leaf = |o: Output| ProtocolTree::leaf(o);
            let bob = ProtocolTree::send(
                Player::Bob,
                Message::Const { value: ok },
                leaf(Output::Reject),
                leaf(verdict),
            );
            ProtocolTree::send(Player::Alice, Message::Const { value: ok }, bob.clone(), bob)
        }
        None => ProtocolTree::leaf(if ok { out.clone() } else { Output::Reject }),
    }
}

impl RandomizedProtocol {
    /// Applies [`verify_tree`] to every branch.
    pub fn verified(&self, task: &TaskSpec, style: VerifyStyle) -> RandomizedProtocol {
        RandomizedProtocol {
            input_len: self.input_len,
            branches: self
                .branches
                .iter()
                .map(|(p, t)| (p.clone(), verify_tree(t, task, style)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::TrivialSearch;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn wrong_claim_becomes_reject() {
        let task = TaskSpec::search(2, 1);
        let liar = RandomizedProtocol::constant(2, Output::Coordinates(vec![1]));
        for style in [VerifyStyle::Explicit, VerifyStyle::Strict] {
            let v = make_verified(liar.clone(), task, style);
            let e = v.execute(0, &b("01"), &b("01")).unwrap();
            assert_eq!(e.output, Output::Reject);
            assert_eq!(e.bits(), style.overhead(1));
            let e = v.execute(0, &b("11"), &b("10")).unwrap();
            assert_eq!(e.output, Output::Coordinates(vec![1]));
            let t = liar.verified(&task, style);
            for x in BitString::all(2) {
                for y in BitString::all(2) {
                    assert_eq!(t.execute(0, &x, &y).unwrap(), v.execute(0, &x, &y).unwrap());
                }
            }
        }
    }

    #[test]
    fn correct_protocol_unchanged() {
        let task = TaskSpec::search(2, 2);
        let p = TrivialSearch::new(2, 2).unwrap();
        let v = make_verified(p, task, VerifyStyle::Explicit);
        assert_eq!(v.cost(), p.cost() + 6);
        let tree = p.to_tree().unwrap().verified(&task, VerifyStyle::Explicit);
        for x in BitString::all(4) {
            for y in BitString::all(4) {
                let a = p.execute(0, &x, &y).unwrap();
                let e = v.execute(0, &x, &y).unwrap();
                assert_eq!(a.output, e.output);
                assert_eq!(tree.execute(0, &x, &y).unwrap(), e);
            }
        }
    }
}
