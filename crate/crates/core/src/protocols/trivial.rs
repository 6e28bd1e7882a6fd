use num_rational::BigRational;
use num_traits::One;

use super::tree::{Message, ProtocolTree, RandomizedProtocol};
use super::{bits_for, check_inputs, push_number, Execution, Output, Player, Protocol};
use crate::combinatorics::BitString;
use crate::error::check_cap;
use crate::Result;

/// Largest input length for which trees are materialized.
const TREE_INPUT_CAP: u128 = 6;

fn first_common(x: &BitString, y: &BitString) -> usize {
    x.intersect(y).coords().next().map_or(0, |c| c + 1)
}

/// Per block: Alice sends her `n` bits, Bob answers whether the block
/// intersects. Cost `k (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrivialNdisj {
    pub n: usize,
    pub k: usize,
}

impl TrivialNdisj {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        BitString::new(n * k, 0)?;
        Ok(Self { n, k })
    }

    pub fn to_tree(&self) -> Result<RandomizedProtocol> {
        let len = self.n * self.k;
        check_cap("protocol tree input length", len as u128, TREE_INPUT_CAP)?;
        let tree = build_blocks(self.n, self.k, 0, Vec::new(), &|b, xb, n, k, so_far| {
            let table = Message::table(n * k, |y| y.block(b * n, n).intersection_size(xb) > 0);
            let child = |v: bool| {
                let mut next = so_far.clone();
                next.push(v as usize);
                next
            };
            (Player::Bob, table, child(false), child(true))
        }, &|vals| Output::Decisions(vals.iter().map(|&v| v == 1).collect()))?;
        Ok(RandomizedProtocol::deterministic(len, tree))
    }
}

impl Protocol for TrivialNdisj {
    fn input_len(&self) -> usize {
        self.n * self.k
    }
    fn coin_count(&self) -> u128 {
        1
    }
    fn coin_probability(&self, _: u128) -> BigRational {
        BigRational::one()
    }
    fn cost(&self) -> usize {
        self.k * (self.n + 1)
    }
    fn execute(&self, _: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        check_inputs(self.input_len(), x, y)?;
        let mut transcript = Vec::with_capacity(self.cost());
        let mut out = Vec::with_capacity(self.k);
        for b in 0..self.k {
            let xb = x.block(b * self.n, self.n);
            let yb = y.block(b * self.n, self.n);
            push_number(&mut transcript, Player::Alice, xb.index(), self.n);
            let meet = xb.intersection_size(&yb) > 0;
            transcript.push((Player::Bob, meet));
            out.push(meet);
        }
        Ok(Execution {
            output: Output::Decisions(out),
            transcript,
        })
    }
}

/// Per block: Alice sends her `n` bits, Bob answers with the first common
/// coordinate (1-based, 0 for none). Cost `k (n + bits_for(n))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrivialSearch {
    pub n: usize,
    pub k: usize,
}

impl TrivialSearch {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        BitString::new(n * k, 0)?;
        Ok(Self { n, k })
    }

    pub fn to_tree(&self) -> Result<RandomizedProtocol> {
        let len = self.n * self.k;
        check_cap("protocol tree input length", len as u128, TREE_INPUT_CAP)?;
        let width = bits_for(self.n);
        let n = self.n;
        let tree = build_search_blocks(n, self.k, width, 0, Vec::new());
        Ok(RandomizedProtocol::deterministic(len, tree))
    }
}

impl Protocol for TrivialSearch {
    fn input_len(&self) -> usize {
        self.n * self.k
    }
    fn coin_count(&self) -> u128 {
        1
    }
    fn coin_probability(&self, _: u128) -> BigRational {
        BigRational::one()
    }
    fn cost(&self) -> usize {
        self.k * (self.n + bits_for(self.n))
    }
    fn execute(&self, _: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        check_inputs(self.input_len(), x, y)?;
        let width = bits_for(self.n);
        let mut transcript = Vec::with_capacity(self.cost());
        let mut out = Vec::with_capacity(self.k);
        for b in 0..self.k {
            let xb = x.block(b * self.n, self.n);
            let yb = y.block(b * self.n, self.n);
            push_number(&mut transcript, Player::Alice, xb.index(), self.n);
            let j = first_common(&xb, &yb);
            push_number(&mut transcript, Player::Bob, j, width);
            out.push(j);
        }
        Ok(Execution {
            output: Output::Coordinates(out),
            transcript,
        })
    }
}

type BobStep<'a> = dyn Fn(usize, &BitString, usize, usize, &Vec<usize>) -> (Player, Message, Vec<usize>, Vec<usize>) + 'a;

/// Alice announces block `b` bit by bit; then one Bob bit decides the
/// block's value.
fn build_blocks(
    n: usize,
    k: usize,
    b: usize,
    so_far: Vec<usize>,
    bob: &BobStep<'_>,
    finish: &dyn Fn(&[usize]) -> Output,
) -> Result<ProtocolTree> {
    if b == k {
        return Ok(ProtocolTree::leaf(finish(&so_far)));
    }
    alice_block(n, b, 0, 0, &mut |xb| {
        let xb = BitString::new(n, xb as u64).expect("block value in range");
        let (owner, msg, zero, one) = bob(b, &xb, n, k, &so_far);
        Ok(ProtocolTree::send(
            owner,
            msg,
            build_blocks(n, k, b + 1, zero, bob, finish)?,
            build_blocks(n, k, b + 1, one, bob, finish)?,
        ))
    })
}

/// Tree over Alice's bits of block `b`, `prefix` holding the first `i` of them.
fn alice_block(
    n: usize,
    b: usize,
    i: usize,
    prefix: usize,
    then: &mut dyn FnMut(usize) -> Result<ProtocolTree>,
) -> Result<ProtocolTree> {
    if i == n {
        return then(prefix);
    }
    let zero = alice_block(n, b, i + 1, prefix << 1, then)?;
    let one = alice_block(n, b, i + 1, prefix << 1 | 1, then)?;
    Ok(ProtocolTree::send(
        Player::Alice,
        Message::Bit { coord: b * n + i },
        zero,
        one,
    ))
}

fn build_search_blocks(n: usize, k: usize, width: usize, b: usize, so_far: Vec<usize>) -> ProtocolTree {
    if b == k {
        return ProtocolTree::leaf(Output::Coordinates(so_far));
    }
    alice_block(n, b, 0, 0, &mut |xv| {
        let xb = BitString::new(n, xv as u64).expect("block value in range");
        Ok(bob_answer(n, k, width, b, &xb, 0, 0, &so_far))
    })
    .expect("tree construction does not fail")
}

#[allow(clippy::too_many_arguments)]
fn bob_answer(
    n: usize,
    k: usize,
    width: usize,
    b: usize,
    xb: &BitString,
    d: usize,
    prefix: usize,
    so_far: &[usize],
) -> ProtocolTree {
    if d == width {
        if prefix > n {
            return ProtocolTree::leaf(Output::Reject);
        }
        let mut next = so_far.to_vec();
        next.push(prefix);
        return build_search_blocks(n, k, width, b + 1, next);
    }
    let shift = width - 1 - d;
    let msg = Message::table(n * k, |y| first_common(xb, &y.block(b * n, n)) >> shift & 1 == 1);
    ProtocolTree::send(
        Player::Bob,
        msg,
        bob_answer(n, k, width, b, xb, d + 1, prefix << 1, so_far),
        bob_answer(n, k, width, b, xb, d + 1, prefix << 1 | 1, so_far),
    )
}
