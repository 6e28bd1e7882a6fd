use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{check_distribution, check_inputs, Execution, Output, Player, Protocol};
use crate::combinatorics::BitString;
use crate::{Error, Result};

/// What the sending player computes from its own input at a node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "message", rename_all = "snake_case")]
pub enum Message {
    /// One input bit (0-based coordinate).
    Bit { coord: usize },
    /// Whether every listed coordinate is 1.
    AllOnes { coords: Vec<usize> },
    /// Bit `i` of the string is sent on input index `i`.
    Table { bits: String },
    Const { value: bool },
}

impl Message {
    pub fn eval(&self, input: &BitString) -> Result<bool> {
        let check = |c: usize| {
            if c < input.len() {
                Ok(input.contains(c))
            } else {
                Err(Error::MalformedTree(format!(
                    "coordinate {c} outside a {}-bit input",
                    input.len()
                )))
            }
        };
        match self {
            Message::Bit { coord } => check(*coord),
            Message::AllOnes { coords } => {
                let mut all = true;
                for &c in coords {
                    all &= check(c)?;
                }
                Ok(all)
            }
            Message::Table { bits } => {
                if bits.len() != 1usize << input.len() {
                    return Err(Error::MalformedTree(format!(
                        "table of length {} for {}-bit inputs",
                        bits.len(),
                        input.len()
                    )));
                }
                match bits.as_bytes()[input.index()] {
                    b'0' => Ok(false),
                    b'1' => Ok(true),
                    other => Err(Error::MalformedTree(format!(
                        "table character {:?}",
                        other as char
                    ))),
                }
            }
            Message::Const { value } => Ok(*value),
        }
    }

    /// Table message from a predicate on the sender's input.
    pub fn table(len: usize, f: impl Fn(&BitString) -> bool) -> Self {
        Message::Table {
            bits: BitString::all(len).map(|s| if f(&s) { '1' } else { '0' }).collect(),
        }
    }
}

/// Deterministic protocol: internal nodes send one bit, leaves output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum ProtocolTree {
    Leaf {
        output: Output,
    },
    Send {
        owner: Player,
        #[serde(flatten)]
        message: Message,
        zero: Box<ProtocolTree>,
        one: Box<ProtocolTree>,
    },
}

impl ProtocolTree {
    pub fn leaf(output: Output) -> Self {
        ProtocolTree::Leaf { output }
    }

    pub fn send(owner: Player, message: Message, zero: ProtocolTree, one: ProtocolTree) -> Self {
        ProtocolTree::Send {
            owner,
            message,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 0,
            ProtocolTree::Send { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 1,
            ProtocolTree::Send { zero, one, .. } => zero.leaf_count() + one.leaf_count(),
        }
    }

    pub fn run(&self, x: &BitString, y: &BitString) -> Result<Execution> {
        let mut node = self;
        let mut transcript = Vec::new();
        loop {
            match node {
                ProtocolTree::Leaf { output } => {
                    return Ok(Execution {
                        output: output.clone(),
                        transcript,
                    })
                }
                ProtocolTree::Send { owner, message, zero, one } => {
                    let input = match owner {
                        Player::Alice => x,
                        Player::Bob => y,
                    };
                    let bit = message.eval(input)?;
                    transcript.push((*owner, bit));
                    node = if bit { one } else { zero };
                }
            }
        }
    }

    /// Leaves in depth-first order (zero branch first) with their paths.
    pub fn leaves(&self) -> Vec<(String, &Output)> {
        let mut out = Vec::new();
        self.collect_leaves(String::new(), &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, path: String, out: &mut Vec<(String, &'a Output)>) {
        match self {
            ProtocolTree::Leaf { output } => out.push((path, output)),
            ProtocolTree::Send { zero, one, .. } => {
                zero.collect_leaves(format!("{path}0"), out);
                one.collect_leaves(format!("{path}1"), out);
            }
        }
    }

    /// Replaces every leaf by `f(output)`.
    pub fn map_leaves(&self, f: &impl Fn(&Output) -> ProtocolTree) -> ProtocolTree {
        match self {
            ProtocolTree::Leaf { output } => f(output),
            ProtocolTree::Send { owner, message, zero, one } => ProtocolTree::Send {
                owner: *owner,
                message: message.clone(),
                zero: Box::new(zero.map_leaves(f)),
                one: Box::new(one.map_leaves(f)),
            },
        }
    }
}

/// Public-coin mixture of deterministic trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedProtocol {
    pub input_len: usize,
    #[serde(with = "branches")]
    pub branches: Vec<(BigRational, ProtocolTree)>,
}

impl RandomizedProtocol {
    pub fn new(input_len: usize, branches: Vec<(BigRational, ProtocolTree)>) -> Result<Self> {
        check_distribution(branches.iter().map(|(p, _)| p))?;
        Ok(Self { input_len, branches })
    }

    pub fn deterministic(input_len: usize, tree: ProtocolTree) -> Self {
        Self {
            input_len,
            branches: vec![(BigRational::one(), tree)],
        }
    }

    pub fn constant(input_len: usize, output: Output) -> Self {
        Self::deterministic(input_len, ProtocolTree::leaf(output))
    }

    /// Uniform mixture.
    pub fn uniform(input_len: usize, trees: Vec<ProtocolTree>) -> Result<Self> {
        let p = BigRational::new(1.into(), trees.len().into());
        Self::new(input_len, trees.into_iter().map(|t| (p.clone(), t)).collect())
    }
}

impl Protocol for RandomizedProtocol {
    fn input_len(&self) -> usize {
        self.input_len
    }
    fn coin_count(&self) -> u128 {
        self.branches.len() as u128
    }
    fn coin_probability(&self, coin: u128) -> BigRational {
        self.branches[coin as usize].0.clone()
    }
    fn cost(&self) -> usize {
        self.branches.iter().map(|(_, t)| t.depth()).max().unwrap_or(0)
    }
    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        check_inputs(self.input_len, x, y)?;
        let (_, tree) = self
            .branches
            .get(coin as usize)
            .ok_or_else(|| Error::ParameterRange(format!("coin {coin} out of range")))?;
        tree.run(x, y)
    }
}

mod branches {
    use super::*;
    use crate::scalar::{format_rational, parse_rational};
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Branch {
        probability: String,
        tree: ProtocolTree,
    }

    pub fn serialize<S: Serializer>(v: &[(BigRational, ProtocolTree)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<Branch> = v
            .iter()
            .map(|(p, t)| Branch {
                probability: format_rational(p),
                tree: t.clone(),
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(BigRational, ProtocolTree)>, D::Error> {
        let list = Vec::<Branch>::deserialize(d)?;
        list.into_iter()
            .map(|b| {
                parse_rational(&b.probability)
                    .map(|p| (p, b.tree))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}
