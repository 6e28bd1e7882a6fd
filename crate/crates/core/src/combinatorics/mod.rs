//! Exact combinatorics: bit strings as sets, binomials, the `mu_{k,n,m}`
//! distributions, and the removal identities between them.

mod bits;
mod lemma4;
mod mu;

pub use bits::{BitString, InputPair, MAX_BITS};
pub(crate) use bits::full_mask;
pub use lemma4::{check_lemma4, Identity, Lemma4Report};
pub use mu::{
    binom, binom_u128, enumerate_support, for_each_support_pair, intersection_ratio, mu_prob,
    sample_mu, MuDistribution, MuParams, DEFAULT_SUPPORT_CAP,
};
