use std::sync::Arc;

use super::rational;
use super::{AlgError, GradedElement};

/// The symmetric group acting on a family of generator blocks: a permutation
/// `π` sends the `p`-th generator of block `i` to the `p`-th generator of
/// block `π(i)`.
#[derive(Clone, Debug)]
pub struct BlockAction {
    pub blocks: Vec<Vec<usize>>,
}

impl BlockAction {
    /// Blocks given by generator names.
    pub fn by_name(ring: &Arc<super::Ring>, blocks: &[Vec<&str>]) -> Result<Self, AlgError> {
        let blocks = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|n| ring.index(n).ok_or_else(|| AlgError::UnknownGenerator(n.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BlockAction { blocks })
    }

    fn validate(&self, ring: &super::Ring) -> Result<(), AlgError> {
        let Some(first) = self.blocks.first() else { return Ok(()) };
        for b in &self.blocks {
            if b.len() != first.len() {
                return Err(AlgError::Invalid("blocks must have equal length".into()));
            }
            for (p, &i) in b.iter().enumerate() {
                let (gi, g0) = (ring.gens().get(i), ring.gens().get(first[p]));
                match (gi, g0) {
                    (Some(gi), Some(g0)) if gi.degree == g0.degree => {}
                    (Some(_), Some(_)) => {
                        return Err(AlgError::Invalid("block action is not degree-preserving".into()))
                    }
                    _ => return Err(AlgError::Invalid("generator index out of range".into())),
                }
            }
        }
        Ok(())
    }

    /// Image of `x` under the block permutation `perm`.
    pub fn apply(&self, x: &GradedElement, perm: &[usize]) -> Result<GradedElement, AlgError> {
        let ring = x.ring();
        let mut images: Vec<GradedElement> =
            (0..ring.gens().len()).map(|i| GradedElement::gen_index(ring, i)).collect();
        for (i, b) in self.blocks.iter().enumerate() {
            for (p, &gen) in b.iter().enumerate() {
                images[gen] = GradedElement::gen_index(ring, self.blocks[perm[i]][p]);
            }
        }
        x.substitute(ring, &images)
    }
}

/// All permutations of `0..k` with their signs, in lexicographic order.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let inv = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let s = if inv % 2 == 0 { 1 } else { -1 };
            (p, s)
        })
        .collect()
}

/// `(1/|W|) Σ_w (−1)^w w(x)` over the full symmetric group on the blocks.
pub fn antisymmetrize(x: &GradedElement, action: &BlockAction) -> Result<GradedElement, AlgError> {
    action.validate(x.ring())?;
    let perms = permutations(action.blocks.len());
    let mut out = GradedElement::zero(x.ring());
    for (p, s) in &perms {
        out = out + action.apply(x, p)?.scale(&rational::int(*s));
    }
    Ok(out.scale(&rational::frac(1, perms.len() as i64)))
}
