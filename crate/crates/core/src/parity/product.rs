use std::collections::HashMap;

use super::{Dpw, DpwError};

/// Guard on the total number of (compacted) component colors.
pub const MAX_COLOR_SUM: usize = 8;
/// Guard on the number of product states.
pub const MAX_PRODUCT_STATES: usize = 1_000_000;

/// Index appearance record product.
///
/// Every component color is an *index*. A record is a permutation of all
/// indices plus a hit position `h`. Reading a symbol moves the indices of
/// the new component colors to the front (keeping their relative order);
/// `h` is the largest position any of them held before. The indices at
/// positions `0..=h` then form the set whose Muller condition decides the
/// color `2h` (accepting) or `2h + 1` (rejecting). The largest `h` hit
/// infinitely often marks exactly the set of indices seen infinitely often.
pub(super) fn combine_all(parts: &[&Dpw], f: impl Fn(&[bool]) -> bool) -> Result<Dpw, DpwError> {
    let Some(first) = parts.first() else {
        return Err(DpwError::NoStates);
    };
    let vars = first.vars.clone();
    if parts.iter().any(|p| *p.vars != *vars) {
        return Err(DpwError::VocabularyMismatch);
    }
    let parts: Vec<Dpw> = parts.iter().map(|p| p.compact_colors()).collect();

    // Index ids: component i, color c -> offset[i] + (c - base[i]).
    let mut offset = Vec::with_capacity(parts.len());
    let mut base = Vec::with_capacity(parts.len());
    let mut owner = Vec::new();
    let mut index_color = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let lo = *p.colors.iter().min().expect("non-empty");
        let hi = *p.colors.iter().max().expect("non-empty");
        offset.push(owner.len());
        base.push(lo);
        for c in lo..=hi {
            owner.push(i);
            index_color.push(c);
        }
    }
    let d = owner.len();
    if d > MAX_COLOR_SUM {
        return Err(DpwError::TooManyColors(d));
    }
    let index_of = |i: usize, q: usize| (offset[i] + (parts[i].colors[q] - base[i]) as usize) as u8;

    let accepting = |set: &[u8]| -> bool {
        let mut best: Vec<Option<u32>> = vec![None; parts.len()];
        for &ix in set {
            let (i, c) = (owner[ix as usize], index_color[ix as usize]);
            best[i] = Some(best[i].map_or(c, |b: u32| b.max(c)));
        }
        if best.iter().any(Option::is_none) {
            return false;
        }
        let acc: Vec<bool> = best.iter().map(|b| b.unwrap() % 2 == 0).collect();
        f(&acc)
    };

    type Key = (Vec<u32>, Vec<u8>, u8);
    let k = vars.num_symbols();
    let init: Key = (
        parts.iter().map(|p| p.initial).collect(),
        (0..d as u8).collect(),
        0,
    );
    let mut index: HashMap<Key, u32> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (qs, perm, _) = states[i].clone();
        for s in 0..k {
            let next_qs: Vec<u32> = qs
                .iter()
                .zip(&parts)
                .map(|(&q, p)| p.trans[q as usize * k + s])
                .collect();
            let hit: Vec<u8> = next_qs
                .iter()
                .enumerate()
                .map(|(c, &q)| index_of(c, q as usize))
                .collect();
            let h = perm
                .iter()
                .enumerate()
                .filter(|(_, ix)| hit.contains(ix))
                .map(|(pos, _)| pos)
                .max()
                .expect("every component contributes an index");
            let mut next_perm: Vec<u8> = perm.iter().copied().filter(|ix| hit.contains(ix)).collect();
            next_perm.extend(perm.iter().copied().filter(|ix| !hit.contains(ix)));
            let key = (next_qs, next_perm, h as u8);
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    if states.len() >= MAX_PRODUCT_STATES {
                        return Err(DpwError::TooManyStates);
                    }
                    index.insert(key.clone(), id);
                    states.push(key);
                    id
                }
            };
            trans.push(id);
        }
        i += 1;
    }
    let colors = states
        .iter()
        .map(|(_, perm, h)| {
            let h = *h as usize;
            2 * h as u32 + u32::from(!accepting(&perm[..=h]))
        })
        .collect();
    Ok(Dpw::new(vars, 0, trans, colors)?.compact_colors())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::dfa::Connective;
    use crate::logic::VarTable;
    use crate::parity::tests::{random_dpw, random_lasso};
    use crate::parity::{Dpw, DpwError};

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn products_match_connectives_on_lassos() {
        let v = Arc::new(VarTable::new(["e"], ["a"]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let (n1, n2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let m1 = random_dpw(&mut rng, &v, n1, 3);
            let m2 = random_dpw(&mut rng, &v, n2, 3);
            let d = m1.compact_colors().num_colors() + m2.compact_colors().num_colors();
            for op in [Connective::And, Connective::Or, Connective::Implies] {
                let p = m1.combine(&m2, op).unwrap();
                assert!(p.num_states() <= n1 * n2 * d * d * factorial(d));
                for _ in 0..50 {
                    let (pre, lp) = random_lasso(&mut rng, 4);
                    let expected = op.apply(
                        m1.accepts_lasso(&pre, &lp).unwrap(),
                        m2.accepts_lasso(&pre, &lp).unwrap(),
                    );
                    assert_eq!(p.accepts_lasso(&pre, &lp).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn ternary_product() {
        let v = Arc::new(VarTable::new(["e"], ["a"]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let ms: Vec<Dpw> = (0..3).map(|_| random_dpw(&mut rng, &v, 3, 2)).collect();
            let refs: Vec<&Dpw> = ms.iter().collect();
            let p = Dpw::combine_all(&refs, |a| !(a[0] && a[1]) || a[2]).unwrap();
            for _ in 0..50 {
                let (pre, lp) = random_lasso(&mut rng, 4);
                let acc: Vec<bool> = ms.iter().map(|m| m.accepts_lasso(&pre, &lp).unwrap()).collect();
                assert_eq!(
                    p.accepts_lasso(&pre, &lp).unwrap(),
                    !(acc[0] && acc[1]) || acc[2]
                );
            }
        }
    }

    #[test]
    fn identity_and_guards() {
        let v = Arc::new(VarTable::new(["e"], ["a"]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_dpw(&mut rng, &v, 4, 3);
        let u = Dpw::universal(v.clone());
        let p = m.combine(&u, Connective::And).unwrap();
        for _ in 0..100 {
            let (pre, lp) = random_lasso(&mut rng, 4);
            assert_eq!(p.accepts_lasso(&pre, &lp), m.accepts_lasso(&pre, &lp));
        }
        let many = Dpw::new(v.clone(), 0, vec![0; 4], vec![0]).unwrap();
        let wide = Dpw::from_fn(v.clone(), 0, vec![0, 1, 2, 3, 4], |q, _| (q + 1) % 5).unwrap();
        assert_eq!(
            wide.combine(&wide, Connective::Or),
            Err(DpwError::TooManyColors(10))
        );
        let other = Arc::new(VarTable::new(["e"], ["b"]).unwrap());
        assert_eq!(
            many.combine(&Dpw::universal(other), Connective::Or),
            Err(DpwError::VocabularyMismatch)
        );
    }
}
