use std::collections::VecDeque;

use super::Dfa;

impl Dfa {
    /// Canonical minimal DFA for the accepted set of non-empty words.
    ///
    /// Finality of the initial state is irrelevant to the language, so the
    /// initial state is treated as a fresh copy: it merges with a state of
    /// the same successors (a non-final one if both finalities exist) and
    /// otherwise stays separate and non-final. States are numbered in BFS
    /// order from the initial state, successors taken by increasing symbol,
    /// so equal languages give identical automata.
    pub fn minimize(&self) -> Dfa {
        let k = self.vars.num_symbols();
        let n = self.num_states();
        // States reachable by non-empty words.
        let mut live_mask = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &t in self.row(self.initial()) {
            if !live_mask[t as usize] {
                live_mask[t as usize] = true;
                queue.push_back(t as usize);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &t in self.row(q) {
                if !live_mask[t as usize] {
                    live_mask[t as usize] = true;
                    queue.push_back(t as usize);
                }
            }
        }
        let live: Vec<usize> = (0..n).filter(|&q| live_mask[q]).collect();
        let class = self.refine(&live);
        let count = live.iter().map(|&q| class[q] + 1).max().unwrap_or(0) as usize;

        // Class of the initial copy: `count` when it stays separate.
        let init_sig: Vec<u32> = self.row(self.initial()).iter().map(|&t| class[t as usize]).collect();
        let same_row = |q: usize| self.row(q).iter().zip(&init_sig).all(|(&t, &c)| class[t as usize] == c);
        let merged = live
            .iter()
            .copied()
            .filter(|&q| same_row(q))
            .min_by_key(|&q| self.finals[q]);
        let start = merged.map_or(count as u32, |q| class[q]);

        // BFS renumbering over classes; `rep[c]` is a member of class `c`.
        let mut rep = vec![usize::MAX; count];
        for &q in &live {
            if rep[class[q] as usize] == usize::MAX {
                rep[class[q] as usize] = q;
            }
        }
        let row_of = |c: u32| -> Vec<u32> {
            let q = if c as usize == count { self.initial() } else { rep[c as usize] };
            self.row(q).iter().map(|&t| class[t as usize]).collect()
        };
        let final_of = |c: u32| c as usize != count && self.finals[rep[c as usize]];
        let mut number = vec![u32::MAX; count + 1];
        let mut order = vec![start];
        number[start as usize] = 0;
        let mut i = 0;
        while i < order.len() {
            for c in row_of(order[i]) {
                if number[c as usize] == u32::MAX {
                    number[c as usize] = order.len() as u32;
                    order.push(c);
                }
            }
            i += 1;
        }
        let mut trans = Vec::with_capacity(order.len() * k);
        for &c in &order {
            trans.extend(row_of(c).iter().map(|&t| number[t as usize]));
        }
        let finals = order.iter().map(|&c| final_of(c)).collect();
        Dfa {
            vars: self.vars.clone(),
            initial: 0,
            trans,
            finals,
        }
    }

    /// Moore refinement of the closed state set `live`; classes are
    /// numbered `0..` and states outside `live` get `u32::MAX`.
    fn refine(&self, live: &[usize]) -> Vec<u32> {
        let k = self.vars.num_symbols();
        let width = k + 1;
        let mut class = vec![u32::MAX; self.num_states()];
        for &q in live {
            class[q] = self.finals[q] as u32;
        }
        let mut count = usize::MAX;
        let mut sigs = vec![0u32; live.len() * width];
        let mut order: Vec<usize> = (0..live.len()).collect();
        loop {
            for (i, &q) in live.iter().enumerate() {
                let sig = &mut sigs[i * width..(i + 1) * width];
                sig[0] = class[q];
                for (slot, &t) in sig[1..].iter_mut().zip(self.row(q)) {
                    *slot = class[t as usize];
                }
            }
            let sig = |i: usize| &sigs[i * width..(i + 1) * width];
            order.sort_unstable_by(|&a, &b| sig(a).cmp(sig(b)));
            let mut next = 0u32;
            for (pos, &i) in order.iter().enumerate() {
                if pos > 0 && sig(order[pos - 1]) != sig(i) {
                    next += 1;
                }
                class[live[i]] = next;
            }
            let classes = if live.is_empty() { 0 } else { next as usize + 1 };
            if classes == count {
                return class;
            }
            count = classes;
        }
    }
}
