// Copyright 2026 The cardgas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Bitstrings over `n` binary variables and fixed-weight enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Assignment of `n` binary variables packed into a word; bit `i` is `x_i`,
/// which lives on qubit `i` of the variable register.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitString(pub u64);

impl BitString {
    pub fn from_indices(indices: &[usize]) -> Self {
        BitString(indices.iter().fold(0, |m, &i| m | (1u64 << i)))
    }

    pub fn weight(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn get(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.get(i)).collect()
    }

    pub fn to_f64(self, n: usize) -> Vec<f64> {
        (0..n).map(|i| if self.get(i) { 1.0 } else { 0.0 }).collect()
    }

    /// Ket-style rendering, `x_{n-1}` first.
    pub fn render(self, n: usize) -> String {
        (0..n)
            .rev()
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    /// Parses the ket-style rendering produced by [`BitString::render`].
    pub fn parse(s: &str) -> Option<(Self, usize)> {
        let n = s.len();
        if n > 64 {
            return None;
        }
        let mut bits = 0u64;
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << (n - 1 - pos),
                _ => return None,
            }
        }
        Some((BitString(bits), n))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.0)
    }
}

/// Exact binomial coefficient; saturates at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Weight-`k` subsets of `{0..n}` in lexicographic order of their sorted index lists.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = BitString;

    fn next(&mut self) -> Option<BitString> {
        if self.done {
            return None;
        }
        let out = BitString::from_indices(&self.idx);
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
