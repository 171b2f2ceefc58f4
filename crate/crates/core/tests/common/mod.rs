//! Reference brute force, written from the game definition with no shared
//! code: explicit multisets, costs recomputed from scratch, exact rationals.
#![allow(dead_code)]

use std::collections::BTreeSet;

use blotto_core::{Arrangement, Instance, Number, Outcome};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Matrix = Vec<Vec<u32>>;

pub struct Game {
    pub m: usize,
    pub weights: Vec<BigRational>,
    pub biases: Vec<BigRational>,
    pub counts: Vec<u32>,
    pub cu: BigRational,
    pub median: bool,
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Game {
    pub fn two(median: bool, m: usize, n_a: u32, n_b: u32, cu: BigRational) -> Game {
        Game { m, weights: vec![q(1, 1); m], biases: vec![q(1, 1), q(-1, 1)], counts: vec![n_a, n_b], cu, median }
    }

    /// Mirror of an exact library instance, classes in the library's order.
    pub fn from_instance(inst: &Instance) -> Game {
        let exact = |n: &Number| n.exact().expect("oracle needs exact inputs").clone();
        Game {
            m: inst.num_items(),
            weights: inst.weights().iter().map(exact).collect(),
            biases: inst.classes().iter().map(|c| exact(&c.bias)).collect(),
            counts: inst.counts(),
            cu: exact(inst.unlabeled_cost()),
            median: inst.outcome() == Outcome::Median,
        }
    }

    fn outcome(&self, item: &[u32]) -> Option<BigRational> {
        let mut values: Vec<BigRational> = Vec::new();
        for (t, &c) in item.iter().enumerate() {
            for _ in 0..c {
                values.push(self.biases[t].clone());
            }
        }
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        if self.median {
            values.sort();
            Some(if n % 2 == 1 {
                values[n / 2].clone()
            } else {
                (values[n / 2 - 1].clone() + values[n / 2].clone()) / q(2, 1)
            })
        } else {
            let sum: BigRational = values.into_iter().fold(BigRational::zero(), |a, b| a + b);
            Some(sum / q(n as i64, 1))
        }
    }

    pub fn cost(&self, x: &Matrix, t: usize) -> BigRational {
        let mut total = BigRational::zero();
        for (i, item) in x.iter().enumerate() {
            total += match self.outcome(item) {
                Some(o) => self.weights[i].clone() * (o - self.biases[t].clone()).abs(),
                None => self.weights[i].clone() * self.cu.clone(),
            };
        }
        total
    }

    pub fn stable(&self, x: &Matrix) -> bool {
        for t in 0..self.counts.len() {
            let before = self.cost(x, t);
            for i in 0..self.m {
                if x[i][t] == 0 {
                    continue;
                }
                for j in 0..self.m {
                    if i == j {
                        continue;
                    }
                    let mut y = x.clone();
                    y[i][t] -= 1;
                    y[j][t] += 1;
                    if self.cost(&y, t) < before {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every arrangement, built by distributing each class recursively.
    pub fn all(&self) -> Vec<Matrix> {
        fn spread(left: u32, item: usize, m: usize, col: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if item == m - 1 {
                col.push(left);
                out.push(col.clone());
                col.pop();
                return;
            }
            for c in 0..=left {
                col.push(c);
                spread(left - c, item + 1, m, col, out);
                col.pop();
            }
        }
        let mut result: Vec<Matrix> = vec![vec![Vec::new(); self.m]];
        for &n in &self.counts {
            let mut cols = Vec::new();
            spread(n, 0, self.m, &mut Vec::new(), &mut cols);
            let mut next = Vec::new();
            for partial in &result {
                for col in &cols {
                    let mut x = partial.clone();
                    for (i, row) in x.iter_mut().enumerate() {
                        row.push(col[i]);
                    }
                    next.push(x);
                }
            }
            result = next;
        }
        result
    }

    pub fn stable_set(&self) -> BTreeSet<Matrix> {
        self.all().into_iter().filter(|x| self.stable(x)).collect()
    }
}

pub fn matrix(a: &Arrangement) -> Matrix {
    a.rows().map(|r| r.to_vec()).collect()
}
