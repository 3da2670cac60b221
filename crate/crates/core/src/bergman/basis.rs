use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::real::binomial;
use crate::{Error, Result, C64};

/// `dim H⁰(Pⁿ, O(k)) = C(n+k, n)`.
pub fn dimension(n: usize, k: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::Invalid("dimension needs n ≥ 1".into()));
    }
    binomial((n + k) as u64, n as u64).and_then(|d| usize::try_from(d).ok()).ok_or(Error::Overflow { n, k })
}

/// Graded-lex order: lower total degree first, then larger leading exponents.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// All multi-indices `α ∈ ℕⁿ` with `|α| ≤ k`, in graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    k: usize,
    indices: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let dim = dimension(n, k)?;
        let mut indices = Vec::with_capacity(dim);
        for d in 0..=k as u32 {
            let mut cur = vec![0u32; n];
            push_degree(&mut indices, &mut cur, 0, d);
        }
        Ok(Self { n, k, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.indices.binary_search_by(|p| grlex(p, alpha)).ok()
    }

    /// `ζ^α` for every basis element.
    pub fn eval(&self, z: &[C64]) -> Vec<C64> {
        let powers = power_table(z, self.k);
        self.indices.iter().map(|a| a.iter().enumerate().map(|(i, &e)| powers[i][e as usize]).product()).collect()
    }

    /// `∂ζ^α/∂ζ_j` for every basis element.
    pub fn eval_derivative(&self, z: &[C64], j: usize) -> Vec<C64> {
        let powers = power_table(z, self.k);
        self.indices
            .iter()
            .map(|a| {
                if a[j] == 0 {
                    return C64::new(0.0, 0.0);
                }
                let mut v = C64::new(a[j] as f64, 0.0);
                for (i, &e) in a.iter().enumerate() {
                    let e = if i == j { e - 1 } else { e };
                    v *= powers[i][e as usize];
                }
                v
            })
            .collect()
    }
}

fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    let n = cur.len();
    if i + 1 == n {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        push_degree(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

fn power_table(z: &[C64], k: usize) -> Vec<Vec<C64>> {
    z.iter()
        .map(|&c| {
            let mut row = Vec::with_capacity(k + 1);
            let mut p = C64::new(1.0, 0.0);
            for _ in 0..=k {
                row.push(p);
                p *= c;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(dimension(2, 3).unwrap(), 10);
        for k in 0..20 {
            assert_eq!(dimension(1, k).unwrap(), k + 1);
        }
        assert_eq!(dimension(2, 64).unwrap(), 2145);
        assert!(matches!(dimension(40, 200), Err(Error::Overflow { .. })));
    }

    #[test]
    fn basis_is_ordered_and_complete() {
        for (n, k) in [(1, 5), (2, 7), (3, 4)] {
            let b = MonomialBasis::new(n, k).unwrap();
            assert_eq!(b.len(), dimension(n, k).unwrap());
            assert!(b.indices().windows(2).all(|w| grlex(&w[0], &w[1]) == Ordering::Less));
            for (i, a) in b.indices().iter().enumerate() {
                assert_eq!(b.position(a), Some(i));
            }
        }
    }

    #[test]
    fn derivatives() {
        let b = MonomialBasis::new(2, 3).unwrap();
        let z = [C64::new(0.5, 1.0), C64::new(-2.0, 0.25)];
        let d = b.eval_derivative(&z, 1);
        let i = b.position(&[1, 2]).unwrap();
        assert!((d[i] - z[0] * z[1] * 2.0).norm() < 1e-14);
    }
}
