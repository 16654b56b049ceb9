use serde::Serialize;

/// A factorization of `x[start..start + Σ parts]` into consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization {
    pub start: usize,
    pub parts: Vec<usize>,
}

impl Factorization {
    /// `None` when `parts` is empty or contains a zero.
    pub fn new(start: usize, parts: Vec<usize>) -> Option<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return None;
        }
        Some(Self { start, parts })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn end(&self) -> usize {
        self.start + self.total()
    }

    pub fn is_monotone(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] <= w[1])
    }

    /// Block boundaries `start, start + parts[0], …, end`.
    pub fn cuts(&self) -> Vec<usize> {
        let mut cuts = Vec::with_capacity(self.parts.len() + 1);
        let mut at = self.start;
        cuts.push(at);
        for &p in &self.parts {
            at += p;
            cuts.push(at);
        }
        cuts
    }
}

/// Nondecreasing compositions of `total` into exactly `h` positive parts,
/// in lexicographic order.
#[derive(Debug, Clone)]
pub struct MonotoneCompositions {
    current: Option<Vec<usize>>,
}

pub fn enumerate_monotone(total: usize, h: usize) -> MonotoneCompositions {
    let current = (h >= 1 && total >= h).then(|| {
        let mut parts = vec![1; h];
        parts[h - 1] = total - (h - 1);
        parts
    });
    MonotoneCompositions { current }
}

impl Iterator for MonotoneCompositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.take()?;
        let h = current.len();
        let mut successor = current.clone();
        // Bump the rightmost part that can grow while the suffix stays
        // nondecreasing; the suffix becomes as flat as possible.
        let mut tail: usize = current[h - 1];
        for i in (0..h.saturating_sub(1)).rev() {
            tail += current[i];
            let bumped = current[i] + 1;
            let slots = h - i;
            if bumped * slots <= tail {
                for part in &mut successor[i..h - 1] {
                    *part = bumped;
                }
                successor[h - 1] = tail - bumped * (slots - 1);
                self.current = Some(successor);
                break;
            }
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_monotone(5, 2).collect::<Vec<_>>(), vec![vec![1, 4], vec![2, 3]]);
        assert_eq!(enumerate_monotone(6, 3).collect::<Vec<_>>(), vec![vec![1, 1, 4], vec![1, 2, 3], vec![2, 2, 2]]);
        assert_eq!(enumerate_monotone(3, 4).count(), 0);
        assert_eq!(enumerate_monotone(7, 1).collect::<Vec<_>>(), vec![vec![7]]);
        assert_eq!(enumerate_monotone(0, 0).count(), 0);
    }

    #[test]
    fn output_is_sorted_and_valid() {
        let all: Vec<Vec<usize>> = enumerate_monotone(20, 4).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for parts in &all {
            assert_eq!(parts.iter().sum::<usize>(), 20);
            assert!(parts.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn factorization_helpers() {
        let f = Factorization::new(3, vec![1, 2, 2]).unwrap();
        assert_eq!(f.cuts(), vec![3, 4, 6, 8]);
        assert_eq!(f.end(), 8);
        assert!(f.is_monotone());
        assert!(!Factorization::new(0, vec![2, 1]).unwrap().is_monotone());
        assert!(Factorization::new(0, vec![]).is_none());
        assert!(Factorization::new(0, vec![1, 0]).is_none());
    }
}
