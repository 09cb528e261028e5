/// Disjoint-set forest with path halving and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grand = self.parent[self.parent[x]];
            self.parent[x] = grand;
            x = grand;
        }
        x
    }

    /// Returns false when `a` and `b` were already in the same set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Labels every element with a dense class number. Classes are numbered
    /// in order of their smallest member, so the labelling depends only on
    /// the partition and not on the union order.
    pub fn into_labels(mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut class_of_root = vec![usize::MAX; n];
        let mut next = 0;
        let labels = (0..n)
            .map(|x| {
                let root = self.find(x);
                if class_of_root[root] == usize::MAX {
                    class_of_root[root] = next;
                    next += 1;
                }
                class_of_root[root]
            })
            .collect();
        (labels, next)
    }
}
