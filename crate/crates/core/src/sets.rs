//! Named subsets of ℕ given by membership predicates.

use std::fmt;
use std::sync::Arc;

type Membership = Arc<dyn Fn(usize) -> bool + Send + Sync>;

/// A subset of the positive integers, described by a predicate.
#[derive(Clone)]
pub struct IndexSet {
    name: String,
    member: Membership,
}

impl IndexSet {
    pub fn from_fn(name: impl Into<String>, member: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            member: Arc::new(member),
        }
    }

    pub fn squares() -> Self {
        Self::from_fn("squares", is_perfect_square)
    }

    pub fn non_squares() -> Self {
        Self::squares().complement()
    }

    pub fn cubes() -> Self {
        Self::from_fn("cubes", is_perfect_cube)
    }

    pub fn non_cubes() -> Self {
        Self::cubes().complement()
    }

    pub fn evens() -> Self {
        Self::from_fn("evens", |n| n % 2 == 0)
    }

    pub fn all() -> Self {
        Self::from_fn("all", |_| true)
    }

    pub fn empty() -> Self {
        Self::from_fn("empty", |_| false)
    }

    pub fn complement(&self) -> Self {
        let inner = Arc::clone(&self.member);
        let name = match self.name.strip_prefix("non-") {
            Some(base) => base.to_string(),
            None => format!("non-{}", self.name),
        };
        Self {
            name,
            member: Arc::new(move |n| !inner(n)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.member)(n)
    }

    /// Number of members in `1..=horizon`.
    pub fn count_up_to(&self, horizon: usize) -> usize {
        (1..=horizon).filter(|&n| self.contains(n)).count()
    }

    /// Natural density of the set restricted to `1..=horizon`.
    pub fn natural_density(&self, horizon: usize) -> f64 {
        if horizon == 0 {
            return 0.0;
        }
        self.count_up_to(horizon) as f64 / horizon as f64
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("IndexSet").field(&self.name).finish()
    }
}

pub fn is_perfect_square(n: usize) -> bool {
    let r = n.isqrt();
    r * r == n
}

pub fn is_perfect_cube(n: usize) -> bool {
    let guess = (n as f64).cbrt().round() as usize;
    (guess.saturating_sub(1)..=guess + 1).any(|r| r.checked_pow(3) == Some(n))
}
