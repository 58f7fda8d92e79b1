use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Factor list `[n₁, …, n_r]` of a GMZI permutation group.
///
/// The factors are kept in the order given, since that order fixes the
/// Kronecker layout of the device.  [`GroupSpec::canonical`] gives the
/// isomorphism-class representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GroupSpec {
    factors: Vec<usize>,
}

impl GroupSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if let Some(&f) = factors.iter().find(|&&f| f < 2) {
            return invalid(format!("group factors must be >= 2, got {f}"));
        }
        Ok(Self { factors })
    }

    /// `[n]`: the DFT-type device.
    pub fn cyclic(n: usize) -> Self {
        if n < 2 {
            Self { factors: vec![] }
        } else {
            Self { factors: vec![n] }
        }
    }

    /// `[2, …, 2]`: the Hadamard-type device on `2^r` modes.
    pub fn hadamard(r: usize) -> Self {
        Self { factors: vec![2; r] }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Group order, i.e. the number of modes.
    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn is_hadamard_type(&self) -> bool {
        self.factors.iter().all(|&f| f == 2)
    }

    /// Prime-power decomposition sorted by prime, larger powers first.
    pub fn canonical(&self) -> Self {
        let mut parts: Vec<(usize, usize)> = Vec::new();
        for &f in &self.factors {
            for (p, e) in factorize(f) {
                parts.push((p, p.pow(e as u32)));
            }
        }
        parts.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        Self { factors: parts.into_iter().map(|(_, q)| q).collect() }
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    /// Mixed-radix digits of a scalar index (first factor slowest).
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &n) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % n;
            index /= n;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factors.len() {
            return Err(Error::DimensionMismatch(format!(
                "setting vector has {} digits, group has rank {}",
                digits.len(),
                self.factors.len()
            )));
        }
        let mut idx = 0;
        for (&d, &n) in digits.iter().zip(&self.factors) {
            if d >= n {
                return invalid(format!("setting digit {d} out of range 0..{n}"));
            }
            idx = idx * n + d;
        }
        Ok(idx)
    }

    /// Group addition `a + b` on scalar mode indices (digitwise mod n_l).
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<usize> = da.iter().zip(&db).zip(&self.factors).map(|((x, y), n)| (x + y) % n).collect();
        self.index(&sum).expect("digits in range")
    }

    /// The unique element `k` with `k + from = to`.
    pub fn difference(&self, to: usize, from: usize) -> usize {
        let (dt, df) = (self.digits(to), self.digits(from));
        let diff: Vec<usize> = dt.iter().zip(&df).zip(&self.factors).map(|((x, y), n)| (x + n - y) % n).collect();
        self.index(&diff).expect("digits in range")
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        if body.trim().is_empty() {
            return Ok(Self { factors: vec![] });
        }
        let factors = body
            .split(|c| c == ',' || c == 'x')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad group factor {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

impl TryFrom<Vec<usize>> for GroupSpec {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GroupSpec> for Vec<usize> {
    fn from(g: GroupSpec) -> Self {
        g.factors
    }
}

/// Trial-division factorisation into `(prime, exponent)` pairs.
pub fn factorize(mut n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Integer partitions of `e`, each in non-increasing order.
fn partitions(e: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

/// All isomorphism classes of abelian groups of order `n`, each in
/// canonical prime-power form.  `n = 1` yields the trivial group `[]`.
pub fn classify_gmzi_types(n: usize) -> Vec<GroupSpec> {
    assert!(n >= 1, "group order must be positive");
    let mut specs: Vec<Vec<usize>> = vec![vec![]];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for base in &specs {
            for part in partitions(e) {
                let mut f = base.clone();
                f.extend(part.iter().map(|&k| p.pow(k as u32)));
                next.push(f);
            }
        }
        specs = next;
    }
    let set: BTreeSet<GroupSpec> = specs.into_iter().map(|f| GroupSpec { factors: f }.canonical()).collect();
    set.into_iter().collect()
}
