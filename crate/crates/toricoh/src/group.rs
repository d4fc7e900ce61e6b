//! Finite groups as verified multiplication tables.
//!
//! Elements are indices `0..order` into a table that is checked for the
//! group axioms at construction. Everything downstream (lattice actions,
//! cochain indexing, coset transversals) works with these indices, so the
//! conventions here are load-bearing: subgroups keep their element lists
//! sorted, subgroup lists are ordered by size then lexicographically, and
//! cosets are ordered by their minimal element. Those orderings are what
//! make every report byte-reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Hard ceiling on group order; tables are quadratic and tuple spaces in
/// the cochain complexes are exponential, so this is generous already.
pub const MAX_ORDER: usize = 256;

struct Inner {
    label: String,
    order: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
    identity: u16,
    element_labels: Vec<String>,
}

/// A finite group, cheap to clone and hand around.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.inner.label, self.inner.order)
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.table == other.inner.table && self.inner.identity == other.inner.identity)
    }
}
impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Builds a group from a full multiplication table, verifying closure,
    /// identity, inverses, and associativity.
    pub fn from_multiplication_table(label: &str, table: Vec<Vec<u16>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::GroupCapExceeded { order: n, cap: MAX_ORDER });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &table {
            if row.len() != n {
                return Err(Error::NotAGroup("table is not square".into()));
            }
            for &e in row {
                if (e as usize) >= n {
                    return Err(Error::NotAGroup(format!("entry {e} out of range")));
                }
                flat.push(e);
            }
        }
        Self::from_flat_table(label, n, flat, None)
    }

    fn from_flat_table(
        label: &str,
        n: usize,
        flat: Vec<u16>,
        element_labels: Option<Vec<String>>,
    ) -> Result<FiniteGroup> {
        let mul = |a: usize, b: usize| flat[a * n + b] as usize;
        let mut identity = None;
        for e in 0..n {
            if (0..n).all(|a| mul(e, a) == a && mul(a, e) == a) {
                identity = Some(e);
                break;
            }
        }
        let Some(id) = identity else {
            return Err(Error::NotAGroup("no identity element".into()));
        };
        let mut inverse = vec![u16::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| mul(a, b) == id && mul(b, a) == id) {
                Some(b) => inverse[a] = b as u16,
                None => return Err(Error::NotAGroup(format!("element {a} has no inverse"))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let element_labels = element_labels
            .unwrap_or_else(|| (0..n).map(|i| if i == id { "e".into() } else { format!("g{i}") }).collect());
        Ok(FiniteGroup {
            inner: Arc::new(Inner {
                label: label.to_string(),
                order: n,
                table: flat,
                inverse,
                identity: id as u16,
                element_labels,
            }),
        })
    }

    /// Cyclic group of order n, generator at index 1.
    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::NotAGroup("cyclic group of order 0".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::GroupCapExceeded { order: n, cap: MAX_ORDER });
        }
        let mut flat = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[a * n + b] = ((a + b) % n) as u16;
            }
        }
        let labels = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            })
            .collect();
        Self::from_flat_table(&format!("C{n}"), n, flat, Some(labels))
    }

    /// The Klein four-group: indices 0 = e, 1 = a, 2 = b, 3 = ab, with
    /// multiplication given by xor of indices.
    pub fn klein_four() -> FiniteGroup {
        let n = 4;
        let mut flat = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[a * n + b] = (a ^ b) as u16;
            }
        }
        let labels = ["e", "a", "b", "ab"].iter().map(|s| s.to_string()).collect();
        Self::from_flat_table("V4", n, flat, Some(labels)).expect("xor table is a group")
    }

    /// Direct product C_n x C_m; (i, j) sits at index i*m + j, so the first
    /// factor's generator is index m and the second factor's is index 1.
    pub fn product_cyclic(n: usize, m: usize) -> Result<FiniteGroup> {
        if n == 0 || m == 0 {
            return Err(Error::NotAGroup("cyclic factor of order 0".into()));
        }
        let order = n * m;
        if order > MAX_ORDER {
            return Err(Error::GroupCapExceeded { order, cap: MAX_ORDER });
        }
        let mut flat = vec![0u16; order * order];
        for i in 0..n {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..m {
                        let a = i * m + j;
                        let b = k * m + l;
                        flat[a * order + b] = (((i + k) % n) * m + (j + l) % m) as u16;
                    }
                }
            }
        }
        let labels = (0..order)
            .map(|x| {
                let (i, j) = (x / m, x % m);
                let mut parts = Vec::new();
                match i {
                    0 => {}
                    1 => parts.push("s".to_string()),
                    _ => parts.push(format!("s^{i}")),
                }
                match j {
                    0 => {}
                    1 => parts.push("t".to_string()),
                    _ => parts.push(format!("t^{j}")),
                }
                if parts.is_empty() { "e".to_string() } else { parts.join("") }
            })
            .collect();
        Self::from_flat_table(&format!("C{n}xC{m}"), order, flat, Some(labels))
    }

    /// Closure of a set of permutations of {0, .., degree-1} under
    /// composition, with elements numbered in discovery order (identity
    /// first, then breadth-first words in the generators).
    pub fn from_generator_permutations(label: &str, degree: usize, gens: &[Vec<usize>]) -> Result<FiniteGroup> {
        for (k, p) in gens.iter().enumerate() {
            let mut seen = vec![false; degree];
            if p.len() != degree {
                return Err(Error::BadPermutation(format!("generator {k} has length {}", p.len())));
            }
            for &x in p {
                if x >= degree || seen[x] {
                    return Err(Error::BadPermutation(format!("generator {k} is not a permutation")));
                }
                seen[x] = true;
            }
        }
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> {
            // (p then q) as functions acting on the left: (q ∘ p)(x)
            (0..degree).map(|x| q[p[x]]).collect()
        };
        let id: Vec<usize> = (0..degree).collect();
        let mut elements: Vec<Vec<usize>> = vec![id.clone()];
        let mut index: BTreeMap<Vec<usize>, u16> = BTreeMap::new();
        index.insert(id, 0);
        let gen_names: Vec<String> =
            (0..gens.len()).map(|k| ((b'a' + (k % 26) as u8) as char).to_string()).collect();
        let mut labels = vec!["e".to_string()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(at) = queue.pop_front() {
            for (k, g) in gens.iter().enumerate() {
                let w = compose(&elements[at], g);
                if !index.contains_key(&w) {
                    if elements.len() >= MAX_ORDER {
                        return Err(Error::GroupCapExceeded {
                            order: elements.len() + 1,
                            cap: MAX_ORDER,
                        });
                    }
                    let next = elements.len() as u16;
                    index.insert(w.clone(), next);
                    let word = if at == 0 {
                        gen_names[k].clone()
                    } else {
                        format!("{}{}", labels[at], gen_names[k])
                    };
                    labels.push(word);
                    elements.push(w);
                    queue.push_back(next as usize);
                }
            }
        }
        let n = elements.len();
        let mut flat = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let w = compose(&elements[a], &elements[b]);
                flat[a * n + b] = index[&w];
            }
        }
        Self::from_flat_table(label, n, flat, Some(labels))
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn identity(&self) -> u16 {
        self.inner.identity
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.inner.table[a as usize * self.inner.order + b as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        self.inner.inverse[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> + '_ {
        0..self.inner.order as u16
    }

    pub fn element_label(&self, a: u16) -> &str {
        &self.inner.element_labels[a as usize]
    }

    pub fn element_order(&self, a: u16) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Smallest subgroup containing the given elements.
    pub fn subgroup_generated(&self, gens: &[u16]) -> Subgroup {
        let mut members = BTreeSet::from([self.identity()]);
        let mut queue: VecDeque<u16> = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if members.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        Subgroup { parent: self.clone(), elements: members.into_iter().collect() }
    }

    /// Wraps an explicit element list after checking it really is closed
    /// under the group operations.
    pub fn subgroup_from_elements(&self, elts: &[u16]) -> Result<Subgroup> {
        let set: BTreeSet<u16> = elts.iter().copied().collect();
        for &x in &set {
            if x as usize >= self.order() {
                return Err(Error::NotASubgroup(format!("element {x} out of range")));
            }
        }
        if !set.contains(&self.identity()) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        for &x in &set {
            if !set.contains(&self.inv(x)) {
                return Err(Error::NotASubgroup(format!("missing inverse of {x}")));
            }
            for &y in &set {
                if !set.contains(&self.mul(x, y)) {
                    return Err(Error::NotASubgroup(format!("not closed: {x} * {y} escapes")));
                }
            }
        }
        Ok(Subgroup { parent: self.clone(), elements: set.into_iter().collect() })
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { parent: self.clone(), elements: vec![self.identity()] }
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup { parent: self.clone(), elements: (0..self.order() as u16).collect() }
    }

    /// Every subgroup, ordered by size and then lexicographically by
    /// element list.
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<u16>> = BTreeSet::new();
        found.insert(vec![self.identity()]);
        let mut queue: VecDeque<Vec<u16>> = VecDeque::from([vec![self.identity()]]);
        while let Some(current) = queue.pop_front() {
            let inside: BTreeSet<u16> = current.iter().copied().collect();
            for g in self.elements() {
                if inside.contains(&g) {
                    continue;
                }
                let mut gens = current.clone();
                gens.push(g);
                let bigger = self.subgroup_generated(&gens);
                if found.insert(bigger.elements.clone()) {
                    queue.push_back(bigger.elements);
                }
            }
        }
        let mut list: Vec<Vec<u16>> = found.into_iter().collect();
        list.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        list.into_iter().map(|elements| Subgroup { parent: self.clone(), elements }).collect()
    }

    /// Subgroups generated by a single element, one entry per distinct
    /// subgroup, same order as `all_subgroups`.
    pub fn cyclic_subgroups(&self) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<u16>> = BTreeSet::new();
        for g in self.elements() {
            found.insert(self.subgroup_generated(&[g]).elements);
        }
        let mut list: Vec<Vec<u16>> = found.into_iter().collect();
        list.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        list.into_iter().map(|elements| Subgroup { parent: self.clone(), elements }).collect()
    }

    /// Left cosets gH, each sorted, the list ordered by minimal element;
    /// the first coset is H itself.
    pub fn left_cosets(&self, sub: &Subgroup) -> Vec<Vec<u16>> {
        self.cosets_by(sub, |g, h| self.mul(g, h))
    }

    /// Right cosets Hg, same ordering conventions.
    pub fn right_cosets(&self, sub: &Subgroup) -> Vec<Vec<u16>> {
        self.cosets_by(sub, |g, h| self.mul(h, g))
    }

    fn cosets_by(&self, sub: &Subgroup, side: impl Fn(u16, u16) -> u16) -> Vec<Vec<u16>> {
        let mut seen = vec![false; self.order()];
        let mut cosets = Vec::new();
        for g in self.elements() {
            if seen[g as usize] {
                continue;
            }
            let mut coset: Vec<u16> = sub.elements.iter().map(|&h| side(g, h)).collect();
            coset.sort_unstable();
            for &x in &coset {
                seen[x as usize] = true;
            }
            cosets.push(coset);
        }
        // scanning g in increasing order already yields min-element order
        cosets
    }

    pub fn conjugate_subgroup(&self, sub: &Subgroup, g: u16) -> Subgroup {
        let mut elements: Vec<u16> =
            sub.elements.iter().map(|&h| self.mul(self.mul(g, h), self.inv(g))).collect();
        elements.sort_unstable();
        Subgroup { parent: self.clone(), elements }
    }

    /// True when some conjugate of `a` lies inside `b`.
    pub fn is_conjugate_contained(&self, a: &Subgroup, b: &Subgroup) -> bool {
        let inside: BTreeSet<u16> = b.elements.iter().copied().collect();
        self.elements().any(|g| {
            self.conjugate_subgroup(a, g).elements.iter().all(|x| inside.contains(x))
        })
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        self.elements().all(|g| self.conjugate_subgroup(sub, g).elements == sub.elements)
    }

    /// G/N for a normal subgroup, with the projection table g -> coset
    /// index. Cosets are numbered by the `left_cosets` order.
    pub fn quotient_group(&self, sub: &Subgroup) -> Result<(FiniteGroup, Vec<u16>)> {
        if !self.is_normal(sub) {
            return Err(Error::NotNormal);
        }
        let cosets = self.left_cosets(sub);
        let n = cosets.len();
        let mut proj = vec![0u16; self.order()];
        for (c, coset) in cosets.iter().enumerate() {
            for &g in coset {
                proj[g as usize] = c as u16;
            }
        }
        let mut flat = vec![0u16; n * n];
        for (a, ca) in cosets.iter().enumerate() {
            for (b, cb) in cosets.iter().enumerate() {
                flat[a * n + b] = proj[self.mul(ca[0], cb[0]) as usize];
            }
        }
        let labels = cosets.iter().map(|c| format!("[{}]", self.element_label(c[0]))).collect();
        let q = Self::from_flat_table(&format!("{}/N", self.label()), n, flat, Some(labels))?;
        Ok((q, proj))
    }
}

/// A subgroup, stored as a sorted element list with a handle to its parent.
#[derive(Clone)]
pub struct Subgroup {
    parent: FiniteGroup,
    elements: Vec<u16>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.parent == other.parent
    }
}
impl Eq for Subgroup {}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.elements.len().cmp(&other.elements.len()).then_with(|| self.elements.cmp(&other.elements))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.elements)
    }
}

impl Subgroup {
    pub fn parent(&self) -> &FiniteGroup {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    pub fn elements(&self) -> &[u16] {
        &self.elements
    }

    pub fn contains(&self, g: u16) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_full(&self) -> bool {
        self.elements.len() == self.parent.order()
    }

    /// Position of a parent element within this subgroup's element list.
    pub fn position_of(&self, g: u16) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }

    /// The subgroup as a standalone group, with the map new index ->
    /// parent element.
    pub fn as_group(&self) -> (FiniteGroup, Vec<u16>) {
        let n = self.elements.len();
        let mut flat = vec![0u16; n * n];
        for (a, &x) in self.elements.iter().enumerate() {
            for (b, &y) in self.elements.iter().enumerate() {
                let z = self.parent.mul(x, y);
                flat[a * n + b] = self.position_of(z).expect("subgroup is closed") as u16;
            }
        }
        let labels = self.elements.iter().map(|&x| self.parent.element_label(x).to_string()).collect();
        let g = FiniteGroup::from_flat_table(
            &format!("{}<{}>", self.parent.label(), self.describe()),
            n,
            flat,
            Some(labels),
        )
        .expect("subgroup tables satisfy the group axioms");
        (g, self.elements.clone())
    }

    /// Short display form like "{e, a}".
    pub fn describe(&self) -> String {
        let names: Vec<&str> = self.elements.iter().map(|&x| self.parent.element_label(x)).collect();
        format!("{{{}}}", names.join(", "))
    }
}
