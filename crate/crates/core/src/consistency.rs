//! Finite structures with named relations, injective structure-preserving
//! maps between them, the pairwise-consistency test built on the
//! set-union operator, and brute-force automorphism groups with freeness
//! and involution predicates.
//!
//! A family of representations is pairwise consistent when every map
//! `s ↦ {R₁(s)} ∪ {R₂(s)}` is injective on its set values. The harness
//! checks the accompanying existence statement: when the automorphisms
//! act freely and the family (taken to be the automorphisms themselves)
//! is pairwise inconsistent, the group must contain an involution.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};

/// Cap on carrier size for exhaustive permutation enumeration
/// (8! = 40,320 candidates).
pub const MAX_EXHAUSTIVE_SIZE: usize = 8;

/// A named relation: a set of fixed-arity tuples over element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A finite carrier with named relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    elements: Vec<String>,
    relations: BTreeMap<String, Relation>,
}

impl FiniteStructure {
    /// New structure over distinct element names, with no relations yet.
    pub fn new(elements: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("structure needs at least one element".into()));
        }
        let mut seen = HashSet::new();
        for e in &elements {
            if !seen.insert(e.clone()) {
                return Err(Error::InvalidInput(format!("duplicate element '{e}'")));
            }
        }
        Ok(Self {
            elements,
            relations: BTreeMap::new(),
        })
    }

    /// Convenience constructor over elements named "1".."n".
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()).collect())
    }

    /// Add a relation given as tuples of element indices.
    pub fn add_relation_indices(
        &mut self,
        name: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<()> {
        if arity == 0 {
            return Err(Error::InvalidInput("relation arity must be positive".into()));
        }
        if self.relations.contains_key(name) {
            return Err(Error::InvalidInput(format!("relation '{name}' already present")));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::InvalidInput(format!(
                    "tuple {t:?} has length {} in relation '{name}' of arity {arity}",
                    t.len()
                )));
            }
            for &idx in &t {
                if idx >= self.elements.len() {
                    return Err(Error::InvalidInput(format!(
                        "tuple {t:?} references element index {idx} out of range"
                    )));
                }
            }
            set.insert(t);
        }
        self.relations.insert(name.to_string(), Relation { arity, tuples: set });
        Ok(())
    }

    /// Add a relation given as tuples of element names.
    pub fn add_relation(
        &mut self,
        name: &str,
        arity: usize,
        tuples: &[Vec<&str>],
    ) -> Result<()> {
        let indexed: Result<Vec<Vec<usize>>> = tuples
            .iter()
            .map(|t| t.iter().map(|e| self.index_of(e)).collect())
            .collect();
        self.add_relation_indices(name, arity, indexed?)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown element '{name}'")))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    /// Whether the permutation (as an index map) sends every relation
    /// tuple to a tuple of the same relation.
    fn preserves_relations(&self, perm: &[usize]) -> bool {
        self.relations.values().all(|rel| {
            rel.tuples.iter().all(|t| {
                let image: Vec<usize> = t.iter().map(|&i| perm[i]).collect();
                rel.tuples.contains(&image)
            })
        })
    }
}

/// An injective structure-preserving map between two structures,
/// stored as source-index → target-index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationMap {
    source: FiniteStructure,
    target: FiniteStructure,
    mapping: Vec<usize>,
}

/// Decide whether `mapping` (source index → target index) is a
/// representation: total, injective, and relation-preserving into
/// same-named target relations.
///
/// A mapping that leaves the target carrier is an input error rather
/// than a `false`; missing target relations simply fail preservation.
pub fn is_representation(
    mapping: &[usize],
    source: &FiniteStructure,
    target: &FiniteStructure,
) -> Result<bool> {
    if mapping.len() != source.len() {
        return Err(Error::InvalidInput(format!(
            "mapping covers {} elements but the source has {}",
            mapping.len(),
            source.len()
        )));
    }
    for &img in mapping {
        if img >= target.len() {
            return Err(Error::InvalidInput(format!(
                "mapping sends an element to index {img}, outside the target carrier"
            )));
        }
    }
    let mut seen = vec![false; target.len()];
    for &img in mapping {
        if seen[img] {
            return Ok(false);
        }
        seen[img] = true;
    }
    for (name, rel) in source.relations() {
        let Some(target_rel) = target.relations().get(name) else {
            if rel.tuples.is_empty() {
                continue;
            }
            return Ok(false);
        };
        if target_rel.arity != rel.arity {
            return Ok(false);
        }
        for t in &rel.tuples {
            let image: Vec<usize> = t.iter().map(|&i| mapping[i]).collect();
            if !target_rel.tuples.contains(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl RepresentationMap {
    /// Validating constructor: `mapping` must be a representation.
    pub fn new(
        source: FiniteStructure,
        target: FiniteStructure,
        mapping: Vec<usize>,
    ) -> Result<Self> {
        if !is_representation(&mapping, &source, &target)? {
            return Err(Error::InvalidInput(
                "mapping is not injective and structure-preserving".into(),
            ));
        }
        Ok(Self {
            source,
            target,
            mapping,
        })
    }

    /// Build from (source name, target name) pairs.
    pub fn from_name_pairs(
        source: FiniteStructure,
        target: FiniteStructure,
        pairs: &[(&str, &str)],
    ) -> Result<Self> {
        if pairs.len() != source.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} pairs, got {}",
                source.len(),
                pairs.len()
            )));
        }
        let mut mapping = vec![usize::MAX; source.len()];
        for (from, to) in pairs {
            let i = source.index_of(from)?;
            if mapping[i] != usize::MAX {
                return Err(Error::InvalidInput(format!("element '{from}' mapped twice")));
            }
            mapping[i] = target.index_of(to)?;
        }
        Self::new(source, target, mapping)
    }

    pub fn source(&self) -> &FiniteStructure {
        &self.source
    }

    pub fn target(&self) -> &FiniteStructure {
        &self.target
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, source_index: usize) -> usize {
        self.mapping[source_index]
    }
}

/// The set-union operator on two representations with common source and
/// target: element `s` maps to the set `{R₁(s)} ∪ {R₂(s)}` (one or two
/// target indices).
pub fn union_pair(
    r1: &RepresentationMap,
    r2: &RepresentationMap,
) -> Result<Vec<BTreeSet<usize>>> {
    if r1.source != r2.source || r1.target != r2.target {
        return Err(Error::InvalidInput(
            "representations must share source and target".into(),
        ));
    }
    Ok((0..r1.source.len())
        .map(|s| BTreeSet::from([r1.apply(s), r2.apply(s)]))
        .collect())
}

/// Witness of a pairwise-consistency violation: representations `i` and
/// `j` give the same unordered value set on distinct elements `s`, `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InconsistencyWitness {
    pub rep_i: usize,
    pub rep_j: usize,
    pub s: String,
    pub t: String,
}

/// Outcome of the pairwise-consistency test.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub witness: Option<InconsistencyWitness>,
}

fn find_union_collision(n: usize, f: &[usize], g: &[usize]) -> Option<(usize, usize)> {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(n);
    for s in 0..n {
        let (a, b) = (f[s], g[s]);
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&t) = seen.get(&key) {
            return Some((t, s));
        }
        seen.insert(key, s);
    }
    None
}

fn pairwise_consistent_maps(
    n: usize,
    maps: &[&[usize]],
    names: &[String],
) -> ConsistencyReport {
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if let Some((s, t)) = find_union_collision(n, maps[i], maps[j]) {
                return ConsistencyReport {
                    consistent: false,
                    witness: Some(InconsistencyWitness {
                        rep_i: i,
                        rep_j: j,
                        s: names[s].clone(),
                        t: names[t].clone(),
                    }),
                };
            }
        }
    }
    ConsistencyReport {
        consistent: true,
        witness: None,
    }
}

/// Test a family of representations for pairwise consistency, returning
/// the first violating pair and elements when there is one.
pub fn pairwise_consistent(reps: &[RepresentationMap]) -> Result<ConsistencyReport> {
    let Some(first) = reps.first() else {
        return Err(Error::InvalidInput(
            "need at least one representation".into(),
        ));
    };
    for r in reps {
        if r.source != first.source || r.target != first.target {
            return Err(Error::InvalidInput(
                "representations must share source and target".into(),
            ));
        }
    }
    let maps: Vec<&[usize]> = reps.iter().map(|r| r.mapping()).collect();
    Ok(pairwise_consistent_maps(
        first.source.len(),
        &maps,
        first.source.elements(),
    ))
}

/// All relation-preserving permutations of a structure, enumerated
/// exhaustively and sorted lexicographically (the identity comes
/// first).
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    structure: FiniteStructure,
    elements: Vec<Vec<usize>>,
}

impl AutomorphismGroup {
    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(&mut current, n, &mut out);
    out.sort();
    out
}

fn heap_permute(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permute(current, k - 1, out);
        if k.is_multiple_of(2) {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

fn compose_perm(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

fn invert_perm(f: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; f.len()];
    for (i, &img) in f.iter().enumerate() {
        inv[img] = i;
    }
    inv
}

/// Exhaustively enumerate `Aut(S)` for carriers of size at most 8.
///
/// Every permutation of the carrier is tested for relation preservation
/// (bijectivity makes preservation in one direction preservation in
/// both). Closure under composition and inverses is checked before
/// returning: exhaustively for groups up to 4,096 elements, by inverse
/// checks plus deterministic product sampling above that.
pub fn automorphisms(s: &FiniteStructure) -> Result<AutomorphismGroup> {
    if s.len() > MAX_EXHAUSTIVE_SIZE {
        return Err(Error::SizeLimit {
            size: s.len(),
            max: MAX_EXHAUSTIVE_SIZE,
        });
    }
    let elements: Vec<Vec<usize>> = permutations(s.len())
        .into_iter()
        .filter(|p| s.preserves_relations(p))
        .collect();

    let index: HashSet<&[usize]> = elements.iter().map(|p| p.as_slice()).collect();
    let identity: Vec<usize> = (0..s.len()).collect();
    if !index.contains(identity.as_slice()) {
        return Err(Error::Numerical("automorphism set lost the identity".into()));
    }
    for p in &elements {
        if !index.contains(invert_perm(p).as_slice()) {
            return Err(Error::Numerical("automorphism set not closed under inverse".into()));
        }
    }
    if elements.len() <= 4_096 {
        for f in &elements {
            for g in &elements {
                if !index.contains(compose_perm(f, g).as_slice()) {
                    return Err(Error::Numerical(
                        "automorphism set not closed under composition".into(),
                    ));
                }
            }
        }
    } else {
        let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
        for _ in 0..100_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let i = (state >> 33) as usize % elements.len();
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % elements.len();
            if !index.contains(compose_perm(&elements[i], &elements[j]).as_slice()) {
                return Err(Error::Numerical(
                    "automorphism set not closed under composition".into(),
                ));
            }
        }
    }

    Ok(AutomorphismGroup {
        structure: s.clone(),
        elements,
    })
}

/// True when no non-identity automorphism has a fixed point.
pub fn acts_freely(group: &AutomorphismGroup) -> bool {
    group.elements.iter().all(|p| {
        let is_identity = p.iter().enumerate().all(|(i, &img)| i == img);
        is_identity || p.iter().enumerate().all(|(i, &img)| i != img)
    })
}

/// All non-identity elements whose square is the identity.
pub fn involutions(group: &AutomorphismGroup) -> Vec<Vec<usize>> {
    group
        .elements
        .iter()
        .filter(|p| {
            let is_identity = p.iter().enumerate().all(|(i, &img)| i == img);
            !is_identity && p.iter().enumerate().all(|(i, &img)| p[img] == i)
        })
        .cloned()
        .collect()
}

/// Report of the freeness/involution/consistency relationship for one
/// structure, with the automorphisms of `S` acting on `S` as the
/// representation family.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub free: bool,
    pub has_involution: bool,
    pub all_pairs_consistent: bool,
    pub theorem_respected: bool,
}

/// Compute `Aut(S)` and check the implication instance: under a free
/// action, pairwise inconsistency must be accompanied by an involution.
/// When the action is not free the hypothesis fails and the implication
/// is vacuous (reported, not asserted).
pub fn theorem_report(s: &FiniteStructure) -> Result<TheoremReport> {
    let group = automorphisms(s)?;
    let free = acts_freely(&group);
    let has_involution = !involutions(&group).is_empty();
    let maps: Vec<&[usize]> = group.elements.iter().map(|p| p.as_slice()).collect();
    let consistency = pairwise_consistent_maps(s.len(), &maps, s.elements());
    let all_pairs_consistent = consistency.consistent;
    let theorem_respected = !free || all_pairs_consistent || has_involution;
    Ok(TheoremReport {
        free,
        has_involution,
        all_pairs_consistent,
        theorem_respected,
    })
}

fn subsets_up_to(pool: &[Vec<usize>], max: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<Vec<usize>>)> = vec![(0, Vec::new())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (start, chosen) in &frontier {
            for (offset, tuple) in pool.iter().enumerate().skip(*start) {
                let mut grown = chosen.clone();
                grown.push(tuple.clone());
                out.push(grown.clone());
                next.push((offset + 1, grown));
            }
        }
        frontier = next;
    }
    out
}

/// Every structure on carriers of size 1..=`max_size` whose vocabulary
/// is one unary and one binary relation holding at most `max_tuples`
/// tuples in total (empty relations are omitted, so single-relation and
/// relation-free structures are included).
pub fn enumerate_small_structures(max_size: usize, max_tuples: usize) -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for size in 1..=max_size {
        let base = FiniteStructure::numbered(size).expect("positive size");
        let unary_pool: Vec<Vec<usize>> = (0..size).map(|i| vec![i]).collect();
        let binary_pool: Vec<Vec<usize>> = (0..size)
            .flat_map(|i| (0..size).map(move |j| vec![i, j]))
            .collect();
        let unary_choices = subsets_up_to(&unary_pool, max_tuples);
        for unary in &unary_choices {
            let remaining = max_tuples - unary.len();
            for binary in subsets_up_to(&binary_pool, remaining) {
                let mut s = base.clone();
                if !unary.is_empty() {
                    s.add_relation_indices("u", 1, unary.clone()).expect("valid tuples");
                }
                if !binary.is_empty() {
                    s.add_relation_indices("r", 2, binary).expect("valid tuples");
                }
                out.push(s);
            }
        }
    }
    out
}

/// The hand-counting instance: the numbers one through five represented
/// by the identity and by the swap of one and two.
pub fn fingers_instance() -> (FiniteStructure, RepresentationMap, RepresentationMap) {
    let s = FiniteStructure::numbered(5).expect("five elements");
    let id = RepresentationMap::new(s.clone(), s.clone(), vec![0, 1, 2, 3, 4])
        .expect("identity is a representation");
    let swap = RepresentationMap::new(s.clone(), s.clone(), vec![1, 0, 2, 3, 4])
        .expect("a transposition is a representation of a relation-free carrier");
    (s, id, swap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn directed_cycle(n: usize) -> FiniteStructure {
        let mut s = FiniteStructure::numbered(n).unwrap();
        let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        s.add_relation_indices("edge", 2, edges).unwrap();
        s
    }

    #[test]
    fn structure_construction_validates() {
        assert!(FiniteStructure::new(vec![]).is_err());
        assert!(FiniteStructure::new(vec!["a".into(), "a".into()]).is_err());
        let mut s = FiniteStructure::numbered(3).unwrap();
        assert!(s.add_relation_indices("r", 2, vec![vec![0, 5]]).is_err());
        assert!(s.add_relation_indices("r", 2, vec![vec![0]]).is_err());
        s.add_relation_indices("r", 2, vec![vec![0, 1]]).unwrap();
        assert!(s.add_relation_indices("r", 1, vec![vec![0]]).is_err());
    }

    #[test]
    fn identity_is_a_representation() {
        let s = directed_cycle(3);
        assert!(is_representation(&[0, 1, 2], &s, &s).unwrap());
    }

    #[test]
    fn constant_map_is_not_a_representation() {
        let s = FiniteStructure::numbered(3).unwrap();
        assert!(!is_representation(&[0, 0, 0], &s, &s).unwrap());
    }

    #[test]
    fn rotation_preserves_the_directed_cycle() {
        let s = directed_cycle(3);
        // a→b→c→a rotated: each of the three edges maps to an edge.
        assert!(is_representation(&[1, 2, 0], &s, &s).unwrap());
        // A transposition breaks the orientation.
        assert!(!is_representation(&[1, 0, 2], &s, &s).unwrap());
    }

    #[test]
    fn representation_errors_on_out_of_range_images() {
        let s = FiniteStructure::numbered(3).unwrap();
        let t = FiniteStructure::numbered(2).unwrap();
        assert!(is_representation(&[0, 1, 2], &s, &t).is_err());
    }

    #[test]
    fn union_pair_of_identical_maps_is_singleton_valued() {
        let s = FiniteStructure::numbered(4).unwrap();
        let r = RepresentationMap::new(s.clone(), s.clone(), vec![2, 3, 0, 1]).unwrap();
        let u = union_pair(&r, &r).unwrap();
        for (i, set) in u.iter().enumerate() {
            assert_eq!(set.len(), 1);
            assert!(set.contains(&r.apply(i)));
        }
    }

    #[test]
    fn union_pair_on_fingers_instance() {
        let (_, id, swap) = fingers_instance();
        let u = union_pair(&id, &swap).unwrap();
        assert_eq!(u[0], BTreeSet::from([0, 1]));
        assert_eq!(u[1], BTreeSet::from([0, 1]));
        assert_eq!(u[2], BTreeSet::from([2]));
        assert_eq!(u[3], BTreeSet::from([3]));
        assert_eq!(u[4], BTreeSet::from([4]));
    }

    #[test]
    fn union_pair_of_rotations_has_distinct_values() {
        let s = FiniteStructure::numbered(3).unwrap();
        let id = RepresentationMap::new(s.clone(), s.clone(), vec![0, 1, 2]).unwrap();
        let rot = RepresentationMap::new(s.clone(), s.clone(), vec![1, 2, 0]).unwrap();
        let u = union_pair(&id, &rot).unwrap();
        assert_eq!(u[0], BTreeSet::from([0, 1]));
        assert_eq!(u[1], BTreeSet::from([1, 2]));
        assert_eq!(u[2], BTreeSet::from([0, 2]));
        let distinct: HashSet<_> = u.iter().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn fingers_instance_is_inconsistent_with_witness_one_two() {
        let (_, id, swap) = fingers_instance();
        let report = pairwise_consistent(&[id, swap]).unwrap();
        assert!(!report.consistent);
        let w = report.witness.unwrap();
        assert_eq!((w.s.as_str(), w.t.as_str()), ("1", "2"));
        assert_eq!((w.rep_i, w.rep_j), (0, 1));
    }

    #[test]
    fn single_representation_is_consistent() {
        let (_, id, _) = fingers_instance();
        let report = pairwise_consistent(&[id]).unwrap();
        assert!(report.consistent);
        assert!(pairwise_consistent(&[]).is_err());
    }

    #[test]
    fn rotations_of_c3_are_pairwise_consistent() {
        // Brute force over all pairs (s, t): {s+a, s+b} = {t+a, t+b}
        // forces 2s = 2t, hence s = t mod 3.
        let s = FiniteStructure::numbered(3).unwrap();
        let reps: Vec<RepresentationMap> = [vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]
            .into_iter()
            .map(|m| RepresentationMap::new(s.clone(), s.clone(), m).unwrap())
            .collect();
        let report = pairwise_consistent(&reps).unwrap();
        assert!(report.consistent);
    }

    #[test]
    fn consistency_is_order_independent() {
        let (_, id, swap) = fingers_instance();
        let a = pairwise_consistent(&[id.clone(), swap.clone()]).unwrap();
        let b = pairwise_consistent(&[swap, id]).unwrap();
        assert_eq!(a.consistent, b.consistent);
        assert!(!a.consistent && !b.consistent);
    }

    #[test]
    fn automorphisms_of_relation_free_carrier_form_symmetric_group() {
        let s = FiniteStructure::numbered(5).unwrap();
        let g = automorphisms(&s).unwrap();
        assert_eq!(g.len(), 120);
        assert!(!acts_freely(&g));
    }

    #[test]
    fn automorphisms_of_directed_3_cycle_are_rotations() {
        let s = directed_cycle(3);
        let g = automorphisms(&s).unwrap();
        assert_eq!(g.len(), 3);
        let expected: HashSet<Vec<usize>> =
            [vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]].into_iter().collect();
        let got: HashSet<Vec<usize>> = g.elements().iter().cloned().collect();
        assert_eq!(got, expected);
        assert!(acts_freely(&g));
        assert!(involutions(&g).is_empty());
    }

    #[test]
    fn unary_relation_pins_its_element() {
        let mut s = FiniteStructure::numbered(3).unwrap();
        s.add_relation_indices("marked", 1, vec![vec![0]]).unwrap();
        let g = automorphisms(&s).unwrap();
        assert_eq!(g.len(), 2);
        for p in g.elements() {
            assert_eq!(p[0], 0);
        }
    }

    #[test]
    fn group_order_divides_carrier_factorial() {
        for n in 1..=5 {
            let s = directed_cycle(n);
            let g = automorphisms(&s).unwrap();
            let fact: usize = (1..=n).product();
            assert_eq!(fact % g.len(), 0, "n={n}");
        }
    }

    #[test]
    fn size_limit_enforced() {
        let s = FiniteStructure::numbered(9).unwrap();
        assert!(matches!(automorphisms(&s), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn involution_census_of_s5() {
        // Permutations of order two in the symmetric group on five
        // points: 10 transpositions plus 15 double transpositions.
        let s = FiniteStructure::numbered(5).unwrap();
        let g = automorphisms(&s).unwrap();
        assert_eq!(involutions(&g).len(), 25);
    }

    #[test]
    fn trivial_group_is_free_with_no_involutions() {
        // An asymmetric tournament on 3 points: edges 1→2, 1→3, 2→3.
        let mut s = FiniteStructure::numbered(3).unwrap();
        s.add_relation_indices("edge", 2, vec![vec![0, 1], vec![0, 2], vec![1, 2]])
            .unwrap();
        let g = automorphisms(&s).unwrap();
        assert_eq!(g.len(), 1);
        assert!(acts_freely(&g));
        assert!(involutions(&g).is_empty());
    }

    #[test]
    fn theorem_report_on_relation_free_five_points() {
        let s = FiniteStructure::numbered(5).unwrap();
        let r = theorem_report(&s).unwrap();
        assert!(!r.free);
        assert!(r.has_involution);
        assert!(!r.all_pairs_consistent);
        assert!(r.theorem_respected);
    }

    #[test]
    fn theorem_report_on_directed_3_cycle() {
        let r = theorem_report(&directed_cycle(3)).unwrap();
        assert!(r.free);
        assert!(!r.has_involution);
        assert!(r.all_pairs_consistent);
        assert!(r.theorem_respected);
    }

    #[test]
    fn enumeration_counts_match_binomial_sums() {
        // For carrier size m with u unary slots and b binary slots, the
        // number of (U, B) choices with |U| + |B| <= 3 is
        // sum over k_u + k_b <= 3 of C(u, k_u) * C(b, k_b).
        fn choose(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        let mut expected = 0;
        for size in 1..=5 {
            let (u, b) = (size, size * size);
            for ku in 0..=3 {
                for kb in 0..=(3 - ku) {
                    expected += choose(u, ku) * choose(b, kb);
                }
            }
        }
        let all = enumerate_small_structures(5, 3);
        assert_eq!(all.len(), expected);
        assert_eq!(expected, 6222);
    }

    #[test]
    fn enumerated_structures_are_distinct_and_well_formed() {
        let all = enumerate_small_structures(3, 2);
        let mut seen = HashSet::new();
        for s in &all {
            let key = format!("{s:?}");
            assert!(seen.insert(key), "duplicate structure in enumeration");
            let total: usize = s.relations().values().map(|r| r.tuples.len()).sum();
            assert!(total <= 2);
            assert!(s.len() <= 3);
        }
    }

    #[test]
    fn theorem_report_on_directed_4_cycle() {
        // C4 acts freely and contains the half-turn involution, so the
        // implication holds with a true consequent.
        let r = theorem_report(&directed_cycle(4)).unwrap();
        assert!(r.free);
        assert!(r.has_involution);
        assert!(r.theorem_respected);
        assert!(!r.all_pairs_consistent);
    }
}
