//! Finite monoids, presentations, and shortlex string rewriting.
//!
//! A finite monoid given by its multiplication table has a canonical
//! presentation read off the table: one generator per non-identity element
//! and one relation `g_a g_b = g_ab` per ordered pair of non-identity
//! elements. Completing such a presentation into a confluent rewriting system
//! lets us recover the monoid as its set of irreducible words under
//! concatenate-then-reduce, and adjoining formal inverses and completing
//! again computes the group completion. Completion may give up within its
//! limits, in which case the system is reported incomplete rather than ever
//! claiming a confluence it did not verify.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

/// A word over generator indices.
pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("table must be {order} x {order}")]
    BadTableShape { order: usize },
    #[error("entry {value} at ({row}, {col}) exceeds order {order}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("element 0 is not an identity: 0 * {x} or {x} * 0 differs from {x}")]
    BadIdentity { x: usize },
    #[error("not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("relation uses generator {index}, only {count} declared")]
    UnknownGenerator { index: usize, count: usize },
    #[error("table text, line {line}: {message}")]
    TableSyntax { line: usize, message: String },
    #[error("rewriting system is not complete")]
    Incomplete,
    #[error("census exceeded {limit} words")]
    CensusOverflow { limit: usize },
    #[error("order {order} too large for exhaustive isomorphism search")]
    OrderTooLarge { order: usize },
}

/// A finite monoid as a multiplication table over elements `0..order`, with
/// `0` the identity. Associativity and the identity laws are checked at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidTable {
    order: usize,
    table: Vec<usize>,
}

impl MonoidTable {
    pub fn new(order: usize, rows: Vec<Vec<usize>>) -> Result<MonoidTable, MonoidError> {
        if rows.len() != order || rows.iter().any(|r| r.len() != order) {
            return Err(MonoidError::BadTableShape { order });
        }
        let mut table = Vec::with_capacity(order * order);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(MonoidError::EntryOutOfRange { row: i, col: j, value: v, order });
                }
                table.push(v);
            }
        }
        let m = MonoidTable { order, table };
        for x in 0..order {
            if m.mul(0, x) != x || m.mul(x, 0) != x {
                return Err(MonoidError::BadIdentity { x });
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if m.mul(m.mul(a, b), c) != m.mul(a, m.mul(b, c)) {
                        return Err(MonoidError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    /// Parses the table text format: a line `order m` followed by `m` rows of
    /// `m` integers; `#` starts a comment.
    pub fn parse(text: &str) -> Result<MonoidTable, MonoidError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines
            .next()
            .ok_or(MonoidError::TableSyntax { line: 1, message: "empty table".into() })?;
        let mut toks = header.split_whitespace();
        if toks.next() != Some("order") {
            return Err(MonoidError::TableSyntax { line, message: "expected `order m`".into() });
        }
        let order: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(MonoidError::TableSyntax { line, message: "expected `order m`".into() })?;
        let mut rows = Vec::with_capacity(order);
        for _ in 0..order {
            let (line, row_text) = lines.next().ok_or(MonoidError::TableSyntax {
                line: 0,
                message: format!("expected {order} table rows"),
            })?;
            let row: Result<Vec<usize>, _> = row_text.split_whitespace().map(|t| t.parse()).collect();
            let row = row.map_err(|_| MonoidError::TableSyntax {
                line,
                message: "rows must contain integers".into(),
            })?;
            rows.push(row);
        }
        MonoidTable::new(order, rows)
    }

    pub fn render(&self) -> String {
        let mut out = format!("order {}\n", self.order);
        for i in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|j| self.mul(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn trivial() -> MonoidTable {
        MonoidTable::new(1, vec![vec![0]]).unwrap()
    }

    pub fn cyclic(k: usize) -> MonoidTable {
        let rows = (0..k).map(|i| (0..k).map(|j| (i + j) % k).collect()).collect();
        MonoidTable::new(k, rows).unwrap()
    }

    pub fn klein_four() -> MonoidTable {
        let rows = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
        MonoidTable::new(4, rows).unwrap()
    }

    /// The two-element monoid `{1, e}` with `e * e = e`.
    pub fn idempotent_pair() -> MonoidTable {
        MonoidTable::new(2, vec![vec![0, 1], vec![1, 1]]).unwrap()
    }

    /// Two left zeros with an identity adjoined: `x * y = x` off the identity.
    pub fn left_zero_with_identity() -> MonoidTable {
        MonoidTable::new(3, vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]]).unwrap()
    }

    /// The bundled test catalog of small monoids.
    pub fn catalog() -> Vec<(&'static str, MonoidTable)> {
        vec![
            ("trivial", MonoidTable::trivial()),
            ("Z2", MonoidTable::cyclic(2)),
            ("Z3", MonoidTable::cyclic(3)),
            ("Z4", MonoidTable::cyclic(4)),
            ("klein_four", MonoidTable::klein_four()),
            ("idempotent_pair", MonoidTable::idempotent_pair()),
            ("left_zero_with_identity", MonoidTable::left_zero_with_identity()),
        ]
    }
}

/// Generators and relations. Relation words are over generator indices;
/// generator order is the shortlex letter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<(Word, Word)>,
}

impl MonoidPresentation {
    pub fn new(
        generators: Vec<String>,
        relations: Vec<(Word, Word)>,
    ) -> Result<MonoidPresentation, MonoidError> {
        let count = generators.len();
        for (l, r) in &relations {
            for &g in l.iter().chain(r) {
                if g >= count {
                    return Err(MonoidError::UnknownGenerator { index: g, count });
                }
            }
        }
        Ok(MonoidPresentation { generators, relations })
    }

    pub fn word_to_string(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&g| self.generators[g].as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// The table presentation of a finite monoid: generators `g_e` for each
/// non-identity element `e`, relations `g_a g_b = g_ab` (the right side empty
/// when `ab` is the identity). Pairs involving the identity are degenerate
/// and contribute nothing.
pub fn nerve_presentation(t: &MonoidTable) -> MonoidPresentation {
    let generators: Vec<String> = (1..t.order()).map(|e| format!("g{e}")).collect();
    let mut relations = Vec::new();
    for a in 1..t.order() {
        for b in 1..t.order() {
            let ab = t.mul(a, b);
            let rhs: Word = if ab == 0 { vec![] } else { vec![ab - 1] };
            relations.push((vec![a - 1, b - 1], rhs));
        }
    }
    MonoidPresentation { generators, relations }
}

/// An oriented string rewriting system. Every rule strictly decreases the
/// shortlex order (length first, then letters by generator index), so
/// reduction always terminates; `complete` records whether every critical
/// pair was seen to resolve, which with termination gives confluence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewritingSystem {
    generators: Vec<String>,
    rules: Vec<(Word, Word)>,
    complete: bool,
}

fn shortlex_less(a: &[usize], b: &[usize]) -> bool {
    (a.len(), a) < (b.len(), b)
}

impl RewritingSystem {
    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rules(&self) -> &[(Word, Word)] {
        &self.rules
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Leftmost reduction to an irreducible word; for a complete system this
    /// is the unique normal form whatever the strategy.
    pub fn reduce(&self, w: &[usize]) -> Word {
        let mut cur = w.to_vec();
        'again: loop {
            for pos in 0..=cur.len() {
                for (l, r) in &self.rules {
                    if pos + l.len() <= cur.len() && cur[pos..pos + l.len()] == l[..] {
                        cur.splice(pos..pos + l.len(), r.iter().copied());
                        continue 'again;
                    }
                }
            }
            return cur;
        }
    }

    /// Whether any rule left side occurs as a factor.
    pub fn is_irreducible(&self, w: &[usize]) -> bool {
        (0..=w.len()).all(|pos| {
            self.rules
                .iter()
                .all(|(l, _)| pos + l.len() > w.len() || w[pos..pos + l.len()] != l[..])
        })
    }

    pub fn rule_strings(&self) -> Vec<String> {
        let render = |w: &[usize]| {
            if w.is_empty() {
                "1".to_string()
            } else {
                w.iter().map(|&g| self.generators[g].as_str()).collect::<Vec<_>>().join(" ")
            }
        };
        self.rules.iter().map(|(l, r)| format!("{} -> {}", render(l), render(r))).collect()
    }
}

/// Runs shortlex completion on a presentation.
///
/// Equations are processed breadth-first; each adopted rule is superposed
/// against all rules (both orders, including itself) and older rules are kept
/// reduced with respect to newer ones. The run stops claiming completeness as
/// soon as it must drop a rule longer than `max_len` or would exceed
/// `max_rules`; the returned system is still a usable terminating reducer.
pub fn knuth_bendix(p: &MonoidPresentation, max_rules: usize, max_len: usize) -> RewritingSystem {
    let mut system = RewritingSystem {
        generators: p.generators.clone(),
        rules: Vec::new(),
        complete: false,
    };
    let mut queue: VecDeque<(Word, Word)> = p.relations.iter().cloned().collect();
    let mut gave_up = false;

    while let Some((a, b)) = queue.pop_front() {
        let a = system.reduce(&a);
        let b = system.reduce(&b);
        if a == b {
            continue;
        }
        let (lhs, rhs) = if shortlex_less(&a, &b) { (b, a) } else { (a, b) };
        if lhs.len() > max_len {
            gave_up = true;
            continue;
        }
        if system.rules.len() >= max_rules {
            gave_up = true;
            break;
        }

        // retire rules the new rule reduces, and keep right sides normal
        let probe = RewritingSystem {
            generators: Vec::new(),
            rules: vec![(lhs.clone(), rhs.clone())],
            complete: false,
        };
        let mut kept = Vec::with_capacity(system.rules.len() + 1);
        for (l, r) in std::mem::take(&mut system.rules) {
            if !probe.is_irreducible(&l) {
                queue.push_back((l, r));
            } else {
                kept.push((l, r));
            }
        }
        system.rules = kept;
        for i in 0..system.rules.len() {
            let reduced = probe.reduce(&system.rules[i].1);
            system.rules[i].1 = system.reduce(&reduced);
        }
        system.rules.push((lhs.clone(), rhs.clone()));

        // critical pairs of the new rule against everything, both roles
        let snapshot = system.rules.clone();
        for (l2, r2) in &snapshot {
            push_critical_pairs(&lhs, &rhs, l2, r2, &mut queue);
            push_critical_pairs(l2, r2, &lhs, &rhs, &mut queue);
        }
    }

    system.complete = !gave_up;
    system.rules.sort_by(|(l1, _), (l2, _)| (l1.len(), l1).cmp(&(l2.len(), l2)));
    system
}

/// Superpositions of `l1 -> r1` over `l2 -> r2`: proper suffix/prefix
/// overlaps and full containment of `l2` inside `l1`.
fn push_critical_pairs(
    l1: &[usize],
    r1: &[usize],
    l2: &[usize],
    r2: &[usize],
    queue: &mut VecDeque<(Word, Word)>,
) {
    let max_k = l1.len().min(l2.len());
    for k in 1..max_k {
        if l1[l1.len() - k..] == l2[..k] {
            // the word l1 . l2[k..] reduces two ways
            let mut left: Word = r1.to_vec();
            left.extend_from_slice(&l2[k..]);
            let mut right: Word = l1[..l1.len() - k].to_vec();
            right.extend_from_slice(r2);
            queue.push_back((left, right));
        }
    }
    if l2.len() <= l1.len() {
        for start in 0..=l1.len() - l2.len() {
            if &l1[start..start + l2.len()] == l2 {
                let left: Word = r1.to_vec();
                let mut right: Word = l1[..start].to_vec();
                right.extend_from_slice(r2);
                right.extend_from_slice(&l1[start + l2.len()..]);
                queue.push_back((left, right));
            }
        }
    }
}

/// Irreducible words up to a length bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForms {
    /// Lexicographic order, with a prefix preceding its extensions.
    pub forms: Vec<Word>,
    /// True when no irreducible word of length `bound + 1` exists and the
    /// set is closed under concatenate-then-reduce.
    pub finite_and_closed: bool,
}

/// Enumerates irreducible words up to `length_bound` for a complete system.
pub fn normal_forms(r: &RewritingSystem, length_bound: usize) -> Result<NormalForms, MonoidError> {
    if !r.is_complete() {
        return Err(MonoidError::Incomplete);
    }
    let alphabet = r.generators.len();
    let mut forms: Vec<Word> = Vec::new();
    // preorder DFS emits lexicographic order with prefixes first
    let mut stack: Vec<Word> = vec![vec![]];
    let mut frontier_extends = false;
    while let Some(w) = stack.pop() {
        forms.push(w.clone());
        if w.len() == length_bound {
            if (0..alphabet).any(|g| {
                let mut ext = w.clone();
                ext.push(g);
                ends_irreducible(r, &ext)
            }) {
                frontier_extends = true;
            }
            continue;
        }
        for g in (0..alphabet).rev() {
            let mut ext = w.clone();
            ext.push(g);
            if ends_irreducible(r, &ext) {
                stack.push(ext);
            }
        }
    }
    let set: BTreeSet<&Word> = forms.iter().collect();
    let closed = forms.iter().all(|u| {
        forms.iter().all(|v| {
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            set.contains(&r.reduce(&uv))
        })
    });
    Ok(NormalForms { forms, finite_and_closed: !frontier_extends && closed })
}

/// For a word whose proper prefix is already irreducible, only factors
/// touching the last letter can be rule left sides.
fn ends_irreducible(r: &RewritingSystem, w: &[usize]) -> bool {
    r.rules
        .iter()
        .all(|(l, _)| l.len() > w.len() || w[w.len() - l.len()..] != l[..])
}

/// The irreducible language of a complete system, decided exactly.
///
/// Tracking only the longest suffix that is a proper prefix of some rule left
/// side gives a finite automaton recognizing the irreducible words. If an
/// irreducible word as long as the state count exists, some state repeats
/// along it and the word pumps, so the language is infinite; otherwise the
/// language runs out at some earlier length and is listed in full.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Census {
    Finite { forms: Vec<Word> },
    Infinite { witness: Word },
}

pub fn census(r: &RewritingSystem, max_words: usize) -> Result<Census, MonoidError> {
    if !r.is_complete() {
        return Err(MonoidError::Incomplete);
    }
    let mut prefixes: BTreeSet<Word> = BTreeSet::new();
    for (l, _) in &r.rules {
        for k in 1..l.len() {
            prefixes.insert(l[..k].to_vec());
        }
    }
    let pump_length = prefixes.len() + 1;
    let alphabet = r.generators.len();

    let mut all: Vec<Word> = vec![vec![]];
    let mut level: Vec<Word> = vec![vec![]];
    for _ in 0..pump_length {
        let mut next = Vec::new();
        for w in &level {
            for g in 0..alphabet {
                let mut ext = w.clone();
                ext.push(g);
                if ends_irreducible(r, &ext) {
                    next.push(ext);
                }
            }
        }
        if next.is_empty() {
            return Ok(Census::Finite { forms: all });
        }
        if all.len() + next.len() > max_words {
            return Err(MonoidError::CensusOverflow { limit: max_words });
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    Ok(Census::Infinite { witness: level.remove(0) })
}

/// Checks that the irreducible words of the completed table presentation,
/// multiplied by concatenate-then-reduce, form a monoid isomorphic to the
/// table. The isomorphism is found by exhaustive search over bijections
/// fixing the identities.
pub fn fundamental_monoid_check(t: &MonoidTable) -> Result<bool, MonoidError> {
    let m = t.order();
    if m > 9 {
        return Err(MonoidError::OrderTooLarge { order: m });
    }
    let p = nerve_presentation(t);
    let rs = knuth_bendix(&p, 64.max(4 * m * m), 16);
    if !rs.is_complete() {
        return Err(MonoidError::Incomplete);
    }
    let forms = match census(&rs, 10_000)? {
        Census::Finite { forms } => forms,
        Census::Infinite { .. } => return Ok(false),
    };
    if forms.len() != m {
        return Ok(false);
    }
    // candidate images for elements 1..m; the identity is pinned to the empty word
    let empty_at = forms.iter().position(|w| w.is_empty()).expect("empty word is irreducible");
    let mut others: Vec<usize> = (0..forms.len()).filter(|&i| i != empty_at).collect();
    let found = permutations(&mut others, 0, &mut |perm| {
        let image = |e: usize| -> &Word {
            if e == 0 {
                &forms[empty_at]
            } else {
                &forms[perm[e - 1]]
            }
        };
        (0..m).all(|a| {
            (0..m).all(|b| {
                let mut ab = image(a).clone();
                ab.extend_from_slice(image(b));
                rs.reduce(&ab) == *image(t.mul(a, b))
            })
        })
    });
    Ok(found)
}

/// Runs `check` over all permutations of `items`; true as soon as one passes.
fn permutations(items: &mut Vec<usize>, k: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == items.len() {
        return check(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        if permutations(items, k + 1, check) {
            return true;
        }
        items.swap(k, i);
    }
    false
}

/// A group presentation obtained by adjoining formal inverses, its completed
/// system, and the resulting normal-form census.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCompletion {
    pub presentation: MonoidPresentation,
    pub system: RewritingSystem,
    pub census: Census,
    /// Whether the original relations still collapse in the group system,
    /// i.e. the canonical generator-to-generator map is a homomorphism.
    pub hom_respected: bool,
}

impl GroupCompletion {
    /// Group order when the census is finite.
    pub fn finite_order(&self) -> Option<usize> {
        match &self.census {
            Census::Finite { forms } => Some(forms.len()),
            Census::Infinite { .. } => None,
        }
    }
}

/// Adjoins an inverse generator per generator (relations `g g' = g' g = 1`),
/// completes, and takes the census of irreducible words.
pub fn group_completion(
    p: &MonoidPresentation,
    max_rules: usize,
    max_len: usize,
) -> Result<GroupCompletion, MonoidError> {
    let k = p.generators.len();
    let mut generators = p.generators.clone();
    generators.extend(p.generators.iter().map(|g| format!("{g}'")));
    let mut relations = p.relations.clone();
    for i in 0..k {
        relations.push((vec![i, k + i], vec![]));
        relations.push((vec![k + i, i], vec![]));
    }
    let presentation = MonoidPresentation { generators, relations };
    let system = knuth_bendix(&presentation, max_rules, max_len);
    if !system.is_complete() {
        return Err(MonoidError::Incomplete);
    }
    let census = census(&system, 100_000)?;
    let hom_respected = p
        .relations
        .iter()
        .all(|(a, b)| system.reduce(a) == system.reduce(b));
    Ok(GroupCompletion { presentation, system, census, hom_respected })
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Census::Finite { forms } => write!(f, "finite of order {}", forms.len()),
            Census::Infinite { .. } => write!(f, "infinite"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_presentation(n: usize) -> MonoidPresentation {
        MonoidPresentation {
            generators: (0..n).map(|i| format!("x{i}")).collect(),
            relations: vec![],
        }
    }

    #[test]
    fn table_validation() {
        assert!(MonoidTable::new(2, vec![vec![0, 1], vec![1, 0]]).is_ok());
        // non-identity first element
        assert!(matches!(
            MonoidTable::new(2, vec![vec![1, 1], vec![1, 1]]),
            Err(MonoidError::BadIdentity { .. })
        ));
        // a non-associative magma
        assert!(matches!(
            MonoidTable::new(3, vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 1]]),
            Err(MonoidError::NotAssociative { .. })
        ));
    }

    #[test]
    fn table_text_round_trip() {
        let t = MonoidTable::cyclic(3);
        let parsed = MonoidTable::parse(&t.render()).unwrap();
        assert_eq!(t, parsed);
        let commented = "# cyclic\norder 2\n0 1\n1 0\n";
        assert_eq!(MonoidTable::parse(commented).unwrap(), MonoidTable::cyclic(2));
        assert!(MonoidTable::parse("order 2\n0 1\n").is_err());
    }

    #[test]
    fn nerve_presentations() {
        let z2 = nerve_presentation(&MonoidTable::cyclic(2));
        assert_eq!(z2.generators, vec!["g1"]);
        assert_eq!(z2.relations, vec![(vec![0, 0], vec![])]);

        let idem = nerve_presentation(&MonoidTable::idempotent_pair());
        assert_eq!(idem.relations, vec![(vec![0, 0], vec![0])]);

        let trivial = nerve_presentation(&MonoidTable::trivial());
        assert!(trivial.generators.is_empty());
        assert!(trivial.relations.is_empty());
    }

    #[test]
    fn completion_of_small_systems() {
        let z2 = knuth_bendix(&nerve_presentation(&MonoidTable::cyclic(2)), 64, 16);
        assert!(z2.is_complete());
        assert_eq!(z2.rules(), &[(vec![0, 0], vec![])]);

        let idem = knuth_bendix(&nerve_presentation(&MonoidTable::idempotent_pair()), 64, 16);
        assert!(idem.is_complete());
        assert_eq!(idem.rules(), &[(vec![0, 0], vec![0])]);

        let free = knuth_bendix(&free_presentation(1), 64, 16);
        assert!(free.is_complete());
        assert!(free.rules().is_empty());
    }

    #[test]
    fn normal_form_listings() {
        let z2 = knuth_bendix(&nerve_presentation(&MonoidTable::cyclic(2)), 64, 16);
        let nf = normal_forms(&z2, 4).unwrap();
        assert_eq!(nf.forms, vec![vec![], vec![0]]);
        assert!(nf.finite_and_closed);

        let free = knuth_bendix(&free_presentation(1), 64, 16);
        let nf = normal_forms(&free, 3).unwrap();
        assert_eq!(nf.forms, vec![vec![], vec![0], vec![0, 0], vec![0, 0, 0]]);
        assert!(!nf.finite_and_closed);

        let trivial = knuth_bendix(&nerve_presentation(&MonoidTable::trivial()), 64, 16);
        let nf = normal_forms(&trivial, 5).unwrap();
        assert_eq!(nf.forms, vec![Vec::<usize>::new()]);
        assert!(nf.finite_and_closed);
    }

    #[test]
    fn normal_forms_require_completeness() {
        let p = nerve_presentation(&MonoidTable::klein_four());
        let incomplete = knuth_bendix(&p, 2, 16);
        assert!(!incomplete.is_complete());
        assert_eq!(normal_forms(&incomplete, 3), Err(MonoidError::Incomplete));
        assert_eq!(census(&incomplete, 100), Err(MonoidError::Incomplete));
    }

    #[test]
    fn reduction_is_strategy_independent_on_complete_systems() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let rs = knuth_bendix(&nerve_presentation(&MonoidTable::cyclic(4)), 64, 16);
        assert!(rs.is_complete());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let len = rng.gen_range(0..10);
            let w: Word = (0..len).map(|_| rng.gen_range(0..3)).collect();
            let nf = rs.reduce(&w);
            // random-strategy reduction: pick a random applicable rule and position
            let mut cur = w.clone();
            loop {
                let mut applicable = Vec::new();
                for pos in 0..=cur.len() {
                    for (ri, (l, _)) in rs.rules().iter().enumerate() {
                        if pos + l.len() <= cur.len() && cur[pos..pos + l.len()] == l[..] {
                            applicable.push((pos, ri));
                        }
                    }
                }
                match applicable.choose(&mut rng) {
                    None => break,
                    Some(&(pos, ri)) => {
                        let (l, r) = &rs.rules()[ri];
                        let r = r.clone();
                        let llen = l.len();
                        cur.splice(pos..pos + llen, r);
                    }
                }
            }
            assert_eq!(cur, nf);
        }
    }

    #[test]
    fn fundamental_checks_on_catalog() {
        for (name, t) in MonoidTable::catalog() {
            assert_eq!(fundamental_monoid_check(&t), Ok(true), "catalog entry {name}");
        }
    }

    #[test]
    fn group_completion_of_free_monoid_is_infinite_cyclic() {
        let gc = group_completion(&free_presentation(1), 128, 16).unwrap();
        assert!(gc.system.is_complete());
        assert!(gc.hom_respected);
        match &gc.census {
            Census::Infinite { witness } => assert!(!witness.is_empty()),
            other => panic!("expected infinite census, got {other:?}"),
        }
        // powers of the generator stay pairwise distinct normal forms
        for k in 0..5usize {
            let w = vec![0; k];
            assert_eq!(gc.system.reduce(&w), w);
        }
        // the inverse letter is irreducible too and cancels
        assert_eq!(gc.system.reduce(&[0, 1]), Vec::<usize>::new());
    }

    #[test]
    fn group_completion_of_idempotent_is_trivial() {
        let p = MonoidPresentation {
            generators: vec!["x".into()],
            relations: vec![(vec![0, 0], vec![0])],
        };
        let gc = group_completion(&p, 128, 16).unwrap();
        assert_eq!(gc.finite_order(), Some(1));
        assert!(gc.hom_respected);
    }

    #[test]
    fn group_completion_of_z3_has_order_3() {
        let p = nerve_presentation(&MonoidTable::cyclic(3));
        let gc = group_completion(&p, 128, 16).unwrap();
        assert_eq!(gc.finite_order(), Some(3));
        assert!(gc.hom_respected);
    }
}
