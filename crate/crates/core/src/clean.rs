//! Dead-end assumption lines and the clean book `cl(B)`.

use std::collections::{BTreeSet, HashSet};

use crate::book::{Book, Line, LineKind};
use crate::term::Name;

#[derive(Clone, Debug)]
pub struct CleanReport {
    /// `(position in the input, identifier, round)` in removal order.
    pub removed: Vec<(usize, Name, usize)>,
    pub result: Book,
}

/// Assumption lines whose identifier is the indicator of no later line.
pub fn dead_ends(b: &Book) -> BTreeSet<usize> {
    dead_ends_in(b.lines())
}

fn dead_ends_in(lines: &[Line]) -> BTreeSet<usize> {
    let mut used: HashSet<&Name> = HashSet::new();
    let mut out = BTreeSet::new();
    for (i, l) in lines.iter().enumerate().rev() {
        if l.kind() == LineKind::Assumption && !used.contains(&l.identifier) {
            out.insert(i);
        }
        if let Some(z) = &l.indicator {
            used.insert(z);
        }
    }
    out
}

pub fn is_clean(b: &Book) -> bool {
    dead_ends(b).is_empty()
}

/// Removes dead ends round by round until none are left. Every round removes
/// all dead ends present at its start.
pub fn clean_book(b: &Book) -> CleanReport {
    let mut lines: Vec<(usize, Line)> = b.lines().iter().cloned().enumerate().collect();
    let mut removed = Vec::new();
    let mut round = 0;
    loop {
        let current: Vec<Line> = lines.iter().map(|(_, l)| l.clone()).collect();
        let dead = dead_ends_in(&current);
        if dead.is_empty() {
            break;
        }
        round += 1;
        // later lines first, matching the order in which they become exposed
        for &i in dead.iter().rev() {
            removed.push((lines[i].0, lines[i].1.identifier.clone(), round));
        }
        let mut k = 0;
        lines.retain(|_| {
            k += 1;
            !dead.contains(&(k - 1))
        });
    }
    let kept: Vec<Line> = lines.into_iter().map(|(_, l)| l).collect();
    let result = if removed.is_empty() {
        b.clone()
    } else if b.is_ok() {
        Book::from_lines(kept.clone(), b.config()).unwrap_or_else(|_| Book::from_lines_unchecked(kept))
    } else {
        Book::from_lines_unchecked(kept)
    };
    CleanReport { removed, result }
}
