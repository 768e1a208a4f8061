//! Combinatorial derivation of cutting sequences.
//!
//! A letter of a cutting sequence is kept when it names a horizontal edge, or
//! when it is the middle of a three-letter word whose two transitions have the
//! same type: both within one level `(00)` or both one level up `(11)`.

use serde::{Deserialize, Serialize};

use crate::diagrams::{transition_diagram, TransitionDiagram};
use crate::geometry::{EdgeRef, Family, Surface};
use crate::{Error, Label, Result};

/// Height of an edge occurrence as seen by a trajectory crossing it.
///
/// Slanted and vertical edges sit at the band they span. A bottom edge at
/// vertex level `k` is entered from band `k - 1`; a top edge at level `k` is
/// left towards band `k`.
fn effective_level(s: &Surface, e: EdgeRef) -> i64 {
    let poly = s.polygon(e.poly);
    let level = poly.edge_level(e.edge) as i64;
    match s.side(e) {
        crate::geometry::Side::Bottom => level - 1,
        _ => level,
    }
}

/// Precomputed transition data for one surface.
#[derive(Clone, Debug)]
pub struct Deriver<'a> {
    surface: &'a Surface,
    diagram: TransitionDiagram,
}

impl<'a> Deriver<'a> {
    pub fn new(surface: &'a Surface) -> Result<Self> {
        Ok(Deriver {
            surface,
            diagram: transition_diagram(surface)?,
        })
    }

    pub fn diagram(&self) -> &TransitionDiagram {
        &self.diagram
    }

    /// `0` if the transition stays at one level, `1` if it goes one up.
    pub fn transition_type(&self, e_in: Label, e_out: Label) -> Result<u8> {
        let s = self.surface;
        let arrow = self
            .diagram
            .arrow(e_in, e_out)
            .ok_or(Error::InadmissiblePair(e_in, e_out))?;
        let occurrence = |l: Label, exit: bool| {
            s.edges_with_label(l)
                .into_iter()
                .find(|e| e.poly == arrow.poly && s.side(*e).is_exit() == exit)
                .ok_or(Error::InadmissiblePair(e_in, e_out))
        };
        let a = occurrence(e_in, false)?;
        let b = occurrence(e_out, true)?;
        match effective_level(s, b) - effective_level(s, a) {
            0 => Ok(0),
            1 => Ok(1),
            _ => Err(Error::InadmissiblePair(e_in, e_out)),
        }
    }

    pub fn is_horizontal(&self, l: Label) -> bool {
        self.surface
            .edges_with_label(l)
            .first()
            .is_some_and(|e| self.surface.side(*e).is_horizontal())
    }

    /// Whether the middle letter of `a b c` is kept.
    pub fn keeps(&self, a: Label, b: Label, c: Label) -> Result<bool> {
        let t1 = self.transition_type(a, b)?;
        let t2 = self.transition_type(b, c)?;
        Ok(self.is_horizontal(b) || t1 == t2)
    }

    /// Marks the interior letters `1..n-1` of a window.
    pub fn derive(&self, labels: &[Label]) -> Result<Derived> {
        if labels.len() < 3 {
            return Err(Error::WindowTooShort(3));
        }
        for (i, w) in labels.windows(2).enumerate() {
            if !self.diagram.has_arrow(w[0], w[1]) {
                return Err(Error::Inadmissible(i));
            }
        }
        let mut out = Derived::default();
        for i in 1..labels.len() - 1 {
            if self.keeps(labels[i - 1], labels[i], labels[i + 1])? {
                out.positions.push(i);
                out.labels.push(labels[i]);
            }
        }
        Ok(out)
    }

    /// All length-two paths of the transition diagram.
    pub fn words(&self) -> Result<Vec<Word3>> {
        let mut out = Vec::new();
        for a in &self.diagram.arrows {
            for b in self.diagram.arrows.iter().filter(|b| b.from == a.to) {
                let types = (
                    self.transition_type(a.from, a.to)?,
                    self.transition_type(b.from, b.to)?,
                );
                out.push(Word3 {
                    labels: [a.from, a.to, b.to],
                    types,
                    kept: self.is_horizontal(a.to) || types.0 == types.1,
                });
            }
        }
        Ok(out)
    }
}

/// Kept letters of a window and their positions in it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derived {
    pub labels: Vec<Label>,
    pub positions: Vec<usize>,
}

/// A three-letter word with its transition types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word3 {
    pub labels: [Label; 3],
    pub types: (u8, u8),
    pub kept: bool,
}

impl Word3 {
    pub fn type_name(&self) -> String {
        format!("({}{})", self.types.0, self.types.1)
    }

    pub fn text(&self) -> String {
        self.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("")
    }
}

pub fn transition_type(s: &Surface, e_in: Label, e_out: Label) -> Result<u8> {
    Deriver::new(s)?.transition_type(e_in, e_out)
}

pub fn derive_combinatorial(s: &Surface, labels: &[Label]) -> Result<Derived> {
    Deriver::new(s)?.derive(labels)
}

pub fn enumerate_words(s: &Surface) -> Result<Vec<Word3>> {
    Deriver::new(s)?.words()
}

/// Positions `1..n-1` whose neighbours agree.
pub fn sandwiched_positions<T: PartialEq>(seq: &[T]) -> Vec<usize> {
    (1..seq.len().saturating_sub(1))
        .filter(|&i| seq[i - 1] == seq[i + 1])
        .collect()
}

/// The sandwich rule, valid for regular polygon surfaces only.
pub fn sandwich_derive(family: Family, labels: &[Label]) -> Result<Derived> {
    if !family.is_regular() {
        return Err(Error::WrongFamily);
    }
    if labels.len() < 3 {
        return Err(Error::WindowTooShort(3));
    }
    let positions = sandwiched_positions(labels);
    Ok(Derived {
        labels: positions.iter().map(|&i| labels[i]).collect(),
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_bouw_moller, build_regular_surface};

    fn word(s: &str) -> [Label; 3] {
        let v: Vec<Label> = s.chars().map(|c| Label(c.to_digit(10).unwrap())).collect();
        [v[0], v[1], v[2]]
    }

    #[test]
    fn table_of_34_words() {
        let s = build_bouw_moller(3, 4).unwrap();
        let words = enumerate_words(&s).unwrap();
        let kept: Vec<String> = words.iter().filter(|w| w.kept).map(|w| w.text()).collect();
        let removed: Vec<String> = words.iter().filter(|w| !w.kept).map(|w| w.text()).collect();
        let mut k = kept.clone();
        k.sort();
        let mut want_k: Vec<String> = ["212", "121", "434", "343", "767", "676", "723", "236", "654", "365", "872", "187"]
            .iter()
            .map(|x| x.to_string())
            .collect();
        want_k.sort();
        assert_eq!(k, want_k);
        let mut r = removed.clone();
        r.sort();
        let mut want_r: Vec<String> = ["218", "123", "721", "436", "234", "543", "765", "367", "672", "876"]
            .iter()
            .map(|x| x.to_string())
            .collect();
        want_r.sort();
        assert_eq!(r, want_r);
        for w in &words {
            if w.labels == word("543") {
                assert_eq!(w.types, (1, 0));
            }
            if w.labels == word("212") {
                assert_eq!(w.types, (0, 0));
            }
            if w.labels == word("187") {
                assert_eq!(w.types, (1, 1));
            }
        }
    }

    #[test]
    fn inadmissible_pair() {
        let s = build_bouw_moller(3, 4).unwrap();
        assert!(matches!(
            transition_type(&s, Label(1), Label(3)),
            Err(Error::InadmissiblePair(..))
        ));
        assert_eq!(transition_type(&s, Label(5), Label(4)).unwrap(), 1);
        assert_eq!(transition_type(&s, Label(1), Label(2)).unwrap(), 0);
    }

    #[test]
    fn derive_errors() {
        let s = build_bouw_moller(3, 4).unwrap();
        let l = |v: &[u32]| v.iter().map(|&x| Label(x)).collect::<Vec<_>>();
        assert!(matches!(derive_combinatorial(&s, &l(&[1, 2])), Err(Error::WindowTooShort(3))));
        assert!(matches!(
            derive_combinatorial(&s, &l(&[1, 2, 1, 3])),
            Err(Error::Inadmissible(2))
        ));
        let d = derive_combinatorial(&s, &l(&[2, 1, 2, 3, 6])).unwrap();
        assert_eq!(d.positions, vec![1, 3]);
    }

    #[test]
    fn sandwich_rule() {
        let l: Vec<Label> = [3, 1, 2, 1, 2, 4].iter().map(|&x| Label(x)).collect();
        let d = sandwich_derive(Family::RegularSingle { n: 8 }, &l).unwrap();
        assert_eq!(d.positions, vec![2, 3]);
        assert!(matches!(
            sandwich_derive(Family::BouwMoller { m: 3, n: 4 }, &l),
            Err(Error::WrongFamily)
        ));
        assert_eq!(sandwiched_positions(&['a', 'b', 'a']), vec![1]);
    }

    #[test]
    fn octagon_types() {
        let s = build_regular_surface(8, false).unwrap();
        let d = Deriver::new(&s).unwrap();
        for w in d.words().unwrap() {
            assert_eq!(w.kept, w.labels[0] == w.labels[2], "{}", w.text());
        }
    }
}
