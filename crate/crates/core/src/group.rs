//! Reduced words over the rank-2 free group and the uniform step measure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator axis of the rank-2 free group `<a, b>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    A,
    B,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::A => Axis::B,
            Axis::B => Axis::A,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Axis::A => 'a',
            Axis::B => 'b',
        }
    }
}

/// One of the four generators a, a^-1, b, b^-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub axis: Axis,
    /// +1 or -1.
    pub sign: i8,
}

pub const LETTER_A: Letter = Letter { axis: Axis::A, sign: 1 };
pub const LETTER_A_INV: Letter = Letter { axis: Axis::A, sign: -1 };
pub const LETTER_B: Letter = Letter { axis: Axis::B, sign: 1 };
pub const LETTER_B_INV: Letter = Letter { axis: Axis::B, sign: -1 };

impl Letter {
    pub const ALL: [Letter; 4] = [LETTER_A, LETTER_A_INV, LETTER_B, LETTER_B_INV];

    pub fn new(axis: Axis, sign: i8) -> Letter {
        debug_assert!(sign == 1 || sign == -1);
        Letter { axis, sign }
    }

    pub fn inverse(self) -> Letter {
        Letter { axis: self.axis, sign: -self.sign }
    }

    /// Position in `Letter::ALL`; used for transition tables.
    pub fn index(self) -> usize {
        match (self.axis, self.sign) {
            (Axis::A, 1) => 0,
            (Axis::A, _) => 1,
            (Axis::B, 1) => 2,
            (Axis::B, _) => 3,
        }
    }

    pub fn symbol(self) -> char {
        match (self.axis, self.sign) {
            (Axis::A, 1) => 'a',
            (Axis::A, _) => 'A',
            (Axis::B, 1) => 'b',
            (Axis::B, _) => 'B',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'a' => Some(LETTER_A),
            'A' => Some(LETTER_A_INV),
            'b' => Some(LETTER_B),
            'B' => Some(LETTER_B_INV),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A reduced word: no adjacent letter is followed by its inverse.
///
/// Text form uses `a`, `A` (= a^-1), `b`, `B` (= b^-1); the empty word is the
/// literal `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Builds a reduced word from an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends a letter, cancelling against the current last letter.
    pub fn push(&mut self, l: Letter) {
        match self.0.last() {
            Some(last) if *last == l.inverse() => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    /// Reduced concatenation; total, associative, identity is the empty word.
    pub fn concat(&self, right: &Word) -> Word {
        let mut out = self.clone();
        for &l in right.letters() {
            out.push(l);
        }
        out
    }

    /// Reverse-and-flip-signs. `w.concat(&w.inverse())` is the empty word.
    pub fn inverse(&self) -> Word {
        // Reversal of a reduced word is already reduced.
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn parse(s: &str) -> Result<Word> {
        if s == "e" {
            return Ok(Word::empty());
        }
        let mut w = Word::empty();
        for c in s.chars() {
            let l = Letter::from_symbol(c).ok_or_else(|| Error::BadWord(s.to_string()))?;
            w.push(l);
        }
        Ok(w)
    }

    /// The k-th power of a single letter, |k| letters long.
    pub fn letter_power(axis: Axis, k: i64) -> Word {
        let sign = if k >= 0 { 1 } else { -1 };
        Word(vec![Letter::new(axis, sign); k.unsigned_abs() as usize])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

/// The uniform step measure on the 2r generators of the rank-r free group.
///
/// Everything downstream of this module fixes r = 2; the rank is configurable
/// here only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMeasure {
    rank: u32,
}

impl StepMeasure {
    pub fn new(rank: u32) -> Result<StepMeasure> {
        if rank < 2 {
            return Err(Error::RankTooSmall(rank));
        }
        Ok(StepMeasure { rank })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Each letter weighs exactly 1/(2 rank); this is the denominator.
    pub fn weight_denominator(&self) -> u32 {
        2 * self.rank
    }

    pub fn weight(&self) -> f64 {
        1.0 / f64::from(self.weight_denominator())
    }

    /// The four (letter, weight) pairs; only the rank-2 support is
    /// representable as `Letter` values.
    pub fn letter_weights(&self) -> Result<[(Letter, f64); 4]> {
        if self.rank != 2 {
            return Err(Error::UnsupportedRank(self.rank));
        }
        let w = self.weight();
        Ok([
            (LETTER_A, w),
            (LETTER_A_INV, w),
            (LETTER_B, w),
            (LETTER_B_INV, w),
        ])
    }
}

/// The rank-2 uniform measure used everywhere outside this module.
pub fn rank2_measure() -> StepMeasure {
    StepMeasure { rank: 2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduce_concat_examples() {
        assert_eq!(w("ab").concat(&w("Ba")), w("aa"));
        assert_eq!(w("a").concat(&w("A")), Word::empty());
        assert_eq!(w("abab").concat(&w("BABA")), Word::empty());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(w("AA").inverse(), w("aa"));
    }

    #[test]
    fn step_measure_weights() {
        let m = StepMeasure::new(2).unwrap();
        assert_eq!(m.weight(), 0.25);
        let total: f64 = m.letter_weights().unwrap().iter().map(|(_, p)| p).sum();
        assert_eq!(total, 1.0);
        assert_eq!(StepMeasure::new(3).unwrap().weight_denominator(), 6);
        assert!(matches!(StepMeasure::new(1), Err(Error::RankTooSmall(1))));
    }

    #[test]
    fn display_round_trip() {
        assert_eq!(w("e"), Word::empty());
        assert_eq!(format!("{}", Word::empty()), "e");
        assert_eq!(format!("{}", w("aBa")), "aBa");
        assert!(Word::parse("axb").is_err());
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0usize..4, 0..=max_len)
            .prop_map(|ix| Word::from_letters(ix.into_iter().map(|i| Letter::ALL[i])))
    }

    fn is_reduced(w: &Word) -> bool {
        w.letters().windows(2).all(|p| p[0] != p[1].inverse())
    }

    proptest! {
        #[test]
        fn concat_associative_and_reduced(w1 in arb_word(32), w2 in arb_word(32), w3 in arb_word(32)) {
            let left = w1.concat(&w2).concat(&w3);
            let right = w1.concat(&w2.concat(&w3));
            prop_assert_eq!(&left, &right);
            prop_assert!(is_reduced(&left));
            prop_assert_eq!(w1.concat(&Word::empty()), w1.clone());
            prop_assert_eq!(Word::empty().concat(&w1), w1.clone());
        }

        #[test]
        fn inverse_involution(w1 in arb_word(32)) {
            prop_assert_eq!(w1.inverse().inverse(), w1.clone());
            prop_assert_eq!(w1.concat(&w1.inverse()), Word::empty());
        }
    }
}
