//! Run-length words over the alphabet `{a, b}` with `a < b`.
//!
//! Words are stored as maximal blocks `a^k` / `b^k` that alternate letters.
//! Eventually periodic words keep the alternation across the seam between
//! preperiod and period and across the period's wrap-around, so every period
//! has an even number of blocks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_graph::{Swaps, TriangleParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Block {
    pub letter: Letter,
    pub exp: u32,
}

impl Block {
    pub fn a(exp: u32) -> Block {
        Block {
            letter: Letter::A,
            exp,
        }
    }

    pub fn b(exp: u32) -> Block {
        Block {
            letter: Letter::B,
            exp,
        }
    }

    pub fn swapped(self) -> Block {
        Block {
            letter: self.letter.other(),
            exp: self.exp,
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.letter.as_char())
        } else {
            write!(f, "{}^{}", self.letter.as_char(), self.exp)
        }
    }
}

/// Appends blocks, merging equal neighbouring letters and skipping empty blocks.
fn push_merge(out: &mut Vec<Block>, blk: Block) {
    if blk.exp == 0 {
        return;
    }
    match out.last_mut() {
        Some(last) if last.letter == blk.letter => last.exp += blk.exp,
        _ => out.push(blk),
    }
}

fn concat(parts: &[&[Block]]) -> Vec<Block> {
    let mut out = Vec::new();
    for part in parts {
        for &b in *part {
            push_merge(&mut out, b);
        }
    }
    out
}

fn repeat(blocks: &[Block], n: u32) -> Vec<Block> {
    let mut out = Vec::new();
    for _ in 0..n {
        for &b in blocks {
            push_merge(&mut out, b);
        }
    }
    out
}

fn alternates(blocks: &[Block]) -> bool {
    blocks.iter().all(|b| b.exp >= 1) && blocks.windows(2).all(|w| w[0].letter != w[1].letter)
}

fn letter_len(blocks: &[Block]) -> usize {
    blocks.iter().map(|b| b.exp as usize).sum()
}

pub fn expand(blocks: &[Block]) -> impl Iterator<Item = Letter> + Clone + '_ {
    blocks
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.letter, b.exp as usize))
}

/// Smallest `d` dividing `blocks.len()` such that the sequence is `d`-periodic.
fn primitive_len(blocks: &[Block]) -> usize {
    let n = blocks.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (0..n).all(|i| blocks[i] == blocks[i % d]))
        .unwrap_or(n)
}

fn rotate(blocks: &[Block], k: usize) -> Vec<Block> {
    let n = blocks.len();
    (0..n).map(|i| blocks[(i + k) % n]).collect()
}

/// Eventually periodic word `preperiod · period^infinity`, kept in normal form:
/// primitive period and shortest preperiod.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EPWord {
    preperiod: Vec<Block>,
    period: Vec<Block>,
}

impl EPWord {
    pub fn new(preperiod: Vec<Block>, period: Vec<Block>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("empty period".into()));
        }
        let mut all = preperiod.clone();
        all.extend_from_slice(&period);
        all.push(period[0]);
        if !alternates(&all) {
            return Err(Error::Parse(
                "blocks must alternate letters, including across the period".into(),
            ));
        }
        let mut w = EPWord { preperiod, period };
        w.normalize();
        Ok(w)
    }

    /// Builds a word from possibly unmerged pieces, merging equal neighbours.
    pub fn from_parts(preperiod: &[Block], period: &[Block]) -> Result<Self> {
        let period = concat(&[period]);
        let mut period = period;
        // A period whose first and last blocks share a letter merges cyclically.
        if period.len() > 1 && period[0].letter == period[period.len() - 1].letter {
            let last = period.pop().unwrap();
            period[0].exp += last.exp;
        }
        let pre = concat(&[preperiod]);
        EPWord::new(pre, period)
    }

    fn normalize(&mut self) {
        let d = primitive_len(&self.period);
        self.period.truncate(d);
        while let Some(&last) = self.preperiod.last() {
            if last == *self.period.last().unwrap() {
                self.preperiod.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn periodic(period: Vec<Block>) -> Result<Self> {
        EPWord::new(Vec::new(), period)
    }

    pub fn preperiod(&self) -> &[Block] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Block] {
        &self.period
    }

    pub fn first_block(&self) -> Block {
        *self.preperiod.first().unwrap_or(&self.period[0])
    }

    pub fn first_letter(&self) -> Letter {
        self.first_block().letter
    }

    /// The `i`-th block of the infinite block sequence.
    pub fn block(&self, i: usize) -> Block {
        let n = self.preperiod.len();
        if i < n {
            self.preperiod[i]
        } else {
            self.period[(i - n) % self.period.len()]
        }
    }

    /// Infinite letter expansion.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        expand(&self.preperiod).chain(expand(&self.period).cycle())
    }

    /// The first `n` blocks.
    pub fn prefix_blocks(&self, n: usize) -> Vec<Block> {
        (0..n).map(|i| self.block(i)).collect()
    }

    /// First `n` letters as a string.
    pub fn prefix_string(&self, n: usize) -> String {
        self.letters().take(n).map(Letter::as_char).collect()
    }

    pub fn preperiod_letter_len(&self) -> usize {
        letter_len(&self.preperiod)
    }

    pub fn period_letter_len(&self) -> usize {
        letter_len(&self.period)
    }

    /// Prepends one letter, growing the first block if the letter matches.
    pub fn prepend_letter(&self, letter: Letter) -> EPWord {
        self.prepend_block(Block { letter, exp: 1 })
    }

    /// Prepends a block; merges with the first block when letters agree.
    pub fn prepend_block(&self, blk: Block) -> EPWord {
        // One unrolled copy of the period lets the merge reach into it.
        let pre = concat(&[&[blk], &self.preperiod, &self.period]);
        EPWord::new(pre, self.period.clone()).expect("prepending keeps alternation")
    }

    /// Exponent check in the context of orders `(p, q)`.
    pub fn check_exponents(&self, p: u32, q: u32) -> Result<()> {
        check_blocks(self.preperiod.iter().chain(self.period.iter()), p, q)
    }

    fn map_blocks(&self, f: impl Fn(Block) -> Block) -> EPWord {
        let pre: Vec<Block> = self.preperiod.iter().map(|&b| f(b)).collect();
        let per: Vec<Block> = self.period.iter().map(|&b| f(b)).collect();
        EPWord::new(pre, per).expect("letter maps keep alternation")
    }
}

fn check_blocks<'a>(blocks: impl Iterator<Item = &'a Block>, p: u32, q: u32) -> Result<()> {
    for b in blocks {
        let max = match b.letter {
            Letter::A => p - 1,
            Letter::B => q - 1,
        };
        if b.exp < 1 || b.exp > max {
            return Err(Error::ExponentOutOfRange {
                letter: b.letter.as_char(),
                exp: b.exp,
                max,
            });
        }
    }
    Ok(())
}

/// Drops the leading block.
pub fn supershift(w: &EPWord) -> EPWord {
    if w.preperiod.is_empty() {
        EPWord::new(Vec::new(), rotate(&w.period, 1)).expect("rotation keeps alternation")
    } else {
        EPWord::new(w.preperiod[1..].to_vec(), w.period.clone()).expect("suffix keeps alternation")
    }
}

pub fn supershift_n(w: &EPWord, n: usize) -> EPWord {
    let mut out = w.clone();
    for _ in 0..n {
        out = supershift(&out);
    }
    out
}

/// Lexicographic comparison of the infinite letter expansions.
pub fn lex_compare(x: &EPWord, y: &EPWord) -> Ordering {
    let px = x.period_letter_len();
    let py = y.period_letter_len();
    let bound = x.preperiod_letter_len() + y.preperiod_letter_len() + 2 * px.lcm(&py);
    for (lx, ly) in x.letters().zip(y.letters()).take(bound) {
        match lx.cmp(&ly) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl PartialOrd for EPWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EPWord {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_compare(self, other)
    }
}

fn write_blocks(f: &mut fmt::Formatter<'_>, blocks: &[Block]) -> fmt::Result {
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{b}")?;
    }
    Ok(())
}

impl fmt::Display for EPWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.preperiod.is_empty() {
            write!(f, "(")?;
            write_blocks(f, &self.preperiod)?;
            write!(f, ") ")?;
        }
        write!(f, "[")?;
        write_blocks(f, &self.period)?;
        write!(f, "]")
    }
}

/// Parses a block list such as `a^2 b a b^3` (whitespace optional).
pub fn parse_blocks(s: &str) -> Result<Vec<Block>> {
    let mut out: Vec<Block> = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let letter = match c {
            'a' => Letter::A,
            'b' => Letter::B,
            c if c.is_whitespace() => continue,
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        };
        let mut exp = 1u32;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            exp = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent after {c}^")))?;
            if exp == 0 {
                return Err(Error::Parse("zero exponent".into()));
            }
        }
        if out.last().is_some_and(|b| b.letter == letter) {
            return Err(Error::Parse(format!(
                "adjacent blocks share the letter {c}; write a single block"
            )));
        }
        out.push(Block { letter, exp });
    }
    Ok(out)
}

impl FromStr for EPWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (pre, rest) = if let Some(stripped) = s.strip_prefix('(') {
            let close = stripped
                .find(')')
                .ok_or_else(|| Error::Parse("unclosed preperiod".into()))?;
            (&stripped[..close], stripped[close + 1..].trim())
        } else {
            ("", s)
        };
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse("period must be written as [...]".into()))?;
        EPWord::new(parse_blocks(pre)?, parse_blocks(inner)?)
    }
}

/// Cyclic alternating word, stored in its lexicographically least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord {
    blocks: Vec<Block>,
}

impl CyclicWord {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() || !blocks.len().is_multiple_of(2) {
            return Err(Error::Parse(
                "cyclic words need a nonzero even number of blocks".into(),
            ));
        }
        let mut closed = blocks.clone();
        closed.push(blocks[0]);
        if !alternates(&closed) {
            return Err(Error::Parse("blocks must alternate cyclically".into()));
        }
        let k = least_rotation(&blocks);
        Ok(CyclicWord {
            blocks: rotate(&blocks, k),
        })
    }

    /// Builds from possibly unmerged pieces.
    pub fn from_parts(blocks: &[Block]) -> Result<Self> {
        let mut b = concat(&[blocks]);
        if b.len() > 1 && b[0].letter == b[b.len() - 1].letter {
            let last = b.pop().unwrap();
            b[0].exp += last.exp;
        }
        CyclicWord::new(b)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn letter_len(&self) -> usize {
        letter_len(&self.blocks)
    }

    pub fn is_primitive(&self) -> bool {
        primitive_len(&self.blocks) == self.blocks.len()
    }

    pub fn primitive_root(&self) -> CyclicWord {
        let d = primitive_len(&self.blocks);
        CyclicWord::new(self.blocks[..d].to_vec()).expect("root of a cyclic word")
    }

    /// The periodic word `(blocks)^infinity` starting at block `k`.
    pub fn periodization(&self, k: usize) -> EPWord {
        EPWord::periodic(rotate(&self.blocks, k)).expect("cyclic words alternate")
    }

    pub fn letters_string(&self) -> String {
        expand(&self.blocks).map(Letter::as_char).collect()
    }

    pub fn check_exponents(&self, p: u32, q: u32) -> Result<()> {
        check_blocks(self.blocks.iter(), p, q)
    }
}

/// Rotation index whose periodic expansion is lexicographically least.
fn least_rotation(blocks: &[Block]) -> usize {
    let n = blocks.len();
    let mut best = 0;
    let mut best_w = EPWord::periodic_unchecked(rotate(blocks, 0));
    for k in 1..n {
        let w = EPWord::periodic_unchecked(rotate(blocks, k));
        if lex_compare(&w, &best_w) == Ordering::Less {
            best = k;
            best_w = w;
        }
    }
    best
}

impl EPWord {
    fn periodic_unchecked(period: Vec<Block>) -> EPWord {
        EPWord {
            preperiod: Vec::new(),
            period,
        }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        write_blocks(f, &self.blocks)?;
        write!(f, ">")
    }
}

impl FromStr for CyclicWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| Error::Parse("cyclic words are written as <...>".into()))?;
        CyclicWord::new(parse_blocks(inner)?)
    }
}

/// The four kneading sequences bounding admissible codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KneadingSet {
    pub u_l: EPWord,
    pub u_r: EPWord,
    pub v_l: EPWord,
    pub v_r: EPWord,
}

impl KneadingSet {
    /// Completes `u_L` and `v_R` with `v_L = b u_L` and `u_R = a v_R`.
    pub fn from_left_right(u_l: EPWord, v_r: EPWord) -> KneadingSet {
        KneadingSet {
            v_l: u_l.prepend_letter(Letter::B),
            u_r: v_r.prepend_letter(Letter::A),
            u_l,
            v_r,
        }
    }
}

fn half(n: u32, minus: u32) -> u32 {
    (n - minus) / 2
}

/// Closed-form kneading sequences for canonical parameters.
pub fn table1_kneading(params: &TriangleParams) -> Result<KneadingSet> {
    let (p, q) = (params.p, params.q);
    let a = Block::a;
    let b = Block::b;
    let (u_l, v_r) = match params.r {
        None => (
            EPWord::from_parts(&[], &[a(p - 1), b(1)])?,
            EPWord::from_parts(&[], &[b(q - 1), a(1)])?,
        ),
        Some(r) if p > 2 => {
            if r % 2 == 1 {
                let k = half(r, 3);
                let u = concat(&[&repeat(&[a(p - 1), b(1)], k), &[a(p - 1), b(2)]]);
                let v = concat(&[&repeat(&[b(q - 1), a(1)], k), &[b(q - 1), a(2)]]);
                (EPWord::from_parts(&[], &u)?, EPWord::from_parts(&[], &v)?)
            } else {
                let k = half(r, 2);
                let u = concat(&[
                    &repeat(&[a(p - 1), b(1)], k),
                    &[a(p - 2)],
                    &repeat(&[b(1), a(p - 1)], k),
                    &[b(2)],
                ]);
                let v = concat(&[
                    &repeat(&[b(q - 1), a(1)], k),
                    &[b(q - 2)],
                    &repeat(&[a(1), b(q - 1)], k),
                    &[a(2)],
                ]);
                (EPWord::from_parts(&[], &u)?, EPWord::from_parts(&[], &v)?)
            }
        }
        Some(r) => {
            if r < 5 {
                return Err(Error::UnsupportedParams {
                    p,
                    q,
                    r: r.to_string(),
                });
            }
            let (ku, kv) = if r % 2 == 1 {
                (half(r, 3), half(r, 5))
            } else {
                (half(r, 4), half(r, 4))
            };
            let u = concat(&[&repeat(&[a(1), b(1)], ku), &[a(1), b(2)]]);
            let v = concat(&[&repeat(&[a(1), b(q - 1)], kv), &[a(1), b(q - 2)]]);
            (
                EPWord::from_parts(&[], &u)?,
                EPWord::from_parts(&[b(q - 1)], &v)?,
            )
        }
    };
    Ok(KneadingSet::from_left_right(u_l, v_r))
}

/// Periods of the two codes sharing one closed geodesic.
pub fn table2_exceptional(params: &TriangleParams) -> Result<(CyclicWord, CyclicWord)> {
    let (p, q) = (params.p, params.q);
    let r = params.r.ok_or(Error::NoException)?;
    let a = Block::a;
    let b = Block::b;
    let (x_l, x_r) = if p > 2 {
        if r % 2 == 1 {
            let k = half(r, 3);
            (
                concat(&[&repeat(&[a(p - 1), b(1)], k), &[a(p - 2), b(1)]]),
                concat(&[&repeat(&[b(q - 1), a(1)], k), &[b(q - 2), a(1)]]),
            )
        } else {
            let k = half(r, 2);
            let m = half(r, 4);
            (
                concat(&[
                    &repeat(&[a(p - 1), b(1)], k),
                    &[a(p - 2), b(1)],
                    &repeat(&[a(p - 1), b(1)], m),
                    &[a(p - 2), b(1)],
                ]),
                concat(&[
                    &repeat(&[b(q - 1), a(1)], k),
                    &[b(q - 2), a(1)],
                    &repeat(&[b(q - 1), a(1)], m),
                    &[b(q - 2), a(1)],
                ]),
            )
        }
    } else {
        if r < 5 {
            return Err(Error::UnsupportedParams {
                p,
                q,
                r: r.to_string(),
            });
        }
        let (kl, kr) = if r % 2 == 1 {
            (half(r, 3), half(r, 5))
        } else {
            (half(r, 4), half(r, 4))
        };
        (
            concat(&[&repeat(&[a(1), b(1)], kl), &[a(1), b(2)]]),
            concat(&[&repeat(&[a(1), b(q - 1)], kr), &[a(1), b(q - 2)]]),
        )
    };
    Ok((CyclicWord::from_parts(&x_l)?, CyclicWord::from_parts(&x_r)?))
}

fn shift_ok(w: &EPWord, k: &KneadingSet) -> bool {
    let (lo, hi) = match w.first_letter() {
        Letter::A => (&k.u_l, &k.u_r),
        Letter::B => (&k.v_l, &k.v_r),
    };
    lex_compare(lo, w) != Ordering::Greater && lex_compare(w, hi) == Ordering::Less
}

/// Every supershift of `w` lies in its semi-open kneading window.
pub fn admissible_word(w: &EPWord, k: &KneadingSet) -> bool {
    let n = w.preperiod.len() + w.period.len();
    let mut cur = w.clone();
    for _ in 0..n {
        if !shift_ok(&cur, k) {
            return false;
        }
        cur = supershift(&cur);
    }
    true
}

/// Every cyclic shift of the periodized word lies in its kneading window.
pub fn admissible_cyclic(w: &CyclicWord, k: &KneadingSet) -> bool {
    (0..w.blocks.len()).all(|i| shift_ok(&w.periodization(i), k))
}

/// Writes a finite block list in word syntax, e.g. `a^2 b a`.
pub fn format_blocks(blocks: &[Block]) -> String {
    blocks
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Letter expansion of a finite block list.
pub fn blocks_letters(blocks: &[Block]) -> String {
    expand(blocks).map(Letter::as_char).collect()
}

/// Finds the shortest eventually periodic description of a finite block
/// sequence, requiring at least `min_reps` full periods after the preperiod.
pub fn detect_period(blocks: &[Block], min_reps: usize) -> Option<EPWord> {
    let n = blocks.len();
    for p in 1..=n / min_reps.max(1) {
        for s in 0..=n.saturating_sub(min_reps * p) {
            if (s..n - p).all(|i| blocks[i] == blocks[i + p]) {
                if let Ok(w) = EPWord::new(blocks[..s].to_vec(), blocks[s..s + p].to_vec()) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// Exchanges `a` and `b` when the canonicalization swapped `p` and `q`.
pub trait Relabel: Clone {
    fn swap_letters(&self) -> Self;

    fn relabel(&self, swaps: &Swaps) -> Self {
        if swaps.pq_swapped {
            self.swap_letters()
        } else {
            self.clone()
        }
    }
}

impl Relabel for EPWord {
    fn swap_letters(&self) -> Self {
        self.map_blocks(Block::swapped)
    }
}

impl Relabel for CyclicWord {
    fn swap_letters(&self) -> Self {
        CyclicWord::new(self.blocks.iter().map(|&b| b.swapped()).collect())
            .expect("letter swap keeps alternation")
    }
}

pub fn relabel<W: Relabel>(w: &W, swaps: &Swaps) -> W {
    w.relabel(swaps)
}
