//! The 95-symbol feature alphabet: printable ASCII, 0x20 (space) through 0x7E (~).
//!
//! Feature index `j` corresponds to the character with code `0x20 + j`.
//! Counting is case-sensitive; characters outside the range are ignored.

/// Number of features / alphabet symbols.
pub const ALPHABET_LEN: usize = 95;

const FIRST: u8 = 0x20;
const LAST: u8 = 0x7E;

/// Feature index of `c`, or `None` when `c` is outside the alphabet.
#[inline]
pub fn index_of(c: char) -> Option<usize> {
    let code = u32::from(c);
    if (FIRST as u32..=LAST as u32).contains(&code) {
        Some((code - FIRST as u32) as usize)
    } else {
        None
    }
}

/// Character at feature index `j`. Panics if `j >= ALPHABET_LEN`.
#[inline]
pub fn char_at(j: usize) -> char {
    assert!(j < ALPHABET_LEN, "alphabet index out of range: {j}");
    (FIRST + j as u8) as char
}

/// All alphabet characters in index order.
pub fn chars() -> impl Iterator<Item = char> {
    (0..ALPHABET_LEN).map(char_at)
}
