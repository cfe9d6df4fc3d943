use std::collections::BTreeSet;

use super::{GroundSubset, SetFamError, SetFamily};

fn check_pair(n: usize, i: usize, j: usize) -> Result<(), SetFamError> {
    if i == 0 || i >= j || j > n {
        return Err(SetFamError::BadShift { i, j, n });
    }
    Ok(())
}

/// The `(i, j)`-shift of a single member relative to `fam`.
pub fn shift_set(fam: &SetFamily, f: &GroundSubset, i: usize, j: usize) -> GroundSubset {
    let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
    let bits = f.bits();
    if bits & bj != 0 && bits & bi == 0 {
        let moved = (bits | bi) & !bj;
        if !fam.contains_bits(moved) {
            return GroundSubset { n: f.n(), bits: moved };
        }
    }
    *f
}

fn shift_bits(sets: &BTreeSet<u64>, i: usize, j: usize) -> (BTreeSet<u64>, bool) {
    let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
    let mut changed = false;
    let out = sets
        .iter()
        .map(|&bits| {
            if bits & bj != 0 && bits & bi == 0 {
                let moved = (bits | bi) & !bj;
                if !sets.contains(&moved) {
                    changed = true;
                    return moved;
                }
            }
            bits
        })
        .collect();
    (out, changed)
}

/// Applies the `(i, j)`-shift to every member simultaneously.
pub fn shift_once(fam: &SetFamily, i: usize, j: usize) -> Result<SetFamily, SetFamError> {
    check_pair(fam.n, i, j)?;
    let (sets, _) = shift_bits(&fam.sets, i, j);
    Ok(SetFamily { n: fam.n, sets })
}

/// Sweeps all pairs `i < j` in lexicographic order until a sweep changes nothing.
pub fn left_shift(fam: &SetFamily) -> SetFamily {
    let n = fam.n;
    let mut sets = fam.sets.clone();
    loop {
        let mut any = false;
        for i in 1..=n {
            for j in (i + 1)..=n {
                let (next, changed) = shift_bits(&sets, i, j);
                if changed {
                    sets = next;
                    any = true;
                }
            }
        }
        if !any {
            return SetFamily { n, sets };
        }
    }
}

/// True when every `(i, j)`-shift leaves the family unchanged.
pub fn is_left_shifted(fam: &SetFamily) -> bool {
    let n = fam.n;
    fam.sets.iter().all(|&bits| {
        (1..=n).all(|i| {
            ((i + 1)..=n).all(|j| {
                let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
                !(bits & bj != 0 && bits & bi == 0) || fam.sets.contains(&((bits | bi) & !bj))
            })
        })
    })
}
