//! Canonical signatures: invariant values with the scaling freedom
//! `a -> c a` used up by the first nonzero invariant.

use std::fmt;

use serde::Serialize;

use super::basis::InvariantEntry;
use super::eval_surd;
use super::semi::SemiInvariant;
use crate::symkernel::{Rational, Surd};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigEntry {
    Zero,
    PlusOne,
    MinusOne,
    /// Normalized value `nu` recorded exactly through `nu^root = power`.
    Frozen {
        sign: i32,
        #[serde(serialize_with = "ser_display")]
        power: Surd,
        root: i32,
    },
    /// A denominator vanishes at the element.
    Undefined,
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl fmt::Display for SigEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigEntry::Zero => write!(f, "0"),
            SigEntry::PlusOne => write!(f, "+1"),
            SigEntry::MinusOne => write!(f, "-1"),
            SigEntry::Frozen { sign, power, root } => {
                let s = if *sign < 0 { "-" } else { "+" };
                if *root == 1 {
                    write!(f, "{s}|{power}|")
                } else {
                    write!(f, "{s}|{power}|^(1/{root})")
                }
            }
            SigEntry::Undefined => write!(f, "undefined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub entries: Vec<SigEntry>,
    /// vanishing of each designated semi-invariant
    pub semi_vanishing: Vec<bool>,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(", "))?;
        if !self.semi_vanishing.is_empty() {
            let z: String = self.semi_vanishing.iter().map(|&b| if b { '0' } else { '*' }).collect();
            write!(f, " [{z}]")?;
        }
        Ok(())
    }
}

fn sign_surd(s: i32) -> Surd {
    Surd::rational(Rational::from_integer(s.into()))
}

/// Signature of `a` with respect to an ordered invariant list.
pub fn canonical_signature(a: &[Surd], inv: &[InvariantEntry], semis: &[SemiInvariant]) -> Signature {
    let vals: Vec<Option<Surd>> = inv.iter().map(|e| eval_surd(&e.poly, a)).collect();
    let semi_vanishing = semis
        .iter()
        .map(|s| eval_surd(&s.poly, a).map(|v| v.is_zero()).unwrap_or(false))
        .collect();
    let pivot = inv
        .iter()
        .zip(&vals)
        .position(|(e, v)| e.degree != 0 && v.as_ref().is_some_and(|v| !v.is_zero()));
    let mut entries = Vec::with_capacity(inv.len());
    let Some(i0) = pivot else {
        for (e, v) in inv.iter().zip(&vals) {
            entries.push(match v {
                None => SigEntry::Undefined,
                Some(v) if v.is_zero() => SigEntry::Zero,
                Some(v) => {
                    debug_assert_eq!(e.degree, 0);
                    SigEntry::Frozen {
                        sign: v.signum(),
                        power: v.clone(),
                        root: 1,
                    }
                }
            });
        }
        return Signature { entries, semi_vanishing };
    };
    let d0 = inv[i0].degree;
    let p0 = vals[i0].clone().unwrap();
    let s0 = if d0 % 2 != 0 { 1 } else { p0.signum() };
    // sign of c: forced for odd d0, otherwise fixed by the first later
    // odd-degree nonzero value
    let c_sign = if d0 % 2 != 0 {
        p0.signum()
    } else {
        inv.iter()
            .zip(&vals)
            .skip(i0 + 1)
            .find(|(e, v)| e.degree % 2 != 0 && v.as_ref().is_some_and(|v| !v.is_zero()))
            .map(|(_, v)| v.as_ref().unwrap().signum())
            .unwrap_or(1)
    };
    let ratio = sign_surd(s0).mul(&p0.inverse().expect("nonzero"));
    for (i, (e, v)) in inv.iter().zip(&vals).enumerate() {
        let entry = match v {
            None => SigEntry::Undefined,
            Some(v) if v.is_zero() => SigEntry::Zero,
            Some(v) if i < i0 => SigEntry::Frozen {
                sign: v.signum(),
                power: v.clone(),
                root: 1,
            },
            Some(_) if i == i0 => {
                if s0 > 0 {
                    SigEntry::PlusOne
                } else {
                    SigEntry::MinusOne
                }
            }
            Some(v) => {
                let power = v.powi(d0).expect("nonzero").mul(&ratio.powi(e.degree).expect("nonzero"));
                let sign = v.signum() * if e.degree % 2 != 0 { c_sign } else { 1 };
                SigEntry::Frozen { sign, power, root: d0 }
            }
        };
        entries.push(entry);
    }
    Signature { entries, semi_vanishing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::invariants::{global_invariants, to_surd};
    use crate::symkernel::rational::int;

    fn surds(v: &[i64]) -> Vec<Surd> {
        to_surd(&v.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn kdv_first_invariant_positive() {
        let inv = global_invariants(&fixtures::kdv(), 4).unwrap();
        let s = canonical_signature(&surds(&[5, 2, 3, 2]), &inv, &[]);
        assert_eq!(s.entries, vec![SigEntry::PlusOne]);
        let s = canonical_signature(&surds(&[5, 2, 3, -2]), &inv, &[]);
        assert_eq!(s.entries, vec![SigEntry::PlusOne]);
    }

    #[test]
    fn heat_negative_discriminant() {
        let inv = global_invariants(&fixtures::heat(), 3).unwrap();
        // a4 = 1, a2 = 1, a6 = 5/2 -> 1 - 10 = -9
        let a = to_surd(&[int(0), int(1), int(0), int(1), int(0), Rational::new(5.into(), 2.into())]);
        let s = canonical_signature(&a, &inv, &[]);
        assert_eq!(s.entries[0], SigEntry::MinusOne);
    }

    #[test]
    fn zero_vector() {
        let inv = global_invariants(&fixtures::heat(), 3).unwrap();
        let s = canonical_signature(&surds(&[0; 6]), &inv, &[]);
        assert!(s.entries.iter().all(|e| *e == SigEntry::Zero));
    }
}
