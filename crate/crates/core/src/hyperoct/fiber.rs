use std::collections::HashSet;

use super::SignedPerm;
use crate::error::{Error, Result};
use crate::exactfield::{Field, Matrix};
use crate::wpline::{Moebius, Perm5};

/// An even signed permutation paired with a Möbius map inducing the same
/// permutation of the five points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberElement {
    pub signed: SignedPerm,
    pub moebius: Moebius,
}

impl FiberElement {
    pub fn compose(&self, other: &FiberElement) -> FiberElement {
        FiberElement {
            signed: self.signed.compose(&other.signed),
            moebius: self.moebius.compose(&other.moebius),
        }
    }
}

fn compose_perm(a: &Perm5, b: &Perm5) -> Perm5 {
    std::array::from_fn(|i| a[b[i] as usize])
}

/// `{(g, m) : g even, perm(g) = image(m)}`, of order `16 |aut_p|`.
pub fn fiber_product(aut_p: &[(Moebius, Perm5)]) -> Result<Vec<FiberElement>> {
    let lookup: std::collections::HashMap<&Moebius, &Perm5> =
        aut_p.iter().map(|(m, p)| (m, p)).collect();
    if lookup.len() != aut_p.len() {
        return Err(Error::InvalidGroup("repeated Moebius maps".into()));
    }
    if !aut_p.iter().any(|(m, _)| m.is_identity()) {
        return Err(Error::InvalidGroup("identity missing".into()));
    }
    for (m, p) in aut_p {
        for (n, q) in aut_p {
            let mn = m.compose(n);
            match lookup.get(&mn) {
                None => {
                    return Err(Error::InvalidGroup(format!("{m} * {n} is not in the group")));
                }
                Some(r) if **r != compose_perm(p, q) => {
                    return Err(Error::InvalidGroup(format!(
                        "permutation of {m} * {n} is not the composite"
                    )));
                }
                _ => {}
            }
        }
    }
    let mut out = Vec::with_capacity(16 * aut_p.len());
    for (m, p) in aut_p {
        for signs in (0..32u8).filter(|s| s.count_ones() % 2 == 0) {
            out.push(FiberElement {
                signed: SignedPerm::from_mask(*p, signs),
                moebius: m.clone(),
            });
        }
    }
    Ok(out)
}

/// The splitting on fiber pairs: retract the signed permutation, keep the map.
pub fn retract_fiber(signed: &SignedPerm, aut: &(Moebius, Perm5)) -> Result<FiberElement> {
    if signed.perm() != aut.1 {
        return Err(Error::FiberMismatch(format!(
            "{signed} lies over {:?}, the map over {:?}",
            signed.perm(),
            aut.1
        )));
    }
    Ok(FiberElement {
        signed: signed.retract(),
        moebius: aut.0.clone(),
    })
}

/// The sixteen maps `x_i -> +-x_i` up to a global sign, normalized with
/// first entry `+1`.
pub fn aut0_matrices() -> Vec<[i8; 5]> {
    (0..16u8)
        .map(|mask| std::array::from_fn(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1 } else { 1 }))
        .collect()
}

/// A diagonal sign pattern as a matrix over `f`.
pub fn sign_matrix(f: &Field, signs: &[i8; 5]) -> Matrix {
    Matrix::diagonal(f, &signs.map(|s| f.int(s as i64)))
}

/// Whether the elements are closed under composition.
pub fn is_closed(elems: &[FiberElement]) -> bool {
    let set: HashSet<&FiberElement> = elems.iter().collect();
    elems
        .iter()
        .all(|a| elems.iter().all(|b| set.contains(&a.compose(b))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::Scalar;
    use crate::pencil::{reconstruct, NormalForm};
    use crate::wpline::{aut_group, PointConfiguration};

    fn config(vals: &[Option<i64>], f: &Field) -> PointConfiguration {
        let v: Vec<Option<Scalar>> = vals.iter().map(|x| x.map(|z| f.int(z))).collect();
        PointConfiguration::from_values(f, &v).unwrap()
    }

    #[test]
    fn trivial_aut_gives_sixteen() {
        let f = Field::prime(13).unwrap();
        let c = config(&[Some(0), Some(1), Some(3), Some(7), Some(9)], &f);
        let aut = aut_group(&c);
        let fp = fiber_product(&aut).unwrap();
        assert_eq!(fp.len(), 16 * aut.len());
        assert!(is_closed(&fp));
        if aut.len() == 1 {
            assert!(fp.iter().all(|e| e.signed.perm() == [0, 1, 2, 3, 4] && e.signed.is_even()));
        }
    }

    #[test]
    fn order_two_gives_thirty_two() {
        let q = Field::rationals();
        let c = config(&[None, Some(0), Some(1), Some(2), Some(3)], &q);
        let aut = aut_group(&c);
        assert_eq!(aut.len(), 2);
        let fp = fiber_product(&aut).unwrap();
        assert_eq!(fp.len(), 32);
        assert!(is_closed(&fp));
        // lift count: every even sign vector over each image
        for (m, p) in &aut {
            let lifts = fp.iter().filter(|e| &e.moebius == m).count();
            assert_eq!(lifts, 16);
            assert!(fp.iter().filter(|e| &e.moebius == m).all(|e| e.signed.perm() == *p));
        }
    }

    #[test]
    fn non_group_is_rejected() {
        let q = Field::rationals();
        let m = Moebius::new(q.int(-1), q.int(3), q.zero(), q.one()).unwrap();
        assert!(matches!(fiber_product(&[(m, [0, 4, 3, 2, 1])]), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn retract_fiber_examples() {
        let q = Field::rationals();
        let id = (Moebius::identity(&q), [0, 1, 2, 3, 4]);
        let r = retract_fiber(&SignedPerm::central(), &id).unwrap();
        assert_eq!(r.signed, SignedPerm::identity());
        let g = SignedPerm::new([0, 1, 2, 3, 4], [-1, -1, 1, 1, 1]).unwrap();
        assert_eq!(retract_fiber(&g, &id).unwrap().signed, g);
        let swap = SignedPerm::new([1, 0, 2, 3, 4], [1; 5]).unwrap();
        assert!(matches!(retract_fiber(&swap, &id), Err(Error::FiberMismatch(_))));
    }

    #[test]
    fn aut0_preserves_diagonal_pencils() {
        let q = Field::rationals();
        let ms = aut0_matrices();
        assert_eq!(ms.len(), 16);
        assert!(ms.contains(&[1, 1, 1, 1, 1]));
        assert!(ms.contains(&[1, -1, -1, -1, -1]));
        assert!(!ms.contains(&[-1, -1, -1, -1, 1]));
        let pen = reconstruct(&NormalForm::new(q.int(2), q.int(3)).unwrap()).unwrap();
        for s in &ms {
            let m = sign_matrix(&q, s);
            assert_eq!(pen.congruence(&m).unwrap(), pen);
        }
    }
}
