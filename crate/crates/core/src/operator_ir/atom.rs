use std::fmt;

/// A field that may appear inside an operator expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldRef {
    Phi,
    A(u8),
}

impl FieldRef {
    pub fn atom(self) -> Atom {
        match self {
            FieldRef::Phi => Atom::Phi,
            FieldRef::A(i) => Atom::AField(i),
        }
    }
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldRef::Phi => f.write_str("Phi"),
            FieldRef::A(i) => write!(f, "A[{i}]"),
        }
    }
}

/// Operator atoms. The derived ordering is the canonical factor order:
/// positions < momenta < fields (Phi < A_i < derivatives) < alpha_i < beta.
/// Axes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Position(u8),
    Momentum(u8),
    Phi,
    AField(u8),
    /// Mixed partial derivative of a field; `orders[j-1]` counts d/dx_j.
    Partial { field: FieldRef, orders: [u8; 3] },
    Alpha(u8),
    Beta,
}

impl Atom {
    pub fn x(i: u8) -> Atom {
        Atom::Position(i)
    }

    pub fn p(i: u8) -> Atom {
        Atom::Momentum(i)
    }

    pub fn alpha(i: u8) -> Atom {
        Atom::Alpha(i)
    }

    pub fn a_field(i: u8) -> Atom {
        Atom::AField(i)
    }

    /// `d_axis` applied to a field atom, `None` for non-field atoms.
    pub fn partial_of(self, axis: u8) -> Option<Atom> {
        let bump = |mut orders: [u8; 3]| {
            orders[axis as usize - 1] += 1;
            orders
        };
        match self {
            Atom::Phi => Some(Atom::Partial {
                field: FieldRef::Phi,
                orders: bump([0; 3]),
            }),
            Atom::AField(i) => Some(Atom::Partial {
                field: FieldRef::A(i),
                orders: bump([0; 3]),
            }),
            Atom::Partial { field, orders } => Some(Atom::Partial {
                field,
                orders: bump(orders),
            }),
            _ => None,
        }
    }

    /// Underlying field and derivative multi-index for field atoms.
    pub fn field_parts(self) -> Option<(FieldRef, [u8; 3])> {
        match self {
            Atom::Phi => Some((FieldRef::Phi, [0; 3])),
            Atom::AField(i) => Some((FieldRef::A(i), [0; 3])),
            Atom::Partial { field, orders } => Some((field, orders)),
            _ => None,
        }
    }

    pub fn is_spinor(self) -> bool {
        matches!(self, Atom::Alpha(_) | Atom::Beta)
    }

    pub fn is_field(self) -> bool {
        matches!(self, Atom::Phi | Atom::AField(_) | Atom::Partial { .. })
    }

    /// Spatial axis the atom refers to, if any.
    pub fn axis(self) -> Option<u8> {
        match self {
            Atom::Position(i) | Atom::Momentum(i) => Some(i),
            _ => None,
        }
    }

    pub fn axes_valid(self) -> bool {
        let ok = |i: u8| (1..=3).contains(&i);
        match self {
            Atom::Position(i) | Atom::Momentum(i) | Atom::AField(i) | Atom::Alpha(i) => ok(i),
            Atom::Partial { field, orders } => {
                orders.iter().any(|&o| o > 0)
                    && match field {
                        FieldRef::A(i) => ok(i),
                        FieldRef::Phi => true,
                    }
            }
            Atom::Phi | Atom::Beta => true,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Position(i) => write!(f, "x[{i}]"),
            Atom::Momentum(i) => write!(f, "p[{i}]"),
            Atom::Phi => f.write_str("Phi"),
            Atom::AField(i) => write!(f, "A[{i}]"),
            Atom::Partial { field, orders } => {
                let mut inner = field.to_string();
                for (axis, &n) in orders.iter().enumerate().rev() {
                    for _ in 0..n {
                        inner = format!("d[{}]({inner})", axis + 1);
                    }
                }
                f.write_str(&inner)
            }
            Atom::Alpha(i) => write!(f, "alpha[{i}]"),
            Atom::Beta => f.write_str("beta"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_matches_kind_ranking() {
        let mut atoms = vec![
            Atom::Beta,
            Atom::Alpha(1),
            Atom::Partial {
                field: FieldRef::A(1),
                orders: [0, 1, 0],
            },
            Atom::AField(3),
            Atom::AField(1),
            Atom::Phi,
            Atom::Momentum(1),
            Atom::Position(2),
            Atom::Position(1),
        ];
        atoms.sort();
        assert_eq!(atoms[0], Atom::Position(1));
        assert_eq!(atoms[2], Atom::Momentum(1));
        assert_eq!(atoms[3], Atom::Phi);
        assert_eq!(atoms[4], Atom::AField(1));
        assert_eq!(*atoms.last().unwrap(), Atom::Beta);
    }

    #[test]
    fn nested_partials_display_innermost_first() {
        let a = Atom::AField(1).partial_of(2).unwrap().partial_of(1).unwrap();
        assert_eq!(a.to_string(), "d[1](d[2](A[1]))");
    }
}
