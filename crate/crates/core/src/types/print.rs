use std::fmt;

use super::Type;

fn needs_parens_as_source(t: &Type) -> bool {
    matches!(t, Type::Arrow(..) | Type::Inter(_))
}

fn needs_parens_in_inter(t: &Type) -> bool {
    matches!(t, Type::Arrow(..) | Type::Inter(_))
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, t: &Type, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Const(c) => f.write_str(c),
            Type::Var(v) => write!(f, "'{v}"),
            Type::Omega => f.write_str("omega"),
            Type::Arrow(s, t) => {
                write_wrapped(f, s, needs_parens_as_source(s))?;
                f.write_str(" -> ")?;
                write!(f, "{t}")
            }
            Type::Inter(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write_wrapped(f, item, needs_parens_in_inter(item))?;
                }
                Ok(())
            }
        }
    }
}
