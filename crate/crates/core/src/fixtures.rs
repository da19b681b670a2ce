//! Built-in relation lists and symmetric identities.

pub const LIE: &str = "\
operad lie
generators z/2
relations:
z(z(1 2) 3) - z(1 z(2 3)) - z(z(1 3) 2)
";

pub const NOVIKOV: &str = "\
operad novikov
generators x/2 y/2
relations:
x(x(1 2) 3) - x(1 x(2 3)) - x(y(1 2) 3) + y(x(1 3) 2)
x(x(1 3) 2) - x(1 y(2 3)) - x(y(1 3) 2) + y(x(1 2) 3)
y(1 x(2 3)) - y(y(1 3) 2) - y(1 y(2 3)) + y(y(1 2) 3)
x(x(1 2) 3) - x(x(1 3) 2)
x(y(1 2) 3) - y(1 x(2 3))
x(y(1 3) 2) - y(1 y(2 3))
";

pub const GD: &str = "\
operad gd
generators x/2 y/2 z/2
relations:
# left symmetry and right commutativity
x(x(1 2) 3) - x(1 x(2 3)) - x(y(1 2) 3) + y(x(1 3) 2)
x(x(1 3) 2) - x(1 y(2 3)) - x(y(1 3) 2) + y(x(1 2) 3)
y(1 x(2 3)) - y(y(1 3) 2) - y(1 y(2 3)) + y(y(1 2) 3)
x(x(1 2) 3) - x(x(1 3) 2)
x(y(1 2) 3) - y(1 x(2 3))
x(y(1 3) 2) - y(1 y(2 3))
# Jacobi
z(z(1 2) 3) - z(1 z(2 3)) - z(z(1 3) 2)
# compatibility of the product and the bracket
z(1 x(2 3)) + z(y(1 2) 3) - x(z(1 2) 3) - y(1 z(2 3)) - y(z(1 3) 2)
-z(x(1 3) 2) + z(x(1 2) 3) + x(z(1 2) 3) - x(z(1 3) 2) - x(1 z(2 3))
-y(z(1 2) 3) + z(1 y(2 3)) + z(y(1 3) 2) - x(z(1 3) 2) + y(1 z(2 3))
";

/// The twelve four-term and six seven-term relations added on top of `gd`.
pub const WSGD_EXTRA: &str = "\
z(1 x(x(2 3) 4)) - x(z(1 x(2 3)) 4) - x(z(1 x(2 4)) 3) + x(x(z(1 2) 3) 4)
z(1 x(y(2 3) 4)) - x(z(1 y(2 3)) 4) - x(z(1 x(3 4)) 2) + x(x(z(1 3) 2) 4)
z(1 y(2 y(3 4))) - x(z(1 y(3 4)) 2) - x(z(1 y(2 4)) 3) + x(x(z(1 4) 2) 3)
-z(x(x(1 3) 4) 2) + x(z(x(1 3) 2) 4) + x(z(x(1 4) 2) 3) - x(x(z(1 2) 3) 4)
-z(x(y(1 3) 4) 2) + x(z(y(1 3) 2) 4) - y(1 z(2 x(3 4))) + x(y(1 z(2 3)) 4)
-z(x(y(1 4) 3) 2) + x(z(y(1 4) 2) 3) - y(1 z(2 y(3 4))) + x(y(1 z(2 4)) 3)
-z(x(x(1 2) 4) 3) + x(z(x(1 2) 3) 4) + x(z(x(1 4) 3) 2) - x(x(z(1 3) 2) 4)
-z(x(y(1 2) 4) 3) + x(z(y(1 2) 3) 4) + y(1 z(x(2 4) 3)) - y(1 x(z(2 3) 4))
-z(x(y(1 4) 2) 3) + x(z(y(1 4) 3) 2) + y(1 z(y(2 4) 3)) + y(1 y(2 z(3 4)))
-z(x(x(1 2) 3) 4) + x(z(x(1 2) 4) 3) + x(z(x(1 3) 4) 2) - x(x(z(1 4) 2) 3)
-z(x(y(1 2) 3) 4) + x(z(y(1 2) 4) 3) + y(1 z(x(2 3) 4)) - x(y(1 z(2 4)) 3)
-z(x(y(1 3) 2) 4) + x(z(y(1 3) 4) 2) + y(1 z(y(2 3) 4)) - x(y(1 z(3 4)) 2)
z(x(1 2) x(3 4)) - x(z(x(1 2) 3) 4) - x(z(1 x(3 4)) 2) + 2 x(x(z(1 3) 2) 4) + z(x(1 4) y(2 3)) - x(z(1 y(2 3)) 4) - x(z(x(1 4) 3) 2)
z(x(1 3) x(2 4)) - x(z(1 x(2 4)) 3) - x(z(x(1 3) 2) 4) + 2 x(x(z(1 2) 3) 4) + z(x(1 4) x(2 3)) - x(z(1 x(2 3)) 4) - x(z(x(1 4) 2) 3)
z(y(1 2) y(3 4)) - y(1 z(2 y(3 4))) - x(z(y(1 2) 4) 3) + 2 y(1 x(z(2 4) 3)) - z(y(1 4) x(2 3)) + x(z(y(1 4) 2) 3) - y(1 z(x(2 3) 4))
z(y(1 2) x(3 4)) - y(1 z(2 x(3 4))) - x(z(y(1 2) 3) 4) + 2 y(1 x(z(2 3) 4)) - z(y(1 3) x(2 4)) + x(z(y(1 3) 2) 4) - y(1 z(x(2 4) 3))
z(y(1 3) y(2 4)) + y(1 z(y(2 4) 3)) - x(z(y(1 3) 4) 2) + 2 y(1 y(2 z(3 4))) - z(y(1 4) y(2 3)) - y(1 z(y(2 3) 4)) + x(z(y(1 4) 3) 2)
z(x(1 2) y(3 4)) - x(z(1 y(3 4)) 2) - x(z(x(1 2) 4) 3) + 2 x(x(z(1 4) 2) 3) + z(x(1 3) y(2 4)) - x(z(x(1 3) 4) 2) - x(z(1 y(2 4)) 3)
";

/// Named multilinear identities in the symmetric signature.
pub const IDENTITIES: &[(&str, &str)] = &[
    ("lsymm", "(a o b) o c - a o (b o c) - (b o a) o c + b o (a o c)"),
    ("rcomm", "(a o b) o c - (a o c) o b"),
    ("jacobi", "[[a, b], c] - [a, [b, c]] - [[a, c], b]"),
    ("gd1", "[a, b o c] - [c, b o a] + [b, a] o c - [b, c] o a - b o [a, c]"),
    ("spec1", "[c, a o d] o b + ([a, c] o d) o b = [c, (a o b) o d] - [c, a o b] o d"),
    (
        "spec2",
        "2*([a, b] o c) o d = [b o c, a o d] - [a o c, b o d] + ([a, b o c] - [b, a o c]) o d + ([a, b o d] - [b, a o d]) o c",
    ),
    (
        "spec3",
        "[c, [a, e o b] o d] = [a, [c, e o d] o b] - [a, [c, e o d]] o b - [a, [c, e] o b] o d + ([a, [c, e]] o d) o b \
         + [c, [a, e] o d] o b + [c, [a, e o b]] o d - ([c, [a, e]] o d) o b",
    ),
    (
        "spec4",
        "[d o a, [b, e o c]] = [e o a, [b, d o c]] + [d, [b, e o c] o a] - [d, [b, e] o a] o c + ([d, [b, e]] o c) o a \
         - [d, [b, e o c]] o a - [e o a, [b, d] o c] - [e, [b, d o c]] o a + [e, [b, d] o c] o a + [d o a, [b, e] o c] \
         + [d, [b, e o c]] o a - [d, [b, e] o c] o a - [e, [b, d o c] o a] + [e, [b, d] o a] o c - ([e, [b, d]] o c) o a \
         + [e, [b, d o c]] o a",
    ),
    (
        "spec5",
        "[a, d o b] o (c o e) = [a, c o b] o (d o e) + ([a, d o b] o c) o e + ([a, d] o (c o e)) o b - (([a, d] o c) o e) o b \
         - ([a, c o b] o d) o e - ([a, c] o (d o e)) o b + (([a, c] o d) o e) o b",
    ),
];

pub fn identity(name: &str) -> Option<&'static str> {
    IDENTITIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
