//! Small reference systems in the input format.

pub const R_GEO: &str = "(VAR x)
(RULES
  geo(x) -> {1/2: geo(s(x)), 1/2: x}
)
";

pub const R_Q: &str = "(VAR x y z)
(RULES
  start(x,y) -> q(x,y,y)
  q(s(x),s(y),z) -> q(x,y,z)
  q(x,0,s(z)) -> s(q(x,s(z),s(z)))
  q(0,s(y),s(z)) -> 0
)
";

pub const R_PLUS: &str = "(VAR x y)
(RULES
  plus(0,y) -> y
  plus(s(x),y) -> s(plus(x,y))
)
";

pub const R1: &str = "(VAR x y z)
(RULES
  start(x,y) -> q(geo(x),y,y)
  geo(x) -> {1/2: geo(s(x)), 1/2: x}
  q(s(x),s(y),z) -> q(x,y,z)
  q(x,0,s(z)) -> s(q(x,s(z),s(z)))
  q(0,s(y),s(z)) -> 0
)
";

pub const R2: &str = "(VAR x y)
(RULES
  start -> f(geo(0))
  geo(x) -> {1/2: geo(s(x)), 1/2: x}
  f(s(x)) -> f(c(x,x))
  f(c(x,y)) -> c(f(x),f(y))
)
";

pub const R3: &str = "(VAR x y)
(RULES
  geo(x) -> {1/2: geo(s(x)), 1/2: x}
  f(s(x)) -> f(c(x,x))
  f(c(x,y)) -> c(f(x),f(y))
)
";

pub const R_ROI: &str = "(VAR x)
(RULES
  f(d(x)) -> {3/4: e(f(g(x)),f(h(x))), 1/4: a}
  g(a) -> d(a)
  h(b) -> d(b)
)
";

/// Almost-surely terminating but with infinite expected runtime.
pub const R_RW: &str = "(VAR)
(RULES
  g -> {1/2: c(g,g), 1/2: 0}
)
";
