"""Max CSP dichotomy toolkit.

Classifies weighted Max CSP constraint languages (taken together with all
fixed-value unary predicates) as polynomial-time solvable or APX-complete,
by testing supermodularity on a chain via anti-Monge matrix structure.
Ships the supporting machinery: strict implementations between languages,
exact and approximate solvers, the exhaustive case searches behind the
classification of small hard languages, and a digraph list-homomorphism
front end.
"""

__version__ = "0.1.0"
