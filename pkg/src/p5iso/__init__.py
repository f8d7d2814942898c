"""Exact and numerical toolkit for Painleve V isomonodromy.

Subpackage map:

- ``gaussian``, ``multipoly``, ``ratfunc``, ``linalg``, ``symsolve``:
  the exact arithmetic engine (Q(i) scalars, sparse polynomials, rational
  functions, fraction-free solving, differential-operator brackets).
- ``formal_local``: normal forms, invariant lattices and eigenlines of
  rank-2 regular-singular formal connections.
- ``moduli2``: the two charts of the rank-2 moduli space of connections,
  gauge transitions, the reducible locus and parabolic lifts.
- ``lax2``: symbolic derivation of the rank-2 Lax partner, the scalar
  second-order equation for q = -b0, and the Riccati reduction.
- ``monodromy``: the rank-2 monodromy space (relations, charts, fibers)
  and the rank-4 monodromy identity with its cubic fiber equation.
- ``rank4``: the rank-4 symmetric operator family, its Lax partner, the
  f- and Hamiltonian b-systems, the canonical-lattice variant and the
  cyclic symmetry.
- ``numerics``: adaptive complex ODE integration, loop monodromy and the
  isomonodromy, Riccati and cross-validation experiments.
- ``golden``: independently transcribed target equations used by the
  verification commands.
- ``cli``: the ``p5iso`` command-line entry point.
"""

__version__ = "0.1.0"
