"""Automorphism-group finiteness computations for K3 surfaces over non-closed fields.

Subpackages follow the computation pipeline: exact integer/rational algebra
(`exactcore`), integral lattices (`lattice`), folded reflection groups
(`reflection`), finite-index certificates (`groupcert`), the diagonal quartic
family (`diagquartic`), finite-field point counting (`ffield`, `counting`) and
Frobenius characteristic polynomials (`zeta`).
"""

__version__ = "0.1.0"
