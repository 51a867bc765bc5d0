"""Windowed GF(2) homological algebra for modules over the Sq1/Sq2
subalgebra, the exterior Milnor operations, and the assembled charts of
real connective K-theory of elementary abelian 2-groups."""

__version__ = "0.1.0"
