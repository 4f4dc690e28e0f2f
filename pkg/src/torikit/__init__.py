"""torikit: quantization toolkit for toric phase spaces.

The package builds, from the facet data of a rational polytope, the
parameter-indexed arrow space that deforms its classical function algebra;
implements the associated convolution *-algebra on finitely supported modes;
and verifies numerically that renormalized commutators converge to the
classical bracket, with finite matrix models on orbits as an independent
oracle.
"""

__version__ = "0.1.0"
