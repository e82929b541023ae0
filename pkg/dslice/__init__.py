"""
dslice: correction-term obstructions to sliceness and double sliceness.

Computes Alexander polynomials, homology of prime-power branched covers with
linking form and deck action, metabolizers, and the slice / doubly slice
checks built on Heegaard Floer correction terms, all in exact arithmetic.
"""

__version__ = "0.1.0"
