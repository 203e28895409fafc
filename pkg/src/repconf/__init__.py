"""repconf: exact verification toolkit for filtered/graded structures on
quiver representations over small finite fields.

Submodules:
    posets      finite partial orders, order-convex subsets, domination
    coeffs      signed chain-counting coefficient systems and their inversions
    gf          small finite fields and exact linear algebra over them
    euler       exact counting polynomials and their value at 1
    quiver      quivers, their finite-field representations, iso classes
    stability   slope/weighted stability, filtrations, refinements
    config      poset-shaped diagrams of subquotients inside a fixed object
    hall        convolution products on iso-class functions; identity catalog
    cli         command-line entry points
"""

__version__ = "0.1.0"

__all__ = [
    "posets", "coeffs", "gf", "euler", "quiver",
    "stability", "config", "hall", "cli",
]
