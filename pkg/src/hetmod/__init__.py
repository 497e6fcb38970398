"""Exact invariant calculus for heterotic SU(3) structures on homogeneous
complex 3-folds: coupled-system checking, the deformation operator and its
cohomology, and local chart trivializations."""

__version__ = "0.1.0"
