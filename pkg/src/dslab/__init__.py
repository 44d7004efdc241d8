"""Surfaces in R^4 from Dirac spinor pairs, their Davey-Stewartson deformations and Gauss maps."""
