"""Stochastic (state-preserving) products on quantum states.

Core pieces: trace-class operator arithmetic (`operators`), superoperator
construction and classification (`channels`), bilinear state products and
their point geometry (`products`), projective representations and group
measures (`groups`), the group-twirled product and its identity verifiers
(`twirled`), a single-mode phase-space instantiation (`phasespace`), JSON
schemas (`serialize`), the verification-suite registry (`suites`), and a
FastAPI service plus thin-client CLI on top.
"""

__version__ = "0.1.0"
