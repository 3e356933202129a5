"""Desk-scale noisy-inner-product encryption schemes, an exact simulator for
registers over products of cyclic groups, and the single-quantum-query
key-recovery attacks against those schemes with analytic success
probabilities and classical baselines."""

from . import attacks, experiments, lrf, qsim, schemes, verify, zq

__all__ = ["attacks", "experiments", "lrf", "qsim", "schemes", "verify", "zq"]
__version__ = "0.1.0"
