"""Closed-loop single-qubit calibration testbed.

Simulates ORBIT-loss calibration of a three-level transmon-style system
and benchmarks gradient-free optimizers (CMA-ES, Nelder-Mead, Powell,
1+1-ES, Differential Evolution, Simulated Annealing) on it, including
hyperparameter meta-optimization and seeded multi-run campaigns.
"""

__version__ = "0.1.0"
