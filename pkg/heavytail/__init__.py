"""heavytail: Gaussian-to-Cauchy transformations, their densities and verdicts"""

__version__ = "1.0.0"
