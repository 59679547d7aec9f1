"""
charbeta core

Estimators, bootstrap inference, simulation and the experiment harness.
"""

__version__ = "0.1.0"
