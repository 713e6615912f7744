"""
Fiscal Stabilisers

Budget balance decomposition (aggregate and disaggregate methods), fiscal
rule compliance, a taxonomy of stabilisers, the volatility function and the
logistic dynamics of stabiliser effectiveness.
"""

__version__ = "1.0.0"
__author__ = "Fiscal Analytics Team"
