"""Machine-learned variable-ordering selection for polynomial elimination,
with symmetry-based dataset debiasing and leakage-aware evaluation."""

__version__ = "0.1.0"
