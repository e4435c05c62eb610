"""Three-body channel strengths and mean-field coefficients for spinor condensates."""

__version__ = "0.1.0"
