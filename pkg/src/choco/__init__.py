"""Record parameter values for the Belgian chocolate problem via algebraic configurations."""
__version__ = "0.1.0"
