"""Numerical core: density operators, entropies, measurements, optimizers and measures."""
