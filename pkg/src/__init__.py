"""treekta: tree-ensemble kernels, alignment spectra and landmark learning"""

__version__ = "0.1.0"
