"""Exact-arithmetic engine for weight-graded homotopy-associative structures.

Subpackages and modules:

- ``exactla``: sparse Smith normal form, integer kernels, homology with torsion
- ``graded``: bigraded modules, tensor words, the Koszul sign engine
- ``ainfty``: multiplication/comultiplication towers, identity checking,
  presentations, homotopy transfer
- ``barcobar``: bar and cobar complexes, dual (co)algebra extraction,
  Koszulness certification
- ``twist``: convolution structures, twisting morphisms, twisted tensor
  products, contractibility
- ``hochschild``: full and small cochain models, bigraded cohomology,
  products, formality obstructions
- ``cli``: fixtures, JSON input/output, command-line front end
"""

__version__ = "0.1.0"
