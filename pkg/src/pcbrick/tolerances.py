"""Numerical tolerances shared across the package.

========================  ========  ==============================================
name                      value     used for
========================  ========  ==============================================
``UNITARY_ATOL``          1e-10     unitarity checks, norm preservation
``NORM_ATOL``             1e-10     statevector normalisation after gates
``MATRIX_ATOL``           1e-12     matrix-equality oracles (pure arithmetic)
``IMAG_ATOL``             1e-10     imaginary residue discarded by expectation()
``PC_PATTERN_ATOL``       1e-10     zero pattern of particle-conserving 2q gates
``CANONICAL_ATOL``        1e-10     canonicaliser reconstruction
``DEGENERATE_ATOL``       1e-12     gauge fixing when cos(theta) or sin(theta) = 0
``EIGSH_TOL``             1e-9      iterative eigensolver convergence (L > 10)
========================  ========  ==============================================
"""

UNITARY_ATOL = 1e-10
NORM_ATOL = 1e-10
MATRIX_ATOL = 1e-12
IMAG_ATOL = 1e-10
PC_PATTERN_ATOL = 1e-10
CANONICAL_ATOL = 1e-10
DEGENERATE_ATOL = 1e-12
EIGSH_TOL = 1e-9
