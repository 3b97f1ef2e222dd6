"""Default numerical tolerances, shared by every module."""

#: max-norm deviation allowed in S sigma S^T = sigma
TOL_SYMP = 1e-9
#: reconstruction error allowed for decompositions / normal forms
TOL_RECON = 1e-8
#: smallest eigenvalue of gamma + i sigma may be this negative
TOL_UNC = 1e-9
#: |det gamma - 1| below this counts as a pure state
TOL_PURE = 1e-7
#: symmetry check, relative to max(1, max|M|)
TOL_SYM = 1e-12
#: log-negativity above this is reported as entangled
TOL_ENTANGLED = 1e-9
#: positivity and symplectic-trace slack for witness certification
TOL_CERT = 1e-9
#: eigenvalue floor before square roots
EIG_CLIP = 1e-14
#: relative singular-value cutoff for the Moore-Penrose inverse
PINV_RCOND = 1e-12
