"""Exact zonal-polynomial tools built around Delsarte LP bounds for spherical codes.

Supporting pieces include orthogonal polynomial families, a rational simplex
solver and exact PSD completion."""
from .codes import GramCandidate, hallucination_probe, petersen_gram, realizable, search_code
from .delsarte import (
    AngleSet,
    DelsarteCertificate,
    delsarte_bound,
    delsarte_constant,
    interval_delsarte,
    sharpness_verdict,
    theta_min,
)
from .hamming import CubeFunction, expand, is_pd_on_cube, krawtchouk_value, limit_probe
from .orthopoly import (
    christoffel_darboux,
    darboux_envelope,
    eval_normalized,
    gegenbauer,
    interlacing_check,
    jacobi,
    krawtchouk,
    legendre,
    product_expand,
    zero_density_onset,
)
from .poly import DensePoly, isolate_roots, sturm_root_count
from .preservers import (
    FiniteFunction,
    PreserverForm,
    cone_membership,
    fit_preserver_form,
    hull_cap,
    hull_membership,
    preserver_fuzz,
)
from .psdcomp import PartialSymMatrix, SymMatrix, apply_entrywise, complete_psd, is_psd_exact, psd_rank
from .rational import ExactScalar, to_q
from .simplex import LinearProgram, lp_from_rows, solve_lp

__version__ = "0.1.0"
