"""Inseparable PPT states and entanglement witnesses from unextendible product bases.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports it and adds a dict-returning ``analyze`` convenience wrapper.
"""

import json as _json

from ._core import (  # noqa: F401
    ProductStateSet,
    analyze_json,
    build_witness,
    check_subset_basis_condition,
    epsilon_grid_oracle,
    epsilon_seesaw,
    evaluate_conditions,
    family,
    family_names,
    frustum_csv,
    frustum_threshold,
    gram_q,
    hermitian_eig,
    is_ppt,
    is_psd,
    is_unextendible,
    kron,
    lambda_of_t,
    load_set,
    mu_of_p,
    partial_transpose,
    pmax_threshold,
    r_matrix_spectrum,
    reflect_through_identity,
    rho_of_p,
    set_from_factors,
    solve_condition2,
    trace_inner,
    validate_witness,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["analyze"]


def analyze(set_or_name, t=0.0, **options):
    """Run the full pipeline and return the report as a dict.

    ``set_or_name`` is a ProductStateSet or a built-in family name. Options
    mirror the CLI: restarts, seed, oracle, oracle_resolution, conservative,
    witness_samples, attack_restarts.
    """
    target = family(set_or_name, t) if isinstance(set_or_name, str) else set_or_name
    return _json.loads(analyze_json(target, **options))
