"""Dispatch to the numba or numpy kernel implementation (see ``_accel``)."""
from __future__ import annotations

from ._accel import USE_NUMBA, backend_name

if USE_NUMBA:
    from ._kernels_numba import (classic_rs_direct, qualify_table, rs_subset_tables,
                                 scan_any, scan_rs, scan_rs_fewest, simulate, step_values)
else:
    from ._kernels_numpy import (classic_rs_direct, qualify_table, rs_subset_tables,
                                 scan_any, scan_rs, scan_rs_fewest, simulate, step_values)

__all__ = ["USE_NUMBA", "backend_name", "classic_rs_direct", "qualify_table",
           "rs_subset_tables", "scan_any", "scan_rs", "scan_rs_fewest", "simulate", "step_values"]
