"""Order-preserving map over a process pool.

Results are returned in input order, so outputs never depend on scheduling
and reports stay byte-identical for any worker count.  fn must be picklable
(a module-level function or functools.partial of one) when workers > 1.
"""

from __future__ import annotations

import concurrent.futures


def pmap(fn, items, workers: int = 1) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
