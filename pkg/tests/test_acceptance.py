"""The acceptance gate: one test per criterion, at the pinned parameters and
tolerances, with the runtime budget enforced; plus the determinism replay."""

import time

import pytest

from symaudit import acceptance as acc
from symaudit.reports import canonical_json

_ctx: dict = {}
_results: dict = {}


@pytest.mark.parametrize("cid,budget,fn", acc.CRITERIA, ids=[c[0] for c in acc.CRITERIA])
def test_criterion(cid, budget, fn):
    t0 = time.perf_counter()
    payload = fn(_ctx)
    elapsed = time.perf_counter() - t0
    _results[cid] = payload
    print(f"{cid}: {'PASS' if payload['passed'] else 'FAIL'} ({elapsed:.2f}s / budget {budget}s)")
    assert payload["passed"], payload
    assert elapsed < budget, f"{cid} exceeded its runtime budget: {elapsed:.1f}s >= {budget}s"


def test_criterion_16_determinism():
    # replay everything with stochastic caches cleared; canonical bytes match
    from symaudit import convexbody as cb

    first = [{"id": cid, **_results[cid]} for cid, _, _ in acc.CRITERIA if cid in _results]
    assert len(first) == len(acc.CRITERIA), "determinism replay needs all criteria to have run"
    cb.clear_sample_cache()
    ctx2: dict = {}
    replay = [{"id": cid, **fn(ctx2)} for cid, _, fn in acc.CRITERIA]
    assert canonical_json(first) == canonical_json(replay)
