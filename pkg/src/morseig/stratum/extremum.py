from __future__ import annotations

from enum import StrEnum


class Extremum(StrEnum):
    max = "max"
    min = "min"
    neither = "neither"


def extremum_classify(nu: int, rel_index: int, mu: int, tangent_dim: int) -> Extremum:
    """
    A non-degenerate critical point is a local maximum iff the branch is the lowest of its
    group (`i = nu`) and the restriction to the stratum is maximal; a local minimum iff it
    is the highest (`i = 1`) and the restriction is minimal.
    """
    if not 1 <= rel_index <= nu or not 0 <= mu <= tangent_dim:
        raise ValueError(
            f"Inconsistent indices: nu={nu}, i={rel_index}, mu={mu}, dim={tangent_dim}"
        )
    if rel_index == nu and mu == tangent_dim:
        return Extremum.max
    if rel_index == 1 and mu == 0:
        return Extremum.min
    return Extremum.neither


## Tests


def test_extremum_classify():
    assert extremum_classify(2, 2, 0, 0) == Extremum.max
    assert extremum_classify(2, 1, 0, 0) == Extremum.min
    assert extremum_classify(2, 1, 1, 1) == Extremum.neither
    assert extremum_classify(1, 1, 0, 2) == Extremum.min
    assert extremum_classify(1, 1, 2, 2) == Extremum.max
