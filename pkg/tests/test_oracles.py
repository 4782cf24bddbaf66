import pytest

from oracles import (FROZEN_FREE, FROZEN_MONOTONE_2N, FROZEN_SELF_MAPS, count_monotone,
                     count_self_maps, free_size)


@pytest.mark.parametrize("n", sorted(FROZEN_MONOTONE_2N))
def test_monotone_oracle_is_frozen(n):
    assert count_monotone(n) == FROZEN_MONOTONE_2N[n]


@pytest.mark.parametrize("key", sorted(FROZEN_FREE))
def test_free_size_oracle_is_frozen(key):
    assert free_size(*key) == FROZEN_FREE[key]


@pytest.mark.parametrize("name", sorted(FROZEN_SELF_MAPS))
def test_self_map_oracle_is_frozen(name):
    assert count_self_maps(name) == FROZEN_SELF_MAPS[name]
