from __future__ import annotations

import pytest

from trainer_fixtures import write_config, write_pairs


@pytest.fixture()
def toy_export(tmp_path):
    pairs = write_pairs(tmp_path / "pairs.jsonl")
    config = write_config(tmp_path / "adapter_config.txt")
    return pairs, config
