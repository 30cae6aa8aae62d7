from __future__ import annotations

from pathlib import Path

import pytest

from support import DATA_DIR, make_synthetic_records, write_jsonl


@pytest.fixture(scope="session")
def synthetic_files(tmp_path_factory) -> tuple[Path, Path]:
    root = tmp_path_factory.mktemp("synthetic")
    claims, evidence = make_synthetic_records()
    claims_path = write_jsonl(root / "claims.jsonl", claims)
    evidence_path = write_jsonl(root / "evidence.jsonl", evidence)
    return claims_path, evidence_path


@pytest.fixture()
def data_dir() -> Path:
    return DATA_DIR
