import os
from pathlib import Path

import pytest

from copula_survival.cli.main import EXIT_OK
from tests.cli_tests.cli_helpers import run_generate


@pytest.fixture
def generated_dir(tmp_path: Path) -> str:
    output_dir = os.path.join(tmp_path, "generate")
    exit_code = run_generate(
        output_dir,
        "--spec",
        "linear-risk",
        "--copula",
        "clayton",
        "--tau",
        "0.3",
        "--n",
        "300",
        "--seed",
        "1",
    )
    assert exit_code == EXIT_OK

    return output_dir


@pytest.fixture
def semi_synthetic_source(tmp_path: Path) -> str:
    path = os.path.join(tmp_path, "source.csv")
    lines = ["age,dose,outcome"] + [
        f"{0.1 * i},{(i * 7) % 5},{1.0 + 0.05 * i}" for i in range(40)
    ]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")

    return path
