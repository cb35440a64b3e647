"""
pytest 公共夹具与 hypothesis 配置
"""

import json
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hojman.cli.main import main
from hojman.expr import SampleBox, parse_expr
from hojman.geometry import Chart, VectorField

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    """环境变量不影响测试结果"""
    monkeypatch.delenv("HOJMAN_SEED", raising=False)
    monkeypatch.delenv("HOJMAN_CONFIG", raising=False)


@pytest.fixture
def problems_dir() -> Path:
    return ROOT / "problems"


@pytest.fixture
def fixtures_dir() -> Path:
    return Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def unit_box():
    """x, y ∈ [-1, 1]"""
    return SampleBox.create({"x": [-1, 1], "y": [-1, 1]}, seed=7, count=24)


@pytest.fixture
def positive_box():
    """x, y ∈ [0.5, 2]"""
    return SampleBox.create({"x": [0.5, 2], "y": [0.5, 2]}, seed=7, count=24)


def make_field(coords, components, time=False) -> VectorField:
    """由文本分量构造向量场"""
    chart = Chart.create(coords, time)
    return VectorField.create(chart, [parse_expr(c) for c in components])


@pytest.fixture
def field():
    return make_field


@pytest.fixture
def run_cli(capsys, tmp_path):
    """
    运行命令行，返回 (退出码, 输出)

    --json 时输出解析为字典。配置文件指向一个不存在的路径，保证使用默认配置。
    """
    def _run(*argv):
        args = [str(a) for a in argv] + ["--config", str(tmp_path / "absent.yaml")]
        code = main(args)
        out = capsys.readouterr().out
        if "--json" in args:
            return code, json.loads(out)
        return code, out

    return _run
