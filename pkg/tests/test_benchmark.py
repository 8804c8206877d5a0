import importlib.util
from pathlib import Path

import numpy as np

from surrogate_accounts import PUBLIC, generate_protected_account
from surrogate_accounts.evalbench import SynthSpec, gen_synthetic
from surrogate_accounts.evalbench.experiments import median_time_us

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


def _load_bench():
    spec = importlib.util.spec_from_file_location("bench_kernels", BENCH)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def test_benchmark_script_runs(tmp_path, capsys):
    bench = _load_bench()
    out = tmp_path / "bench.csv"
    assert bench.main(["--sizes", "30", "--repeats", "1", "--csv", str(out)]) == 0
    assert "generate_us" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) >= 3


def test_worst_case_growth_is_not_super_cubic():
    bench = _load_bench()
    sizes = [100, 200, 400]
    times = []
    for n in sizes:
        sg = gen_synthetic(SynthSpec(n, 0.15 * n, 0.3, seed=0))
        g = bench._all_surrogate(sg.graph, 0)
        times.append(median_time_us(lambda: generate_protected_account(g, PUBLIC), warmups=1, repeats=5))
    slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
    assert slope < 3.0, f"time grows like n^{slope:.2f}"
