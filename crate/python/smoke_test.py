"""Smoke test for the atlab extension module.

Run after `cargo build --release -p atlab-py` (or `maturin develop` in
crates/py):

    python3 python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load_atlab():
    try:
        import atlab

        return atlab
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libatlab.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("atlab", str(lib))
            found = importlib.util.spec_from_file_location("atlab", lib, loader=loader)
            module = importlib.util.module_from_spec(found)
            loader.exec_module(module)
            sys.modules["atlab"] = module
            return module
    sys.exit("atlab extension not found; build it with `cargo build --release -p atlab-py`")


def main():
    atlab = load_atlab()

    w = atlab.assembly_index("BANANA")
    assert (w.index, w.exact, w.terminal) == (4, True, "BANANA"), w
    assert w.gamma_max == 4
    assert json.loads(w.to_json())["index"] == 4
    assert w.grammar_metrics()["identity"] is True
    assert w.grammar().splitlines()[-1] == "N_BANANA -> N_B N_ANANA"
    assert atlab.assembly_index("ABRACADABRA").index == 7

    try:
        atlab.assembly_index("AB" * 10)
    except atlab.GuardError:
        pass
    else:
        raise AssertionError("over-length object was not refused")
    try:
        atlab.assembly_index("")
    except ValueError:
        pass
    else:
        raise AssertionError("empty object was accepted")

    sb = atlab.split_branch_index("AB" * 10)
    assert sb.exact is False and sb.index >= 5

    assert atlab.factorize("AB", "lz78") == {"factors": 2, "bits": 18, "hex": "541a10"}
    assert atlab.rle_runs("AAAABB") == [("A", 4), ("B", 2)]
    assert atlab.huffman_bits("ABCD") == 8.0
    assert abs(atlab.entropy_bits("AAB") / 3 - 0.9183) < 1e-4

    stream = atlab.assembly_index("AAAA").sat_encode()
    assert stream.startswith(b"SAT1")
    assert atlab.sat_decode(stream) == "AAAA"
    assert atlab.decode_from_vertex_set(w.vertices) == "BANANA"

    assert abs(atlab.assembly_number([("AA", 2)]) - 1.35914) < 1e-5
    code = atlab.ensemble_code('[{"items":[{"object":"AB","copies":2}]},{"items":[{"object":"BANANA","copies":3}]}]')
    assert code["kraft_sum"] <= 1.0

    a = atlab.simulate_selection(50, 2.0, seed=3)
    b = atlab.simulate_selection(50, 2.0, seed=3)
    assert a == b and sum(i["copies"] for i in a["items"]) == 50

    rows = atlab.corpus_metrics(["AAAA", "ABAB", "BANANA"])
    assert [r["metrics"]["index"] for r in rows] == [2, 2, 4]
    assert atlab.spearman([1, 2, 3], [3, 5, 9]) == 1.0
    table = atlab.divergence(64)
    assert table[63]["description_bits"] - table[7]["description_bits"] == 6

    print("atlab smoke test: ok")


if __name__ == "__main__":
    main()
