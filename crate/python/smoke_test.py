"""Smoke test for the bhtqaoa extension module.

Build and run from the repository root:

    cargo build --release -p bhtqaoa-python --features extension-module
    cp target/release/libbhtqaoa.so python/bhtqaoa.so
    python3 python/smoke_test.py
"""

import bhtqaoa


def main():
    f = bhtqaoa.Formula("(a | b | ~c) & (~a | c) & (~b | c)")
    assert f.variables == ["a", "b", "c"]
    assert f.minterms() == ["000", "101", "110", "111"]
    assert bhtqaoa.verify(f) == f.minterms()

    esop = bhtqaoa.Esop("~a~b~c ^ a~bc ^ bc")
    assert esop.is_disjoint()
    hc = esop.hamiltonian()
    assert hc.paulis == ["III", "ZII", "ZIZ", "ZZI", "ZZZ"]
    assert hc.coeffs == [-0.5, 0.25, -0.25, -0.25, -0.25]
    assert bhtqaoa.mixer(3) == (["XII", "IXI", "IIX"], [2.0, 2.0, 2.0])

    phase = esop.phase_oracle()
    assert [phase.phase(x) for x in range(8)] == [-1 if e == -1.0 else 1 for e in hc.diag()]
    probs = hc.qaoa_probabilities([1.0], [0.5])
    assert abs(sum(probs) - 1.0) < 1e-12

    sudoku = bhtqaoa.Formula(
        "(cell_1 ^ cell_2) & (cell_1 ^ cell_3) & (cell_2 ^ cell_4) & (cell_3 ^ cell_4)"
    )
    report = sudoku.synthesize().phase_oracle().gate_report()
    assert report["x"] == 8 and report["mcz"] == {"4": 2}

    r = bhtqaoa.solve(f, seed=7)
    assert r["solutions"] == ["000", "101", "110", "111"], r["solutions"]
    assert r["verified"]
    assert bhtqaoa.solve(esop, seed=7)["solutions"] == ["000", "101", "110", "111"]
    assert bhtqaoa.solve("a ^ b", objective="sampled", seed=3)["solutions"] == ["01", "10"]

    for text, exc in [("a & (b", bhtqaoa.ParseError), ("a & ~a", bhtqaoa.UnsatisfiableError)]:
        try:
            bhtqaoa.solve(text)
        except exc:
            pass
        else:
            raise AssertionError(f"{text!r} should raise {exc.__name__}")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
