"""Regenerate ``mlf_golden.json`` from mpmath.

Each value is E_{a,b}(x) for x <= 0 from Talbot inversion of the Laplace
transform s^(a-b) / (s^a - x) at t = 1. Where the power series converges
without catastrophic loss at the working precision it is evaluated too, and
the two must agree to 1e-20.

    python3 tests/oracles/gen_mlf_golden.py
"""

import json
from pathlib import Path

import mpmath as mp

ALPHAS = [round(0.1 * k, 1) for k in range(1, 10)]
XS = [0.0] + [-(10 ** float(e)) for e in mp.linspace(mp.log10(0.01), mp.log10(50), 15)]


def talbot(a, b, x):
    mp.mp.dps = 40
    a, b, x = mp.mpf(a), mp.mpf(b), mp.mpf(x)
    return mp.invertlaplace(lambda s: s ** (a - b) / (s**a - x), 1, method="talbot")


def series(a, b, x):
    # terms peak near exp(|x|^(1/a)); give the sum enough digits to absorb that
    loss = float(abs(x)) ** (1.0 / a) / 2.3
    if loss > 150:
        return None
    mp.mp.dps = int(loss) + 40
    a, b, x = mp.mpf(a), mp.mpf(b), mp.mpf(x)
    total, k = mp.mpf(0), 0
    while True:
        term = x**k / mp.gamma(a * k + b)
        total += term
        if k > 10 and abs(term) < mp.mpf(10) ** (-mp.mp.dps):
            return total
        k += 1


def main() -> None:
    rows = []
    for a in ALPHAS:
        for b in sorted({1.0, a}):
            for x in XS:
                if x == 0:
                    mp.mp.dps = 40
                    val = 1 / mp.gamma(mp.mpf(b))
                else:
                    val = talbot(a, b, x)
                    ref = series(a, b, x)
                    if ref is not None:
                        assert abs(val - ref) <= 1e-20 * abs(ref), (a, b, x, val, ref)
                rows.append({"alpha": a, "beta": b, "x": x, "value": mp.nstr(val, 25)})
    out = Path(__file__).with_name("mlf_golden.json")
    out.write_text(json.dumps(rows, indent=1) + "\n")
    print(f"wrote {len(rows)} values to {out}")


if __name__ == "__main__":
    main()
