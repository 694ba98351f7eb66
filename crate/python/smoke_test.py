"""Quick check of the Python bindings.

    maturin develop -m crates/python/Cargo.toml --release
    python python/smoke_test.py
"""

import math

import primefeat as pf


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert pf.primes(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert pf.primes(10000)[-1] == 104729

    enc = pf.DynamicPrime(2, 128, 0.007)
    r = enc.injectivity_radius
    assert enc.is_overdetermined and r > 0
    x = [0.4 * r, -0.3 * r]
    z = enc.forward(x)
    assert len(z) == 128
    assert close(sum(v * v for v in z), 64.0, 1e-9)
    back = enc.reverse(z)
    assert all(close(a, b, 1e-8) for a, b in zip(x, back)), back

    pts, labels = pf.make_spiral(200)
    assert len(pts) == 200 and set(labels) == {0, 1}
    recon = enc.reverse_batch(enc.forward_batch(pts))
    err = max(abs(a - b) for p, q in zip(pts, recon) for a, b in zip(p, q))
    assert err < 1e-8, err

    rows = pf.static_codebook(4, 4)
    assert rows[0] == [1.0, 1.0, 0.0, 0.0]

    prime = pf.gram_report(pf.static_codebook(500, 64), source="static_prime")
    gauss = pf.gram_report(pf.gaussian_codebook(500, 64, seed=42))
    for rep in (prime, gauss):
        assert rep["mu_max"] >= rep["welch"] - 1e-12
        assert len(rep["histogram"]) == 201

    assert close(pf.welch_bound(8, 4), 0.37796447300922720, 1e-15)
    assert pf.welch_bound(4, 4) is None
    assert close(pf.rms_error([0.3, -0.4]), 0.35355339059327379, 1e-15)

    try:
        pf.DynamicPrime(2, 3, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("odd d_out accepted")

    circles, _ = pf.make_circles(100, noise=0.0, seed=1)
    radii = sorted({round(math.hypot(*p), 9) for p in circles})
    assert radii == [0.5, 1.0], radii

    print("smoke test ok: e_rms prime %.6f vs gaussian %.6f" % (prime["e_rms"], gauss["e_rms"]))


if __name__ == "__main__":
    main()
