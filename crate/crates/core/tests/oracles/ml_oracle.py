"""Reference values for E_{alpha,beta}(z), z <= 0.

Every value is the power series summed in arbitrary-precision arithmetic,
with the working precision raised until the largest partial term is
absorbed. Inputs are rounded to binary64 first so the Rust side evaluates
the same point. Regenerate with:

    python3 ml_oracle.py ../data
"""
import random
import sys

import mpmath as mp


def taylor(alpha, beta, z):
    a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
    # size the precision from the largest term |z|^k / Gamma(alpha k + beta)
    peak = 0.0
    k = 0
    with mp.workdps(30):
        while True:
            lt = k * mp.log(abs(x)) - mp.loggamma(a * k + b) if x != 0 else -mp.loggamma(b)
            peak = max(peak, float(lt))
            if k > 10 and float(lt) < peak - 120 and float(lt) < -120:
                break
            k += 1
    digits = int(peak / 2.302585) + 40
    with mp.workdps(max(digits, 40)):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
        s = mp.mpf(0)
        for j in range(k + 1):
            s += x**j * mp.rgamma(a * j + b)
        return s


def cut_integral(alpha, beta, z):
    """Independent check for small alpha in the intermediate band (tanh-sinh)."""
    with mp.workdps(40):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), -mp.mpf(z)
        f = lambda r: mp.exp(-r) * r ** (a - b) * (r**a * mp.sinpi(b) - x * mp.sinpi(a - b)) / (
            r ** (2 * a) + 2 * x * r**a * mp.cospi(a) + x * x
        )
        # r = v^q removes the r^(a-b) endpoint singularity on (0, 1)
        q = 1 / (1 + a - b)
        near = mp.quad(lambda v: f(v**q) * q * v ** (q - 1), [0, 1])
        return (near + mp.quad(f, [1, 5, 20, 80, mp.inf])) / mp.pi


def asymptotic(alpha, beta, z, terms=400):
    with mp.workdps(40):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
        return -mp.fsum(x ** (-k) * mp.rgamma(b - a * k) for k in range(1, terms))


def f64(v):
    return float(repr(float(v)))


def main(outdir):
    rng = random.Random(20240531)
    with open(f"{outdir}/ml_taylor_oracle.csv", "w") as fh:
        fh.write("alpha,beta,z,value\n")
        for _ in range(200):
            alpha = f64(rng.uniform(0.25, 1.95))
            beta = f64(rng.uniform(0.1, 3.0))
            z = f64(-rng.uniform(0.0, 4.0))
            fh.write(f"{alpha!r},{beta!r},{z!r},{mp.nstr(taylor(alpha, beta, z), 20)}\n")
    with open(f"{outdir}/ml_wide_oracle.csv", "w") as fh:
        fh.write("alpha,beta,z,value\n")
        for _ in range(60):
            alpha = f64(rng.uniform(0.5, 1.95))
            beta = f64(rng.uniform(0.2, 2.5))
            z = f64(-rng.uniform(4.0, 60.0))
            fh.write(f"{alpha!r},{beta!r},{z!r},{mp.nstr(taylor(alpha, beta, z), 20)}\n")
        for _ in range(40):
            alpha = f64(rng.uniform(0.05, 0.5))
            beta = f64(rng.uniform(0.2, 1.0 + alpha - 0.05))
            z = f64(-rng.uniform(1.0, 60.0))
            value = cut_integral(alpha, beta, z)
            # the divergent expansion is still far from its optimal truncation here
            if -z > 20:
                assert abs(value - asymptotic(alpha, beta, z)) < 1e-16, (alpha, beta, z)
            fh.write(f"{alpha!r},{beta!r},{z!r},{mp.nstr(value, 20)}\n")
        # orders just below one, where the cut integrand is sharply peaked
        for _ in range(20):
            alpha = f64(1.0 - 10 ** rng.uniform(-4.0, -1.5))
            beta = rng.choice([1.0, alpha])
            z = f64(-rng.uniform(0.5, 40.0))
            fh.write(f"{alpha!r},{beta!r},{z!r},{mp.nstr(taylor(alpha, beta, z), 20)}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
