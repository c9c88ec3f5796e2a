"""Analytic heat solution h(t) = sqrt(2) sin(pi x0) exp(-pi^2 t), a = phi_1, L = 1."""
import mpmath as mp

mp.mp.dps = 40
x0 = mp.mpf("0.3")
print("t,h")
for j in range(21):
    t = mp.mpf(j) / 20
    h = mp.sqrt(2) * mp.sin(mp.pi * x0) * mp.exp(-mp.pi**2 * t)
    print(f"{mp.nstr(t, 17)},{mp.nstr(h, 20)}")
