"""High-precision reference values for the test suite (mpmath, 30+ digits).

Run: python3 tools/oracle.py
Every value frozen into a Rust test or acceptance tolerance is printed here.
"""
import mpmath as mp

mp.mp.dps = 40


def vol(N):
    return mp.pi ** (mp.mpf(N) / 2) / mp.gamma(1 + mp.mpf(N) / 2)


def omega(N):
    return N * vol(N)


def alpha_n(N):
    return N * omega(N) ** (mp.mpf(1) / (N - 1))


def alpha_p(N, p):
    return (alpha_n(N) ** (mp.mpf(N - 1) / N) * vol(N) ** (1 / p - mp.mpf(1) / N)) ** (p / (p - 1))


def gam(N, p):
    return N * (p - 1) / (N - p)


def pstar(N, p):
    return N * p / (N - p)


def sobolev(N, p):
    return (mp.sqrt(mp.pi) * mp.mpf(N) ** (1 / p) * ((N - p) / (p - 1)) ** ((p - 1) / p)
            * (mp.gamma(N / p) * mp.gamma(N + 1 - N / p) / (mp.gamma(N) * mp.gamma(1 + mp.mpf(N) / 2))) ** (mp.mpf(1) / N))


def coef(N, p):
    return (N - p) / (N * (p - 1)) * alpha_p(N, p)


def mp_direct(N, p):
    return vol(N) + coef(N, p) ** gam(N, p) * sobolev(N, p) ** (-pstar(N, p))


def mp_gamma(N, p):
    return vol(N) * (1 + (mp.gamma(N) / (mp.gamma(N / p) * mp.gamma(N + 1 - N / p))) ** (p / (N - p)))


def cc(N):
    return vol(N) * (1 + mp.e ** mp.harmonic(N - 1))


def fp(N, p, s):
    return (1 + coef(N, p) * abs(s) ** (p / (p - 1))) ** gam(N, p)


def show(label, x):
    print(f"{label} = {mp.nstr(x, 20)}")


print("# special functions")
show("gamma(1.5)", mp.gamma(1.5))
show("log_gamma(10)", mp.log(mp.factorial(9)))
show("digamma(1)", mp.digamma(1))
show("digamma(2)", mp.digamma(2))
print("# constants")
for N in range(2, 7):
    show(f"vol({N})", vol(N))
    show(f"alpha_n({N})", alpha_n(N))
    show(f"cc({N})", cc(N))
for (N, p) in [(2, mp.mpf("1.5")), (3, mp.mpf(2)), (2, mp.mpf("1.6"))]:
    show(f"alpha_p({N},{p})", alpha_p(N, p))
    show(f"S_p({N},{p})", sobolev(N, p))
    show(f"M_p direct({N},{p})", mp_direct(N, p))
    show(f"M_p gamma({N},{p})", mp_gamma(N, p))
    show(f"F_p({N},{p},1)", fp(N, p, 1))
N, p, s = 2, mp.mpf("1.6"), mp.mpf(2)
g = gam(N, p)
c = coef(N, p)
C1 = g * 2 ** (g - 1) * c
C2 = g * 2 ** (g - 1) * c ** (g - 1)
show("H(2.0) N=2 p=1.6", C1 * s ** (p / (p - 1)) + C2 * s ** (pstar(N, p) - p / (p - 1)))

print("# M_p -> CC gaps along p = N - 10^-k")
for N in [2, 3, 4, 5]:
    for k in range(1, 7):
        p = N - mp.mpf(10) ** (-k)
        if p <= mp.mpf(2 * N) / (N + 1):
            continue
        show(f"gap N={N} k={k}", mp_gamma(N, p) - cc(N))
print("# pointwise |F_p(s) - exp(4 pi s^2)|, N=2")
for s in [mp.mpf("0.3"), mp.mpf(1), mp.mpf(3)]:
    for k in range(1, 7):
        p = 2 - mp.mpf(10) ** (-k)
        show(f"s={s} k={k}", abs(fp(2, p, s) - mp.e ** (alpha_n(2) * s ** 2)))

print("# modified Aubin-Talenti family, N=2 p=1.5 (quadrature at 30 digits)")
mp.mp.dps = 30


def at_family(N, p, eps):
    pc = p / (p - 1)
    e = (N - p) / p
    U = lambda rho: (1 + rho ** pc) ** (-e)
    dU = lambda rho: -e * (1 + rho ** pc) ** (-e - 1) * pc * rho ** (pc - 1)
    R = 1 / eps
    pts = [0] + [x for x in [eps * 10 ** j for j in range(-2, 8)] if x < 1] + [1]
    pts_rho = [x / eps for x in pts]
    om = omega(N)
    gradU = om * mp.quad(lambda r: r ** (N - 1) * abs(dU(r)) ** p, pts_rho)
    K = 1 / gradU ** (1 / p)
    tail = U(R)
    W = lambda r: K * eps ** (-e) * (U(r / eps) - tail)
    ps = pstar(N, p)
    Lq = om * mp.quad(lambda r: r ** (N - 1) * abs(W(r)) ** ps, pts)
    c = coef(N, p)
    g = gam(N, p)
    Fint = om * mp.quad(lambda r: r ** (N - 1) * (1 + c * abs(W(r)) ** pc) ** g, pts)
    C1 = g * 2 ** (g - 1) * c
    C2 = g * 2 ** (g - 1) * c ** (g - 1)
    Hint = om * mp.quad(lambda r: r ** (N - 1) * (C1 * abs(W(r)) ** pc + C2 * abs(W(r)) ** (ps - pc)), pts)
    return K, Lq, Fint, Hint


N, p = 2, mp.mpf("1.5")
target_lq = sobolev(N, p) ** (-pstar(N, p))
show("S_p^-p*", target_lq)
show("M_p", mp_direct(N, p))
for eps in ["1e-1", "3e-2", "1e-2", "3e-3", "1e-3", "3e-4", "1e-4"]:
    K, Lq, Fint, Hint = at_family(N, p, mp.mpf(eps))
    print(f"eps={eps} K={mp.nstr(K, 17)} lq={mp.nstr(Lq, 17)} lq_relgap={mp.nstr((target_lq - Lq) / target_lq, 6)} "
          f"F={mp.nstr(Fint, 17)} F_relgap={mp.nstr((mp_direct(N, p) - Fint) / mp_direct(N, p), 6)} H={mp.nstr(Hint, 17)}")
