"""High-precision evaluation of the largeness constants, written directly from
the formulas (no shared code with the C++ implementation). Output is pasted
into tests/test_theory.cpp and tests/acceptance/acceptance.cpp."""
from mpmath import mp, mpf, sqrt

mp.dps = 40

SETS = {
    "worked": dict(p=3, nu=1, mu=1, kappa=1, tau=1, W=1, g=0, E=0, cp=1, s1=1, s2=1),
    "moderate": dict(p=3, nu=mpf("0.5"), mu=mpf("0.2"), kappa=2000, tau=mpf("0.01"),
                     W=mpf("21.4"), g=mpf("1.7"), E=mpf("3.2"), cp=mpf("0.225"),
                     s1=mpf("1.5"), s2=mpf("0.75")),
    "steep": dict(p=4, nu=2, mu=3, kappa=50, tau=mpf("1e-4"), W=3, g=mpf("0.4"),
                  E=mpf("0.9"), cp=mpf("0.3"), s1=1, s2=mpf("0.8")),
}


def evaluate(p, nu, mu, kappa, tau, W, g, E, cp, s1, s2):
    p, nu, mu, W, g, E = map(mpf, (p, nu, mu, W, g, E))
    cp, s1, s2 = map(mpf, (cp, s1, s2))
    lead = (s1 + s2) ** 2 * (1 + cp) ** 2 * W
    denom = lambda k: 54 * (1 + cp) ** 2 * (1 + s1) ** 2 * (1 + 2 * k)

    def small(k, grad):
        return k * min(mpf(1), mu) * (1 + W) ** -2 * (1 + grad) ** -2 / denom(k)

    c1 = 4 * sqrt(2) * lead * g ** 2
    c1p = 4 * sqrt(2) * lead * (1 + g) ** 2
    kh = 8 * sqrt(2) * lead * (1 + nu / p * E) ** (2 / p)
    th = small(kh, (nu / p * E) ** (1 / p))
    gb = (p / nu * E) ** (1 / p)
    kha = 8 * sqrt(2) * lead * (1 + gb) ** 2
    tha = small(kha, gb)
    return dict(c1=c1, c1_proof=c1p, c2=small(c1, g), c2_proof=small(c1p, g),
                kappa_hat=kh, tau_hat=th, kappa_hat_alt=kha, tau_hat_alt=tha,
                alpha0_unique_bound=c1p)


for name, s in SETS.items():
    print(name)
    for k, v in evaluate(**s).items():
        print(f"  {k} = {mp.nstr(v, 20, min_fixed=-1, max_fixed=-1)}")
