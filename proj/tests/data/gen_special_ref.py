# Regenerates special_ref.txt with mpmath at 40 significant digits.
# Lines: "A x Ai(x) Ai'(x)" on [-40, 10] and "B x J0(x) J1(x)" on [0, 200].
import mpmath as mp

mp.mp.dps = 40


def grid(a, b, n):
    return [mp.mpf(a) + (mp.mpf(b) - mp.mpf(a)) * k / (n - 1) for k in range(n)]


with open("special_ref.txt", "w") as out:
    for x in grid(-40, 10, 998):
        x = mp.mpf(float(x))
        out.write("A %s %s %s\n" % (mp.nstr(x, 20), mp.nstr(mp.airyai(x), 25), mp.nstr(mp.airyai(x, derivative=1), 25)))
    for x in grid(0, 200, 998):
        x = mp.mpf(float(x))
        out.write("B %s %s %s\n" % (mp.nstr(x, 20), mp.nstr(mp.besselj(0, x), 25), mp.nstr(mp.besselj(1, x), 25)))
    mp.mp.dps = 50
    out.write("C ai0 %s\n" % mp.nstr(mp.power(3, mp.mpf(-2) / 3) / mp.gamma(mp.mpf(2) / 3), 45))
