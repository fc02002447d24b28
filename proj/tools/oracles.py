"""Reference values computed with mpmath, independent of the C++ code.

Run once and paste the output into tests/oracle_values.hpp:

    python3 tools/oracles.py > tests/oracle_values.hpp
"""

import mpmath as mp

mp.mp.dps = 40


def phi(j, x):
    return mp.sqrt(2) * mp.sin(j * mp.pi * x)


def b_quad(mu, j):
    # <mu phi_1, phi_j>
    return mp.quad(lambda x: mu(x) * phi(1, x) * phi(j, x), mp.linspace(0, 1, 2 * j + 1))


def bump_integral():
    return mp.quad(lambda s: mp.exp(-1 / (1 - s * s)), [-1, 0, 1])


def sin_moment(w0, T):
    # int_0^T sin(w0 t) e^{i w0 t} dt
    return mp.quad(lambda t: mp.sin(w0 * t) * mp.expj(w0 * t), mp.linspace(0, T, 40))


def linear_moment(w, T):
    return mp.quad(lambda t: t * mp.expj(w * t), mp.linspace(0, T, 40))


def second_primitive_sin(a, T):
    # u_2(T) = int_0^T (T - s) sin(a s) ds
    return mp.quad(lambda s: (T - s) * mp.sin(a * s), mp.linspace(0, T, 20))


def duhamel_mode1(t):
    lam = mp.pi ** 2
    return mp.quad(lambda tau: mp.expj(-lam * (t - tau)), [0, t])


def fmt(v):
    return mp.nstr(v, 20, min_fixed=-30, max_fixed=30)


def cfmt(z):
    return "{%s, %s}" % (fmt(mp.re(z)), fmt(mp.im(z)))


def main():
    out = ["#pragma once", "", "// Generated by tools/oracles.py (mpmath, 40 digits).", "",
           "namespace oracle {", ""]
    bx2 = [b_quad(lambda x: x * x, j) for j in range(1, 49)]
    out.append("inline constexpr double b_x2[48] = {")
    out += ["    %s," % fmt(v) for v in bx2]
    out.append("};")
    bx = [b_quad(lambda x: x, j) for j in range(1, 13)]
    out.append("inline constexpr double b_x[12] = {")
    out += ["    %s," % fmt(v) for v in bx]
    out.append("};")
    bc = [b_quad(lambda x: 1 + 2 * x - 3 * x ** 3, j) for j in range(1, 9)]
    out.append("// mu(x) = 1 + 2x - 3x^3")
    out.append("inline constexpr double b_cubic[8] = {")
    out += ["    %s," % fmt(v) for v in bc]
    out.append("};")
    out.append("inline constexpr double bump_integral = %s;" % fmt(bump_integral()))
    w0 = 3 * mp.pi ** 2
    out.append("// w0 = 3 pi^2, T = 1")
    out.append("inline constexpr double sin_moment[2] = %s;" % cfmt(sin_moment(w0, 1)))
    out.append("// int_0^1 t e^{i w t} dt for w = 8 pi^2")
    out.append("inline constexpr double linear_moment[2] = %s;" % cfmt(linear_moment(8 * mp.pi ** 2, 1)))
    out.append("// a = 7, T = 1")
    out.append("inline constexpr double u2_sin7 = %s;" % fmt(second_primitive_sin(7, 1)))
    out.append("// t = 0.37")
    out.append("inline constexpr double duhamel_mode1[2] = %s;" % cfmt(duhamel_mode1(mp.mpf("0.37"))))
    out += ["", "}  // namespace oracle", ""]
    print("\n".join(out))


if __name__ == "__main__":
    main()
