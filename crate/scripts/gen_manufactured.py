"""Emit Rust code for the manufactured fields of the smooth test problems.

Usage: python3 scripts/gen_manufactured.py > crates/core/src/problems/generated.rs

Each problem is given by two stream functions (state and co-state velocity),
the pressures, the viscosity, the reaction and the transport field. The script
differentiates symbolically, checks every emitted field against central finite
differences at a few points, and prints the Rust source.
"""

import random
import sys

import sympy as sp
from sympy.printing.rust import RustCodePrinter


class _Printer(RustCodePrinter):
    def _print_Integer(self, expr, **kw):
        if kw.get("_type"):
            return f"({int(expr)}.0_f64)"
        return f"{int(expr)}.0"

    def _print_Rational(self, expr, **kw):
        return f"({int(expr.p)}.0 / {int(expr.q)}.0)"

    def _print_Add(self, expr, order=None):
        # the stock printer can drop the parentheses of a sum nested in a product
        return "(" + super()._print_Add(expr, order) + ")"

    def _print_Pow(self, expr, **kw):
        if expr.exp.is_Integer and expr.exp > 1:
            base = self.parenthesize(expr.base, sp.printing.precedence.PRECEDENCE["Pow"])
            return f"{base}.powi({int(expr.exp)})"
        return super()._print_Pow(expr, **kw)


def rust_code(e):
    return _Printer().doprint(e)

x1, x2 = sp.symbols("x1 x2", real=True)
X = (x1, x2)


def curl_s(psi):
    return sp.Matrix([sp.diff(psi, x2), -sp.diff(psi, x1)])


def curl_v(v):
    return sp.diff(v[1], x1) - sp.diff(v[0], x2)


def grad(s):
    return sp.Matrix([sp.diff(s, x1), sp.diff(s, x2)])


def jac(v):
    return sp.Matrix(2, 2, lambda i, j: sp.diff(v[i], X[j]))


def problem_fields(psi_y, psi_w, p, q, nu, sigma, beta):
    y = curl_s(psi_y)
    w = curl_s(psi_w)
    gy, gw = jac(y), jac(w)
    omega = curl_v(y)
    theta = curl_v(w)
    gnu = grad(nu)
    eps_y = (gy + gy.T) / 2
    eps_w = (gw + gw.T) / 2
    gbeta = jac(beta)
    div_beta = gbeta[0, 0] + gbeta[1, 1]
    state = -2 * eps_y * gnu + nu * curl_s(omega) + gy * beta + sigma * y + grad(p)
    adj = (-2 * eps_w * gnu + nu * curl_s(theta) - gw * beta - div_beta * w
           + sigma * w - grad(q))
    return {
        "y": [y[0], y[1]],
        "grad_y": [[gy[0, 0], gy[0, 1]], [gy[1, 0], gy[1, 1]]],
        "omega": omega,
        "p": p,
        "w": [w[0], w[1]],
        "grad_w": [[gw[0, 0], gw[0, 1]], [gw[1, 0], gw[1, 1]]],
        "theta": theta,
        "q": q,
        "state_op": [state[0], state[1]],
        "adjoint_op": [adj[0], adj[1]],
    }


def flatten(fields):
    names, exprs = [], []
    for k, v in fields.items():
        if isinstance(v, list):
            for i, a in enumerate(v):
                if isinstance(a, list):
                    for j, b in enumerate(a):
                        names.append(f"{k}[{i}][{j}]")
                        exprs.append(b)
                else:
                    names.append(f"{k}[{i}]")
                    exprs.append(a)
        else:
            names.append(k)
            exprs.append(v)
    return names, exprs


def fd_check(name, fields, psi_y, psi_w, p, q, nu, sigma, beta):
    """Recompute the operators with nested central differences and compare."""
    rng = random.Random(7)
    fy = sp.lambdify(X, psi_y, "math")
    fw = sp.lambdify(X, psi_w, "math")
    fp = sp.lambdify(X, p, "math")
    fq = sp.lambdify(X, q, "math")
    fnu = sp.lambdify(X, nu, "math")
    fs = sp.lambdify(X, sigma, "math")
    fb = sp.lambdify(X, list(beta), "math")
    st = sp.lambdify(X, fields["state_op"], "math")
    ad = sp.lambdify(X, fields["adjoint_op"], "math")
    h = 1e-3

    def d(f, i):
        def g(a, b):
            e = [0.0, 0.0]
            e[i] = h
            return (-f(a + 2 * e[0], b + 2 * e[1]) + 8 * f(a + e[0], b + e[1])
                    - 8 * f(a - e[0], b - e[1]) + f(a - 2 * e[0], b - 2 * e[1])) / (12 * h)
        return g

    def vel(psi):
        return (d(psi, 1), lambda a, b: -d(psi, 0)(a, b))

    def operator(psi, pres, sign):
        v = vel(psi)
        om = lambda a, b: d(v[1], 0)(a, b) - d(v[0], 1)(a, b)
        curl_om = (d(om, 1), lambda a, b: -d(om, 0)(a, b))

        def op(a, b):
            g = [[d(v[i], j)(a, b) for j in range(2)] for i in range(2)]
            gn = [d(fnu, 0)(a, b), d(fnu, 1)(a, b)]
            bt = fb(a, b)
            gb = [[d(lambda s, t, i=i: fb(s, t)[i], j)(a, b) for j in range(2)] for i in range(2)]
            divb = gb[0][0] + gb[1][1]
            out = []
            for i in range(2):
                eps_gn = sum((g[i][j] + g[j][i]) / 2 * gn[j] for j in range(2))
                conv = sum(g[i][j] * bt[j] for j in range(2))
                vi = v[i](a, b)
                r = -2 * eps_gn + fnu(a, b) * curl_om[i](a, b) + fs(a, b) * vi
                if sign > 0:
                    r += conv + d(pres, i)(a, b)
                else:
                    r += -conv - divb * vi - d(pres, i)(a, b)
                out.append(r)
            return out
        return op

    sop, aop = operator(fy, fp, 1), operator(fw, fq, -1)
    worst = 0.0
    for _ in range(4):
        a, b = rng.uniform(0.2, 0.4), rng.uniform(0.2, 0.4)
        for ref, val in ((st(a, b), sop(a, b)), (ad(a, b), aop(a, b))):
            for r, v in zip(ref, val):
                worst = max(worst, abs(r - v) / max(1.0, abs(r)))
    if worst > 1e-3:
        sys.exit(f"{name}: finite-difference mismatch {worst:.3e}")
    print(f"// {name}: finite-difference check max rel. deviation {worst:.1e}", file=sys.stderr)


def emit(name, doc, fields):
    names, exprs = flatten(fields)
    repl, red = sp.cse(exprs, symbols=sp.numbered_symbols("t"), optimizations="basic")
    out = [f"/// {doc}", f"pub(crate) fn {name}(x1: f64, x2: f64) -> ExactFields {{"]
    for s, e in repl:
        out.append(f"    let {s} = {rust_code(e)};")
    out.append("    let mut f = ExactFields::default();")
    for n, e in zip(names, red):
        out.append(f"    f.{n} = {rust_code(e)};")
    out.append("    f")
    out.append("}")
    return "\n".join(out)


def main():
    pi = sp.pi
    blocks = []

    # smooth problem on the unit square with a degenerate viscosity corner
    psi_y = (sp.sin(pi * x1) * sp.sin(pi * x2)) ** 2
    psi_w = (sp.sin(2 * pi * x1) * sp.sin(2 * pi * x2)) ** 2
    p = sp.cos(2 * pi * x1) * sp.cos(2 * pi * x2)
    q = sp.sin(2 * pi * x1) * sp.sin(2 * pi * x2)
    nu = sp.Rational(1, 1000) + sp.Rational(999, 1000) * x1 * x2
    sigma = sp.Integer(100)
    beta = curl_s(psi_y)
    f = problem_fields(psi_y, psi_w, p, q, nu, sigma, beta)
    fd_check("square", f, psi_y, psi_w, p, q, nu, sigma, beta)
    blocks.append(emit("square_fields", "Fields of the smooth unit-square problem.", f))

    # boundary-layer problem on the unit triangle
    e50 = sp.exp(-50)
    layer1 = 1 - x1 - (sp.exp(-50 * x1) - e50) / (1 - e50)
    layer2 = 1 - x2 - (sp.exp(-50 * x2) - e50) / (1 - e50)
    psi_y = x1 * x2 ** 2 * (1 - x1 - x2) ** 2 * layer1
    psi_w = x1 ** 2 * x2 * (1 - x1 - x2) ** 2 * layer2
    p = sp.cos(2 * pi * x2) / 1024
    q = sp.cos(2 * pi * x1) / 1024
    nu = 1 + sp.Rational(1, 1000) * x1 * x2
    sigma = sp.Integer(100)
    beta = sp.Matrix([1, 1])
    f = problem_fields(psi_y, psi_w, p, q, nu, sigma, beta)
    fd_check("triangle", f, psi_y, psi_w, p, q, nu, sigma, beta)
    blocks.append(emit("triangle_fields", "Fields of the boundary-layer unit-triangle problem.", f))

    print("// Generated by scripts/gen_manufactured.py. Do not edit by hand.")
    print("#![allow(clippy::all, unused_parens)]")
    print()
    print("use std::f64::consts::PI;")
    print()
    print("use super::ExactFields;")
    print()
    print("\n\n".join(blocks))


if __name__ == "__main__":
    main()
