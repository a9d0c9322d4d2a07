"""Higher-order forward derivatives of a scalar expression via jet algebras.

Evaluates the expression at base + t over K[t]/t^(order+1); the coefficient
of t^n is f^(n)(base)/n!.  Central differences of matching order are printed
alongside as a sanity column.

    python3 scripts/taylor_tower.py --expr "exp(sin(x1))" --base 0.3 --order 6
"""

import argparse
import math

from superweil import SuperDomain, eval_ast, make_apoint, make_truncated, section
from superweil.algebra import Monomial
from superweil.fields import REAL
from superweil.superfunc import eval_classical


def central_difference(s, base, n, h):
    total = 0.0
    for k in range(n + 1):
        total += (-1) ** k * math.comb(n, k) * eval_classical(s, (base + (n / 2 - k) * h,))
    return total / h**n


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--expr", default="exp(sin(x1))")
    parser.add_argument("--base", type=float, default=0.3)
    parser.add_argument("--order", type=int, default=6)
    parser.add_argument("--fd-step", type=float, default=1e-2)
    args = parser.parse_args()

    domain = SuperDomain(1, 0)
    s = section(domain, args.expr)
    algebra = make_truncated(1, 0, args.order + 1, REAL)
    x = make_apoint(domain, algebra, [algebra.scalar(args.base) + algebra.gen_even(1)], [])
    jet = eval_ast(x, s)

    print(f"f = {args.expr} at x = {args.base}")
    print(f"{'n':>2}  {'f^(n)(x) via jet':>22}  {'central difference':>22}")
    for n in range(args.order + 1):
        coeff = jet.coefficient(Monomial((n,), 0))
        exact = coeff * math.factorial(n)
        fd = central_difference(s, args.base, n, args.fd_step)
        print(f"{n:>2}  {exact:>22.12g}  {fd:>22.12g}")


if __name__ == "__main__":
    main()
