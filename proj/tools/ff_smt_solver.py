#!/usr/bin/env python3
# Small QF_FF solver: reads an SMT-LIB script on stdin, prints sat/unsat/unknown
# and the requested values.
#
# Each disjunct of the assertions is a system of polynomial equations and
# disequalities over GF(p). Disequalities become z*(a-b) = 1. Linearly defined
# variables are eliminated exactly; what remains goes to a lex Groebner basis,
# and we branch on roots of univariate basis elements. For p <= FIELD_EQ_LIMIT
# the field equations x^p - x are added, which makes the procedure complete.
# For larger p a nonunit basis without a model found by branching is reported
# as unknown.

import itertools
import random
import sys

import sympy

FIELD_EQ_LIMIT = 31
SAMPLES = 6

sys.setrecursionlimit(100000)


def tokenize(text):
    out, i, n = [], 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ';':
            while i < n and text[i] != '\n':
                i += 1
        elif c in '()':
            out.append(c)
            i += 1
        elif c == '|':
            j = text.index('|', i + 1)
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()':
                j += 1
            out.append(text[i:j])
            i = j
    return out


def parse_sexprs(tokens):
    stack, top = [], []
    for t in tokens:
        if t == '(':
            stack.append(top)
            top = []
        elif t == ')':
            done = top
            top = stack.pop()
            top.append(done)
        else:
            top.append(t)
    return top


# Sparse polynomials: dict from monomial (sorted tuple of (var, exp)) to coeff.

def p_const(c, p):
    c %= p
    return {(): c} if c else {}


def p_var(v):
    return {((v, 1),): 1}


def p_add(a, b, p):
    r = dict(a)
    for m, c in b.items():
        s = (r.get(m, 0) + c) % p
        if s:
            r[m] = s
        else:
            r.pop(m, None)
    return r


def p_scale(a, k, p):
    k %= p
    if not k:
        return {}
    return {m: c * k % p for m, c in a.items()}


def m_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def p_mul(a, b, p):
    r = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = m_mul(m1, m2)
            s = (r.get(m, 0) + c1 * c2) % p
            if s:
                r[m] = s
            else:
                r.pop(m, None)
    return r


def p_pow(a, e, p):
    r = {(): 1}
    for _ in range(e):
        r = p_mul(r, a, p)
    return r


def p_vars(a):
    return {v for m in a for v, _ in m}


def p_subst(a, x, val, p):
    if x not in p_vars(a):
        return a
    r = {}
    cache = {}
    for m, c in a.items():
        e = 0
        rest = []
        for v, k in m:
            if v == x:
                e = k
            else:
                rest.append((v, k))
        term = {tuple(rest): c}
        if e:
            if e not in cache:
                cache[e] = p_pow(val, e, p)
            term = p_mul(term, cache[e], p)
        r = p_add(r, term, p)
    return r


def p_eval(a, env, p):
    s = 0
    for m, c in a.items():
        t = c
        for v, k in m:
            t = t * pow(env.get(v, 0), k, p) % p
        s = (s + t) % p
    return s


def linear_in(a, x):
    # coefficient of x when a == c*x + rest with c constant and x not in rest
    c = None
    for m in a:
        for v, k in m:
            if v != x:
                continue
            if k != 1 or len(m) != 1:
                return None
            c = a[m]
    return c


class Problem:
    def __init__(self, p):
        self.p = p
        self.fresh = 0

    def new_var(self):
        self.fresh += 1
        return '!z%d' % self.fresh


def term(sx, prob):
    p = prob.p
    if isinstance(sx, str):
        if sx.startswith('|'):
            return p_var(sx[1:-1])
        if sx.startswith('#f'):
            body = sx[2:].split('m')[0]
            return p_const(int(body), p)
        if sx.startswith('ff') and sx[2:].lstrip('-').isdigit():
            return p_const(int(sx[2:]), p)
        return p_var(sx)
    head = sx[0]
    if head == 'as':
        return term(sx[1], prob)
    args = [term(a, prob) for a in sx[1:]]
    if head == 'ff.add':
        r = {}
        for a in args:
            r = p_add(r, a, p)
        return r
    if head == 'ff.mul':
        r = {(): 1}
        for a in args:
            r = p_mul(r, a, p)
        return r
    if head == 'ff.neg':
        return p_scale(args[0], -1, p)
    if head == 'ff.sub':
        r = args[0]
        for a in args[1:]:
            r = p_add(r, p_scale(a, -1, p), p)
        return r
    raise ValueError('unsupported term ' + str(head))


# Formulas in negation normal form, as nested ('and'|'or', [...]) and
# literals ('eq'|'neq', poly).

def formula(sx, prob, positive=True):
    p = prob.p
    if isinstance(sx, str):
        if sx == 'true':
            return ('and', []) if positive else ('or', [])
        if sx == 'false':
            return ('or', []) if positive else ('and', [])
        raise ValueError('unsupported atom ' + sx)
    head = sx[0]
    if head == 'not':
        return formula(sx[1], prob, not positive)
    if head in ('and', 'or'):
        kids = [formula(k, prob, positive) for k in sx[1:]]
        op = head if positive else ('or' if head == 'and' else 'and')
        return (op, kids)
    if head == '=>':
        return formula(['or', ['not', sx[1]], sx[2]], prob, positive)
    if head == '=':
        ts = [term(a, prob) for a in sx[1:]]
        lits = [('eq' if positive else 'neq', p_add(ts[i], p_scale(ts[i + 1], -1, p), p))
                for i in range(len(ts) - 1)]
        return ('and' if positive else 'or', lits)
    if head == 'distinct':
        ts = [term(a, prob) for a in sx[1:]]
        lits = [('neq' if positive else 'eq', p_add(a, p_scale(b, -1, p), p))
                for a, b in itertools.combinations(ts, 2)]
        return ('and' if positive else 'or', lits)
    raise ValueError('unsupported formula ' + str(head))


def cubes(f):
    if f[0] in ('eq', 'neq'):
        yield [f]
        return
    if f[0] == 'or':
        for k in f[1]:
            yield from cubes(k)
        return
    parts = [list(cubes(k)) for k in f[1]]
    for combo in itertools.product(*parts):
        yield [lit for c in combo for lit in c]


class Unknown(Exception):
    pass


def gf_roots(poly, x, p):
    if p <= FIELD_EQ_LIMIT:
        return [v for v in range(p) if p_eval(poly, {x: v}, p) == 0]
    expr = to_sympy(poly, [x])
    P = sympy.Poly(expr, sympy.Symbol(x), modulus=p)
    roots = []
    for fac, _ in P.factor_list()[1]:
        if fac.degree() == 1:
            a, b = [int(c) % p for c in fac.all_coeffs()]
            roots.append((-b * pow(a, -1, p)) % p)
    return sorted(set(roots))


def to_sympy(poly, names):
    syms = {n: sympy.Symbol(n) for n in names}
    expr = sympy.Integer(0)
    for m, c in poly.items():
        t = sympy.Integer(c)
        for v, k in m:
            t *= syms[v] ** k
        expr += t
    return expr


def from_sympy(P, names, p):
    out = {}
    for mon, c in P.terms():
        key = tuple((names[i], e) for i, e in enumerate(mon) if e)
        c = int(c) % p
        if c:
            out[tuple(sorted(key))] = c
    return out


def eliminate(polys, p, trail):
    polys = [q for q in polys if q]
    changed = True
    while changed:
        changed = False
        for q in polys:
            if () in q and len(q) == 1:
                return None
        for i, q in enumerate(polys):
            for x in sorted(p_vars(q)):
                c = linear_in(q, x)
                if c is None:
                    continue
                rest = {m: k for m, k in q.items() if m != ((x, 1),)}
                val = p_scale(rest, -pow(c, -1, p), p)
                trail.append((x, val))
                polys = [p_subst(r, x, val, p) for j, r in enumerate(polys) if j != i]
                polys = [r for r in polys if r]
                changed = True
                break
            if changed:
                break
    for q in polys:
        if () in q and len(q) == 1:
            return None
    return polys


def solve(polys, p, depth=0):
    trail = []
    polys = eliminate(polys, p, trail)
    if polys is None:
        return None
    if not polys:
        return finish({}, trail, p)
    names = sorted(set().union(*[p_vars(q) for q in polys]))
    system = list(polys)
    if p <= FIELD_EQ_LIMIT:
        for v in names:
            system.append(p_add(p_pow(p_var(v), p, p), p_scale(p_var(v), -1, p), p))
    syms = [sympy.Symbol(n) for n in names]
    G = sympy.groebner([to_sympy(q, names) for q in system], *syms, order='lex', modulus=p)
    if any(g.is_number and g != 0 for g in G.exprs):
        return None
    basis = [from_sympy(sympy.Poly(g, *syms, modulus=p), names, p) for g in G.exprs]
    basis = [b for b in basis if b]
    target, values = None, None
    for b in basis:
        vs = p_vars(b)
        if len(vs) == 1:
            target = next(iter(vs))
            values = gf_roots(b, target, p)
            break
    complete = True
    if target is None:
        target = names[-1]
        if p <= FIELD_EQ_LIMIT:
            values = list(range(p))
        else:
            rng = random.Random(depth * 7919 + len(names))
            values = [0, 1] + [rng.randrange(2, p) for _ in range(SAMPLES)]
            complete = False
    unknown = False
    for v in values:
        try:
            sub = solve(basis + [p_add(p_var(target), p_const(-v, p), p)], p, depth + 1)
        except Unknown:
            unknown = True
            continue
        if sub is not None:
            return finish(sub, trail, p)
    if not complete or unknown:
        raise Unknown()
    return None


def finish(env, trail, p):
    env = dict(env)
    for x, val in reversed(trail):
        env[x] = p_eval(val, env, p)
    return env


def main():
    script = parse_sexprs(tokenize(sys.stdin.read()))
    prime = None
    asserts = []
    wanted = []
    for cmd in script:
        if not isinstance(cmd, list) or not cmd:
            continue
        if cmd[0] == 'define-sort':
            prime = int(cmd[3][2])
        elif cmd[0] == 'assert':
            asserts.append(cmd[1])
        elif cmd[0] == 'get-value':
            wanted = cmd[1]
    if prime is None:
        print('(error "no finite field sort")')
        return 1
    prob = Problem(prime)
    f = ('and', [formula(a, prob) for a in asserts])
    verdict, model = 'unsat', None
    for cube in cubes(f):
        polys = []
        for kind, q in cube:
            if kind == 'eq':
                polys.append(q)
            else:
                z = prob.new_var()
                polys.append(p_add(p_mul(p_var(z), q, prime), p_const(-1, prime), prime))
        try:
            env = solve(polys, prime)
        except Unknown:
            verdict = 'unknown'
            continue
        if env is not None:
            verdict, model = 'sat', env
            break
    print(verdict)
    if verdict == 'sat' and wanted:
        parts = []
        for w in wanted:
            name = w[1:-1] if w.startswith('|') else w
            parts.append('(%s #f%dm%d)' % (w, model.get(name, 0) % prime, prime))
        print('(' + ' '.join(parts) + ')')
    return 0


if __name__ == '__main__':
    sys.exit(main())
