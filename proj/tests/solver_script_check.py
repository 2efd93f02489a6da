#!/usr/bin/env python3
# Checks the bundled QF_FF solver script against brute force on small fields,
# plus a few large-field cases with known answers.
# usage: solver_script_check.py <ff_smt_solver.py>

import itertools
import random
import re
import subprocess
import sys

SCRIPT = sys.argv[1]
failures = []


def solve(text):
    p = subprocess.run([sys.executable, SCRIPT], input=text, capture_output=True, text=True, timeout=120)
    lines = p.stdout.strip().splitlines()
    model = {}
    if len(lines) > 1:
        for name, val in re.findall(r'\(\|([^|]*)\| #f(\d+)m\d+\)', lines[1]):
            model[name] = int(val)
    return (lines[0] if lines else 'error'), model


def check(name, ok, detail=''):
    print(('ok   ' if ok else 'FAIL ') + name + ('' if ok else '  ' + detail))
    if not ok:
        failures.append(name)


# Random polynomial systems as (python evaluator, smt string) pairs.
class Gen:
    def __init__(self, seed, names):
        self.rng = random.Random(seed)
        self.names = names

    def term(self, d):
        r = self.rng
        if d == 0 or r.randrange(3) == 0:
            if r.randrange(3):
                v = r.choice(self.names)
                return (lambda env, v=v: env[v]), '|%s|' % v
            c = r.randrange(5)
            return (lambda env, c=c: c), '(as ff%d F)' % c
        a, b = self.term(d - 1), self.term(d - 1)
        op = r.randrange(3)
        if op == 0:
            return (lambda env: a[0](env) + b[0](env)), '(ff.add %s %s)' % (a[1], b[1])
        if op == 1:
            return (lambda env: a[0](env) * b[0](env)), '(ff.mul %s %s)' % (a[1], b[1])
        return (lambda env: -a[0](env)), '(ff.neg %s)' % a[1]

    def atom(self, p):
        a, b = self.term(2), self.term(2)
        if self.rng.randrange(4) == 0:
            return (lambda env: (a[0](env) - b[0](env)) % p != 0), '(not (= %s %s))' % (a[1], b[1])
        return (lambda env: (a[0](env) - b[0](env)) % p == 0), '(= %s %s)' % (a[1], b[1])

    def formula(self, p):
        k = self.rng.randrange(1, 4)
        atoms = [self.atom(p) for _ in range(k)]
        if self.rng.randrange(3) == 0:
            return (lambda env: any(f(env) for f, _ in atoms)), '(or %s)' % ' '.join(s for _, s in atoms)
        return (lambda env: all(f(env) for f, _ in atoms)), '(and %s)' % ' '.join(s for _, s in atoms)


def script(p, names, body, get=True):
    out = ['(set-option :produce-models true)', '(set-logic QF_FF)', '(define-sort F () (_ FiniteField %d))' % p]
    out += ['(declare-fun |%s| () F)' % n for n in names]
    out.append('(assert %s)' % body)
    out.append('(check-sat)')
    if get:
        out.append('(get-value (%s))' % ' '.join('|%s|' % n for n in names))
    return '\n'.join(out) + '\n'


names = ['x', 'y', 'z']
agree = 0
total = 0
for p in (2, 3, 5, 7):
    g = Gen(p * 31, names)
    for i in range(15):
        f, body = g.formula(p)
        sat = any(f(dict(zip(names, vs))) for vs in itertools.product(range(p), repeat=len(names)))
        verdict, model = solve(script(p, names, body))
        total += 1
        ok = verdict == ('sat' if sat else 'unsat')
        if ok and sat:
            ok = set(model) == set(names) and f(model)
        agree += ok
        if not ok:
            check('random p=%d #%d' % (p, i), False, '%s vs brute force %s: %s' % (verdict, sat, body))
check('random systems agree with brute force (%d/%d)' % (agree, total), agree == total)

BIG = 2147483647
v, m = solve(script(BIG, ['a', 'b'], '(and (= (ff.add |a| |b|) (as ff5 F)) (= |a| (as ff2 F)))'))
check('linear system at 2^31-1', v == 'sat' and m == {'a': 2, 'b': 3})

v, _ = solve(script(BIG, ['a'], '(and (= (ff.mul |a| |a|) (as ff4 F)) (not (= |a| (as ff2 F))) '
                                '(not (= |a| (as ff%d F))))' % (BIG - 2)))
check('x^2 = 4 with both roots excluded is unsat at 2^31-1', v == 'unsat')

v, m = solve(script(BIG, ['a'], '(= (ff.mul |a| |a|) (as ff4 F))'))
check('x^2 = 4 at 2^31-1', v == 'sat' and m['a'] in (2, BIG - 2))

v, _ = solve(script(7, ['a'], '(= (ff.mul |a| |a|) (as ff3 F))'))
check('3 is a non-residue mod 7', v == 'unsat')

v, _ = solve(script(5, ['a'], 'false'))
check('false is unsat', v == 'unsat')

v, _ = solve('(set-logic QF_FF)\n(check-sat)\n')
check('script without a field sort is rejected', v.startswith('(error'))

print('%d failures' % len(failures))
sys.exit(1 if failures else 0)
