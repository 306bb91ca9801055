"""Shared generators and brute-force oracles for the test suite.

The oracles here deliberately avoid the library's own shortcuts: they
evaluate rules cell by cell on explicit Python dicts and enumerate
preimages with itertools.
"""

import itertools
import os
import random
from pathlib import Path

from algca.alphabets import TableAlphabet, affine_line, rule_variables
from algca.alphabets import RegularMap
from algca.ca import make_ca
from algca.fields import PrimeField
from algca.groups import FreeAbelian
from algca.poly import interpolate
from algca.rulefile import load_rule_file

ROOT = Path(__file__).resolve().parent.parent
RULES = ROOT / "rules"
Z = FreeAbelian(1)
Z2 = FreeAbelian(2)
SEED = int(os.environ.get("ALGCA_SEED", "20261019"))


def rng(offset=0):
    return random.Random(SEED + offset)


def corpus():
    """All shipped rule files, parsed: {name: CA}."""
    return {p.stem: load_rule_file(p) for p in sorted(RULES.glob("*.rule"))}


def random_memory(r, group, max_size, spread=2):
    k = r.randint(1, max_size)
    if group.rank == 1:
        pool = [(i,) for i in range(-spread, spread + 1)]
    else:
        pool = list(itertools.product(range(-1, 2), repeat=group.rank))
    return r.sample(pool, k)


def random_poly_rule(r, p, k):
    """A uniformly random function F_p^k -> F_p, as an interpolated polynomial rule."""
    A = affine_line(p)
    F = PrimeField(p)
    names = rule_variables(k, 1)
    table = {x: r.randrange(p) for x in itertools.product(range(p), repeat=k)}
    return RegularMap(A, k, body=[interpolate(table, F, names)])


def random_ca(r, p, max_memory=2, group=Z, spread=2):
    mem = random_memory(r, group, max_memory, spread)
    return make_ca(group, mem, random_poly_rule(r, p, len(mem)))


def random_table_ca(r, q, memory, group=Z):
    A = TableAlphabet([str(i) for i in range(q)])
    table = {combo: r.randrange(q) for combo in itertools.product(A.points, repeat=len(memory))}
    return make_ca(group, memory, RegularMap(A, len(memory), table=table))


def all_binary_table_cas():
    A = TableAlphabet(["0", "1"])
    inputs = list(itertools.product(A.points, repeat=2))
    for bits in itertools.product((0, 1), repeat=4):
        yield make_ca(Z, [(0,), (1,)], RegularMap(A, 2, table=dict(zip(inputs, bits))))


# -- oracles ---------------------------------------------------------------------

def eval_cell(ca, config, g):
    G = ca.group
    return ca.rule.apply(tuple(config[G.mul(g, h)] for h in ca.memory))


def brute_image_counts(ca, n):
    """For a CA on Z with memory in [a, b]: number of length-(n + b - a) words over each output word of length n."""
    a = min(m[0] for m in ca.memory)
    b = max(m[0] for m in ca.memory)
    A = ca.alphabet
    counts = {}
    for word in itertools.product(A.points, repeat=n + b - a):
        conf = {(a + i,): x for i, x in enumerate(word)}
        out = tuple(eval_cell(ca, conf, (j,)) for j in range(n))
        counts[out] = counts.get(out, 0) + 1
    return counts


def is_balanced(ca, n):
    """Every word of length n has exactly |A|^(b-a) preimages: necessary for surjectivity."""
    a = min(m[0] for m in ca.memory)
    b = max(m[0] for m in ca.memory)
    A = ca.alphabet
    counts = brute_image_counts(ca, n)
    want = A.size ** (b - a)
    return all(counts.get(w, 0) == want for w in itertools.product(A.points, repeat=n))


def periodic_injective(ca, max_period):
    """tau restricted to k-periodic configurations is injective for k <= max_period (brute force)."""
    A = ca.alphabet
    for k in range(1, max_period + 1):
        images = set()
        for z in itertools.product(A.points, repeat=k):
            conf = lambda g, z=z: z[g[0] % k]
            img = tuple(ca.rule.apply(tuple(conf((j + m[0],)) for m in ca.memory)) for j in range(k))
            if img in images:
                return False
            images.add(img)
    return True
