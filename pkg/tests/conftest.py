import random

from binarybn.exactalg import Subspace
from binarybn.ramification import DivisorStep


def random_subspace_of(F, W: Subspace, k: int, rng: random.Random) -> Subspace:
    """A random k-dim subspace of W (k <= dim W)."""
    while True:
        vecs = []
        for _ in range(k):
            cs = [rng.randrange(F.p) for _ in range(W.dim)]
            vecs.append([F.reduce(sum(c * v[i] for c, v in zip(cs, W.basis))) for i in range(W.ambient_dim)])
        V = Subspace.span(F, W.ambient_dim, vecs)
        if V.dim == k:
            return V


def random_divisor_sequence(rng: random.Random, length: int, max_jump: int = 2):
    steps = [DivisorStep(0, 0)]
    for _ in range(length):
        while True:
            a = rng.randint(0, max_jump)
            b = rng.randint(0, max_jump)
            if a + b:
                break
        steps.append(steps[-1] + DivisorStep(a, b))
    return steps


ACCEPTANCE_LINES: list = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
