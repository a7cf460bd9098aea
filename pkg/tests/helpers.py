import numpy as np


class CostClock:
    """Fake clock: time advances only by the cost of the candidate just run."""

    def __init__(self, costs):
        self.costs = costs
        self.now = 0.0
        self.pending = 0.0
        self.calls = []

    def problem(self, m, lam):
        self.calls.append((m, lam))
        self.pending += self.costs[(m, lam)]

    def __call__(self):
        self.now += self.pending
        self.pending = 0.0
        return self.now


class StepClock:
    """Fake clock whose successive timed runs take the given durations."""

    def __init__(self, durations):
        self.durations = list(durations)
        self.now = 0.0
        self.started = False

    def __call__(self):
        if self.started:
            self.now += self.durations.pop(0)
        self.started = not self.started
        return self.now


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rel_err(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b)
