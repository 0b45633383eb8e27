"""Python mirror of tests/test_support.hpp generators."""
import math

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self):
        return ((self.next() >> 11) + 0.5) * 2.0 ** -53

    def normal(self):
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def white_noise(seed, n, scale=1.0):
    rng = SplitMix64(seed)
    return [scale * rng.normal() for _ in range(n)]


def ar1(seed, n, phi, scale=1.0):
    rng = SplitMix64(seed)
    out, prev = [], 0.0
    for _ in range(n):
        prev = phi * prev + scale * rng.normal()
        out.append(prev)
    return out


def random_walk(seed, n, drift=0.0, start=100.0, scale=1.0):
    rng = SplitMix64(seed)
    out, level = [], start
    for _ in range(n):
        level += drift + scale * rng.normal()
        out.append(level)
    return out
