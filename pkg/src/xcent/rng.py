"""SplitMix64, a small portable generator for seeded sampling.

Constants follow Steele, Lea and Flood (2014): increment 0x9E3779B97F4A7C15,
mixing multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with shifts
30, 27, 31.  The stream is identical on every platform.
"""

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        # rejection sampling keeps the draw unbiased
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), in draw order (partial Fisher-Yates)."""
        k = min(k, n)
        pool = {}
        out = []
        for i in range(k):
            j = i + self.randbelow(n - i)
            out.append(pool.get(j, j))
            pool[j] = pool.get(i, i)
        return out
