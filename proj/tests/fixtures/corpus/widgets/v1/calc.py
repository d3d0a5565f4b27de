import math


def mean(xs):
    total = 0
    for x in xs:
        total += x
    return total / max(len(xs), 1)


def stdev(xs):
    m = mean(xs)
    acc = 0.0
    for x in xs:
        acc += (x - m) ** 2
    return math.sqrt(acc / len(xs))


class Histogram:
    def __init__(self, bins):
        self.bins = bins
        self.counts = [0] * bins

    def add(self, value, lo, hi):
        width = (hi - lo) / self.bins
        index = min(int((value - lo) / width), self.bins)
        self.counts[index] += 1

    def total(self):
        return sum(self.counts)
