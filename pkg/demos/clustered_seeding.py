"""Three adjacent seeds on a ring: equal weights under naive Bayes, a blocked middle seed under averaging."""

import numpy as np

from nblearn.graph import cycle_graph
from nblearn.scenarios import extract_seeding_weights


def main():
    for n in (9, 21, 51):
        m = n // 2
        seeds = [m - 1, m, m + 1]
        g = cycle_graph(n)
        nb = extract_seeding_weights("naive_bayes", g, seeds).weights
        bb = extract_seeding_weights("bbcm", g, seeds).weights
        print(f"n={n:2d}  naive Bayes {np.round(nb, 4).tolist()}  informed averaging {np.round(bb, 4).tolist()}")


if __name__ == "__main__":
    main()
