"""Two initial conditions where theta = 0 maximizes L yet the agents never settle on it."""

import numpy as np

from nblearn import simulate
from nblearn.likelihood import predict_consensus, weighted_likelihood
from nblearn.scenarios import counterexample_ic


def main():
    alpha = 0.5
    for variant in (1, 2):
        ic = counterexample_ic(variant, alpha)
        report = predict_consensus(weighted_likelihood(ic), ic)
        traj = simulate(ic, 8)
        print(f"variant {variant}: gap {report.gap:.3g}")
        print(report.table())
        for t in range(1, 9):
            m = traj.masses(t)[0]
            print(f"  t={t}  f_x(0) = {m[0]:.6f}  mode {int(np.argmax(m))}")


if __name__ == "__main__":
    main()
