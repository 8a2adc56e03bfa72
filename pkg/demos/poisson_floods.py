"""Two agents with Poisson beliefs agree on the geometric mean of their rates, not the arithmetic one."""

import numpy as np

from nblearn import InitialCondition, complete_graph, flat_prior, poisson_belief, simulate
from nblearn.likelihood import poisson_consensus, predict_consensus, weighted_likelihood
from nblearn.statespace import TruncatedIntegers


def main():
    space = TruncatedIntegers(2000)
    ic = InitialCondition.from_beliefs(complete_graph(2), flat_prior(space),
                                       [poisson_belief(space, 2), poisson_belief(space, 1000)])
    analytic = poisson_consensus([2, 1000], [0.5, 0.5])
    print(f"lambda* = {analytic.lambda_star:.3f}, consensus {analytic.point}, arithmetic mean {analytic.arithmetic_mean:g}")
    print(f"argmax of weighted likelihood: {predict_consensus(weighted_likelihood(ic), ic).predicted_point}")
    traj = simulate(ic, 12)
    for t in range(0, 13, 2):
        m = traj.masses(t)
        print(f"t={t:2d}  modes {np.argmax(m, axis=1).tolist()}  mass at 44 {np.round(m[:, 44], 4).tolist()}")


if __name__ == "__main__":
    main()
