"""Binary beliefs on the (a,b)-graphs: constant, alternating, converging and splitting."""

from nblearn import simulate
from nblearn.scenarios import ab_example_ic

ALPHA = 0.3


def main():
    for a, b in ((2, 1), (1, 2), (3, 1), (1, 3)):
        traj = simulate(ab_example_ic(a, b, ALPHA), 10)
        row = " ".join(f"{traj.masses(t)[0, 0]:.3f}" for t in range(11))
        print(f"({a},{b})  f_x(0) for t=0..10: {row}")


if __name__ == "__main__":
    main()
