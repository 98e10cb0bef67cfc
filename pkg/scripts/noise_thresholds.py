"""Critical visibility and photon-survival thresholds versus the number of sites."""
import argparse
from dataclasses import dataclass

from wnonlocal import critical_parameter


@dataclass
class Config:
    n_min: int = 3
    n_max: int = 30
    plot: str | None = None


def main(cfg: Config) -> None:
    ns = list(range(cfg.n_min, cfg.n_max + 1))
    v = [critical_parameter(n, "white_noise") for n in ns]
    eta = [critical_parameter(n, "photon_loss") for n in ns]
    print(" n        v*          eta*")
    for n, a, b in zip(ns, v, eta):
        print(f"{n:2d}  {a:.9f}  {b:.9f}")
    if cfg.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(ns, v, "o-", label="white noise v*")
        ax.plot(ns, eta, "s-", label="photon loss eta*")
        ax.set_xlabel("n")
        ax.set_ylabel("critical parameter")
        ax.legend()
        fig.tight_layout()
        fig.savefig(cfg.plot)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--plot")
    a = p.parse_args()
    main(Config(a.n_min, a.n_max, a.plot))
