"""Print the headline quantum and classical numbers for the single-photon W state."""
import argparse
from dataclasses import dataclass

from wnonlocal import (
    build_omega,
    build_w_state,
    enumerate_bound,
    evaluate_on_state,
    hardy_implication_check,
    omega_closed_form,
    violation_probability,
)
from wnonlocal.inequality import term_values


@dataclass
class Config:
    n_max_scan: int = 24
    n_max_certify: int = 10


def main(cfg: Config) -> None:
    expr = build_omega(3)
    print("three-site terms on W(3):")
    for term, value in zip(expr.terms, term_values(expr, build_w_state(3))):
        print(f"  {term.sign:+d} P[{term.setting} = {term.outcome}] = {value:.6f}")
    print(f"beta_W = {evaluate_on_state(expr, build_w_state(3)):.6f}\n")

    print(" n   Omega_W(statevector)   1 - n/2^(n-1)")
    for n in range(3, cfg.n_max_scan + 1):
        print(f"{n:2d}   {evaluate_on_state(build_omega(n), build_w_state(n)):.12f}         {omega_closed_form(n):.12f}")
    print(f"\nP_v(4) = {violation_probability(4):.6g}, P_v(20) = {violation_probability(20):.6f}\n")

    for n in range(3, cfg.n_max_certify + 1):
        cert = enumerate_bound(build_omega(n))
        hardy = hardy_implication_check(n)
        print(
            f"n={n:2d}: LHV max {cert.max_value:+.0f} over {cert.strategies_searched} strategies "
            f"({cert.wall_time:.2f}s); Hardy implication holds={hardy.holds}, "
            f"quantum P(all x equal)={hardy.quantum_all_equal_probability:.6g}"
        )


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-max-scan", type=int, default=Config.n_max_scan)
    p.add_argument("--n-max-certify", type=int, default=Config.n_max_certify)
    a = p.parse_args()
    main(Config(a.n_max_scan, a.n_max_certify))
