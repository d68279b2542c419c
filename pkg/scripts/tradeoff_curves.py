"""Write the decentralized and centralized (kappa, lambda) curves to CSV.

Also reports where the centralized frontier supports more links than the
threshold rule at the same rate per link.
"""

import argparse
import math

from fadingnet import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="tradeoff.csv")
    args = ap.parse_args()

    rows = experiments.tradeoff_rows("both")
    experiments.write_atomic({args.out: experiments.tradeoff_csv(rows)})
    print(f"wrote {len(rows)} rows to {args.out}")

    print(f"{'alpha':>7} {'delta*':>8} {'lambda':>8} {'kappa cent':>11} {'kappa dec':>10}")
    for scheme, alpha, delta, kappa, lam in rows:
        if scheme == "cent":
            print(f"{alpha:7.3f} {delta:8.4f} {lam:8.4f} {kappa:11.4f} {1 / math.expm1(lam):10.4f}")


if __name__ == "__main__":
    main()
