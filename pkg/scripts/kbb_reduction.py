"""Distance-count reduction of accelerated K-means|| (R rounds, ell = 2K)."""
import argparse

from accelseed import bench


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=50_000)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--clusters", type=int, default=64)
    p.add_argument("--ks", default="32,128,256")
    p.add_argument("--rounds", type=int, default=5)
    p.add_argument("--trials", type=int, default=2)
    a = p.parse_args()
    ds = bench.gaussian_mixture(a.n, a.dim, a.clusters, seed=7)
    ks = [int(k) for k in a.ks.split(",")]
    reports = bench.sweep(ds, ks, ["kbb", "kbb-fast"], trials=a.trials, rounds=a.rounds)
    print(f"{'K':>6} {'baseline':>14} {'accelerated':>14} {'reduction':>10}")
    for row in bench.summarize(reports)["kbb"]:
        print(f"{row['k']:>6} {row['dist_avg']:>14.0f} {row['tia_dist_avg']:>14.0f} "
              f"{row['dist_avg'] / row['tia_dist_avg']:>9.1f}x")


if __name__ == "__main__":
    main()
