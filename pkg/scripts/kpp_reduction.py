"""Distance-count reduction of accelerated K-means++ as K grows."""
import argparse

from accelseed import bench


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=200_000)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--clusters", type=int, default=64)
    p.add_argument("--ks", default="32,128,512,1024")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--csv", help="per-run report")
    a = p.parse_args()
    ds = bench.gaussian_mixture(a.n, a.dim, a.clusters, seed=2024)
    ks = [int(k) for k in a.ks.split(",")]
    reports = bench.sweep(ds, ks, ["kpp", "kpp-fast"], trials=a.trials,
                          dataset_tag=f"gmm{a.n}x{a.dim}")
    if a.csv:
        bench.write_csv(reports, a.csv)
    print(f"{'K':>6} {'baseline':>14} {'accelerated':>14} {'reduction':>10} {'time ratio':>10}")
    for row in bench.summarize(reports)["kpp"]:
        print(f"{row['k']:>6} {row['dist_avg']:>14.0f} {row['tia_dist_avg']:>14.0f} "
              f"{row['dist_avg'] / row['tia_dist_avg']:>9.1f}x "
              f"{row['time_avg'] / row['tia_time_avg']:>9.2f}x")


if __name__ == "__main__":
    main()
