"""Despeckle the 256x256 circle at L=10 with every method and print the measures."""
import argparse
import time

from despeckle_tdm.diffusivity import DiffusivityConfig
from despeckle_tdm.metrics import evaluate
from despeckle_tdm.phantoms import make_phantom
from despeckle_tdm.solvers import SolverConfig, run
from despeckle_tdm.speckle import speckle

METHODS = {
    "DCE": ("diffusion", "constant", 1.5),
    "DVE": ("diffusion", "avg_gray", 2.2),
    "TCE": ("telegraph", "constant", 1.5),
    "TVE": ("telegraph", "avg_gray", 2.2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--looks", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--K", type=float, default=0.1)
    args = ap.parse_args()

    clean = make_phantom("circle", args.size, args.size)
    noisy, _ = speckle(clean, args.looks, args.seed)
    print("method  steps    psnr    mssim     dg      mor     vor   seconds")
    for name, (model, kind, p0) in METHODS.items():
        dcfg = DiffusivityConfig(nu=1.0, K=args.K, exponent=kind, p0=p0)
        scfg = SolverConfig(model=model, stop="best_psnr", patience=10)
        t0 = time.perf_counter()
        res = run(noisy, scfg, dcfg, reference=clean)
        r = evaluate(clean, noisy, res.restored, looks=args.looks, with_fom=False)
        print(f"{name:6s} {res.best_step:6d} {r.psnr:7.2f} {r.mssim:8.4f} {r.dg:6.2f} "
              f"{r.mor:8.4f} {r.vor:7.4f} {time.perf_counter() - t0:8.2f}")


if __name__ == "__main__":
    main()
