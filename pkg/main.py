import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from src.config import load_family_table, load_run_config, RunConfig
from src.datasets import DatasetFactory, generate, load, load_split, read_metadata, save, save_dataset_dir, split_indices
from src.eval import build_report, report_table, write_report
from src.flowmatch import (
    SFMGModel, EigenvalueTrainer, EigenvectorTrainer, NoiseFMTrainer, PostprocessTrainer,
    generate_graphs, noise_fm_sample, sample_eigenvalues, sample_eigenvectors, sfmg_sample,
)
from src.graphs import graph_spectrum, read_spectra, strip_isolated, write_spectra
from src.models import DatasetSpec, SpectralData
from src.numerics import make_rng, STREAMS
from src.persistence import CheckpointStore
from src.utils import (
    AppError, CheckpointError, ConfigError, DatasetError, NumericalError, ParseError, RangeError,
    ShapeError, TangencyError, DegenerateInputError, TrainingTracker, atomic_write, logger, RED, RESET,
)

GREEN = "\033[92m"
BOLD = "\033[1m"

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

PIPELINE = ("eigenvalues", "eigenvectors", "postprocess")


def exit_code_for(error: Exception) -> int:
    if isinstance(error, ConfigError):
        return EXIT_USAGE
    if isinstance(error, (NumericalError, TangencyError, DegenerateInputError)):
        return EXIT_NUMERICAL
    if isinstance(error, (ParseError, DatasetError, CheckpointError, RangeError, ShapeError, OSError)):
        return EXIT_DATA
    return EXIT_UNEXPECTED


class GraphGenCLI:
    """Command handlers; each returns an exit code and raises AppError subclasses on failure."""

    def __init__(self, jobs: int = 1):
        self.jobs = max(1, jobs)

    # gen-data ---------------------------------------------------------------
    def cmd_gen_data(self, family: str, count: Optional[int], seed: int, out_dir: str,
                     train_fraction: float = 0.8) -> int:
        table = load_family_table()
        if family not in DatasetFactory.families():
            raise ConfigError(f"Unknown graph family: {family} (expected one of {DatasetFactory.families()})")
        entry = table.get(family, {})
        spec = DatasetSpec(family=family, count=count if count is not None else entry.get("count", 100),
                           seed=seed, params=entry.get("params", {}))
        graphs = generate(spec, self.jobs)
        train_idx, test_idx = split_indices(len(graphs), train_fraction, seed)
        out = save_dataset_dir(out_dir, spec, graphs, train_idx, test_idx)
        print(json.dumps({"family": family, "count": len(graphs), "train": len(train_idx),
                          "test": len(test_idx), "out": str(out)}, sort_keys=True))
        return EXIT_OK

    # train ------------------------------------------------------------------
    def _training_data(self, rc: RunConfig):
        if not rc.data:
            raise ConfigError("the run config needs a 'data' directory (written by gen-data)")
        train, test = load_split(rc.data)
        if not train:
            raise DatasetError(f"{rc.data} has an empty training split")
        n_max = read_metadata(rc.data).get("n_max") or max(g.n for g in train + test)
        return train, n_max

    def cmd_train(self, rc: RunConfig, stage: str) -> int:
        train, n_max = self._training_data(rc)
        out = Path(rc.out)
        store = CheckpointStore(out / "checkpoints")
        tracker = TrainingTracker()
        stages = PIPELINE if stage == "all" else (stage,)

        feature_dims = {g.features.shape[1] if g.features is not None else 0 for g in train}
        if len(feature_dims) != 1:
            raise DatasetError("training graphs disagree on the node feature dimension")
        feature_dim = feature_dims.pop()

        spectra: List[SpectralData] = []
        if any(s in ("eigenvalues", "eigenvectors") for s in stages):
            spectra = [graph_spectrum(g, rc.k, n_max) for g in train]

        for name in stages:
            cfg = rc.stage(name)
            if name == "eigenvalues":
                net = EigenvalueTrainer(spectra, cfg, tracker).fit()
            elif name == "eigenvectors":
                net = EigenvectorTrainer(spectra, cfg, tracker).fit()
            elif name == "postprocess":
                eigval_net = store.load("eigenvalues")
                eigvec_net = store.load("eigenvectors")
                net = PostprocessTrainer(train, eigval_net, eigvec_net, cfg, n_max, rc.pool_size, tracker,
                                         rc.pool_refresh).fit()
            else:
                net = NoiseFMTrainer(train, cfg, n_max, tracker).fit()
            store.save(name, net)
            atomic_write(out / "logs" / f"{name}.csv", tracker.to_csv(name))
            means = tracker.window_means(name)
            print(f"{GREEN}{BOLD}{name}{RESET}: {cfg.steps} steps, loss {means.get('first', float('nan')):.6g}"
                  f" -> {means.get('last', float('nan')):.6g}")
        # model.json only appears once the stage weights are on disk
        store.save_model_info({"n_max": n_max, "k": rc.k, "feature_dim": feature_dim,
                               "bond_types": rc.bond_types, "epsilon": rc.epsilon})
        return EXIT_OK

    # sample -----------------------------------------------------------------
    def _load_model(self, run_dir: str, stage: str):
        store = CheckpointStore(Path(run_dir) / "checkpoints")
        info = store.load_model_info()
        if stage == "noise-fm":
            net = store.load("noise-fm")
            return lambda rng: noise_fm_sample(net, info["n_max"], rng, info.get("feature_dim", 0),
                                               info["epsilon"], info.get("bond_types", False))
        model = SFMGModel(
            eigval_net=store.load("eigenvalues"), eigvec_net=store.load("eigenvectors"),
            post_net=store.load("postprocess"), n_max=info["n_max"], k=info["k"],
            feature_dim=info.get("feature_dim", 0), bond_types=info.get("bond_types", False),
            epsilon=info["epsilon"],
        )
        return lambda rng: sfmg_sample(model, rng)

    def cmd_sample(self, run_dir: str, count: int, seed: int, out_path: str, stage: str = "sfmg",
                   strip: bool = True) -> int:
        sampler = self._load_model(run_dir, stage)
        graphs, timings = generate_graphs(sampler, count, seed, self.jobs)
        if strip:
            graphs = [strip_isolated(g) for g in graphs]
        save(out_path, graphs)
        meta = {"count": count, "seed": seed, "stage": stage, "strip_isolated": strip,
                "seconds_mean": float(np.mean(timings)) if timings else 0.0,
                "seconds_std": float(np.std(timings)) if timings else 0.0}
        atomic_write(f"{out_path}.meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
        print(f"Wrote {len(graphs)} graphs to {out_path}")
        return EXIT_OK

    # spectra ----------------------------------------------------------------
    def cmd_spectra(self, out_path: str, graphs_path: Optional[str] = None, k: Optional[int] = None,
                    n_max: Optional[int] = None, run_dir: Optional[str] = None, count: int = 0,
                    seed: int = 0) -> int:
        """Dataset spectra, model spectra, or model eigenvectors conditioned on real eigenvalues."""
        if run_dir is None:
            if graphs_path is None or k is None:
                raise ConfigError("spectra needs a graph file and --k (or --run for model spectra)")
            graphs = load(graphs_path)
            size = n_max or max((g.n for g in graphs), default=0)
            spectra = [graph_spectrum(g, k, size) for g in graphs]
        else:
            store = CheckpointStore(Path(run_dir) / "checkpoints")
            info = store.load_model_info()
            eigval_net, eigvec_net = store.load("eigenvalues"), store.load("eigenvectors")
            if graphs_path is not None:
                real = [graph_spectrum(g, info["k"], info["n_max"]).lambdas for g in load(graphs_path)]
            else:
                real = [None] * count

            def one(i: int) -> SpectralData:
                rng = make_rng(seed, STREAMS["sampling"], i)
                lambdas = real[i] if real[i] is not None else \
                    sample_eigenvalues(eigval_net, info["k"], rng, info["epsilon"])
                U = sample_eigenvectors(eigvec_net, info["n_max"], lambdas, rng, info["epsilon"])
                return SpectralData(info["k"], lambdas, U)

            spectra = [one(i) for i in range(len(real))]
        write_spectra(out_path, spectra)
        print(f"Wrote {len(spectra)} spectra to {out_path}")
        return EXIT_OK

    # evaluate ---------------------------------------------------------------
    def cmd_evaluate(self, generated_path: str, reference_path: str, out_path: str,
                     train_path: Optional[str] = None, family: Optional[str] = None,
                     spectra_path: Optional[str] = None, seed: int = 0) -> int:
        generated = load(generated_path)
        reference = load(reference_path)
        training = load(train_path) if train_path else None
        spectra = None
        if spectra_path:
            if training is None:
                raise ConfigError("spectral fidelity needs --train for its baseline")
            gen_spectra = read_spectra(spectra_path)
            if not gen_spectra:
                raise DatasetError(f"{spectra_path} holds no spectra")
            k, n = gen_spectra[0].k, gen_spectra[0].n
            spectra = (gen_spectra,
                       [graph_spectrum(g, k, n) for g in reference],
                       [graph_spectrum(g, k, n) for g in training])
        report = build_report(generated, reference, training, family, jobs=self.jobs, spectra=spectra,
                              rng=make_rng(seed, STREAMS["evaluation"]))
        json_path, table_path = write_report(out_path, report)
        print(report_table(report), end="")
        logger.info("Report written", json=str(json_path), table=str(table_path))
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Spectral flow-matching graph generator")
    parser.add_argument("--jobs", type=int, default=1, help="Worker threads for generation, sampling and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="Generate a synthetic benchmark dataset with its 80/20 split")
    p.add_argument("family", nargs="?", help=f"One of {DatasetFactory.families()}")
    p.add_argument("--family", dest="family_flag", help="Same as the positional family")
    p.add_argument("--count", type=int, help="Number of graphs (default: the family's benchmark size)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="Output directory")

    p = sub.add_parser("train", help="Train one stage (or the whole pipeline)")
    p.add_argument("--config", help="Flat JSON/YAML run config")
    p.add_argument("--stage", default="all", choices=PIPELINE + ("noise-fm", "all"))
    p.add_argument("--data", help="Dataset directory (overrides the config's 'data')")
    p.add_argument("--family", help="Family name for the full-scale profile (overrides the config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="Run directory (overrides the config's 'out')")

    p = sub.add_parser("sample", help="Sample graphs from trained checkpoints")
    p.add_argument("run_dir", help="Run directory written by train")
    p.add_argument("--stage", default="sfmg", choices=("sfmg", "noise-fm"))
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="Output graph file (JSON lines)")
    p.add_argument("--strip-isolated", dest="strip_isolated", action=argparse.BooleanOptionalAction, default=True,
                   help="Remove zero-degree (padding) nodes from sampled graphs")

    p = sub.add_parser("evaluate", help="MMD metrics, Ratio, diversity, validity and spectral fidelity")
    p.add_argument("generated")
    p.add_argument("reference")
    p.add_argument("--train", help="Training graphs: enables the Ratio baseline and novelty")
    p.add_argument("--family", help="Enables validity for planar / sbm")
    p.add_argument("--spectra", help="Generated spectra file (from `spectra --run`)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="Report path (JSON); the text table goes to <out>.txt")

    p = sub.add_parser("spectra", help="Dump truncated spectra of a dataset or of a trained model")
    p.add_argument("graphs", nargs="?", help="Graph file; with --run its eigenvalues condition the eigenvectors")
    p.add_argument("--k", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--run", dest="run_dir", help="Run directory: sample spectra from the trained model")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cli = GraphGenCLI(args.jobs)
    try:
        if args.command == "gen-data":
            family = args.family or args.family_flag
            if not family:
                raise ConfigError("gen-data needs a family")
            return cli.cmd_gen_data(family, args.count, args.seed, args.out)
        if args.command == "train":
            rc = load_run_config(args.config, {"seed": args.seed, "out": args.out,
                                               "data": args.data, "family": args.family})
            return cli.cmd_train(rc, args.stage)
        if args.command == "sample":
            return cli.cmd_sample(args.run_dir, args.count, args.seed, args.out, args.stage, args.strip_isolated)
        if args.command == "spectra":
            return cli.cmd_spectra(args.out, args.graphs, args.k, args.n_max, args.run_dir, args.count, args.seed)
        return cli.cmd_evaluate(args.generated, args.reference, args.out, args.train, args.family,
                                args.spectra, args.seed)
    except AppError as e:
        code = exit_code_for(e)
        logger.error("Command failed", command=args.command, error=str(e), exit_code=code)
        print(f"{RED}[ERROR] {e}{RESET}", file=sys.stderr)
        return code
    except OSError as e:
        logger.error("Command failed", command=args.command, error=str(e), exit_code=EXIT_DATA)
        print(f"{RED}[ERROR] {e}{RESET}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:
        logger.critical("Application Crash", command=args.command, error=str(e))
        print(f"{RED}[CRITICAL] Application Crash: {e}{RESET}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
