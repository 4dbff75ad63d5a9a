"""Command line entry points: gen-data, label-alphas, train, eval, serve, replay."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import click

from .env.tasks import Scene, TASK_IDS

log = logging.getLogger(__name__)


def _load_scene(scene_path):
    return Scene.load(scene_path)


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("gen-data")
@click.option("--out", type=click.Path(), required=True,
              help="Output dataset file (JSON lines).")
@click.option("--task", "tasks", multiple=True,
              type=click.Choice(TASK_IDS), help="Restrict to given tasks.")
@click.option("--demos", default=10, show_default=True,
              help="Full-task demos per task.")
@click.option("--corrections", default=8, show_default=True,
              help="Correction segments per task.")
@click.option("--seed", default=0, show_default=True)
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              default=None, help="Scene file (defaults to the bundled desk).")
def gen_data(out, tasks, demos, corrections, seed, scene_path):
    """Generate the scripted demo + correction dataset."""
    from .data import build_dataset, dataset_hash, save_dataset

    scene = _load_scene(scene_path)
    data = build_dataset(scene, demos_per_task=demos,
                         corrections_per_task=corrections, seed=seed,
                         tasks=tasks or None)
    save_dataset(out, data)
    click.echo(f"wrote {len(data)} trajectories to {out} "
               f"(hash {dataset_hash(data)})")


@main.command("label-alphas")
@click.option("--dataset", type=click.Path(exists=True), required=True)
@click.option("--backend", default="heuristic", show_default=True,
              type=click.Choice(["heuristic", "llm-service"]))
@click.option("--cache", type=click.Path(), default=None,
              help="Label cache file (TSV), reused across runs.")
def label_alphas(dataset, backend, cache):
    """Label every utterance in a dataset with its gate value."""
    from .data import load_dataset, preprocess_alphas, save_dataset
    from .language import GatingOracle

    data = load_dataset(dataset)
    oracle = GatingOracle(backend=backend, cache_path=cache)
    preprocess_alphas(data, oracle)
    save_dataset(dataset, data)
    counts = {0: 0, 1: 0}
    for t in data:
        counts[t.alpha] += 1
    click.echo(f"labeled {len(data)} trajectories "
               f"(alpha=1: {counts[1]}, alpha=0: {counts[0]}, "
               f"external calls: {oracle.external_calls})")


@main.command("train")
@click.option("--dataset", type=click.Path(exists=True), required=True)
@click.option("--policy", default="lilac", show_default=True,
              type=click.Choice(["lilac", "lila", "imitation"]))
@click.option("--out", type=click.Path(), required=True,
              help="Checkpoint output path.")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="JSON file overriding training settings.")
@click.option("--report-dir", type=click.Path(), default=None,
              help="Write loss curves (CSV + figure) here.")
def train(dataset, policy, out, config_path, report_dir):
    """Train a policy and write its checkpoint."""
    from .data import TrainConfig, load_dataset, train_policy
    from .report import save_policy, write_loss_curves

    overrides = {}
    if config_path:
        overrides = json.loads(Path(config_path).read_text())
    config = TrainConfig(**overrides)
    data = load_dataset(dataset)
    result = train_policy(policy, data, config)
    save_policy(result, out, extra_meta={"train_config": config.to_dict()})
    click.echo(f"trained {policy}: best epoch {result.best_epoch}, "
               f"final train loss {result.curves[-1]['train_loss']:.6f}, "
               f"checkpoint {out}")
    if report_dir:
        csv_path, png_path = write_loss_curves(result.curves, report_dir, policy)
        click.echo(f"loss curves: {csv_path}, {png_path}")


@main.command("eval")
@click.option("--checkpoint", "checkpoints", multiple=True, required=True,
              type=click.Path(exists=True),
              help="One or more policy checkpoints (repeatable).")
@click.option("--seeds", default=20, show_default=True,
              help="Number of evaluation seeds.")
@click.option("--task", "tasks", multiple=True, type=click.Choice(TASK_IDS),
              help="Restrict to given tasks.")
@click.option("--out", "out_dir", type=click.Path(), default="eval-report",
              show_default=True, help="Report directory.")
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              default=None)
def eval_cmd(checkpoints, seeds, tasks, out_dir, scene_path):
    """Run scripted-user rollouts and write the results report."""
    from .model import load_policy
    from .report import load_bundle, run_evaluation, write_results

    scene = _load_scene(scene_path)
    bundles = {}
    for path in checkpoints:
        model, meta = load_policy(path)
        if model.KIND == "imitation":
            from .language import ExemplarIndex
            index = ExemplarIndex.from_dicts(meta["index"])
            bundles[model.KIND] = ((model, index), meta)
        else:
            bundles[model.KIND] = load_bundle(path)
    results = run_evaluation(bundles, scene, range(seeds),
                             tasks=tasks or TASK_IDS)
    rows, summary, fig = write_results(results, out_dir)
    click.echo(f"wrote {rows}, {summary}, {fig}")
    for line in Path(summary).read_text().splitlines():
        click.echo(line)


@main.command("serve")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--port", default=8710, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--task", type=click.Choice(TASK_IDS), default=TASK_IDS[0],
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--scene", "scene_path", type=click.Path(exists=True),
              default=None)
@click.option("--record-dir", type=click.Path(), default=None,
              help="Directory for episode logs.")
@click.option("--gating-backend", default="heuristic", show_default=True,
              type=click.Choice(["heuristic", "llm-service"]))
@click.option("--static-dir", type=click.Path(exists=True), default=None,
              help="Built browser client to serve at the root path.")
def serve(checkpoint, port, host, task, seed, scene_path, record_dir,
          gating_backend, static_dir):
    """Host the live teleoperation websocket service."""
    import uvicorn

    from .report import load_bundle
    from .service import create_app

    bundle, _ = load_bundle(checkpoint, backend=gating_backend)
    app = create_app(bundle=bundle, scene=_load_scene(scene_path), task=task,
                     seed=seed, record_dir=record_dir, static_dir=static_dir)
    click.echo(f"serving {checkpoint} task={task} on ws://{host}:{port}/ws")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("replay")
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--speed", default=1.0, show_default=True)
@click.option("--port", default=8711, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def replay(log_path, speed, port, host):
    """Re-broadcast a recorded episode over the wire schema."""
    import uvicorn

    from .service import create_replay_app

    app = create_replay_app(log_path, speed=speed)
    click.echo(f"replaying {log_path} at {speed}x on ws://{host}:{port}/ws")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
