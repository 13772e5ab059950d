"""Bridge CLI: serve the scorer endpoint or run a fine-tune."""

from __future__ import annotations

import os

import click

from .config import BridgeConfig
from .finetune import finetune as run_finetune


@click.group()
def main():
    """Transformer scorer sidecar."""


@main.command()
@click.option("--task", default="relevance", type=click.Choice(["relevance", "pio"]))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=lambda: int(os.environ.get("BRIDGE_PORT", "8400")))
@click.option("--checkpoint", type=click.Path(exists=True), default=None,
              help="Serve fine-tuned weights instead of the seeded tiny encoder.")
@click.option("--max-sequence-length", default=128, show_default=True)
def serve(task, host, port, checkpoint, max_sequence_length):
    import uvicorn

    from .model import BridgeModel
    from .server import create_app

    model = None
    if checkpoint:
        model = BridgeModel.load(checkpoint, device=os.environ.get("BRIDGE_DEVICE", "cpu"))
    config = BridgeConfig(task=task, max_sequence_length=max_sequence_length)
    uvicorn.run(create_app(config, model=model), host=host, port=port)


@main.command("finetune")
@click.option("--task", required=True, type=click.Choice(["relevance", "pio"]))
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="bridge-runs", show_default=True)
@click.option("--subsample", type=int, default=None,
              help="Limit to the first N articles/abstracts (smoke runs).")
@click.option("--freeze-encoder", is_flag=True)
@click.option("--epochs", type=int, default=None, help="Override the recipe epoch count.")
def finetune_cmd(task, dataset_path, out_dir, subsample, freeze_encoder, epochs):
    config = BridgeConfig(task=task)
    if epochs:
        config.train.epochs = epochs
    result = run_finetune(
        task, dataset_path, config=config, out_dir=out_dir,
        subsample=subsample, freeze_encoder=freeze_encoder,
    )
    click.echo(f"checkpoint: {result.checkpoint}")
    click.echo("loss curve: " + " ".join(f"{l:.4f}" for l in result.epoch_losses))
    click.echo(f"report: {result.report_path}")


if __name__ == "__main__":
    main()
