"""Command-line workbench: validate nets, apply oracle operations, run
sessions, benchmark backends, and serve the HTTP API."""

from __future__ import annotations

import json
import sys

import click

from . import errors
from .benchmark import bench as run_bench
from .dense import observe_dist, assert_dist, nassert_dist, set_dist
from .generate import GenParams, gen_net
from .jsonio import (
    dist_from_json,
    dist_to_json,
    dump_json,
    load_json,
    mbn_from_json,
    net_from_json,
)
from .nets import OutcomeKind
from .session import run_session
from .update import UpdateStrategy


@click.group()
def main() -> None:
    """Belief tracking for condition/event nets."""


@main.group()
def net() -> None:
    """Net file utilities."""


@net.command("validate")
@click.argument("path", type=click.Path(exists=True))
def net_validate(path: str) -> None:
    """Check a net JSON file against the structural invariants."""
    try:
        loaded = net_from_json(load_json(path))
    except (errors.NetBeliefError, KeyError, ValueError) as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(
        f"ok: {len(loaded.places)} places, {len(loaded.transitions)} transitions"
    )


def _parse_places(net_doc, text: str) -> frozenset[int]:
    names = [x for x in text.split(",") if x]
    if net_doc is not None:
        loaded = net_from_json(net_doc)
        return frozenset(loaded.place_index(x) for x in names)
    return frozenset(int(x) for x in names)


@main.group()
def oracle() -> None:
    """Operate on explicit joint distributions."""


@oracle.command("apply")
@click.argument("dist_path", type=click.Path(exists=True))
@click.argument("op")
@click.option("--net", "net_path", type=click.Path(exists=True), default=None,
              help="Net file; enables place names in OP and observe ops.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def oracle_apply(dist_path: str, op: str, net_path, out_path) -> None:
    """Apply OP to a distribution file.

    OP is one of assert:PLACES=B, nassert:PLACES=B, set:PLACES=B (PLACES a
    comma list of indices, or names with --net) or observe:T=OUTCOME with
    OUTCOME in success|failpre|failpost (requires --net).
    """
    dist = dist_from_json(load_json(dist_path))
    net_doc = load_json(net_path) if net_path else None
    kind, _, rest = op.partition(":")
    try:
        if kind in ("assert", "nassert", "set"):
            places_text, _, bit_text = rest.partition("=")
            places = _parse_places(net_doc, places_text)
            b = int(bit_text)
            fn = {"assert": assert_dist, "nassert": nassert_dist, "set": set_dist}[kind]
            result = fn(dist, places, b)
        elif kind == "observe":
            if net_doc is None:
                raise click.UsageError("observe ops need --net")
            t, _, outcome_text = rest.partition("=")
            outcome = {
                "success": OutcomeKind.SUCCESS,
                "failpre": OutcomeKind.FAIL_PRE,
                "failpost": OutcomeKind.FAIL_POST,
            }[outcome_text.lower()]
            result = observe_dist(dist, net_from_json(net_doc), t, outcome)
        else:
            raise click.UsageError(f"unknown op kind {kind!r}")
    except errors.NetBeliefError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        sys.exit(1)
    doc = dist_to_json(result)
    if out_path:
        dump_json(doc, out_path)
    else:
        click.echo(json.dumps(doc))


@main.command("session")
@click.option("--net", "net_path", type=click.Path(exists=True), required=True)
@click.option("--prior", "prior_path", type=click.Path(exists=True), default=None,
              help="Prior MBN file; defaults to independent fair coins.")
@click.option("--ops", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--strategy", default="eager", help="eager or lazy:N")
@click.option("--backend", type=click.Choice(["mbn", "dense"]), default="mbn")
@click.option("--observer", default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def session_run(net_path, prior_path, ops, seed, strategy, backend, observer, out_path):
    """Run a policy-driven observation session and print the trace."""
    loaded = net_from_json(load_json(net_path))
    if prior_path:
        prior = mbn_from_json(load_json(prior_path))
    else:
        params = GenParams(n_places=loaded.n, n_transitions=0, seed=seed)
        _, prior = gen_net(params)
    try:
        session = run_session(
            loaded,
            prior,
            UpdateStrategy.parse(strategy),
            n_ops=ops,
            seed=seed,
            observer=observer,
            backend=backend,
        )
    except errors.NetBeliefError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        sys.exit(1)
    doc = session.to_json()
    doc["final_marginals"] = session.marginals()
    if out_path:
        dump_json(doc, out_path)
    else:
        click.echo(json.dumps(doc, indent=2))


@main.command("bench")
@click.option("--grid", "grid_path", type=click.Path(exists=True), required=True,
              help="JSON file: list of GenParams objects.")
@click.option("--backends", default="dense,mbn")
@click.option("--ops", type=int, default=100)
@click.option("--timeout", type=float, default=60.0)
@click.option("--workers", type=int, default=1)
@click.option("--out", "out_path", type=click.Path(), default=None)
def bench_cmd(grid_path, backends, ops, timeout, workers, out_path):
    """Run the dense-versus-mbn benchmark over a parameter grid."""
    grid = [GenParams.from_json(doc) for doc in load_json(grid_path)]
    report = run_bench(
        grid,
        backends=[b for b in backends.split(",") if b],
        ops=ops,
        timeout_s=timeout,
        workers=workers,
    )
    doc = report.to_json()
    if out_path:
        dump_json(doc, out_path)
    else:
        click.echo(json.dumps(doc, indent=2))
    for cell in report.cells:
        tag = "TIMEOUT" if cell.timeout else f"{cell.mean_ms:9.3f} ms/op"
        click.echo(
            f"n={cell.params.n_places:3d} t={cell.params.n_transitions:3d} "
            f"{cell.backend:6s} {tag}",
            err=True,
        )


@main.command("serve")
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--state-dir", default=None, type=click.Path())
def serve(port: int, host: str, state_dir) -> None:
    """Serve the HTTP session API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(state_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
