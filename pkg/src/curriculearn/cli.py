"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 domain error (bad data, IO, backend failures),
2 usage error (unknown flags, bad values). Every subcommand prints its
resolved configuration to stderr before doing work, and all randomness
derives from the single --seed via the documented per-stage fan-out.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
from sklearn.exceptions import NotFittedError

from . import corpus, criteria, judge, loss_trunc, metrics, rtt, scheduler, simlab

_DOMAIN_ERRORS = (
    ValueError,
    OSError,
    KeyError,
    NotFittedError,
    rtt.TranslationError,
    judge.BackendError,
)


def _echo_config(name: str, **settings) -> None:
    click.echo(f"{name} config: {json.dumps(settings, default=str)}", err=True)


def _domain_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except _DOMAIN_ERRORS as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
def main():
    """Curriculum data pipelines for noisy data-to-text corpora."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["facts", "table"]), default="facts")
@click.option("--criterion", type=click.Choice(list(criteria.CRITERIA)), required=True)
@click.option("--side", type=click.Choice(list(criteria.SIDES)), default="text")
@click.option("--joint", is_flag=True, help="Pool languages into one rarity model.")
@click.option("--no-smoothing", is_flag=True, help="Disable add-one smoothing.")
@click.option(
    "--alignment-file",
    type=click.Path(exists=True),
    help="Ingest external alignment scores instead of the built-in heuristic.",
)
@click.option("--output", "output_path", required=True, type=click.Path())
@_domain_errors
def score(input_path, fmt, criterion, side, joint, no_smoothing, alignment_file, output_path):
    """Score every sample under one ordering criterion."""
    _echo_config(
        "score",
        input=input_path,
        format=fmt,
        criterion=criterion,
        side=side,
        joint=joint,
        smoothing=not no_smoothing,
        alignment_file=alignment_file,
        output=output_path,
    )
    samples = corpus.load_samples(input_path, fmt)
    if alignment_file:
        if criterion != "alignment":
            raise ValueError("--alignment-file requires --criterion alignment")
        scores = criteria.alignment_from_file(alignment_file)
        criteria.validate_scores(scores, samples)
    else:
        scores = criteria.score_samples(
            samples,
            criterion,
            side=side,
            smoothing=not no_smoothing,
            per_language=not joint,
        )
    criteria.save_scores(scores, output_path)
    click.echo(f"wrote {len(scores)} scores to {output_path}")


@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--shards", "k", default=scheduler.DEFAULT_SHARDS, show_default=True)
@click.option(
    "--direction", type=click.Choice(list(scheduler.DIRECTIONS)), default="ascending"
)
@click.option("--output", "output_path", required=True, type=click.Path())
@_domain_errors
def shard(scores_path, k, direction, output_path):
    """Partition scored ids into K criterion-ordered shards."""
    _echo_config(
        "shard", scores=scores_path, shards=k, direction=direction, output=output_path
    )
    scores = criteria.load_scores(scores_path)
    sharding = scheduler.make_shards(scores, k=k, direction=direction)
    Path(output_path).write_text(json.dumps(sharding.to_dict(), indent=2))
    click.echo(f"wrote {sharding.k}-shard sharding to {output_path}")


@main.command()
@click.option("--shards", "k", default=scheduler.DEFAULT_SHARDS, show_default=True)
@click.option("--mode", type=click.Choice(list(scheduler.MODES)), required=True)
@click.option("--output", "output_path", required=True, type=click.Path())
@_domain_errors
def schedule(k, mode, output_path):
    """Emit the phase staircase for K shards."""
    _echo_config("schedule", shards=k, mode=mode, output=output_path)
    sched = scheduler.make_schedule(k, mode)
    payload = {"mode": sched.mode, "K": sched.k, "phases": [list(p) for p in sched.phases]}
    Path(output_path).write_text(json.dumps(payload, indent=2))
    click.echo(f"wrote {sched.k}-phase {mode} schedule to {output_path}")


@main.command()
@click.option("--sharding", "sharding_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(list(scheduler.MODES)), required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@_domain_errors
def sample(sharding_path, mode, seed, out_dir):
    """Write deterministic phase manifests (phase-1.jsonl .. phase-K.jsonl)."""
    _echo_config("sample", sharding=sharding_path, mode=mode, seed=seed, out_dir=out_dir)
    sharding = scheduler.Sharding.from_dict(json.loads(Path(sharding_path).read_text()))
    sched = scheduler.make_schedule(sharding.k, mode)
    paths = scheduler.emit_manifests(sharding, sched, seed, out_dir)
    click.echo(f"wrote {len(paths)} manifests to {out_dir}")


@main.command("filter-rtt")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["facts", "table"]), default="facts")
@click.option("--lang", required=True, help="Target language code.")
@click.option(
    "--translator",
    "backend",
    type=click.Choice(["identity", "tsv", "http"]),
    default="identity",
)
@click.option("--tsv", "tsv_path", type=click.Path(exists=True))
@click.option("--url", "base_url")
@click.option("--r1", default=rtt.DEFAULT_R1, show_default=True)
@click.option("--r2", default=rtt.DEFAULT_R2, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--jobs", default=1, show_default=True, help="Concurrent translation batches.")
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path())
@_domain_errors
def filter_rtt(
    input_path, fmt, lang, backend, tsv_path, base_url, r1, r2, batch_size, jobs, output_path, report_path
):
    """Round-trip translate and keep pairs that survive the ROUGE thresholds."""
    _echo_config(
        "filter-rtt",
        input=input_path,
        format=fmt,
        lang=lang,
        translator=backend,
        r1=r1,
        r2=r2,
        batch_size=batch_size,
        jobs=jobs,
        output=output_path,
    )
    if backend == "tsv":
        if not tsv_path:
            raise click.UsageError("--translator tsv requires --tsv")
        translator = rtt.TsvTranslator(tsv_path)
    elif backend == "http":
        if not base_url:
            raise click.UsageError("--translator http requires --url")
        translator = rtt.HttpTranslator(base_url)
    else:
        translator = rtt.IdentityTranslator()
    samples = corpus.load_samples(input_path, fmt)
    result = rtt.round_trip(samples, translator, lang, batch_size=batch_size, jobs=jobs)
    kept, report = rtt.filter_pairs(result.pairs, rtt.FilterConfig(r1=r1, r2=r2))
    corpus.save_samples(kept, output_path)
    payload = report.to_dict()
    payload["translation_failures"] = result.failed_count
    if report_path:
        Path(report_path).write_text(json.dumps(payload, indent=2))
    click.echo(json.dumps(payload))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--drop-frac", default=loss_trunc.DEFAULT_DROP_FRAC, show_default=True)
@click.option("--window", default=loss_trunc.DEFAULT_WINDOW, show_default=True)
@click.option("--warmup", default=loss_trunc.DEFAULT_WARMUP, show_default=True)
@_domain_errors
def truncate(input_path, output_path, drop_frac, window, warmup):
    """Classify a loss stream into keep/drop decisions."""
    _echo_config(
        "truncate",
        input=input_path,
        output=output_path,
        drop_frac=drop_frac,
        window=window,
        warmup=warmup,
    )
    report = loss_trunc.truncate_stream(
        input_path, output_path, drop_frac=drop_frac, window=window, warmup=warmup
    )
    click.echo(json.dumps(report.to_dict()))


@main.command("eval")
@click.option("--hypotheses", "hyp_path", required=True, type=click.Path(exists=True))
@click.option("--references", "ref_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", type=click.Path())
@_domain_errors
def eval_cmd(hyp_path, ref_path, output_path):
    """Score two parallel text files (ROUGE-1/2 macro-averaged, BLEU, chrF++)."""
    _echo_config("eval", hypotheses=hyp_path, references=ref_path, output=output_path)
    hyps = Path(hyp_path).read_text(encoding="utf-8").splitlines()
    refs = Path(ref_path).read_text(encoding="utf-8").splitlines()
    if len(hyps) != len(refs):
        raise ValueError(f"line count mismatch: {len(hyps)} vs {len(refs)}")
    if not hyps:
        raise ValueError("empty evaluation files")
    hyp_tokens = [criteria.tokenize(line) for line in hyps]
    ref_tokens = [criteria.tokenize(line) for line in refs]
    reports = []
    for order in (1, 2):
        pair_f = [
            metrics.rouge_n(h, r, order) for h, r in zip(hyp_tokens, ref_tokens)
        ]
        reports.append(
            {
                "name": f"rouge{order}",
                "f": sum(p.f for p in pair_f) / len(pair_f),
                "precision": sum(p.precision for p in pair_f) / len(pair_f),
                "recall": sum(p.recall for p in pair_f) / len(pair_f),
            }
        )
    reports.append(metrics.corpus_bleu(hyp_tokens, ref_tokens).to_dict())
    reports.append(metrics.chrf_pp(hyps, refs).to_dict())
    payload = json.dumps(reports, indent=2)
    if output_path:
        Path(output_path).write_text(payload)
    click.echo(payload)


@main.command("judge")
@click.option("--samples", "samples_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["facts", "table"]), default="facts")
@click.option(
    "--generated",
    "generated_path",
    required=True,
    type=click.Path(exists=True),
    help='JSONL of {"id", "text"} generated outputs.',
)
@click.option("--backend", type=click.Choice(["mock", "http"]), default="mock")
@click.option("--fixtures", "fixtures_path", type=click.Path(exists=True))
@click.option("--url", "base_url")
@click.option("--report", "report_path", type=click.Path())
@_domain_errors
def judge_cmd(samples_path, fmt, generated_path, backend, fixtures_path, base_url, report_path):
    """Grade generated texts for fluency/faithfulness/coverage."""
    _echo_config(
        "judge",
        samples=samples_path,
        format=fmt,
        generated=generated_path,
        backend=backend,
    )
    samples = corpus.load_samples(samples_path, fmt)
    generated: dict[str, str] = {}
    with Path(generated_path).open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                record = json.loads(line)
                generated[str(record["id"])] = str(record["text"])
    missing = [s.id for s in samples if s.id not in generated]
    if missing:
        raise ValueError(f"no generated text for ids {missing[:5]}")
    if backend == "mock":
        if not fixtures_path:
            raise click.UsageError("--backend mock requires --fixtures")
        judge_backend = judge.MockJudgeBackend(fixtures_path)
    else:
        if not base_url:
            raise click.UsageError("--backend http requires --url")
        judge_backend = judge.HttpJudgeBackend(base_url)
    report = judge.judge_batch(
        list(samples), [generated[s.id] for s in samples], judge_backend
    )
    payload = json.dumps(report, indent=2)
    if report_path:
        Path(report_path).write_text(payload)
    click.echo(payload)


@main.command()
@click.option("--noise", default=0.3, show_default=True)
@click.option("--shards", default=8, show_default=True)
@click.option("--modes", default="baseline,expanding,annealing", show_default=True)
@click.option("--seeds", default=10, show_default=True, help="Seeds 0..N-1.")
@click.option("--n-train", default=6000, show_default=True)
@click.option("--n-test", default=2000, show_default=True)
@click.option("--epochs-per-phase", default=1, show_default=True)
@click.option("--out", "output_path", type=click.Path())
@_domain_errors
def simulate(noise, shards, modes, seeds, n_train, n_test, epochs_per_phase, output_path):
    """Run the synthetic curriculum-vs-noise experiment grid."""
    config = simlab.ExperimentConfig(
        noise_rate=noise,
        shards=shards,
        modes=tuple(m.strip() for m in modes.split(",") if m.strip()),
        seeds=tuple(range(seeds)),
        n_train=n_train,
        n_test=n_test,
        epochs_per_phase=epochs_per_phase,
    )
    _echo_config("simulate", **config.__dict__)
    report = simlab.run_experiment(config)
    if output_path:
        Path(output_path).write_text(report.to_json())
    click.echo(report.summary_table())


_PIPELINE_DEFAULTS = {
    "format": "facts",
    "criterion": "alignment",
    "side": "text",
    "shards": scheduler.DEFAULT_SHARDS,
    "mode": "annealing",
    "direction": "ascending",
    "seed": 0,
    "alignment_file": None,
}
_PIPELINE_INT_KEYS = {"shards", "seed"}


def _read_pipeline_config(path: str | None) -> dict:
    if not path:
        return {}
    settings = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        settings[key.strip()] = value.strip()
    return settings


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--input", "input_path", type=click.Path())
@click.option("--out-dir", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["facts", "table"]))
@click.option("--criterion", type=click.Choice(list(criteria.CRITERIA)))
@click.option("--side", type=click.Choice(list(criteria.SIDES)))
@click.option("--shards", "k", type=int)
@click.option("--mode", type=click.Choice(list(scheduler.MODES)))
@click.option("--direction", type=click.Choice(list(scheduler.DIRECTIONS)))
@click.option("--seed", type=int)
@click.option("--alignment-file", type=click.Path())
def pipeline(config_path, input_path, out_dir, fmt, criterion, side, k, mode, direction, seed, alignment_file):
    """Run score -> shard -> schedule -> sample end to end.

    Settings resolve as flags > config file > defaults. The config file is
    plain 'key = value' lines with the same names as the flags.
    """
    flag_settings = {
        "input": input_path,
        "out_dir": out_dir,
        "format": fmt,
        "criterion": criterion,
        "side": side,
        "shards": k,
        "mode": mode,
        "direction": direction,
        "seed": seed,
        "alignment_file": alignment_file,
    }
    try:
        file_settings = _read_pipeline_config(config_path)
        resolved = dict(_PIPELINE_DEFAULTS)
        resolved.update({k2: v for k2, v in file_settings.items()})
        resolved.update({k2: v for k2, v in flag_settings.items() if v is not None})
        for key in _PIPELINE_INT_KEYS:
            resolved[key] = int(resolved[key])
    except (ValueError, OSError) as exc:
        raise click.ClickException(f"stage 'config' failed: {exc}") from exc
    if not resolved.get("input") or not resolved.get("out_dir"):
        raise click.UsageError("pipeline needs 'input' and 'out_dir' (flag or config)")
    _echo_config("pipeline", **resolved)

    out_root = Path(resolved["out_dir"])
    stage = "score"
    try:
        out_root.mkdir(parents=True, exist_ok=True)
        samples = corpus.load_samples(resolved["input"], resolved["format"])
        if resolved.get("alignment_file"):
            scores = criteria.alignment_from_file(resolved["alignment_file"])
            criteria.validate_scores(scores, samples)
        else:
            scores = criteria.score_samples(
                samples, resolved["criterion"], side=resolved["side"]
            )
        criteria.save_scores(scores, out_root / "scores.jsonl")

        stage = "shard"
        sharding = scheduler.make_shards(
            scores, k=resolved["shards"], direction=resolved["direction"]
        )
        (out_root / "sharding.json").write_text(json.dumps(sharding.to_dict(), indent=2))

        stage = "schedule"
        sched = scheduler.make_schedule(sharding.k, resolved["mode"])
        (out_root / "schedule.json").write_text(
            json.dumps(
                {"mode": sched.mode, "K": sched.k, "phases": [list(p) for p in sched.phases]},
                indent=2,
            )
        )

        stage = "sample"
        paths = scheduler.emit_manifests(
            sharding, sched, resolved["seed"], out_root / "manifests"
        )
    except _DOMAIN_ERRORS as exc:
        raise click.ClickException(f"stage {stage!r} failed: {exc}") from exc
    click.echo(f"pipeline complete: {len(paths)} manifests under {out_root / 'manifests'}")


if __name__ == "__main__":
    sys.exit(main())
