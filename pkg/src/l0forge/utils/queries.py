from l0forge.models import RunHistory, db


def record_run(
    command: str,
    exit_status: int,
    *,
    method: str | None = None,
    n: int | None = None,
    seed: int | None = None,
    lam: float | None = None,
    iterations: int | None = None,
    wall_time: float | None = None,
    stop_reason: str | None = None,
) -> RunHistory:
    with db.connection_context():
        return RunHistory.create(
            command=command,
            exit_status=exit_status,
            method=method,
            n=n,
            seed=seed,
            lam=lam,
            iterations=iterations,
            wall_time=wall_time,
            stop_reason=stop_reason,
        )


def get_recent_runs(limit: int = 20) -> list[RunHistory]:
    with db.connection_context():
        query = RunHistory.select().order_by(RunHistory.ran_at.desc(), RunHistory.id.desc())  # type: ignore
        return list(query.limit(limit))
