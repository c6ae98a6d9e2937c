from pathlib import Path

from l0forge.exceptions import TableDoesNotExist
from l0forge.models import DbMetadata, Migration, RunHistory, db
from l0forge.utils.user_appdirs import retrieve_user_cache_dbfile


def initial_migration() -> None:
    db.create_tables([DbMetadata, RunHistory])


MIGRATIONS: list[Migration] = [
    Migration(version=0, migrate=initial_migration),
]


def init_db(path: Path | None = None) -> None:
    if path is not None:
        db.init(str(path))
    elif db.deferred:
        db.init(str(retrieve_user_cache_dbfile()))


def migrate(path: Path | None = None) -> None:
    init_db(path)
    db.connect(reuse_if_open=True)
    try:
        for migration in sorted(MIGRATIONS, key=lambda x: x.version):
            try:
                if not DbMetadata.table_exists():
                    raise TableDoesNotExist()
                DbMetadata.get_by_id(migration.version)
            except (DbMetadata.DoesNotExist, TableDoesNotExist):
                migration.migrate()
                DbMetadata.create(version=migration.version)
    finally:
        db.close()
