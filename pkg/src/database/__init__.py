from database.models import (
    Base,
    RunRecordModel
)
from database.session import (
    init_db,
    close_db,
    get_db_contextmanager,
    get_db,
    reset_sqlite_database
)
from database.store import RunStore
