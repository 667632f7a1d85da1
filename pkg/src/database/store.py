import logging

from sqlalchemy import func, select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.ext.asyncio import AsyncSession

from database.models import RunRecordModel

logger = logging.getLogger(__name__)


class RunStore:
    """
    Result records keyed by configuration hash.

    Attributes:
        _db_session (AsyncSession): Asynchronous SQLAlchemy session for database operations.
    """

    def __init__(self, db_session: AsyncSession):
        self._db_session = db_session

    async def save(self, config_hash: str, command: str, tool_version: str, payload: dict) -> RunRecordModel:
        """
        Store a record, replacing the payload of an existing record with the same hash.

        :param config_hash: SHA-256 of the canonical run configuration.
        :param payload: JSON-serializable result record.
        :return: The stored row.
        """
        try:
            result = await self._db_session.execute(
                select(RunRecordModel).where(RunRecordModel.config_hash == config_hash)
            )
            record = result.scalars().first()
            if record is None:
                record = RunRecordModel(config_hash=config_hash, command=command, tool_version=tool_version,
                                        payload=payload)
                self._db_session.add(record)
            else:
                record.command = command
                record.tool_version = tool_version
                record.payload = payload
            await self._db_session.commit()
            await self._db_session.refresh(record)
            return record
        except SQLAlchemyError as e:
            logger.error("Failed to store run %s: %s", config_hash[:12], e)
            await self._db_session.rollback()
            raise

    async def get(self, config_hash: str) -> RunRecordModel | None:
        result = await self._db_session.execute(
            select(RunRecordModel).where(RunRecordModel.config_hash == config_hash)
        )
        return result.scalars().first()

    async def count(self) -> int:
        result = await self._db_session.execute(select(func.count()).select_from(RunRecordModel))
        return result.scalar_one()

    async def page(self, offset: int, limit: int) -> list[RunRecordModel]:
        result = await self._db_session.execute(
            select(RunRecordModel).order_by(RunRecordModel.id.desc()).offset(offset).limit(limit)
        )
        return list(result.scalars().all())
