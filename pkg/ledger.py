"""
Database models for the run ledger.

Each CLI invocation given --ledger stores one RunRecord. The database comes
from DATABASE_URL, or an SQLite file under instance/ when it is unset.
"""

import logging
import os
from datetime import datetime, timezone
from typing import List, Optional

from sqlalchemy import Column, DateTime, Float, Integer, String, create_engine, select
from sqlalchemy.orm import declarative_base, sessionmaker

logger = logging.getLogger(__name__)

Base = declarative_base()


def _utcnow():
    return datetime.now(timezone.utc).replace(tzinfo=None)


class RunRecord(Base):
    """One command invocation."""
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)
    command = Column(String(40), nullable=False)
    config_hash = Column(String(64), nullable=False)
    config_path = Column(String(500), default='')
    seed = Column(Integer)
    trials = Column(Integer)
    discarded = Column(Integer, default=0)
    sup_deviation = Column(Float)
    tolerance = Column(Float)
    runtime_s = Column(Float)
    exit_status = Column(Integer, nullable=False)
    created_at = Column(DateTime, default=_utcnow)

    def to_dict(self):
        return {
            'id': self.id,
            'command': self.command,
            'config_hash': self.config_hash,
            'config_path': self.config_path,
            'seed': self.seed,
            'trials': self.trials,
            'discarded': self.discarded,
            'sup_deviation': self.sup_deviation,
            'tolerance': self.tolerance,
            'runtime_s': self.runtime_s,
            'exit_status': self.exit_status,
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }

    def __repr__(self):
        return f'<RunRecord {self.command} hash={self.config_hash} status={self.exit_status}>'


def get_database_url():
    """Get database URL from environment or use SQLite default."""
    db_url = os.environ.get('DATABASE_URL')
    if db_url:
        # hosting platforms hand out the legacy scheme
        if db_url.startswith('postgres://'):
            db_url = db_url.replace('postgres://', 'postgresql://', 1)
        db_type = "PostgreSQL" if db_url.startswith('postgresql://') else "database"
        logger.info("[LEDGER] Using %s from DATABASE_URL", db_type)
        return db_url
    instance_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'instance')
    os.makedirs(instance_path, exist_ok=True)
    sqlite_path = f'sqlite:///{os.path.join(instance_path, "runs.db")}'
    logger.debug("[LEDGER] DATABASE_URL not set, using SQLite at %s", sqlite_path)
    return sqlite_path


def init_db(db_url: Optional[str] = None):
    """Create the engine and the ledger table."""
    try:
        engine = create_engine(db_url or get_database_url(), pool_pre_ping=True, echo=False)
        Base.metadata.create_all(engine)
        return engine
    except Exception as e:
        logger.error("[LEDGER] Failed to initialize database: %s", e)
        raise


def get_db_session(engine=None):
    """Get database session."""
    if engine is None:
        engine = create_engine(get_database_url())
    Session = sessionmaker(bind=engine)
    return Session()


def record_run(command: str, config_hash: str, exit_status: int, engine=None,
               config_path: str = '', seed: Optional[int] = None, trials: Optional[int] = None,
               discarded: int = 0, sup_deviation: Optional[float] = None,
               tolerance: Optional[float] = None, runtime_s: Optional[float] = None) -> RunRecord:
    """Store one run and return the persisted record."""
    if engine is None:
        engine = init_db()
    session = get_db_session(engine)
    try:
        record = RunRecord(command=command, config_hash=config_hash, config_path=config_path,
                           seed=seed, trials=trials, discarded=discarded,
                           sup_deviation=sup_deviation, tolerance=tolerance,
                           runtime_s=runtime_s, exit_status=exit_status)
        session.add(record)
        session.commit()
        session.refresh(record)
        session.expunge(record)
        logger.info("[LEDGER] recorded run %d (%s, status %d)", record.id, command, exit_status)
        return record
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def list_runs(limit: int = 20, engine=None) -> List[RunRecord]:
    """Most recent runs first."""
    if engine is None:
        engine = init_db()
    session = get_db_session(engine)
    try:
        records = session.scalars(
            select(RunRecord).order_by(RunRecord.created_at.desc(), RunRecord.id.desc()).limit(limit)
        ).all()
        for record in records:
            session.expunge(record)
        return list(records)
    finally:
        session.close()
