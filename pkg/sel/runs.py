"""
Run persistence.

Every CLI computation stores a RunRecord so results can be listed, inspected and reported
across invocations.
"""

import json
import logging
import uuid
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, cast

from sel.models import RunConfig, RunRecord

logger = logging.getLogger(__name__)


def new_run_id() -> str:
    return f"{datetime.now().strftime('%Y%m%d-%H%M%S')}-{uuid.uuid4().hex[:8]}"


class RunStore:
    """Persistent storage for run records."""

    def __init__(self, storage_dir: str = ".sel/runs"):
        self.storage_dir = Path(storage_dir)
        self._ensure_storage_dir()

    def _ensure_storage_dir(self):
        self.storage_dir.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Run storage directory: {self.storage_dir}")

    def _get_run_path(self, run_id: str) -> Path:
        return self.storage_dir / f"{run_id}.json"

    def _read_run_file(self, run_path: Path) -> dict | None:
        try:
            with open(run_path) as f:
                return cast(dict[str, Any], json.load(f))
        except Exception as e:
            logger.warning(f"Failed to read run {run_path}: {e}")
            return None

    def record(
        self,
        config: RunConfig,
        summary: dict[str, Any],
        output_path: str | None = None,
    ) -> RunRecord:
        """Build a record with a fresh run id and save it."""
        rec = RunRecord(
            run_id=new_run_id(), config=config, summary=summary, output_path=output_path
        )
        self.save(rec)
        return rec

    def save(self, rec: RunRecord) -> None:
        run_path = self._get_run_path(rec.run_id)
        data = {"version": 1, "run": rec.model_dump(mode="json")}
        try:
            with open(run_path, "w") as f:
                json.dump(data, f, indent=2)
            logger.info(f"Saved run {rec.run_id} ({rec.config.subcommand})")
        except Exception as e:
            logger.error(f"Failed to save run {rec.run_id}: {e}")
            raise

    def load(self, run_id: str) -> RunRecord | None:
        """
        Load a run record from disk. Every call reads the file.

        Returns:
            The RunRecord if found, None otherwise
        """
        run_path = self._get_run_path(run_id)
        if not run_path.exists():
            logger.warning(f"Run {run_id} not found")
            return None

        data = self._read_run_file(run_path)
        if not data or not data.get("run"):
            logger.error(f"Invalid run file {run_id}: no run data")
            return None
        try:
            rec = RunRecord.model_validate(data["run"])
        except Exception as e:
            logger.error(f"Failed to load run {run_id}: {e}")
            return None
        return rec

    def list_runs(self) -> list[RunRecord]:
        """All stored runs, newest first."""
        runs = []
        for run_path in self.storage_dir.glob("*.json"):
            rec = self.load(run_path.stem)
            if rec is not None:
                runs.append(rec)
        runs.sort(key=lambda r: r.created_at, reverse=True)
        return runs

    def delete(self, run_id: str) -> bool:
        run_path = self._get_run_path(run_id)
        if not run_path.exists():
            return False
        try:
            run_path.unlink()
            logger.info(f"Deleted run {run_id}")
            return True
        except Exception as e:
            logger.error(f"Failed to delete run {run_id}: {e}")
            return False

    def cleanup_old_runs(self, max_age_days: int = 7) -> int:
        """
        Delete runs older than max_age_days.

        Returns:
            Number of runs deleted
        """
        cutoff = datetime.now() - timedelta(days=max_age_days)
        deleted = 0
        for run_path in self.storage_dir.glob("*.json"):
            data = self._read_run_file(run_path)
            if not data:
                continue
            created_at_str = data.get("run", {}).get("created_at")
            if not created_at_str:
                continue
            if datetime.fromisoformat(created_at_str) < cutoff:
                run_path.unlink()
                deleted += 1
                logger.debug(f"Deleted old run {run_path.stem}")

        if deleted > 0:
            logger.info(f"Cleaned up {deleted} old runs")
        return deleted
