# File: bumpwall/database/models.py
# ===========================
# DATABASE MODELS AND SCHEMA
# ===========================

import json
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, Optional


@dataclass
class RunRecord:
    """Ledger row for one CLI run"""
    id: int
    name: str
    command: str
    verdict: str
    seed: Optional[int]
    config: Dict[str, Any]
    constants: Dict[str, Any]
    report_path: Optional[str]
    wall_time: float
    created_at: datetime

    @classmethod
    def from_db_row(cls, row):
        """Create RunRecord instance from database row"""
        return cls(
            id=row[0],
            name=row[1],
            command=row[2],
            verdict=row[3],
            seed=row[4],
            config=json.loads(row[5]) if row[5] else {},
            constants=json.loads(row[6]) if row[6] else {},
            report_path=row[7],
            wall_time=float(row[8] or 0.0),
            created_at=datetime.fromisoformat(row[9]) if row[9] else datetime.now()
        )

    def to_dict(self):
        """Convert to dictionary"""
        return {
            'id': self.id,
            'name': self.name,
            'command': self.command,
            'verdict': self.verdict,
            'seed': self.seed,
            'config': self.config,
            'constants': self.constants,
            'report_path': self.report_path,
            'wall_time': self.wall_time,
            'created_at': self.created_at.isoformat()
        }
