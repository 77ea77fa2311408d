from datetime import datetime, timezone
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from heavytail.core.config import settings


class RunManifest(BaseModel):
    """Everything needed to regenerate an output artifact"""
    subcommand: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    tool_version: str = Field(default_factory=lambda: f"{settings.PROJECT_NAME} {settings.VERSION}")
    timestamp: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
