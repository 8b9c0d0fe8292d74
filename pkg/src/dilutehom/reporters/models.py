"""
Pydantic models for dilutehom JSON reports.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class TableModel(BaseModel):
    """One result table"""
    name: str
    columns: List[str]
    rows: List[List[Any]]
    summary: Dict[str, Any] = Field(default_factory=dict)


class CheckModel(BaseModel):
    """One selftest check"""
    name: str
    status: str
    measured: Optional[float] = None
    threshold: float
    message: str = ""


class ReportModel(BaseModel):
    """Top-level JSON report"""
    tool: str = "dilutehom"
    version: str
    command: str
    config: Dict[str, Any]
    table: TableModel
