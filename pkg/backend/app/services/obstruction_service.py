"""Async wrapper around the obstruction engine."""

import asyncio
import sys
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

# Add parent directory to path to import from src
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from src.graded_ring import (
    GradedRingDescription,
    betti_numbers,
    cup,
    euler_characteristic,
    parse_monomial,
    poincare_polynomial,
)
from src.intersection_form import UnimodularForm, middle_form_check, rank2_tables
from src.lefschetz import TraceConvention, anosov_compatibility, lefschetz_sequence
from src.math_tools import matrix_to_lists
from src.records import ObstructionReport, VerdictRecord
from src.schemas import AutomorphismDocument, ManifoldSpec, SphereProductManifold
from src.sphere_products import block_table, format_block_table, witness_blocks
from src.toral_oracle import ToralMap, lefschetz_cross_check
from src.verdict import apply_rules
from src.logger import setup_logger
from backend.app.config import settings

logger = setup_logger(__name__)


class ServiceBusyError(Exception):
    """Every engine worker is occupied, including by timed-out jobs still running."""


class ObstructionService:
    """Runs engine calls on a bounded worker pool with a time limit.

    A slot is taken per job and given back only when the worker thread
    finishes, so jobs that outlive their request still count against the pool.
    """

    def __init__(self, timeout: Optional[float] = None, max_workers: Optional[int] = None):
        self.timeout = settings.COMPUTE_TIMEOUT_SECONDS if timeout is None else timeout
        self.max_workers = settings.COMPUTE_MAX_WORKERS if max_workers is None else max_workers
        self._executor = ThreadPoolExecutor(max_workers=self.max_workers, thread_name_prefix="engine")
        self._slots = threading.BoundedSemaphore(self.max_workers)
        self._in_flight = 0
        self._lock = threading.Lock()
        logger.info(f"ObstructionService ready (timeout {self.timeout}s, {self.max_workers} workers)")

    @property
    def in_flight(self) -> int:
        return self._in_flight

    def _release(self, _: Future) -> None:
        with self._lock:
            self._in_flight -= 1
        self._slots.release()

    async def _run(self, func: Callable[..., Any], *args, **kwargs) -> Any:
        if not self._slots.acquire(blocking=False):
            logger.warning(f"all {self.max_workers} engine workers busy; rejecting request")
            raise ServiceBusyError(f"all {self.max_workers} engine workers are busy")
        with self._lock:
            self._in_flight += 1
        try:
            future = self._executor.submit(partial(func, *args, **kwargs))
        except BaseException:
            self._release(None)
            raise
        future.add_done_callback(self._release)
        try:
            return await asyncio.wait_for(asyncio.wrap_future(future), timeout=self.timeout)
        except asyncio.TimeoutError:
            # a queued job is dropped; a running one keeps its slot until it returns
            future.cancel()
            logger.warning(f"engine call exceeded {self.timeout}s; {self._in_flight} jobs still hold workers")
            raise

    def shutdown(self) -> None:
        self._executor.shutdown(wait=False, cancel_futures=True)

    async def betti_async(self, ring: GradedRingDescription) -> Dict[str, Any]:
        def work():
            return {
                "betti": betti_numbers(ring),
                "euler_characteristic": euler_characteristic(ring),
                "poincare_polynomial": str(poincare_polynomial(ring)),
            }

        return await self._run(work)

    async def cup_async(self, ring: GradedRingDescription, a: str, b: str) -> Dict[str, Any]:
        def work():
            left, right = parse_monomial(ring, a), parse_monomial(ring, b)
            product = cup(ring, left, right)
            return {
                "a": left.format(ring),
                "b": right.format(ring),
                "sign": product.sign,
                "product": "0" if product.is_zero else product.monomial.format(ring),
            }

        return await self._run(work)

    async def lefschetz_async(
        self,
        document: AutomorphismDocument,
        length: Optional[int],
        convention: TraceConvention,
        growth: bool,
    ) -> Dict[str, Any]:
        """Lefschetz sequence, plus the growth record when requested.

        Args:
            document: Ring and f* in any supported form
            length: Number of periods
            convention: Inverse or forward traces
            growth: Whether to classify the growth

        Returns:
            Dictionary with convention, values and compatibility
        """
        def work():
            aut = document.build()
            sequence = lefschetz_sequence(aut, length, convention)
            record = anosov_compatibility(aut, convention, length) if growth else None
            return {
                "convention": convention,
                "values": list(sequence.values),
                "compatibility": record.to_dict() if record is not None else None,
            }

        return await self._run(work)

    async def form_check_async(
        self, matrix: List[List[int]], chi_nonzero: bool, entry_bound: Optional[int]
    ) -> VerdictRecord:
        def work():
            form = UnimodularForm.from_matrix(matrix, "Q")
            return middle_form_check(form, chi_nonzero=chi_nonzero, entry_bound=entry_bound)

        return await self._run(work)

    async def tables_async(self) -> List[Dict[str, Any]]:
        def work():
            return [
                {"forms": table.names, "isometries": [matrix_to_lists(A) for A in table.isometries]}
                for table in rank2_tables()
            ]

        return await self._run(work)

    async def cross_check_async(self, matrix: List[List[int]], length: int) -> Dict[str, Any]:
        def work():
            return lefschetz_cross_check(ToralMap.from_matrix(matrix), length).to_dict()

        return await self._run(work)

    async def analyze_async(self, spec: ManifoldSpec) -> ObstructionReport:
        return await self._run(apply_rules, spec)

    async def blocks_async(self, spec: SphereProductManifold) -> Dict[str, Any]:
        """Block decomposition of f* for supplied or example generator blocks."""
        def work():
            product = spec.product
            blocks = spec.generator_blocks if spec.generator_blocks is not None else witness_blocks(product)
            decomposition = block_table(product, blocks)
            payload = decomposition.to_dict()
            payload["table"] = format_block_table(decomposition)
            payload["example_blocks"] = spec.generator_blocks is None
            return payload

        return await self._run(work)


# Global obstruction service instance
obstruction_service = ObstructionService()
