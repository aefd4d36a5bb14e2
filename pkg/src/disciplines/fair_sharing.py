from typing import List, Sequence
import logging

from src.disciplines.base_discipline import SchedulingDiscipline
from src.model.formulas import utilization_fair
from src.model.types import ClassMix, Discipline, LoadPoint, UserClass

logger = logging.getLogger(__name__)


class FairSharingDiscipline(SchedulingDiscipline):
    name = "fair_sharing"
    discipline = Discipline.FAIR_SHARING
    description = "Processor sharing: n active flows each get C/n"

    def utilization(self, mix: ClassMix) -> LoadPoint:
        return utilization_fair(mix)

    def reference_rate(self, capacity: float, user_class: UserClass) -> float:
        """Every class sees the full channel capacity."""
        if user_class.channel_rate != capacity:
            logger.debug(
                f"{user_class.label}: channel rate {user_class.channel_rate:g} ignored "
                f"under fair sharing, using capacity {capacity:g}"
            )
        return capacity

    def drain_rates(self, capacity: float, active_channel_rates: Sequence[float]) -> List[float]:
        n = len(active_channel_rates)
        return [capacity / n] * n
