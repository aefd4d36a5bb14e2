from typing import List, Sequence

from src.disciplines.base_discipline import SchedulingDiscipline
from src.model.formulas import effective_capacity, utilization_proportional_fair
from src.model.types import ClassMix, Discipline, LoadPoint, UserClass


class ProportionalFairDiscipline(SchedulingDiscipline):
    name = "proportional_fair"
    discipline = Discipline.PROPORTIONAL_FAIR
    description = "Proportional fair: n active flows each get C_i/n"

    def utilization(self, mix: ClassMix) -> LoadPoint:
        return utilization_proportional_fair(mix)

    def reference_rate(self, capacity: float, user_class: UserClass) -> float:
        """A class sees its own MCS-determined rate C_i."""
        return user_class.channel_rate

    def drain_rates(self, capacity: float, active_channel_rates: Sequence[float]) -> List[float]:
        if not active_channel_rates:
            return []
        return list(effective_capacity(active_channel_rates).instantaneous_rates)
