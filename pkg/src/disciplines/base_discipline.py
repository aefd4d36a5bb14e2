from abc import ABC, abstractmethod
from typing import Dict, List, Sequence

from src.model.formulas import conditional_transfer_time, mean_transfer_time, per_user_throughput
from src.model.types import ClassMix, Discipline, LoadPoint, RatePrediction, UserClass


class SchedulingDiscipline(ABC):
    """
    Abstract base class for a shared-channel scheduler.

    A discipline decides how the capacity of a channel is split among the
    flows active at an instant, and from that the reference rate each class
    sees in the closed-form model.
    """
    name: str
    discipline: Discipline
    description: str

    @abstractmethod
    def utilization(self, mix: ClassMix) -> LoadPoint:
        """Utilization rho and its per-class components"""
        pass

    @abstractmethod
    def reference_rate(self, capacity: float, user_class: UserClass) -> float:
        """Rate a lone flow of this class would get (bit/s)"""
        pass

    @abstractmethod
    def drain_rates(self, capacity: float, active_channel_rates: Sequence[float]) -> List[float]:
        """Instantaneous rate of each active flow"""
        pass

    def predict(self, mix: ClassMix) -> Dict[str, RatePrediction]:
        """
        Per-class transfer time and throughput at the mix's own utilization.

        Returns:
            Mapping class label -> RatePrediction, in class order
        """
        load = self.utilization(mix)
        predictions = {}
        for user_class in mix.classes:
            rate = self.reference_rate(mix.channel.capacity, user_class)
            predictions[user_class.label] = RatePrediction(
                mean_transfer_time=mean_transfer_time(user_class.mean_size, rate, load),
                per_user_throughput=per_user_throughput(rate, load),
                conditional_time_per_bit=conditional_transfer_time(1.0, rate, load),
                label=user_class.label,
            )
        return predictions
