from typing import Dict, Type, Union

from src.disciplines.base_discipline import SchedulingDiscipline
from src.disciplines.fair_sharing import FairSharingDiscipline
from src.disciplines.proportional_fair import ProportionalFairDiscipline
from src.model.types import Discipline
from src.utils.validation import ConfigError


AVAILABLE_DISCIPLINES: Dict[str, Type[SchedulingDiscipline]] = {
    Discipline.FAIR_SHARING.value: FairSharingDiscipline,
    Discipline.PROPORTIONAL_FAIR.value: ProportionalFairDiscipline,
}


def get_discipline(name: Union[str, Discipline]) -> SchedulingDiscipline:
    """
    Factory function for scheduler disciplines.

    Args:
        name: 'fair_sharing' or 'proportional_fair' (or the Discipline enum)

    Returns:
        Discipline instance

    Raises:
        ConfigError: If the discipline name is not known
    """
    key = name.value if isinstance(name, Discipline) else str(name)
    discipline_class = AVAILABLE_DISCIPLINES.get(key)
    if not discipline_class:
        raise ConfigError(
            f"Discipline '{name}' not found. Available: {sorted(AVAILABLE_DISCIPLINES)}"
        )
    return discipline_class()
