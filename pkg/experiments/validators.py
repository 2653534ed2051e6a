"""
Exponent rules for each experiment target.

The guarantees an experiment reproduces only hold under conditions on the
schedule exponents. Strict inequalities are enforced with a safety margin so a
config that sits on a boundary is flagged instead of silently tested.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np

from games.enums import GameFamily, SequenceKind
from learner.enums import StepKind
from metrics.enums import Target
from .builders import exponents
from .enums import LearnerKind, ExperimentConstants, ErrorMessages

logger = logging.getLogger(__name__)

MARGIN = ExperimentConstants.EXPONENT_MARGIN
TOL = ExperimentConstants.EXPONENT_TOL

GRADIENT_TARGETS = (Target.REGRET, Target.CONVERGENCE, Target.TRACKING, Target.DYNAMIC_REGRET, Target.ERGODIC)
BANDIT_TARGETS = (Target.BANDIT_TRACKING, Target.BANDIT_CONVERGENCE)


class ExponentValidator:
    """Per-target checks; each returns a list of violated conditions"""

    @staticmethod
    def _in_unit_interval(name: str, value: float, closed_right: bool) -> List[str]:
        upper = 1.0 + TOL if closed_right else 1.0 - MARGIN + TOL
        if MARGIN - TOL <= value <= upper:
            return []
        interval = f"[{MARGIN}, 1]" if closed_right else f"[{MARGIN}, {1 - MARGIN}]"
        return [ErrorMessages.EXPONENT_RANGE.format(name=name, value=value, interval=interval)]

    @staticmethod
    def _exceeds(p: float, terms: Dict[str, float]) -> List[str]:
        finite = {label: value for label, value in terms.items() if np.isfinite(value)}
        if not finite:
            return []
        bound = max(finite.values())
        if p > bound + MARGIN - TOL:
            return []
        described = ", ".join(f"{label}={value:.4g}" for label, value in finite.items())
        return [ErrorMessages.EXPONENT_BOUND.format(p=p, bound=bound, margin=MARGIN, terms=described)]

    @staticmethod
    def _step_kind(config: dict, kinds) -> List[str]:
        kind = config['learner']['step']['kind']
        if kind in kinds:
            return []
        return [ErrorMessages.STEP_KIND.format(target=config['target'], kinds=' or '.join(kinds), kind=kind)]

    @staticmethod
    def _drifting(config: dict) -> List[str]:
        sequence = config.get('sequence') or {}
        if sequence.get('kind') == SequenceKind.DRIFTING and sequence.get('v', 1.0) < 1.0:
            return []
        return [ErrorMessages.NEEDS_DRIFT.format(target=config['target'])]

    @staticmethod
    def regret(config: dict) -> List[str]:
        return ExponentValidator._step_kind(config, (StepKind.CONSTANT, StepKind.TUNED_CONSTANT))

    @staticmethod
    def convergence(config: dict) -> List[str]:
        errors = ExponentValidator._step_kind(config, (StepKind.POWER,))
        if errors:
            return errors
        e = exponents(config)
        errors = ExponentValidator._in_unit_interval('p', e['p'], closed_right=True)
        terms = {'1-v': 1 - e['v'], '1/2+s': 0.5 + e['s']}
        if e['lb'] is not None:
            terms['1-lb'] = 1 - e['lb']
        return errors + ExponentValidator._exceeds(e['p'], terms)

    @staticmethod
    def tracking(config: dict) -> List[str]:
        errors = ExponentValidator._step_kind(config, (StepKind.POWER,))
        if errors:
            return errors
        e = exponents(config)
        return ExponentValidator._in_unit_interval('p', e['p'], closed_right=False) + ExponentValidator._drifting(config)

    @staticmethod
    def bandit_convergence(config: dict) -> List[str]:
        errors = ExponentValidator._step_kind(config, (StepKind.POWER,))
        if errors:
            return errors
        e = exponents(config)
        errors = ExponentValidator._in_unit_interval('p', e['p'], closed_right=True)
        errors += ExponentValidator._in_unit_interval('q', e['q'], closed_right=True)
        terms = {'1-v': 1 - e['v'], '1-q': 1 - e['q'], '1/2+q': 0.5 + e['q']}
        return errors + ExponentValidator._exceeds(e['p'], terms)

    @staticmethod
    def bandit_tracking(config: dict) -> List[str]:
        errors = ExponentValidator._step_kind(config, (StepKind.POWER,))
        if errors:
            return errors
        e = exponents(config)
        errors = ExponentValidator._in_unit_interval('p', e['p'], closed_right=True)
        errors += ExponentValidator._in_unit_interval('q', e['q'], closed_right=True)
        return errors + ExponentValidator._drifting(config)

    @staticmethod
    def ergodic(config: dict) -> List[str]:
        if config['game']['family'] == GameFamily.BILINEAR_ZERO_SUM:
            return []
        return [ErrorMessages.NEEDS_BILINEAR.format(target=config['target'])]


RULES = {
    Target.REGRET: ExponentValidator.regret,
    Target.CONVERGENCE: ExponentValidator.convergence,
    Target.TRACKING: ExponentValidator.tracking,
    Target.DYNAMIC_REGRET: ExponentValidator.tracking,
    Target.BANDIT_TRACKING: ExponentValidator.bandit_tracking,
    Target.BANDIT_CONVERGENCE: ExponentValidator.bandit_convergence,
    Target.ERGODIC: ExponentValidator.ergodic,
}


class ExperimentConfigValidator:
    """Target-level validation of a parsed config"""

    @staticmethod
    def validate_learner(config: dict) -> Tuple[bool, str]:
        target, kind = config['target'], config['learner']['kind']
        expected = LearnerKind.BANDIT if target in BANDIT_TARGETS else LearnerKind.GRADIENT
        if kind != expected:
            return False, ErrorMessages.WRONG_LEARNER.format(target=target, kind=expected)
        return True, None

    @staticmethod
    def validate_exponents(config: dict) -> Dict[str, List[str]]:
        """
        Returns {'errors': [...], 'warnings': [...]}.

        With ``allow_unchecked_exponents`` violated exponent rules become
        warnings; learner mismatches stay errors.
        """
        result = {'errors': [], 'warnings': []}
        is_valid, error = ExperimentConfigValidator.validate_learner(config)
        if not is_valid:
            result['errors'].append(error)
            return result
        violations = RULES[config['target']](config)
        if violations and config.get('allow_unchecked_exponents'):
            logger.warning(ErrorMessages.UNCHECKED.format(errors='; '.join(violations)))
            result['warnings'].extend(violations)
        else:
            result['errors'].extend(violations)
        return result
