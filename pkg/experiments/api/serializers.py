from rest_framework import serializers

from games.enums import GameFamily, SequenceKind
from geometry.enums import RegularizerKind
from learner.enums import StepKind
from metrics.enums import Target
from experiments.enums import LearnerKind, ExperimentConstants
from experiments.models import ExperimentRun, SeedRun


class StrictSerializer(serializers.Serializer):
    """Rejects keys that are not declared fields"""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["Unknown key."] for key in unknown})
        return super().to_internal_value(data)


FAMILY_PARAMETERS = {
    GameFamily.BILINEAR_ZERO_SUM: ({'matrix'}, set()),
    GameFamily.KELLY_AUCTION: ({'gains', 'capacity', 'barrier', 'budgets'}, set()),
    GameFamily.QUADRATIC_NETWORK: ({'mu', 'beta', 'anchors'}, {'lower', 'upper'}),
    GameFamily.ONLINE_LINEAR: ({'coefficients'}, set()),
}


def float_list(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), allow_empty=False, **kwargs)


class GameSerializer(StrictSerializer):
    """Family plus the parameters that family takes"""
    family = serializers.ChoiceField(choices=[family.value for family in FAMILY_PARAMETERS])
    matrix = serializers.ListField(child=float_list(), required=False, allow_empty=False)
    gains = float_list(required=False)
    capacity = serializers.FloatField(required=False)
    barrier = serializers.FloatField(required=False)
    budgets = float_list(required=False)
    mu = serializers.FloatField(required=False)
    beta = serializers.FloatField(required=False)
    anchors = serializers.ListField(child=float_list(), required=False, allow_empty=False)
    lower = serializers.FloatField(required=False)
    upper = serializers.FloatField(required=False)
    coefficients = float_list(required=False)

    def validate(self, attrs):
        required, optional = FAMILY_PARAMETERS[attrs['family']]
        given = set(attrs) - {'family'}
        errors = {}
        for key in sorted(required - given):
            errors[key] = [f"Required for the {attrs['family']} family."]
        for key in sorted(given - required - optional):
            errors[key] = [f"Not a parameter of the {attrs['family']} family."]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class SequenceSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=SequenceKind.choices, default=SequenceKind.STATIC)
    v = serializers.FloatField(required=False)
    beta0 = serializers.FloatField(required=False)
    scale = serializers.FloatField(required=False)
    radius = serializers.FloatField(required=False)

    def validate(self, attrs):
        needed = {
            SequenceKind.STATIC: set(),
            SequenceKind.STABILIZING: {'v', 'beta0'},
            SequenceKind.DRIFTING: {'v', 'scale', 'radius'},
        }[attrs['kind']]
        missing = sorted(needed - set(attrs))
        if missing:
            raise serializers.ValidationError({key: [f"Required for {attrs['kind']} sequences."] for key in missing})
        return attrs


class StepSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=StepKind.choices)
    gamma0 = serializers.FloatField(required=False, min_value=0.0)
    p = serializers.FloatField(required=False)

    def validate(self, attrs):
        if attrs['kind'] != StepKind.TUNED_CONSTANT and 'gamma0' not in attrs:
            raise serializers.ValidationError({'gamma0': ["Required for this step kind."]})
        if attrs['kind'] == StepKind.POWER and 'p' not in attrs:
            raise serializers.ValidationError({'p': ["Required for power steps."]})
        return attrs


class NoiseSerializer(StrictSerializer):
    b0 = serializers.FloatField(default=0.0, min_value=0.0)
    lb = serializers.FloatField(default=None, allow_null=True)
    sigma0 = serializers.FloatField(default=0.0, min_value=0.0)
    s = serializers.FloatField(default=0.0, min_value=0.0)


class SpsaSerializer(StrictSerializer):
    delta0 = serializers.FloatField()
    q = serializers.FloatField()


class LearnerSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=LearnerKind.choices, default=LearnerKind.GRADIENT)
    step = StepSerializer()
    noise = NoiseSerializer(required=False)
    spsa = SpsaSerializer(required=False)

    def validate(self, attrs):
        if attrs['kind'] == LearnerKind.BANDIT:
            if 'spsa' not in attrs:
                raise serializers.ValidationError({'spsa': ["Required for bandit learners."]})
            if 'noise' in attrs:
                raise serializers.ValidationError({'noise': ["Bandit learners observe payoffs only."]})
        elif 'spsa' in attrs:
            raise serializers.ValidationError({'spsa': ["Only bandit learners use SPSA."]})
        return attrs


class ExperimentConfigSerializer(StrictSerializer):
    """The experiment config document; its validated data is the config echo"""
    name = serializers.SlugField(max_length=100, default='experiment')
    description = serializers.CharField(required=False, allow_blank=True)
    target = serializers.ChoiceField(choices=Target.choices)
    game = GameSerializer()
    sequence = SequenceSerializer(required=False)
    regularizer = serializers.ChoiceField(choices=RegularizerKind.choices, default=RegularizerKind.EUCLIDEAN)
    learner = LearnerSerializer()
    horizon = serializers.IntegerField(min_value=1)
    horizons = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False, allow_empty=False)
    seeds = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        allow_empty=False,
        default=lambda: list(ExperimentConstants.DEFAULT_SEEDS),
    )
    output_dir = serializers.CharField(default=None, allow_null=True)
    allow_unchecked_exponents = serializers.BooleanField(default=False)
    expected = serializers.DictField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        required=False,
    )

    def validate(self, attrs):
        if len(set(attrs['seeds'])) != len(attrs['seeds']):
            raise serializers.ValidationError({'seeds': ["Seeds must be distinct."]})
        horizons = attrs.get('horizons')
        if horizons is not None and (len(set(horizons)) != len(horizons) or max(horizons) != attrs['horizon']):
            raise serializers.ValidationError({'horizons': ["Horizons must be distinct and end at the horizon."]})
        for name, (low, high) in attrs.get('expected', {}).items():
            if low > high:
                raise serializers.ValidationError({'expected': [f"Range for '{name}' is empty."]})
        return attrs


class SeedRunSerializer(serializers.ModelSerializer):
    """Serializer for SeedRun model"""

    class Meta:
        model = SeedRun
        fields = ['id', 'seed', 'horizon', 'status', 'error', 'csv_path', 'metrics', 'created_at']
        read_only_fields = fields


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Serializer for ExperimentRun model"""
    completed_seeds = serializers.SerializerMethodField()

    class Meta:
        model = ExperimentRun
        fields = ['id', 'name', 'preset', 'target', 'status', 'partial', 'output_dir', 'completed_seeds', 'created_at']
        read_only_fields = fields

    def get_completed_seeds(self, obj):
        return obj.get_completed_seeds()


class ExperimentRunDetailSerializer(ExperimentRunSerializer):
    """ExperimentRun with its config echo, summary and seeds"""
    seed_runs = SeedRunSerializer(many=True, read_only=True)

    class Meta(ExperimentRunSerializer.Meta):
        fields = ExperimentRunSerializer.Meta.fields + ['config', 'summary', 'seed_runs']
        read_only_fields = fields
