from rest_framework import generics, status
from rest_framework.views import APIView

from experiments.api.serializers import ExperimentRunSerializer, ExperimentRunDetailSerializer
from experiments.enums import ErrorMessages, ResponseMessages
from experiments.models import ExperimentRun
from experiments.presets import get_preset, preset_names
from experiments.services import ExperimentService
from project.exceptions import ConfigurationError
from project.utils import success_response, error_response, domain_error_response, StandardizedResponseMixin


# Presets
class PresetListView(APIView):
    """Names and descriptions of the shipped presets"""
    permission_classes = []

    def get(self, request):
        presets = [
            {'name': name, 'target': preset['target'], 'description': preset.get('description', '')}
            for name, preset in ((name, get_preset(name)) for name in preset_names())
        ]
        return success_response(data=presets, message=f"Retrieved {len(presets)} items")


class PresetDetailView(APIView):
    """A preset's full config document"""
    permission_classes = []

    def get(self, request, name):
        try:
            return success_response(data=get_preset(name), message="Retrieved successfully")
        except ConfigurationError as e:
            return domain_error_response(e, status.HTTP_404_NOT_FOUND)


class ConfigValidateView(APIView):
    """
    Validate a config document without running it.
    Returns the config echo and any warnings.
    """
    permission_classes = []

    def post(self, request):
        result = ExperimentService.validate_config(request.data)
        if not result['is_valid']:
            return error_response(
                ErrorMessages.CONFIG_INVALID.format(errors='; '.join(result['errors'])),
                errors={'config': result['errors']},
            )
        message = ResponseMessages.CONFIG_VALID
        if result['warnings']:
            message = ResponseMessages.CONFIG_VALID_WITH_WARNINGS.format(count=len(result['warnings']))
        return success_response(data={'config': result['data'], 'warnings': result['warnings']}, message=message)


# Run registry
class ExperimentRunListView(StandardizedResponseMixin, generics.ListAPIView):
    """Recorded experiment runs, newest first"""
    queryset = ExperimentRun.objects.all()
    serializer_class = ExperimentRunSerializer
    permission_classes = []


class ExperimentRunDetailView(StandardizedResponseMixin, generics.RetrieveAPIView):
    """One run with its config echo, summary and seeds"""
    queryset = ExperimentRun.objects.prefetch_related('seed_runs')
    serializer_class = ExperimentRunDetailSerializer
    permission_classes = []
    not_found_message = ErrorMessages.RUN_NOT_FOUND
